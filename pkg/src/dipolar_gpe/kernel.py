"""
Dipolar convolution ``rho -> K * rho`` with ``K(x) = (1 - 3 cos^2 theta) / |x|^3``.

The operator is diagonal in Fourier space with the bounded, degree-zero
symbol ``(4 pi / 3)(3 cos^2 Theta - 1)``, where ``Theta`` is the angle between
the frequency and the dipole axis.  The symbol takes values in
``[-4 pi / 3, 8 pi / 3]``; at the zero frequency it is set to its angular
mean, zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.fft as sfft

from .grid import Field, Grid, _fftn, _ifftn

__all__ = [
    "DEFAULT_AXIS",
    "SYMBOL_MIN",
    "SYMBOL_MAX",
    "SpectralKernel",
    "unit_axis",
    "build_kernel",
    "apply",
    "apply_via_poisson",
    "kernel_bounds",
]

DEFAULT_AXIS = (0.0, 0.0, 1.0)
SYMBOL_MIN = -4 * np.pi / 3
SYMBOL_MAX = 8 * np.pi / 3

# imaginary residue allowed after the inverse transform, relative to ||rho||
_RESIDUE_TOL = 1e-10


def unit_axis(axis):
    """Validate a dipole axis and return it as a normalized 3-tuple."""
    a = np.asarray(axis, dtype=float).reshape(-1)
    if a.shape != (3,) or not np.all(np.isfinite(a)):
        raise ValueError("axis must be a unit vector with three components")
    length = np.linalg.norm(a)
    if length == 0:
        raise ValueError("axis must be a unit vector, got (0, 0, 0)")
    if abs(length - 1) > 1e-12:
        a = a / length
    return tuple(float(c) for c in a)


def symbol(xi, axis=DEFAULT_AXIS):
    """Continuous symbol at frequency vectors ``xi`` (last axis of length 3)."""
    xi = np.asarray(xi, dtype=float)
    n = np.asarray(unit_axis(axis))
    xi2 = np.sum(xi**2, axis=-1)
    proj = xi @ n
    with np.errstate(invalid="ignore", divide="ignore"):
        cos2 = np.where(xi2 > 0, proj**2 / np.where(xi2 > 0, xi2, 1.0), 1.0 / 3.0)
    return 4 * np.pi / 3 * (3 * cos2 - 1)


@dataclass(frozen=True, eq=False)
class SpectralKernel:
    """Dipolar symbol sampled on the frequency lattice of ``grid`` (FFT order)."""

    grid: Grid
    axis: tuple[float, float, float]
    values: np.ndarray

    @property
    def is_canonical(self):
        return self.axis == DEFAULT_AXIS

    @cached_property
    def half_values(self):
        """Symbol on the half lattice used by real transforms."""
        return np.ascontiguousarray(self.values[..., : self.grid.n[2] // 2 + 1])


def build_kernel(grid, axis=DEFAULT_AXIS):
    """Sample the dipolar symbol on the grid's lattice; the zero mode is 0."""
    axis = unit_axis(axis)
    k1, k2, k3 = grid.kvec
    proj = k1 * axis[0] + k2 * axis[1] + k3 * axis[2]
    kk = grid.k2
    safe = np.where(kk > 0, kk, 1.0)
    vals = 4 * np.pi / 3 * (3 * proj**2 / safe - 1)
    vals[0, 0, 0] = 0.0
    # Nyquist planes pair a mode with itself under xi -> -xi; averaging the two
    # symbol samples keeps the symbol Hermitian on the lattice so real densities
    # map to real potentials for any axis.  No-op for coordinate axes.
    vals = 0.5 * (vals + _negate_lattice(vals))
    vals = np.clip(vals, SYMBOL_MIN, SYMBOL_MAX)
    vals.setflags(write=False)
    return SpectralKernel(grid, axis, vals)


def _negate_lattice(a):
    """Array indexed at ``-m mod n`` on every axis."""
    for ax in range(3):
        a = np.roll(np.flip(a, axis=ax), 1, axis=ax)
    return a


def _apply_array(kernel, rho):
    return _ifftn(kernel.values * _fftn(rho))


def _apply_real(kernel, rho):
    """``K * rho`` for a real density array through real transforms."""
    rh = sfft.rfftn(rho, workers=-1)
    return sfft.irfftn(kernel.half_values * rh, s=rho.shape, workers=-1)


def apply(kernel, rho):
    """Dipolar potential ``K * rho`` of a real density, as a real field."""
    if rho.grid != kernel.grid:
        raise ValueError("density and kernel live on different grids")
    if rho.is_complex:
        if np.max(np.abs(rho.values.imag)) > 0:
            raise ValueError("density must be real")
        rho = Field(rho.grid, rho.values.real)
    out = _apply_array(kernel, rho.values)
    scale = np.sqrt(np.sum(rho.values**2))
    residue = np.sqrt(np.sum(out.imag**2))
    if residue > _RESIDUE_TOL * max(scale, np.finfo(float).tiny):
        raise ArithmeticError(
            f"imaginary residue {residue:.3e} in dipolar potential; symbol is not Hermitian on the lattice"
        )
    return Field(rho.grid, out.real)


def apply_via_poisson(rho, axis=DEFAULT_AXIS):
    """Dipolar potential through the Poisson decomposition.

    ``K * rho = -(4 pi / 3) rho - d^2 Phi / dx3^2`` with ``-Lap Phi = 4 pi rho``.
    Only the coordinate axis x3 is supported.  The zero mode of the curvature
    term takes the angular mean of ``xi3^2 / |xi|^2`` (one third), which makes
    the result consistent with a zero symbol at the zero frequency.
    """
    if unit_axis(axis) != DEFAULT_AXIS:
        raise ValueError("Poisson decomposition requires the dipole axis (0, 0, 1)")
    g = rho.grid
    r = rho.values.real if rho.is_complex else rho.values
    rh = _fftn(r)
    kk = g.k2
    phi_h = np.where(kk > 0, 4 * np.pi * rh / np.where(kk > 0, kk, 1.0), 0.0)
    k3 = g.kvec[2]
    curv_h = k3**2 * phi_h
    curv_h[0, 0, 0] = 4 * np.pi / 3 * rh[0, 0, 0]
    out = -4 * np.pi / 3 * r + _ifftn(curv_h).real
    return Field(g, out)


def kernel_bounds(kernel):
    """(min, max) of the sampled symbol, excluding the zero frequency."""
    vals = kernel.values.ravel()[1:]
    return float(vals.min()), float(vals.max())
