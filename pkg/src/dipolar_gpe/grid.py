"""
Periodic box discretization.

The box [-L1/2, L1/2) x [-L2/2, L2/2) x [-L3/2, L3/2) is sampled at
``x_j = -L/2 + j*h`` along each axis, so the box center is a grid point and
the reflection ``x -> -x`` maps the lattice onto itself.  Arrays are indexed
``(i1, i2, i3)`` with x1 slowest and x3 fastest (C order).

Fourier conventions
-------------------
The forward transform approximates the continuous transform

    f_hat(xi) = int f(x) exp(-i xi.x) dx

by ``dv * exp(-i xi.x_0) * DFT(f)``, where ``x_0`` is the lower box corner.
The inverse divides by the box volume.  Spectral arrays are stored in FFT
order (zero frequency first).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.fft as sfft

__all__ = [
    "Grid",
    "Field",
    "make_grid",
    "transform",
    "inverse_transform",
    "integrate",
    "inner_product",
    "norm",
    "gradient_norm_sq",
    "laplacian",
    "derivative",
    "gaussian_field",
]


def _fftn(a):
    return sfft.fftn(a, workers=-1)


def _ifftn(a):
    return sfft.ifftn(a, workers=-1)


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on a 3-D box.

    Parameters
    ----------
    n : tuple of int
        Points per axis; even and at least 4.
    L : tuple of float
        Box edge lengths.
    """

    n: tuple[int, int, int]
    L: tuple[float, float, float]

    def __post_init__(self):
        if len(self.n) != 3 or len(self.L) != 3:
            raise ValueError("grid needs three point counts and three lengths")
        for ni in self.n:
            if int(ni) != ni or ni < 4 or ni % 2:
                raise ValueError(f"points per axis must be even integers >= 4, got {self.n}")
        for Li in self.L:
            if not np.isfinite(Li) or Li <= 0:
                raise ValueError(f"box lengths must be positive, got {self.L}")
        object.__setattr__(self, "n", tuple(int(ni) for ni in self.n))
        object.__setattr__(self, "L", tuple(float(Li) for Li in self.L))

    @property
    def shape(self):
        return self.n

    @property
    def size(self):
        return self.n[0] * self.n[1] * self.n[2]

    @property
    def h(self):
        return tuple(Li / ni for Li, ni in zip(self.L, self.n))

    @property
    def dv(self):
        h1, h2, h3 = self.h
        return h1 * h2 * h3

    @property
    def volume(self):
        return self.L[0] * self.L[1] * self.L[2]

    @cached_property
    def axes(self):
        """1-D coordinate arrays, measured from the box center."""
        return tuple(-Li / 2 + np.arange(ni) * (Li / ni) for Li, ni in zip(self.L, self.n))

    @cached_property
    def coords(self):
        """Broadcastable coordinate arrays of shapes (n1,1,1), (1,n2,1), (1,1,n3)."""
        x1, x2, x3 = self.axes
        return x1[:, None, None], x2[None, :, None], x3[None, None, :]

    @cached_property
    def r2(self):
        x1, x2, x3 = self.coords
        return x1**2 + x2**2 + x3**2

    @cached_property
    def modes(self):
        """Integer mode numbers per axis in FFT order, each in [-n/2, n/2 - 1]."""
        return tuple(np.fft.fftfreq(ni, d=1.0 / ni).round().astype(int) for ni in self.n)

    @cached_property
    def freqs(self):
        """1-D angular frequencies ``2 pi m / L`` per axis in FFT order."""
        return tuple(2 * np.pi * m / Li for m, Li in zip(self.modes, self.L))

    @cached_property
    def kvec(self):
        k1, k2, k3 = self.freqs
        return k1[:, None, None], k2[None, :, None], k3[None, None, :]

    @cached_property
    def k2(self):
        k1, k2, k3 = self.kvec
        return k1**2 + k2**2 + k3**2

    @cached_property
    def _corner_phase(self):
        # exp(-i xi.x_0) with x_0 = -L/2 reduces to (-1)^(m1+m2+m3)
        m1, m2, m3 = self.modes
        parity = (m1[:, None, None] + m2[None, :, None] + m3[None, None, :]) % 2
        return 1.0 - 2.0 * parity

    def scaled(self, factor):
        """Same point counts, box lengths multiplied by ``factor``."""
        return Grid(self.n, tuple(Li * factor for Li in self.L))

    def zeros(self, dtype=complex):
        return Field(self, np.zeros(self.n, dtype=dtype))


def make_grid(n, L):
    """Build a :class:`Grid`; rejects odd or tiny point counts and nonpositive lengths."""
    return Grid(tuple(n), tuple(L))


@dataclass(frozen=True, eq=False)
class Field:
    """Samples of a real or complex function on a grid."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values)
        if values.shape != self.grid.shape:
            raise ValueError(f"sample shape {values.shape} does not match grid {self.grid.shape}")
        if not np.all(np.isfinite(values)):
            raise FloatingPointError("field contains non-finite samples")
        object.__setattr__(self, "values", values)

    @property
    def is_complex(self):
        return np.iscomplexobj(self.values)

    def with_values(self, values):
        return Field(self.grid, values)

    def on_grid(self, grid):
        """Reinterpret the same samples on another grid with the same shape."""
        return Field(grid, self.values)

    def scaled(self, q):
        return Field(self.grid, q * self.values)

    def density(self):
        return Field(self.grid, np.abs(self.values) ** 2)

    def conj(self):
        return Field(self.grid, np.conj(self.values))


def _check_same_grid(*fields):
    g = fields[0].grid
    for f in fields[1:]:
        if f.grid != g:
            raise ValueError("fields live on different grids")
    return g


def transform(field):
    """Forward transform, approximating the continuous Fourier transform."""
    g = field.grid
    return g.dv * g._corner_phase * _fftn(field.values)


def inverse_transform(grid, spectrum):
    """Inverse of :func:`transform`; returns a complex :class:`Field`."""
    values = _ifftn(spectrum * grid._corner_phase) / grid.dv
    return Field(grid, values)


def integrate(f):
    """Rectangle-rule integral of the samples over the box."""
    total = f.grid.dv * np.sum(f.values)
    return complex(total) if f.is_complex else float(total)


def inner_product(f, g):
    """``int f conj(g) dx``; conjugate-linear in the second argument."""
    grid = _check_same_grid(f, g)
    return grid.dv * np.vdot(g.values, f.values)


def norm(f):
    return float(np.sqrt(f.grid.dv * np.sum(np.abs(f.values) ** 2)))


def gradient_norm_sq(f):
    """``||grad f||_2^2`` by spectral differentiation, evaluated via Parseval."""
    g = f.grid
    fh = _fftn(f.values)
    return float(g.dv / g.size * np.sum(g.k2 * np.abs(fh) ** 2))


def laplacian(f):
    g = f.grid
    out = _ifftn(-g.k2 * _fftn(f.values))
    if not f.is_complex:
        out = out.real
    return Field(g, out)


def derivative(f, axis):
    """Spectral partial derivative along ``axis`` (0, 1 or 2)."""
    g = f.grid
    k = g.kvec[axis].astype(complex)
    # odd derivative of the unpaired Nyquist mode is set to zero
    k = np.where(g.modes[axis].reshape(k.shape) == -g.n[axis] // 2, 0.0, k)
    out = _ifftn(1j * k * _fftn(f.values))
    if not f.is_complex:
        out = out.real
    return Field(g, out)


def gaussian_field(grid, amplitude=1.0, widths=(1.0, 1.0, 1.0), center=(0.0, 0.0, 0.0)):
    """Samples of ``A exp(-sum (x_i - c_i)^2 / (2 sigma_i^2))`` as a complex field."""
    widths = tuple(float(s) for s in widths)
    if len(widths) != 3 or min(widths) <= 0:
        raise ValueError(f"Gaussian widths must be positive, got {widths}")
    for c, Li in zip(center, grid.L):
        if not -Li / 2 <= c < Li / 2:
            raise ValueError(f"center {tuple(center)} lies outside the box")
    x1, x2, x3 = grid.coords
    arg = (
        (x1 - center[0]) ** 2 / (2 * widths[0] ** 2)
        + (x2 - center[1]) ** 2 / (2 * widths[1] ** 2)
        + (x3 - center[2]) ** 2 / (2 * widths[2] ** 2)
    )
    return Field(grid, (amplitude * np.exp(-arg)).astype(complex))
