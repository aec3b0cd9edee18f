"""
Scalar functionals of a field: mass, energies, the Weinstein ratio and its
L2 gradient, Pohozaev residuals and virial quantities.

Notation used throughout::

    N = int |u|^2                 T = 1/2 int |grad u|^2
    Q = int |u|^4                 D = <K * |u|^2, |u|^2>
    V = lambda1/2 Q + lambda2/2 D E = T + V

The Weinstein ratio is ``J(v) = ||grad v||^3 ||v|| / (-lambda1 Q - lambda2 D)``;
its denominator equals ``-2V``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import Field, _fftn, _ifftn
from .kernel import _apply_real

__all__ = [
    "Couplings",
    "Admissibility",
    "EnergyBreakdown",
    "NonpositiveDenominator",
    "admissible",
    "energy_breakdown",
    "weinstein_J",
    "weinstein_gradient",
    "weinstein_denominator",
    "pohozaev_residuals",
    "pohozaev_from_breakdown",
    "virial_rhs",
    "variance",
    "sharp_constant_ratio",
]

FOUR_PI_3 = 4 * math.pi / 3
EIGHT_PI_3 = 8 * math.pi / 3


class NonpositiveDenominator(ValueError):
    """The Weinstein denominator ``-lambda1 Q - lambda2 D`` is not positive."""


@dataclass(frozen=True)
class Couplings:
    """Contact strength ``lambda1`` and dipolar strength ``lambda2``."""

    lambda1: float
    lambda2: float

    def __post_init__(self):
        if not (math.isfinite(self.lambda1) and math.isfinite(self.lambda2)):
            raise ValueError("couplings must be finite")
        object.__setattr__(self, "lambda1", float(self.lambda1))
        object.__setattr__(self, "lambda2", float(self.lambda2))


@dataclass(frozen=True)
class Admissibility:
    ok: bool
    branch: str
    condition: str
    message: str

    def __bool__(self):
        return self.ok


def admissible(couplings):
    """Classify couplings against the necessary condition for standing waves.

    ``lambda1 < (4 pi/3) lambda2`` when ``lambda2 > 0`` and
    ``lambda1 < -(8 pi/3) lambda2`` when ``lambda2 < 0``.  With no dipolar
    term the condition degenerates to the focusing requirement ``lambda1 < 0``.
    """
    l1, l2 = couplings.lambda1, couplings.lambda2
    if l2 > 0:
        bound, branch = FOUR_PI_3 * l2, "lambda2>0"
        condition = f"lambda1 < (4 pi/3) lambda2 = {bound:.6f}"
    elif l2 < 0:
        bound, branch = -EIGHT_PI_3 * l2, "lambda2<0"
        condition = f"lambda1 < -(8 pi/3) lambda2 = {bound:.6f}"
    else:
        bound, branch = 0.0, "lambda2=0"
        condition = "lambda1 < 0 (no dipolar term)"
    ok = l1 < bound
    verdict = "admissible" if ok else "not admissible"
    message = f"(lambda1, lambda2) = ({l1:g}, {l2:g}) is {verdict}: branch {branch} requires {condition}"
    return Admissibility(ok, branch, condition, message)


@dataclass(frozen=True)
class EnergyBreakdown:
    N: float
    T: float
    Q: float
    D: float
    Vq: float
    Vdd: float

    @property
    def V(self):
        return self.Vq + self.Vdd

    @property
    def E(self):
        return self.T + self.V


def _core(values, grid, kernel):
    """Shared pieces: squared norms, |v|^2, K*|v|^2 and the spectrum of v."""
    dv = grid.dv
    rho = values.real**2 + values.imag**2 if np.iscomplexobj(values) else values**2
    vh = _fftn(values)
    N = dv * rho.sum()
    G = dv / grid.size * np.sum(grid.k2 * (vh.real**2 + vh.imag**2))
    Q = dv * np.sum(rho * rho)
    if kernel is None:
        Krho = np.zeros_like(rho)
        D = 0.0
    else:
        Krho = _apply_real(kernel, rho)
        D = dv * np.sum(Krho * rho)
    return N, G, Q, D, rho, Krho, vh


def _check_kernel(field, kernel):
    if kernel is not None and kernel.grid != field.grid:
        raise ValueError("field and kernel live on different grids")


def energy_breakdown(u, kernel, couplings):
    """All energy scalars of ``u`` in one pass."""
    _check_kernel(u, kernel)
    N, G, Q, D, *_ = _core(u.values, u.grid, kernel)
    return EnergyBreakdown(
        N=float(N),
        T=float(0.5 * G),
        Q=float(Q),
        D=float(D),
        Vq=float(0.5 * couplings.lambda1 * Q),
        Vdd=float(0.5 * couplings.lambda2 * D),
    )


def weinstein_denominator(Q, D, couplings):
    return -couplings.lambda1 * Q - couplings.lambda2 * D


def _check_denominator(den, Q, couplings):
    # isotropic densities give D ~ 1e-16 Q; treat that level as zero
    scale = (abs(couplings.lambda1) + EIGHT_PI_3 * abs(couplings.lambda2)) * Q
    if not den > 1e-10 * scale or scale == 0:
        raise NonpositiveDenominator(
            f"Weinstein denominator {den:.3e} is not positive; the field is outside the cone "
            "where J is defined (bad initial guess or inadmissible couplings)"
        )


def weinstein_J(v, kernel, couplings):
    """``||grad v||^3 ||v|| / (-lambda1 ||v||_4^4 - lambda2 <K|v|^2, |v|^2>)``."""
    _check_kernel(v, kernel)
    N, G, Q, D, *_ = _core(v.values, v.grid, kernel)
    den = weinstein_denominator(Q, D, couplings)
    _check_denominator(den, Q, couplings)
    return float(G**1.5 * math.sqrt(N) / den)


def _weinstein_parts(values, grid, kernel, couplings):
    """J and its L2 gradient as arrays; used by the minimizer's inner loop."""
    N, G, Q, D, rho, Krho, vh = _core(values, grid, kernel)
    den = weinstein_denominator(Q, D, couplings)
    _check_denominator(den, Q, couplings)
    b1, b2 = math.sqrt(N), math.sqrt(G)
    J = b2**3 * b1 / den
    neg_lap = _ifftn(grid.k2 * vh)
    if not np.iscomplexobj(values):
        neg_lap = neg_lap.real
    nonlin = (couplings.lambda1 * rho + couplings.lambda2 * Krho) * values
    g = (3 * b1 * b2 * neg_lap + b2**3 / b1 * values + 4 * J * nonlin) / den
    return J, g, den


def weinstein_gradient(v, kernel, couplings):
    """L2 gradient ``g`` of J with ``Re <g, eta> = dJ(v)[eta]``.

    ``g = (-3 b1 b2 Lap v + b2^3/b1 v + 4 J (lambda1 |v|^2 v + lambda2 (K*|v|^2) v)) / Den``
    with ``b1 = ||v||``, ``b2 = ||grad v||`` and ``Den = -lambda1 Q - lambda2 D``.
    """
    _check_kernel(v, kernel)
    _, g, _ = _weinstein_parts(v.values, v.grid, kernel, couplings)
    return Field(v.grid, g)


def pohozaev_from_breakdown(bd, omega):
    """Relative residuals of ``T = 3 omega N``, ``V = -2 omega N`` and ``E = T/3``."""
    wN = omega * bd.N
    r1 = abs(bd.T - 3 * wN) / max(bd.T, 3 * wN)
    r2 = abs(bd.V + 2 * wN) / max(abs(bd.V), 2 * wN)
    r3 = abs(bd.E - bd.T / 3) / max(abs(bd.E), bd.T / 3)
    return r1, r2, r3


def pohozaev_residuals(u, omega, kernel, couplings):
    return pohozaev_from_breakdown(energy_breakdown(u, kernel, couplings), omega)


def virial_rhs(psi, kernel, couplings):
    """Second time derivative of the variance: ``2T + 3V``."""
    bd = energy_breakdown(psi, kernel, couplings)
    return 2 * bd.T + 3 * bd.V


def variance(psi, center=(0.0, 0.0, 0.0)):
    """``I = int |x - center|^2 / 2 |psi|^2``, with x measured from the box center."""
    g = psi.grid
    x1, x2, x3 = g.coords
    r2 = (x1 - center[0]) ** 2 + (x2 - center[1]) ** 2 + (x3 - center[2]) ** 2
    return float(0.5 * g.dv * np.sum(r2 * np.abs(psi.values) ** 2))


def sharp_constant_ratio(f, kernel, couplings):
    """``(-lambda1 Q - lambda2 D) / (||grad f||^3 ||f||)``; equals ``1/J(f)`` and may be <= 0."""
    _check_kernel(f, kernel)
    N, G, Q, D, *_ = _core(f.values, f.grid, kernel)
    return float(weinstein_denominator(Q, D, couplings) / (G**1.5 * math.sqrt(N)))
