"""
Time evolution of

    i d_t psi = -1/2 Lap psi + lambda1 |psi|^2 psi + lambda2 (K * |psi|^2) psi  [+ |x|^2/2 psi]

by Strang splitting on the periodic grid, together with Galilean boosts,
virial diagnostics and a resolution monitor for collapsing data.

Each step applies a half step of the local phase, an exact kinetic step in
frequency space and another half local step.  The local step only rotates
the phase, so ``|psi|^2`` and with it the dipolar potential stay fixed during
it and the substep is exact.  Both substeps are isometries, hence the mass
is conserved up to rounding.

A standing wave ``u`` of frequency ``omega`` evolves as ``exp(i omega t) u``.
Running the scheme on ``conj(psi)`` and conjugating the result steps backward
in time (see :func:`time_reverse`).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.fft as sfft
from scipy.optimize import bisect

from .functionals import Couplings, admissible, energy_breakdown
from .grid import Field, Grid, _fftn, _ifftn
from .kernel import _apply_real
from .ground_state import NotAdmissible, oriented_gaussian

__all__ = [
    "DIAGNOSTIC_COLUMNS",
    "BlowUpDetected",
    "NonfiniteField",
    "TrapActive",
    "InsufficientSnapshots",
    "ShapeNotFocusing",
    "PropagationConfig",
    "Trajectory",
    "BoostTrack",
    "VirialSeries",
    "NegativeEnergyState",
    "split_step",
    "time_reverse",
    "translate",
    "snap_velocity",
    "boost",
    "virial_check",
    "make_negative_energy_state",
    "center_of_mass",
    "spectral_tail_fraction",
]

log = logging.getLogger(__name__)

DIAGNOSTIC_COLUMNS = ("t", "N", "T", "Vq", "Vdd", "E", "I", "xcom1", "xcom2", "xcom3", "max_density")


class BlowUpDetected(RuntimeError):
    """The resolution monitor tripped; ``trajectory`` holds the truncated run."""

    def __init__(self, message, trajectory):
        super().__init__(message)
        self.trajectory = trajectory


class NonfiniteField(FloatingPointError):
    """The field picked up NaN or Inf samples; ``trajectory`` holds the run so far."""

    def __init__(self, message, trajectory):
        super().__init__(message)
        self.trajectory = trajectory


class TrapActive(ValueError):
    """The virial identity is only available for untrapped evolution."""


class InsufficientSnapshots(ValueError):
    """Fewer than three uniformly spaced samples of the variance."""


class ShapeNotFocusing(ValueError):
    """The trial shape has a nonnegative interaction energy, so no amplitude makes E < 0."""


@dataclass(frozen=True)
class PropagationConfig:
    """Settings of a split-step run.

    Parameters
    ----------
    dt : float
        Time step.
    steps : int
        Number of steps.
    snapshot_stride : int or None
        Keep the field every this many steps; ``None`` keeps only the first
        and last field.
    diag_stride : int
        Record the diagnostics every this many steps.  The final step is
        always recorded.
    trap : bool
        Add the harmonic confinement ``|x|^2 / 2`` about the box center.
    max_amplification : float
        Trip the monitor when the peak density exceeds its initial value by
        this factor.
    tail_fraction : float
        Trip the monitor when this fraction of the mass sits in the upper
        third of the modes along some axis.
    """

    dt: float = 1e-3
    steps: int = 1000
    snapshot_stride: int | None = None
    diag_stride: int = 1
    trap: bool = False
    max_amplification: float = 1e4
    tail_fraction: float = 1e-4

    def __post_init__(self):
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ValueError(f"dt must be positive, got {self.dt}")
        if int(self.steps) != self.steps or self.steps < 1:
            raise ValueError(f"steps must be a positive integer, got {self.steps}")
        if self.snapshot_stride is not None and self.snapshot_stride < 1:
            raise ValueError("snapshot_stride must be at least 1")
        if self.diag_stride < 1:
            raise ValueError("diag_stride must be at least 1")
        if not self.max_amplification > 1:
            raise ValueError("max_amplification must exceed 1")
        if not 0 < self.tail_fraction < 1:
            raise ValueError("tail_fraction must lie in (0, 1)")


@dataclass
class Trajectory:
    """Recorded output of :func:`split_step`.

    ``diagnostics`` maps each name of :data:`DIAGNOSTIC_COLUMNS` to an array
    with one entry per recorded step.  With the trap on, ``E`` includes the
    trap energy, which equals ``I`` for a trap centered on the box.
    """

    grid: Grid
    couplings: Couplings
    config: PropagationConfig
    snapshots: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)
    steps_taken: int = 0
    blew_up: bool = False
    reason: str = ""

    @property
    def times(self):
        return np.array([t for t, _ in self.snapshots])

    @property
    def final(self):
        return self.snapshots[-1][1]

    def column(self, name):
        return self.diagnostics[name]

    def rows(self):
        cols = [self.diagnostics[c] for c in DIAGNOSTIC_COLUMNS]
        return [tuple(float(c[i]) for c in cols) for i in range(len(cols[0]))]


def _check_inputs(psi, kernel, couplings):
    if couplings.lambda2 != 0:
        if kernel is None:
            raise ValueError("a dipolar coupling needs a kernel")
        if kernel.grid != psi.grid:
            raise ValueError("field and kernel live on different grids")


def _local_potential(rho, kernel, couplings, trap_pot):
    W = couplings.lambda1 * rho
    Krho = None
    if couplings.lambda2 != 0:
        Krho = _apply_real(kernel, rho)
        W = W + couplings.lambda2 * Krho
    if trap_pot is not None:
        W = W + trap_pot
    return W, Krho


def _circular_mean(grid, rho):
    """Center of mass per axis on the circle, in box-centered coordinates."""
    out = []
    for ax in range(3):
        other = tuple(i for i in range(3) if i != ax)
        marg = rho.sum(axis=other)
        L = grid.L[ax]
        theta = 2 * np.pi * (grid.axes[ax] + L / 2) / L
        ang = math.atan2(float(marg @ np.sin(theta)), float(marg @ np.cos(theta)))
        out.append((L * ang / (2 * np.pi)) % L - L / 2)
    return np.array(out)


def center_of_mass(psi):
    """Circular-mean center of ``|psi|^2``, a point of ``[-L/2, L/2)`` per axis."""
    return _circular_mean(psi.grid, np.abs(psi.values) ** 2)


def _tail_fraction(grid, spec_power):
    total = float(spec_power.sum())
    if total == 0:
        return 0.0
    worst = 0.0
    for ax in range(3):
        m = np.abs(grid.modes[ax])
        high = m > grid.n[ax] // 3
        other = tuple(i for i in range(3) if i != ax)
        marg = spec_power.sum(axis=other)
        worst = max(worst, float(marg[high].sum()) / total)
    return worst


def spectral_tail_fraction(psi):
    """Largest fraction of ``sum |psi_hat|^2`` in the upper third of modes along one axis."""
    vh = _fftn(psi.values)
    return _tail_fraction(psi.grid, vh.real**2 + vh.imag**2)


def split_step(psi0, kernel, couplings, config=None):
    """Propagate ``psi0`` by Strang splitting.

    Parameters
    ----------
    psi0 : Field
        Initial data; real samples are promoted to complex.
    kernel : SpectralKernel or None
        Dipolar symbol on the grid of ``psi0``; may be ``None`` when
        ``lambda2 == 0``.
    couplings : Couplings
        Any couplings; no admissibility condition is needed for evolution.
    config : PropagationConfig, optional

    Returns
    -------
    Trajectory

    Raises
    ------
    BlowUpDetected
        The density amplification or the spectral tail passed its threshold.
        The exception carries the trajectory up to and including that step.
    NonfiniteField
        NaN or Inf appeared in the field.
    """
    config = config or PropagationConfig()
    _check_inputs(psi0, kernel, couplings)
    grid = psi0.grid
    dt = config.dt
    psi = np.array(psi0.values, dtype=complex)
    kin = np.exp(-0.5j * dt * grid.k2)
    trap_pot = 0.5 * grid.r2 if config.trap else None
    half_r2 = 0.5 * grid.r2

    traj = Trajectory(grid, couplings, config)
    diag = {c: [] for c in DIAGNOSTIC_COLUMNS}
    com_prev = None
    com_unwrapped = None

    rho = psi.real**2 + psi.imag**2
    W, Krho = _local_potential(rho, kernel, couplings, trap_pot)
    peak0 = float(rho.max())
    if not peak0 > 0:
        raise ValueError("initial field is identically zero")

    def record(step):
        nonlocal com_prev, com_unwrapped
        dv = grid.dv
        vh = _fftn(psi)
        power = vh.real**2 + vh.imag**2
        N = dv * float(rho.sum())
        T = 0.5 * dv / grid.size * float(np.sum(grid.k2 * power))
        Q = dv * float(np.sum(rho * rho))
        D = dv * float(np.sum(Krho * rho)) if Krho is not None else 0.0
        Vq = 0.5 * couplings.lambda1 * Q
        Vdd = 0.5 * couplings.lambda2 * D
        I = dv * float(np.sum(half_r2 * rho))
        E = T + Vq + Vdd + (I if config.trap else 0.0)
        com = _circular_mean(grid, rho)
        if com_prev is None:
            com_unwrapped = com.copy()
        else:
            L = np.asarray(grid.L)
            com_unwrapped = com_unwrapped + (com - com_prev + L / 2) % L - L / 2
        com_prev = com
        row = (step * dt, N, T, Vq, Vdd, E, I, *com_unwrapped, float(rho.max()))
        for c, val in zip(DIAGNOSTIC_COLUMNS, row):
            diag[c].append(val)
        return _tail_fraction(grid, power)

    def finish():
        traj.diagnostics = {c: np.array(v) for c, v in diag.items()}

    def snapshot(step):
        traj.snapshots.append((step * dt, Field(grid, psi.copy())))

    record(0)
    snapshot(0)
    phase = np.exp(-0.5j * dt * W)
    stride = config.snapshot_stride
    for step in range(1, config.steps + 1):
        psi *= phase
        psi = sfft.ifftn(kin * sfft.fftn(psi, workers=-1), workers=-1)
        rho = psi.real**2 + psi.imag**2
        W, Krho = _local_potential(rho, kernel, couplings, trap_pot)
        phase = np.exp(-0.5j * dt * W)
        psi *= phase
        traj.steps_taken = step

        peak = float(rho.max())
        last = step == config.steps
        if not math.isfinite(peak):
            finish()
            traj.reason = f"non-finite field at step {step}"
            raise NonfiniteField(traj.reason, traj)
        amplified = peak > config.max_amplification * peak0
        if amplified or last or step % config.diag_stride == 0:
            tail = record(step)
            reason = ""
            if amplified:
                reason = f"peak density grew by {peak / peak0:.3e} (limit {config.max_amplification:g})"
            elif tail > config.tail_fraction:
                reason = f"spectral tail fraction {tail:.3e} exceeds {config.tail_fraction:g}"
            if reason:
                snapshot(step)
                finish()
                traj.blew_up = True
                traj.reason = f"{reason} at t = {step * dt:.6g}"
                log.info("blow-up monitor: %s", traj.reason)
                raise BlowUpDetected(traj.reason, traj)
        if last or (stride is not None and step % stride == 0):
            snapshot(step)
    finish()
    return traj


def time_reverse(psi):
    """Complex conjugate of ``psi``.

    The equation is invariant under ``psi(t) -> conj(psi(-t))``, and so is the
    symmetric splitting: conjugating, stepping forward and conjugating again
    steps backward.
    """
    return Field(psi.grid, np.conj(psi.values))


def translate(psi, shift):
    """Samples of ``psi(x - shift)`` from the trigonometric interpolant (periodic)."""
    g = psi.grid
    vh = _fftn(psi.values)
    for ax in range(3):
        k = g.freqs[ax]
        f = np.exp(-1j * k * shift[ax])
        nyq = g.modes[ax] == -g.n[ax] // 2
        # keep the unpaired mode's interpolant real
        f[nyq] = np.cos(k[nyq] * shift[ax])
        shape = [1, 1, 1]
        shape[ax] = -1
        vh = vh * f.reshape(shape)
    out = _ifftn(vh)
    if not np.iscomplexobj(psi.values):
        out = out.real
    return Field(g, out)


def snap_velocity(velocity, grid):
    """Nearest velocity with every component in ``(2 pi / L_i) Z``."""
    v = np.asarray(velocity, dtype=float).reshape(-1)
    if v.shape != (3,) or not np.all(np.isfinite(v)):
        raise ValueError("velocity must have three finite components")
    unit = 2 * np.pi / np.asarray(grid.L)
    return tuple(float(x) for x in np.round(v / unit) * unit)


@dataclass(frozen=True)
class BoostTrack:
    """Analytic motion of a boosted standing wave.

    ``psi(t, x) = u(x - v t) exp(i (v.x - |v|^2 t / 2 + omega t))``.
    """

    profile: Field
    omega: float
    velocity: tuple
    requested: tuple
    center0: tuple

    @property
    def snapped(self):
        return self.velocity != self.requested

    def position(self, t):
        """Center of mass at time ``t``, unwrapped (not reduced modulo the box)."""
        return np.asarray(self.center0) + np.asarray(self.velocity) * t

    def position_in_box(self, t):
        L = np.asarray(self.profile.grid.L)
        return (self.position(t) + L / 2) % L - L / 2

    def phase(self, t):
        """Phase of ``psi`` relative to ``u`` at the moving center."""
        v = np.asarray(self.velocity)
        return float(v @ self.position(t) - v @ v * t / 2 + self.omega * t)

    def field(self, t):
        g = self.profile.grid
        v = self.velocity
        moved = translate(self.profile, tuple(vi * t for vi in v)).values
        x1, x2, x3 = g.coords
        arg = v[0] * x1 + v[1] * x2 + v[2] * x3 - (v[0] ** 2 + v[1] ** 2 + v[2] ** 2) * t / 2 + self.omega * t
        return Field(g, moved * np.exp(1j * arg))


def boost(u, omega, velocity):
    """Galilean boost of a standing wave.

    The velocity is snapped to the frequency lattice so that ``exp(i v.x)``
    is periodic on the box; the snapped value is logged and stored on the
    returned track.

    Returns
    -------
    psi0 : Field
        ``u exp(i v.x)``.
    track : BoostTrack
    """
    requested = tuple(float(x) for x in velocity)
    v = snap_velocity(requested, u.grid)
    if v != requested:
        log.info("velocity %s snapped to lattice value %s", requested, v)
    g = u.grid
    x1, x2, x3 = g.coords
    psi0 = Field(g, u.values * np.exp(1j * (v[0] * x1 + v[1] * x2 + v[2] * x3)))
    track = BoostTrack(u, float(omega), v, requested, tuple(center_of_mass(u)))
    return psi0, track


@dataclass(frozen=True)
class VirialSeries:
    """Second derivative of the variance: central differences against ``2E + V``.

    ``mismatch = |fd - formula| / (2 T)``, measured against the kinetic scale
    because both sides vanish for a standing wave.
    """

    t: np.ndarray
    fd: np.ndarray
    formula: np.ndarray
    mismatch: np.ndarray
    kinetic: np.ndarray


def virial_check(traj):
    """Compare ``I''`` from the recorded variance with ``2E + V`` at interior samples."""
    if traj.config.trap:
        raise TrapActive("the virial identity holds without the trap; rerun with trap off")
    d = traj.diagnostics
    t = np.asarray(d.get("t", []))
    if t.size < 3:
        raise InsufficientSnapshots(f"need at least 3 recorded samples, got {t.size}")
    dt = np.diff(t)
    if not np.allclose(dt, dt[0], rtol=1e-9, atol=0):
        # a monitor trip adds an off-stride final sample; drop it
        keep = np.concatenate([[True], np.isclose(dt, dt[0], rtol=1e-9, atol=0)])
        keep = np.cumprod(keep).astype(bool)
        t = t[keep]
        if t.size < 3:
            raise InsufficientSnapshots("fewer than 3 uniformly spaced samples")
    n = t.size
    h = t[1] - t[0]
    I = d["I"][:n]
    E, V, T = d["E"][:n], d["Vq"][:n] + d["Vdd"][:n], d["T"][:n]
    fd = (I[2:] - 2 * I[1:-1] + I[:-2]) / h**2
    formula = 2 * E[1:-1] + V[1:-1]
    kin = 2 * T[1:-1]
    return VirialSeries(t[1:-1], fd, formula, np.abs(fd - formula) / kin, kin)


@dataclass(frozen=True)
class NegativeEnergyState:
    psi: Field
    amplitude: float
    root: float
    energy: float
    kinetic: float


def make_negative_energy_state(grid, kernel, couplings, widths, overshoot=1.25):
    """Gaussian with energy below zero.

    For a unit-amplitude Gaussian ``g`` with kinetic energy ``T_g`` and
    interaction energy ``V_g`` the energy of ``A g`` is ``A^2 T_g + A^4 V_g``.
    The root ``A0 = sqrt(-T_g / V_g)`` is located by bisection and the
    returned amplitude is ``overshoot * A0``; ``overshoot = 1`` gives the
    zero-energy state.
    """
    cls = admissible(couplings)
    if not cls.ok:
        raise NotAdmissible(cls)
    if overshoot < 1:
        raise ValueError("overshoot must be at least 1")
    axis = kernel.axis if kernel is not None else (0.0, 0.0, 1.0)
    g = oriented_gaussian(grid, widths, axis)
    k = kernel if couplings.lambda2 != 0 else None
    bd = energy_breakdown(g, k, couplings)
    Tg, Vg = bd.T, bd.V
    if not Vg < 0:
        raise ShapeNotFocusing(
            f"interaction energy {Vg:.3e} of the Gaussian with widths {tuple(widths)} is not negative; "
            "choose a shape elongated along the dipole axis for lambda2 > 0 or flattened for lambda2 < 0"
        )

    def reduced(A):
        return Tg + A * A * Vg

    hi = 1.0
    while reduced(hi) > 0:
        hi *= 2
    root = bisect(reduced, 0.0, hi, xtol=1e-15 * hi, rtol=4 * np.finfo(float).eps, maxiter=500)
    A = overshoot * root
    psi = Field(grid, (A * g.values).astype(complex))
    E = energy_breakdown(psi, k, couplings).E
    return NegativeEnergyState(psi, A, root, E, A * A * Tg)
