import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from dipolar_gpe import (
    Couplings,
    Field,
    NonpositiveDenominator,
    admissible,
    build_kernel,
    energy_breakdown,
    gaussian_field,
    make_grid,
    pohozaev_residuals,
    sharp_constant_ratio,
    variance,
    virial_rhs,
    weinstein_J,
    weinstein_gradient,
)
from dipolar_gpe.functionals import EnergyBreakdown, pohozaev_from_breakdown

from conftest import SAFE_NEGATIVE, SAFE_POSITIVE, smooth_field

FOUR_PI_3 = 4 * math.pi / 3


@pytest.mark.parametrize(
    "l1,l2,ok,branch",
    [
        (5, 1, False, "lambda2>0"),
        (4.18, 1, True, "lambda2>0"),
        (1, 1, True, "lambda2>0"),
        (1, -1, True, "lambda2<0"),
        (8.38, -1, False, "lambda2<0"),
        (-1, 0, True, "lambda2=0"),
        (0, 0, False, "lambda2=0"),
    ],
)
def test_admissibility_table(l1, l2, ok, branch):
    cls = admissible(Couplings(l1, l2))
    assert cls.ok is ok and bool(cls) is ok
    assert cls.branch == branch
    assert branch in cls.message


def test_refusal_message_quotes_condition():
    msg = admissible(Couplings(5, 1)).message
    assert "lambda1 < (4 pi/3) lambda2" in msg and "4.188790" in msg
    msg = admissible(Couplings(9, -1)).message
    assert "lambda1 < -(8 pi/3) lambda2" in msg and "8.377580" in msg


@given(st.floats(-50, 50), st.floats(-10, 10))
def test_admissibility_matches_condition(l1, l2):
    ok = admissible(Couplings(l1, l2)).ok
    if l2 > 0:
        assert ok == (l1 < FOUR_PI_3 * l2)
    elif l2 < 0:
        assert ok == (l1 < -2 * FOUR_PI_3 * l2)
    else:
        assert ok == (l1 < 0)


def test_couplings_must_be_finite():
    with pytest.raises(ValueError):
        Couplings(math.nan, 0)


def test_gaussian_energies_closed_form():
    g = make_grid((48, 48, 48), (16.0, 16.0, 16.0))
    A = 1.7
    u = gaussian_field(g, A)
    bd = energy_breakdown(u, None, Couplings(-1.0, 0.0))
    p32 = math.pi**1.5
    assert bd.N == pytest.approx(A**2 * p32, rel=1e-12)
    assert bd.T == pytest.approx(0.75 * A**2 * p32, rel=1e-10)
    assert bd.Q == pytest.approx(A**4 * (math.pi / 2) ** 1.5, rel=1e-12)
    assert bd.D == 0.0
    assert bd.E == pytest.approx(bd.T - 0.5 * bd.Q)
    assert variance(u) == pytest.approx(0.75 * A**2 * p32, rel=1e-12)


def test_J_of_unit_gaussian():
    g = make_grid((48, 48, 48), (16.0, 16.0, 16.0))
    # ||grad g||^3 ||g|| / Q = (3/2)^(3/2) pi^3 / (pi/2)^(3/2)
    exact = 1.5**1.5 * math.pi**3 / (math.pi / 2) ** 1.5
    assert weinstein_J(gaussian_field(g), None, Couplings(-1, 0)) == pytest.approx(exact, rel=1e-10)


def test_denominator_sign_guard(grid32, kernel32):
    u = gaussian_field(grid32)
    with pytest.raises(NonpositiveDenominator):
        weinstein_J(u, None, Couplings(1.0, 0.0))
    # isotropic density: D vanishes, so pure dipolar couplings leave no denominator
    with pytest.raises(NonpositiveDenominator):
        weinstein_J(u, kernel32, Couplings(0.0, 1.0))


def test_kernel_grid_mismatch(grid32, kernel32):
    u = gaussian_field(grid32.scaled(0.5))
    with pytest.raises(ValueError):
        energy_breakdown(u, kernel32, SAFE_POSITIVE)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), q=st.floats(1e-3, 1e3), s=st.floats(0.2, 5.0))
def test_J_invariance_property(grid32, kernel32, seed, q, s):
    rng = np.random.default_rng(seed)
    v = smooth_field(grid32, rng)
    J = weinstein_J(v, kernel32, SAFE_POSITIVE)
    assert weinstein_J(v.scaled(q), kernel32, SAFE_POSITIVE) == pytest.approx(J, rel=1e-13)
    gs = grid32.scaled(1 / s)
    Js = weinstein_J(v.on_grid(gs), build_kernel(gs), SAFE_POSITIVE)
    assert Js == pytest.approx(J, rel=1e-10)


@pytest.mark.parametrize("couplings", [SAFE_POSITIVE, SAFE_NEGATIVE, Couplings(-1.0, 0.0)])
def test_gradient_matches_finite_differences(grid32, kernel32, rng, couplings):
    k = kernel32 if couplings.lambda2 else None
    for _ in range(3):
        v = smooth_field(grid32, rng)
        eta = smooth_field(grid32, rng)
        g = weinstein_gradient(v, k, couplings)
        exact = grid32.dv * float(np.vdot(g.values, eta.values).real)
        eps = 1e-4
        fd = (
            weinstein_J(Field(grid32, v.values + eps * eta.values), k, couplings)
            - weinstein_J(Field(grid32, v.values - eps * eta.values), k, couplings)
        ) / (2 * eps)
        assert fd == pytest.approx(exact, rel=1e-6)


def test_gradient_orthogonal_to_field(grid32, kernel32, rng):
    """J is homogeneous of degree zero, so its gradient is orthogonal to v."""
    v = smooth_field(grid32, rng)
    g = weinstein_gradient(v, kernel32, SAFE_POSITIVE)
    dot = grid32.dv * abs(np.vdot(g.values, v.values).real)
    scale = math.sqrt(grid32.dv * np.sum(np.abs(g.values) ** 2)) * math.sqrt(grid32.dv * np.sum(np.abs(v.values) ** 2))
    assert dot < 1e-13 * scale


def test_real_field_gives_real_gradient(grid32, kernel32, rng):
    v = Field(grid32, smooth_field(grid32, rng, complex_=False).values)
    assert not weinstein_gradient(v, kernel32, SAFE_POSITIVE).is_complex


def test_pohozaev_relative_residuals():
    # a state with T = 3 N, V = -2 N, E = T/3 at omega = 1
    bd = EnergyBreakdown(N=2.0, T=6.0, Q=8.0, D=0.0, Vq=-4.0, Vdd=0.0)
    assert pohozaev_from_breakdown(bd, 1.0) == (0.0, 0.0, 0.0)
    r = pohozaev_from_breakdown(bd, 2.0)
    assert r[0] == pytest.approx(0.5) and r[1] == pytest.approx(0.5) and r[2] == 0.0


def test_pohozaev_of_gaussian_is_not_small(grid32):
    r = pohozaev_residuals(gaussian_field(grid32), 1.0, None, Couplings(-1, 0))
    assert max(r) > 0.1


def test_virial_rhs_and_sharp_ratio(grid32):
    u = gaussian_field(grid32, 2.0)
    c = Couplings(-1, 0)
    bd = energy_breakdown(u, None, c)
    assert virial_rhs(u, None, c) == pytest.approx(2 * bd.T + 3 * bd.V)
    assert sharp_constant_ratio(u, None, c) == pytest.approx(1 / weinstein_J(u, None, c), rel=1e-14)
    # defocusing couplings give a negative ratio instead of an error
    assert sharp_constant_ratio(u, None, Couplings(1, 0)) < 0


def test_variance_center_shift(grid32):
    u = gaussian_field(grid32, 1.0, center=(1.0, 0.0, 0.0))
    assert variance(u, (1.0, 0.0, 0.0)) == pytest.approx(0.75 * math.pi**1.5, rel=1e-10)
    assert variance(u) > variance(u, (1.0, 0.0, 0.0))
