"""Standing waves and dynamics of the dipolar Gross-Pitaevskii equation.

The package solves

    i d_t psi = -1/2 Lap psi + lambda1 |psi|^2 psi + lambda2 (K * |psi|^2) psi

on a periodic box with a pseudospectral discretization.  Standing-wave
profiles are obtained by minimizing a scale-invariant Weinstein-type ratio and
then rescaled to a prescribed frequency; the time-dependent problem is
integrated with Strang splitting.
"""

from .grid import Field, Grid, gaussian_field, make_grid
from .kernel import SpectralKernel, apply, apply_via_poisson, build_kernel, kernel_bounds
from .functionals import (
    Admissibility,
    Couplings,
    EnergyBreakdown,
    NonpositiveDenominator,
    admissible,
    energy_breakdown,
    pohozaev_residuals,
    sharp_constant_ratio,
    variance,
    virial_rhs,
    weinstein_J,
    weinstein_gradient,
)
from .ground_state import (
    GroundState,
    MaxItersExceeded,
    MinimizerConfig,
    NotAdmissible,
    minimize_J,
    rescale_to_standing_wave,
    solve_ground_state,
    symmetrize,
    verify,
)
from .dynamics import (
    BlowUpDetected,
    NonfiniteField,
    PropagationConfig,
    Trajectory,
    boost,
    center_of_mass,
    make_negative_energy_state,
    split_step,
    time_reverse,
    translate,
    virial_check,
)

__version__ = "0.1.0"
