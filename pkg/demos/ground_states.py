"""
Standing waves with and without the dipolar term
================================================

Minimize the Weinstein ratio for three coupling pairs on a coarse grid,
rescale to frequency one and look at the verification report.
"""

import numpy as np

from dipolar_gpe import Couplings, admissible, make_grid, solve_ground_state
from dipolar_gpe.ground_state import aspect_ratio

grid = make_grid((32, 32, 32), (16.0, 16.0, 16.0))

# pure cubic focusing, a repulsive contact term held together by the dipoles,
# and a purely dipolar pair with the opposite sign
pairs = [Couplings(-1.0, 0.0), Couplings(1.0, 1.0), Couplings(0.0, -1.0)]

for c in pairs:
    print(admissible(c).message)
    gs = solve_ground_state(grid, c)
    print(f"  j = {gs.j:.8f}   C* = {gs.C_star:.8f}   iterations {gs.minimize.iterations}")
    print(f"  aspect ratio along the dipoles {aspect_ratio(gs.u):.4f}")
    print(f"  box rescaled to L = {gs.u.grid.L[0]:.3f}")
    print("  " + gs.report.summary().replace("\n", "\n  "))

# the gate refuses pairs that violate the necessary condition
print(admissible(Couplings(5.0, 1.0)).message)

# the central density line of the cigar state, in units of its peak
gs = solve_ground_state(grid, Couplings(1.0, 1.0))
u = np.abs(gs.u.values)
mid = grid.n[0] // 2
print("along x3:", np.round(u[mid, mid, ::4] / u.max(), 3))
print("along x1:", np.round(u[::4, mid, mid] / u.max(), 3))
