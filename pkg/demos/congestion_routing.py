"""
Routing and the Rosenthal potential
===================================

Three drivers pick among three routes that share edges.  The Rosenthal
sum tabulates a potential; the brute-force oracle recovers the same table
up to a constant, and improvement dynamics settle at its minimizer.
"""

import numpy as np

from pgt import catalog
from pgt.construct import construct_rosenthal, table_potential, verify_exact_potential
from pgt.criteria import oracle_finite_potential, test_pairwise
from pgt.equilibrium import better_response_dynamics, minimize_potential, verify_nash
from pgt.game import expand_congestion_game

####################################################################
# The route game as a finite game over route numbers 1..3.

g = catalog.three_route_network()
big = expand_congestion_game(g)
phi = construct_rosenthal(g)
print(verify_exact_potential(big, phi, budget=10_000))

####################################################################
# The oracle solves the deviation equations directly.  Its table is
# pinned to 0 at the first profile, so compare differences only.

rep, table = oracle_finite_potential(big)
gap = phi.table - table
print(rep.label, "constant offset", gap.min(), "spread", gap.max() - gap.min())

####################################################################
# Augmentation adds a stay-home loop and artificial routes with a large
# cost so every action set becomes symmetric around the loop (action 0).
# The pairwise criterion then applies and can be checked exhaustively.

aug = expand_congestion_game(g, augment=True)
print("augmented action counts", aug.shape)
print(test_pairwise(aug, budget=10**6))

####################################################################
# Equilibria: minimize the potential, then confirm with dynamics from
# every start.  Each step lowers the potential by exactly the mover's
# cost change.

x, value = minimize_potential(big, phi)
print("minimizer", [int(a[0]) for a in x], "value", value, verify_nash(big, x).label)
ends = set()
for start in big.profiles():
    res = better_response_dynamics(big, start, phi=table_potential(big, phi.table))
    assert np.allclose(res.phi_deltas, res.cost_deltas)
    ends.add(tuple(int(a[0]) for a in res.trajectory[-1]))
print("dynamics end points:", sorted(ends))
