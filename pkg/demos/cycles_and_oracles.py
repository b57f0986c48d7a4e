"""
When there is no potential
==========================

Matching pennies has an improvement cycle, so no potential of any kind
exists.  The 4-cycle test, the oracle and the dynamics all see it.  A
batch of random games then compares the cycle test with the oracle.
"""

import time

import numpy as np

from pgt import catalog
from pgt.criteria import oracle_finite_potential, test_four_cycles
from pgt.equilibrium import better_response_dynamics

####################################################################
# The single 4-cycle of matching pennies accumulates -8.

g = catalog.matching_pennies()
print(test_four_cycles(g))
rep, _ = oracle_finite_potential(g)
print("oracle:", rep.label, "residual", rep.residual_max)
res = better_response_dynamics(g, ((0.0,), (0.0,)))
print(res.outcome, [tuple(int(a[0]) for a in x) for x in res.cycle])

####################################################################
# Random integer games, a third of them built as potential games and a
# third perturbed in one entry.  The two verdicts should always agree.

rng = np.random.default_rng(0)
t0 = time.perf_counter()
rows = []
for k in range(300):
    n, m = int(rng.integers(2, 4)), int(rng.integers(2, 4))
    if k % 3 == 0:
        game = catalog.random_finite_game(rng, n, m)
    else:
        game = catalog.random_potential_game(rng, n, m, -2, 2)
        if k % 3 == 2:
            game = catalog.perturb(game, rng)
    cyc = test_four_cycles(game, budget=10**6).verdict
    orc = oracle_finite_potential(game)[0].verdict
    rows.append((cyc, orc))
agree = sum(a == b for a, b in rows)
print(f"{agree}/{len(rows)} agree, {sum(b == 'pass' for _, b in rows)} potential, "
      f"{time.perf_counter() - t0:.2f} s")
