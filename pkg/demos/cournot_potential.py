"""
Cournot competition as a potential game
=======================================

Firms choose quantities on [-10, 10] and each pays
``(a - b * total) * x_i - c * x_i``.  We test the game with several
difference criteria, build a potential two ways and use it to locate an
equilibrium.
"""

from pgt import catalog
from pgt import expr as ex
from pgt.construct import construct_from_pairs, construct_from_reverse_path, verify_exact_potential
from pgt.criteria import test_cross_hessian, test_four_cycles, test_hp_decomposition, test_pairwise
from pgt.equilibrium import minimize_potential, verify_nash
from pgt.game import sample_strategies

####################################################################
# Three firms.  Every criterion is sampled, so the verdicts carry the
# "(sampled)" label; residuals sit at rounding level.

g = catalog.cournot(3)
print("aggregative:", g.aggregative)
for check in (test_four_cycles, test_pairwise, test_hp_decomposition, test_cross_hessian):
    rep = check(g, budget=500, seed=1)
    print(f"{rep.method:9s} {rep.label:16s} residual {rep.residual_max:.1e}")

####################################################################
# Two constructions.  The reverse-path potential and the pairwise one
# should differ by a constant; both are normalized to 0 at the origin,
# so here the constant is 0.

phi_rev = construct_from_reverse_path(g)
phi_pair = construct_from_pairs(g)
x = ((1.0,), (2.0,), (3.0,))
print("phi(1, 2, 3) =", phi_rev(x), phi_pair(x))
gaps = [phi_rev(z) - phi_pair(z) for z in sample_strategies(g, 200, seed=4)]
print("spread of the difference:", max(gaps) - min(gaps))

####################################################################
# With four firms the pairwise construction produces a closed form,
# printed here from its symbolic representation.

g4 = catalog.cournot(4)
phi4 = construct_from_pairs(g4)
print(ex.to_text(phi4.expr))
print(verify_exact_potential(g4, phi4, seed=3).label)

####################################################################
# A potential minimizer is an equilibrium.  The action sets are
# continuous, so the search runs on an 11-point grid per firm.

best, value = minimize_potential(g, phi_pair, resolution=11)
print("grid minimizer", best, "value", value)
print("nash check:", verify_nash(g, best, seed=5).label)
