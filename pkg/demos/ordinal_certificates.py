"""
Ordinal potentials from first-order certificates
================================================

Two players on (0, 1] pay (x1 + x2)^2 and (x1 + x2)^6.  The pairwise sign
condition already makes each cost an ordinal potential.  A separable
concave candidate a*sqrt(x1) + b*sqrt(x2) works once its gradient
dominates the cost gradients; scanning a shows where that breaks.
"""

from pgt import catalog
from pgt.expr import compile_expression
from pgt.ordinal import (check_assumption1, check_concave_subgradient_certificate,
                         check_cross_partial_signs, verify_ordinal_potential)

####################################################################
# Sign conditions.

g = catalog.two_player_power_game(1.0)
print(check_assumption1(g).label, check_cross_partial_signs(g).label)

####################################################################
# Scan the first coefficient.  The gradient of f_1 reaches 4 at (1, 1)
# while the candidate's partial there is a/2, so small a fails.

for a in (1, 4, 7, 8, 12):
    rep = check_concave_subgradient_certificate(g, catalog.sqrt_candidate(a, 384), seed=2)
    print(f"a={a:>2}: {rep.label:16s} failing sub-check: "
          f"{(rep.witness or {}).get('condition', '-')}")

####################################################################
# On (0, 10] a position-dependent scaling of the cost gradients makes
# 2 (x1 + x2)^0.4 work, with the domination inequality tight.

g10 = catalog.two_player_power_game(10.0)
cand = catalog.scaled_power_candidate()
rep = check_concave_subgradient_certificate(g10, cand)
print(rep)
phi = compile_expression(cand.phi)
print("generalized check:", verify_ordinal_potential(g10, phi, mode="generalized").label)
