"""
Checking an allocation
======================

Efficiency is a statement about column sums. Reasonableness (every payoff
between the smallest and largest marginal contribution) is checked in two
ways: structurally from the matrix, and by searching for a game it fails on.
"""

from shapleylike import (
    AllocationMatrix,
    check_efficiency,
    check_reasonable_structural,
    sample_reasonableness_violation,
    shapley_matrix,
    special_allocation,
)

good = shapley_matrix(3)
print("Shapley efficient:", check_efficiency(good).passed)
print("Shapley structural:", check_reasonable_structural(good).passed)

# flip player 1's pair in a special allocation
bad = special_allocation((1, 2, 3)).with_entries({(1, 0): 0.0, (1, 1): 1.0, (1, 3): -1.0})
report = check_reasonable_structural(bad)
for v in report.violations:
    print(" ", v.describe())

hit = sample_reasonableness_violation(bad, "superadditive_probes", 1000)
print(f"probe {hit.label}: player {hit.player} gets {hit.payoff}, bounds [{hit.lower}, {hit.upper}]")

zero = AllocationMatrix.zeros(3)
hit = sample_reasonableness_violation(zero, "superadditive_probes", 1000)
print(f"zero matrix: player {hit.player} gets {hit.payoff} but must get {hit.lower}")

for sampler in ("monotone_random", "binary_exhaustive"):
    print(sampler, "finds nothing on Shapley:", sample_reasonableness_violation(good, sampler, 1000) is None)
