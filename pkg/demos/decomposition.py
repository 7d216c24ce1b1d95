"""
Peeling an allocation into orders
=================================

Every reasonable, efficient allocation is a convex combination of special
allocations. Peeling finds one by following the heaviest flow from the empty
coalition to the grand coalition and subtracting the bottleneck.
"""

import numpy as np

from shapleylike import peel_decompose, random_allocation, shapley_matrix, verify_decomposition

A, hidden = random_allocation(4, 5, seed=3)
d, trace = peel_decompose(A)

for step in trace.steps:
    print(step.permutation, f"eps={step.epsilon:.4f}", f"left={step.remaining_mass:.4f}")

print("weights sum to", d.weights.sum())
print("certificate valid:", verify_decomposition(A, d).passed)
print("same support as the generator:", sorted(d.permutations) == sorted(hidden.permutations))

# Shapley uses every order with equal weight
d, _ = peel_decompose(shapley_matrix(3))
print(np.round(d.weights, 6))
