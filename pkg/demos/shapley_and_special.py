"""
Special allocations and the Shapley value
=========================================

An allocation is an n x 2**n matrix A with payoffs A @ v. A permutation of
the players defines a special allocation paying each player the marginal
contribution they make when they arrive.
"""

import itertools
import math

import numpy as np

from shapleylike import Game, apply_allocation, shapley_matrix, shapley_value, special_allocation

glove = Game.from_function(3, lambda c: float(1 in c and (2 in c or 3 in c)))

A = special_allocation((2, 1, 3))
print(A.entries.astype(int))
print("payoffs when 2 arrives first:", apply_allocation(A, glove))

# averaging the six special allocations gives the Shapley matrix
avg = sum(special_allocation(p).entries for p in itertools.permutations((1, 2, 3))) / math.factorial(3)
print("max gap to Shapley matrix:", np.max(np.abs(avg - shapley_matrix(3).entries)))

print("Shapley value of the glove game:", shapley_value(glove))

# a weighted mix of orders is also an allocation, just not a symmetric one
mix = 0.7 * special_allocation((1, 2, 3)) + 0.3 * special_allocation((3, 2, 1))
print("70/30 mix:", apply_allocation(mix, glove))
