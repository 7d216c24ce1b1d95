"""Efficient, reasonable allocations of cooperative-game value without symmetry.

Games are vectors over coalitions, allocations are ``n x 2**n`` matrices, and
every reasonable, efficient allocation is a convex combination of the
permutation ("special") allocations; :func:`peel_decompose` finds one.
"""

from .games import (
    Coalition,
    Game,
    SetChain,
    additive_game,
    all_chains,
    build_probe_game,
    enumerate_monotone_binary_games,
    extend,
    is_monotone,
    is_superadditive,
    majority_game,
    marginal_contribution,
    minimal_sets,
    pair_truncate,
    random_monotone_games,
    random_superadditive_game,
    span_decompose_monotone_binary,
    truncate,
    unanimity_game,
)
from .allocations import (
    DEFAULT_TOL,
    AllocationMatrix,
    CheckReport,
    ReasonablenessViolation,
    Violation,
    apply_allocation,
    check_abs_sums,
    check_efficiency,
    check_level_abs_sums,
    check_reasonable_structural,
    check_row_sums_zero,
    sample_reasonableness_violation,
    shapley_matrix,
    shapley_value,
    special_allocation,
    special_entries,
    superadditive_probe_family,
)
from .decomposition import (
    Decomposition,
    DecompositionError,
    PeelStep,
    PeelTrace,
    least_residual_decomposition,
    peel_decompose,
    random_allocation,
    verify_decomposition,
)

__version__ = "0.1.0"
