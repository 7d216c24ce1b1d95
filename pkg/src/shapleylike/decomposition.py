"""Convex decompositions of reasonable, efficient allocations into special allocations.

The matrix of a reasonable, efficient allocation is a unit flow on the
subset lattice: ``-A[j, M]`` (for ``j`` not in ``M``) is the flow along the edge
``M -> M + {j}``, pairing makes ``A[j, M + {j}]`` the same flow arriving at
the upper end, and the column sums say flow is conserved everywhere except
at the empty and grand coalitions. A special allocation is one unit of flow
along a single maximal chain. :func:`peel_decompose` is path decomposition of
that flow: follow the heaviest outgoing edge from the empty coalition up to
the grand coalition, subtract the bottleneck, repeat.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .allocations import (
    DEFAULT_TOL,
    AllocationMatrix,
    CheckReport,
    Violation,
    check_efficiency,
    check_reasonable_structural,
    special_allocation,
)
from .games import Coalition, SetChain, _check_n

MAX_RANDOM_PLAYERS = 8
MAX_ORACLE_PLAYERS = 3


class DecompositionError(ValueError):
    """Raised when a matrix is outside the domain of the decomposition."""

    def __init__(self, message: str, reports: Sequence[CheckReport] = ()):
        super().__init__(message)
        self.reports = tuple(reports)


@dataclass(frozen=True)
class Decomposition:
    """Weights on permutations; a convex-combination certificate for a matrix."""

    n: int
    terms: tuple[tuple[tuple[int, ...], float], ...]

    def __post_init__(self):
        _check_n(self.n)
        terms = tuple((SetChain(tuple(p)).permutation, float(w)) for p, w in self.terms)
        for perm, _ in terms:
            if len(perm) != self.n:
                raise ValueError(f"permutation {perm} is not on {self.n} players")
        perms = [p for p, _ in terms]
        if len(set(perms)) != len(perms):
            raise ValueError("permutations in a decomposition must be distinct")
        object.__setattr__(self, "terms", terms)

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for _, w in self.terms])

    @property
    def permutations(self) -> list[tuple[int, ...]]:
        return [p for p, _ in self.terms]

    def matrix(self) -> AllocationMatrix:
        """The weighted sum of special allocations."""
        total = np.zeros((self.n, 1 << self.n))
        for perm, w in self.terms:
            total += w * special_allocation(perm).entries
        return AllocationMatrix(self.n, total)

    def __len__(self) -> int:
        return len(self.terms)


@dataclass(frozen=True)
class PeelStep:
    permutation: tuple[int, ...]
    epsilon: float
    residual_max_abs: float
    remaining_mass: float


@dataclass(frozen=True)
class PeelTrace:
    steps: tuple[PeelStep, ...] = field(default_factory=tuple)

    def __len__(self) -> int:
        return len(self.steps)


def _heaviest_outflow(R: np.ndarray, mask: int, n: int, tol: float) -> int:
    """Player (1-based) carrying the most flow out of column ``mask``, or 0 if none."""
    best, best_val = 0, 0.0
    fallback, fallback_val = 0, 0.0
    for j in range(1, n + 1):
        if mask >> (j - 1) & 1:
            continue
        x = R[j - 1, mask]
        if x < -tol and x < best_val:
            best, best_val = j, x
        if x < fallback_val:
            fallback, fallback_val = j, x
    # Rounding can leave a node whose inflow is above tol but spread over
    # outflows each below it; any negative entry is still a valid edge then.
    return best or fallback


def peel_decompose(
    A: AllocationMatrix, tol: float = DEFAULT_TOL
) -> tuple[Decomposition, PeelTrace]:
    """Write ``A`` as a convex combination of special allocations.

    Args:
        A: a matrix passing :func:`check_efficiency` and
            :func:`check_reasonable_structural` at ``tol``.
        tol: entries of magnitude at most ``tol`` count as zero.

    Returns:
        The certificate and the step-by-step trace. The certificate
        reconstructs ``A`` to within ``10 * tol``.

    Raises:
        DecompositionError: if ``A`` fails either precondition (the failing
            reports are attached), or if peeling gets stuck, which only
            happens when the input is numerically far from the polytope.
    """
    failed = [r for r in (check_efficiency(A, tol), check_reasonable_structural(A, tol)) if not r.passed]
    if failed:
        names = ", ".join(r.name for r in failed)
        raise DecompositionError(f"matrix is not a reasonable, efficient allocation: {names} failed", failed)

    n = A.n
    full = (1 << n) - 1
    max_steps = n * (1 << n)
    R = A.entries.copy()
    terms: dict[tuple[int, ...], float] = {}
    steps: list[PeelStep] = []
    mass = 1.0
    while np.max(np.abs(R)) > tol:
        if len(steps) >= max_steps:
            raise DecompositionError(f"peeling did not finish within {max_steps} steps")
        perm = []
        mask = 0
        while mask != full:
            j = _heaviest_outflow(R, mask, n, tol)
            if j == 0:
                raise DecompositionError(
                    f"no outgoing flow at column {Coalition(mask, n).label()} "
                    f"with residual {np.max(np.abs(R)):.3g} left"
                )
            perm.append(j)
            mask |= 1 << (j - 1)
        chain = SetChain(tuple(perm))
        links = chain.links()
        upper = np.array([R[j - 1, after] for j, _, after in links])
        lower = np.array([-R[j - 1, before] for j, before, _ in links])
        eps = float(upper.min())
        if eps <= 0.0:
            raise DecompositionError(f"chain {chain.permutation} has no positive bottleneck")
        if np.max(np.abs(upper - lower)) > 10 * tol:
            raise DecompositionError(
                f"pairing drifted along chain {chain.permutation}: "
                f"{np.max(np.abs(upper - lower)):.3g}"
            )
        for j, before, after in links:
            R[j - 1, before] += eps
            R[j - 1, after] -= eps
        terms[chain.permutation] = terms.get(chain.permutation, 0.0) + eps
        mass -= eps
        steps.append(PeelStep(chain.permutation, eps, float(np.max(np.abs(R))), mass))
    return Decomposition(n, tuple(terms.items())), PeelTrace(tuple(steps))


def verify_decomposition(
    A: AllocationMatrix, d: Decomposition, tol: float = DEFAULT_TOL
) -> CheckReport:
    """Check that ``d`` is a convex combination reconstructing ``A`` within ``tol``."""
    if A.n != d.n:
        raise ValueError(f"matrix is on {A.n} players but certificate on {d.n}")
    out: list[Violation] = []
    for perm, w in d.terms:
        if w < -tol:
            out.append(Violation("weight_nonnegative", None, None, w, ">=", 0.0, tol, f"permutation {perm}"))
    total = float(d.weights.sum()) if len(d) else 0.0
    if abs(total - 1.0) > tol:
        out.append(Violation("weight_sum", None, None, total, "==", 1.0, tol))
    rebuilt = d.matrix().entries
    diff = np.abs(rebuilt - A.entries)
    for i, m in zip(*np.nonzero(diff > tol)):
        out.append(
            Violation(
                "reconstruction", int(i) + 1, Coalition(int(m), A.n),
                float(rebuilt[i, m]), "==", float(A.entries[i, m]), tol,
            )
        )
    return CheckReport("decomposition", tuple(out))


def unrank_permutation(index: int, n: int) -> tuple[int, ...]:
    """The ``index``-th permutation of ``1..n`` in lexicographic order."""
    pool = list(range(1, n + 1))
    out = []
    for k in range(n, 0, -1):
        f = math.factorial(k - 1)
        q, index = divmod(index, f)
        out.append(pool.pop(q))
    return tuple(out)


def random_allocation(
    n: int, support_size: int, seed: int
) -> tuple[AllocationMatrix, Decomposition]:
    """A random point of the polytope together with the certificate that built it.

    Draws ``support_size`` distinct permutations uniformly and weights from a
    flat Dirichlet (normalized exponentials).
    """
    _check_n(n)
    if n > MAX_RANDOM_PLAYERS:
        raise ValueError(f"random allocations are limited to n <= {MAX_RANDOM_PLAYERS}")
    total = math.factorial(n)
    if not 1 <= support_size <= total:
        raise ValueError(f"support size must be in 1..{total}, got {support_size}")
    rng = np.random.default_rng(seed)
    picks = rng.choice(total, size=support_size, replace=False)
    weights = rng.exponential(size=support_size)
    weights /= weights.sum()
    d = Decomposition(n, tuple((unrank_permutation(int(k), n), float(w)) for k, w in zip(picks, weights)))
    return d.matrix(), d


def least_residual_decomposition(A: AllocationMatrix) -> tuple[Decomposition, float]:
    """Exhaustive search over every support of special allocations (``n <= 3``).

    For each nonempty subset of permutations, solve the least-squares problem
    with the weights-sum-to-one row appended, keep nonnegative solutions, and
    return the one with the smallest Frobenius residual (fewest terms on ties).
    Meant as an independent oracle for :func:`peel_decompose`.
    """
    n = A.n
    if n > MAX_ORACLE_PLAYERS:
        raise ValueError(f"exhaustive search is limited to n <= {MAX_ORACLE_PLAYERS}")
    perms = list(itertools.permutations(range(1, n + 1)))
    cols = np.array([special_allocation(p).entries.ravel() for p in perms]).T
    target = np.append(A.entries.ravel(), 1.0)
    best = None
    for k in range(1, len(perms) + 1):
        for support in itertools.combinations(range(len(perms)), k):
            M = np.vstack([cols[:, support], np.ones(k)])
            w, *_ = np.linalg.lstsq(M, target, rcond=None)
            if np.any(w < -1e-12):
                continue
            res = float(np.linalg.norm(M @ w - target))
            if best is None or res < best[0] - 1e-12:
                best = (res, support, w)
    res, support, w = best
    d = Decomposition(n, tuple((perms[s], float(x)) for s, x in zip(support, w)))
    return d, res
