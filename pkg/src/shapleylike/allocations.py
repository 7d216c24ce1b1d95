"""Allocation matrices and checks on their structure.

An additive allocation on ``n`` players is a linear map from games to payoff
vectors, so it is an ``n x 2**n`` matrix ``A`` with ``payoff_i = sum_S A[i, S] v(S)``.
Columns follow the same bitmask order as :class:`~shapleylike.games.Game`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

import numpy as np

from .games import (
    Coalition,
    CoalitionLike,
    Game,
    SetChain,
    _check_n,
    _check_player,
    as_mask,
    build_probe_game,
    coalition_label,
    enumerate_monotone_binary_games,
    marginal_contributions,
    popcounts,
    random_monotone_games,
    MAX_ENUMERATION_PLAYERS,
)

DEFAULT_TOL = 1e-9
MAX_SHAPLEY_PLAYERS = 12
SAMPLERS = ("monotone_random", "superadditive_probes", "binary_exhaustive")


class AllocationMatrix:
    """Dense ``n x 2**n`` matrix of an additive allocation."""

    __slots__ = ("n", "entries")

    def __init__(self, n: int, entries):
        _check_n(n)
        arr = np.array(entries, dtype=np.float64)
        if arr.shape != (n, 1 << n):
            raise ValueError(
                f"allocation on {n} players needs shape {(n, 1 << n)}, got {arr.shape}"
            )
        if not np.all(np.isfinite(arr)):
            raise ValueError("allocation entries must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "entries", arr)

    def __setattr__(self, name, value):
        raise AttributeError("AllocationMatrix is immutable")

    @classmethod
    def zeros(cls, n: int) -> "AllocationMatrix":
        return cls(n, np.zeros((n, 1 << n)))

    def entry(self, i: int, S: CoalitionLike) -> float:
        _check_player(i, self.n)
        return float(self.entries[i - 1, as_mask(S, self.n)])

    def row(self, i: int) -> np.ndarray:
        _check_player(i, self.n)
        return self.entries[i - 1]

    def with_entries(self, updates: dict[tuple[int, int], float]) -> "AllocationMatrix":
        """Copy with ``{(player, mask): value}`` overwritten."""
        arr = self.entries.copy()
        for (i, m), x in updates.items():
            _check_player(i, self.n)
            arr[i - 1, as_mask(m, self.n)] = x
        return AllocationMatrix(self.n, arr)

    def _same_shape(self, other) -> bool:
        return isinstance(other, AllocationMatrix) and other.n == self.n

    def __add__(self, other):
        if not self._same_shape(other):
            return NotImplemented
        return AllocationMatrix(self.n, self.entries + other.entries)

    def __sub__(self, other):
        if not self._same_shape(other):
            return NotImplemented
        return AllocationMatrix(self.n, self.entries - other.entries)

    def __mul__(self, scalar: float):
        return AllocationMatrix(self.n, self.entries * float(scalar))

    __rmul__ = __mul__

    def __neg__(self):
        return AllocationMatrix(self.n, -self.entries)

    def __eq__(self, other) -> bool:
        if not isinstance(other, AllocationMatrix):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.entries, other.entries)

    __hash__ = None

    def max_abs_diff(self, other: "AllocationMatrix") -> float:
        if not self._same_shape(other):
            raise ValueError("allocation matrices have different shapes")
        return float(np.max(np.abs(self.entries - other.entries)))

    def __repr__(self) -> str:
        return f"AllocationMatrix(n={self.n}, entries={self.entries.tolist()!r})"


# -- constructions --------------------------------------------------------------


def special_entries(chain: SetChain) -> list[tuple[int, int, float]]:
    """The ``2n`` nonzeros of a special allocation as ``(player, mask, +-1)``."""
    out = []
    for player, before, after in chain.links():
        out.append((player, before, -1.0))
        out.append((player, after, 1.0))
    return out


def special_allocation(chain: SetChain | Sequence[int]) -> AllocationMatrix:
    """Matrix paying each player its marginal contribution along ``chain``.

    A permutation such as ``(2, 1, 3)`` is accepted in place of a
    :class:`SetChain`.
    """
    if not isinstance(chain, SetChain):
        chain = SetChain(tuple(chain))
    arr = np.zeros((chain.n, 1 << chain.n))
    for player, mask, sign in special_entries(chain):
        arr[player - 1, mask] = sign
    return AllocationMatrix(chain.n, arr)


def apply_allocation(A: AllocationMatrix, v: Game) -> np.ndarray:
    """Payoff vector ``A @ v``."""
    if A.n != v.n:
        raise ValueError(f"allocation is on {A.n} players but game on {v.n}")
    return A.entries @ v.values


def _shapley_weights(n: int) -> np.ndarray:
    # weight of a marginal contribution at a coalition of size s, s = 0..n-1
    return np.array(
        [math.factorial(s) * math.factorial(n - s - 1) / math.factorial(n) for s in range(n)]
    )


def _check_shapley_n(n: int) -> None:
    _check_n(n)
    if n > MAX_SHAPLEY_PLAYERS:
        raise ValueError(f"Shapley computations are limited to n <= {MAX_SHAPLEY_PLAYERS}")


def shapley_matrix(n: int) -> AllocationMatrix:
    """Matrix of the Shapley value on ``n`` players."""
    _check_shapley_n(n)
    w = _shapley_weights(n)
    sizes = popcounts(n)
    masks = np.arange(1 << n)
    arr = np.zeros((n, 1 << n))
    for i in range(n):
        bit = 1 << i
        without = masks[(masks & bit) == 0]
        coef = w[sizes[without]]
        arr[i, without | bit] = coef
        arr[i, without] = -coef
    return AllocationMatrix(n, arr)


def shapley_value(v: Game) -> np.ndarray:
    """Shapley value of ``v``, summed directly over marginal contributions."""
    n = v.n
    _check_shapley_n(n)
    w = _shapley_weights(n)
    sizes = popcounts(n)
    masks = np.arange(1 << n)
    out = np.zeros(n)
    for i in range(1, n + 1):
        without = masks[(masks & (1 << (i - 1))) == 0]
        out[i - 1] = np.dot(w[sizes[without]], marginal_contributions(v.values, n, i))
    return out


# -- reports ----------------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    """One failed condition: ``observed`` should satisfy ``relation target`` within ``tol``."""

    condition: str
    player: Optional[int]
    coalition: Optional[Coalition]
    observed: float
    relation: str
    target: float
    tol: float
    detail: str = ""

    def describe(self) -> str:
        where = []
        if self.player is not None:
            where.append(f"player {self.player}")
        if self.coalition is not None:
            where.append(f"column {self.coalition.label()}")
        if self.detail:
            where.append(self.detail)
        loc = ", ".join(where) or "matrix"
        return (
            f"{self.condition} at {loc}: observed {self.observed:.17g}, "
            f"required {self.relation} {self.target:.17g} (tol {self.tol:g})"
        )


@dataclass(frozen=True)
class CheckReport:
    name: str
    violations: tuple[Violation, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.passed

    def conditions(self) -> set[str]:
        return {v.condition for v in self.violations}


def efficiency_target(n: int) -> np.ndarray:
    target = np.zeros(1 << n)
    target[0] = -1.0
    target[-1] = 1.0
    return target


def check_efficiency(A: AllocationMatrix, tol: float = DEFAULT_TOL) -> CheckReport:
    """Column sums must be ``-1`` at the empty coalition, ``+1`` at the grand one, 0 elsewhere.

    Equivalent to ``sum_i payoff_i = v(N) - v({})`` for every game.
    """
    sums = A.entries.sum(axis=0)
    target = efficiency_target(A.n)
    bad = np.flatnonzero(np.abs(sums - target) > tol)
    return CheckReport(
        "efficiency",
        tuple(
            Violation("column_sum", None, Coalition(int(m), A.n), float(sums[m]), "==", float(target[m]), tol)
            for m in bad
        ),
    )


def check_reasonable_structural(A: AllocationMatrix, tol: float = DEFAULT_TOL) -> CheckReport:
    """Sign, pairing and partial-row-sum conditions, which together characterize reasonableness.

    For every player ``i`` and coalition ``T`` without ``i``:

    * sign: ``A[i, T + {i}] >= 0`` and ``A[i, T] <= 0``
    * pairing: ``A[i, T] == -A[i, T + {i}]``
    * partial row sum: ``sum_T A[i, T + {i}] == 1``

    All three are evaluated in full so the report shows which ones fail.
    """
    n = A.n
    masks = np.arange(1 << n)
    E = A.entries
    out: list[Violation] = []
    for i in range(1, n + 1):
        bit = 1 << (i - 1)
        row = E[i - 1]
        member = (masks & bit) != 0
        for m in np.flatnonzero(member & (row < -tol)):
            out.append(Violation("sign", i, Coalition(int(m), n), float(row[m]), ">=", 0.0, tol))
        for m in np.flatnonzero(~member & (row > tol)):
            out.append(Violation("sign", i, Coalition(int(m), n), float(row[m]), "<=", 0.0, tol))
    for i in range(1, n + 1):
        bit = 1 << (i - 1)
        row = E[i - 1]
        without = masks[(masks & bit) == 0]
        gap = row[without] + row[without | bit]
        for k in np.flatnonzero(np.abs(gap) > tol):
            m = int(without[k])
            out.append(
                Violation("pairing", i, Coalition(m, n), float(row[m]), "==", float(-row[m | bit]), tol)
            )
    for i in range(1, n + 1):
        bit = 1 << (i - 1)
        total = float(E[i - 1, (masks & bit) != 0].sum())
        if abs(total - 1.0) > tol:
            out.append(Violation("partial_row_sum", i, None, total, "==", 1.0, tol))
    return CheckReport("reasonable_structural", tuple(out))


def check_abs_sums(A: AllocationMatrix, tol: float = DEFAULT_TOL) -> CheckReport:
    """Every row, and every column other than the first and last, has absolute sum 2."""
    absE = np.abs(A.entries)
    out: list[Violation] = []
    for i, s in enumerate(absE.sum(axis=1), start=1):
        if abs(s - 2.0) > tol:
            out.append(Violation("row_abs_sum", i, None, float(s), "==", 2.0, tol))
    col = absE.sum(axis=0)
    for m in range(1, (1 << A.n) - 1):
        if abs(col[m] - 2.0) > tol:
            out.append(Violation("column_abs_sum", None, Coalition(m, A.n), float(col[m]), "==", 2.0, tol))
    return CheckReport("abs_sums", tuple(out))


def check_level_abs_sums(A: AllocationMatrix, tol: float = DEFAULT_TOL) -> CheckReport:
    """Absolute-sum identities that hold on every reasonable, efficient matrix.

    Each row has absolute sum 2. The interior columns of a fixed cardinality
    together have absolute sum 2, and no single interior column exceeds 2.
    A single interior column sums to 2 only when every chain of the
    decomposition passes through it, so :func:`check_abs_sums` is stricter
    than what the polytope satisfies.
    """
    n = A.n
    absE = np.abs(A.entries)
    out: list[Violation] = []
    for i, s in enumerate(absE.sum(axis=1), start=1):
        if abs(s - 2.0) > tol:
            out.append(Violation("row_abs_sum", i, None, float(s), "==", 2.0, tol))
    col = absE.sum(axis=0)
    sizes = popcounts(n)
    for k in range(1, n):
        s = float(col[sizes == k].sum())
        if abs(s - 2.0) > tol:
            out.append(Violation("level_abs_sum", None, None, s, "==", 2.0, tol, f"|S| = {k}"))
    for m in range(1, (1 << n) - 1):
        if col[m] > 2.0 + tol:
            out.append(Violation("column_abs_sum", None, Coalition(m, n), float(col[m]), "<=", 2.0, tol))
    return CheckReport("level_abs_sums", tuple(out))


def check_row_sums_zero(A: AllocationMatrix, tol: float = DEFAULT_TOL) -> CheckReport:
    out = [
        Violation("row_sum", i, None, float(s), "==", 0.0, tol)
        for i, s in enumerate(A.entries.sum(axis=1), start=1)
        if abs(s) > tol
    ]
    return CheckReport("row_sums_zero", tuple(out))


# -- falsification by sampling games -------------------------------------------------


@dataclass(frozen=True)
class ReasonablenessViolation:
    """A game on which some player's payoff leaves its marginal-contribution range."""

    game: Game
    player: int
    payoff: float
    lower: float
    upper: float
    sampler: str
    index: int
    label: str

    @property
    def bound(self) -> float:
        """The bound that was crossed."""
        return self.lower if self.payoff < self.lower else self.upper


def superadditive_probe_family(n: int) -> Iterator[tuple[str, Game]]:
    """Probe games ``vSa``, ``vSc``, ``vSb`` over nonempty ``S``, then the carrier games.

    Coalitions are visited from the largest down (ties by mask), so the most
    specific probes come first.
    """
    order = sorted(range(1, 1 << n), key=lambda m: (-bin(m).count("1"), m))
    for s in order:
        S = coalition_label(s, n)
        yield f"vSa S={S}", build_probe_game("vSa", n, s)
        yield f"vSc S={S}", build_probe_game("vSc", n, s)
        for i in range(1, n + 1):
            if not s >> (i - 1) & 1:
                yield f"vSb S={S} i={i}", build_probe_game("vSb", n, s, i)
    for m in range(1, n + 1):
        yield f"carrier m={m}", build_probe_game("carrier", n, i=m)


def _first_violation(
    A: AllocationMatrix, games: np.ndarray, tol: float
) -> Optional[tuple[int, int, float, float, float]]:
    n = A.n
    payoffs = games @ A.entries.T
    lower = np.empty_like(payoffs)
    upper = np.empty_like(payoffs)
    for i in range(1, n + 1):
        mc = marginal_contributions(games, n, i)
        lower[:, i - 1] = mc.min(axis=1)
        upper[:, i - 1] = mc.max(axis=1)
    excess = np.maximum(lower - payoffs, payoffs - upper)
    flagged = np.flatnonzero((excess > tol).any(axis=1))
    if flagged.size == 0:
        return None
    k = int(flagged[0])
    j = int(np.argmax(excess[k]))
    return k, j + 1, float(payoffs[k, j]), float(lower[k, j]), float(upper[k, j])


def sample_reasonableness_violation(
    A: AllocationMatrix,
    sampler: str,
    trials: int,
    seed: int = 0,
    tol: float = DEFAULT_TOL,
) -> Optional[ReasonablenessViolation]:
    """Search a family of games for one where ``A`` pays someone outside their marginal range.

    ``monotone_random`` draws ``trials`` seeded random monotone games;
    ``superadditive_probes`` walks :func:`superadditive_probe_family`;
    ``binary_exhaustive`` walks every monotone binary game (``n <= 4``).
    For the two deterministic families ``trials`` caps how many games are
    examined. Returns the first violating game, reporting the player with the
    largest excess, or ``None``.
    """
    if sampler not in SAMPLERS:
        raise ValueError(f"unknown sampler {sampler!r}; expected one of {SAMPLERS}")
    if int(trials) < 1:
        raise ValueError("trials must be at least 1")
    n = A.n
    if sampler == "monotone_random":
        rng = np.random.default_rng(seed)
        games = random_monotone_games(n, int(trials), rng)
        labels = None
    else:
        if sampler == "binary_exhaustive":
            if n > MAX_ENUMERATION_PLAYERS:
                raise ValueError(f"binary_exhaustive needs n <= {MAX_ENUMERATION_PLAYERS}")
            family = [(f"monotone binary #{k}", g) for k, g in enumerate(enumerate_monotone_binary_games(n))]
        else:
            family = list(superadditive_probe_family(n))
        family = family[: int(trials)]
        labels = [lab for lab, _ in family]
        games = np.array([g.values for _, g in family])
    hit = _first_violation(A, games, tol)
    if hit is None:
        return None
    k, player, payoff, lo, hi = hit
    label = labels[k] if labels is not None else f"random monotone #{k}"
    return ReasonablenessViolation(Game(n, games[k]), player, payoff, lo, hi, sampler, k, label)
