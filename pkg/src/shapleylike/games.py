"""Coalitions, characteristic functions and the game transforms used to probe allocations.

A game on ``n`` players is stored as a vector of ``2**n`` values indexed by
coalition bitmask: bit ``i - 1`` is set iff player ``i`` belongs to the
coalition. Players are numbered from 1 in every public function.

    >>> v = majority_game(3)
    >>> v.values.tolist()
    [0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 1.0]
    >>> marginal_contribution(v, 1, Coalition.from_players([2], 3))
    1.0
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Sequence, Union

import numpy as np

MAX_PLAYERS = 16
MAX_ENUMERATION_PLAYERS = 4

PROBE_KINDS = ("carrier", "vSa", "vSb", "vSc")


def popcounts(n: int) -> np.ndarray:
    """Cardinality of every coalition, in bitmask order."""
    masks = np.arange(1 << n)
    counts = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        counts += (masks >> i) & 1
    return counts


def _check_n(n: int) -> None:
    if not isinstance(n, (int, np.integer)) or not 1 <= n <= MAX_PLAYERS:
        raise ValueError(f"player count must be in 1..{MAX_PLAYERS}, got {n!r}")


def _check_player(i: int, n: int) -> None:
    if not isinstance(i, (int, np.integer)) or not 1 <= i <= n:
        raise ValueError(f"player must be in 1..{n}, got {i!r}")


@dataclass(frozen=True, order=True)
class Coalition:
    """A subset of the players ``{1, ..., n}`` encoded as a bitmask."""

    mask: int
    n: int

    def __post_init__(self):
        _check_n(self.n)
        if not 0 <= self.mask < (1 << self.n):
            raise ValueError(f"mask {self.mask} out of range for n={self.n}")

    @classmethod
    def from_players(cls, players: Iterable[int], n: int) -> "Coalition":
        mask = 0
        for p in players:
            _check_player(p, n)
            mask |= 1 << (p - 1)
        return cls(mask, n)

    @classmethod
    def empty(cls, n: int) -> "Coalition":
        return cls(0, n)

    @classmethod
    def grand(cls, n: int) -> "Coalition":
        return cls((1 << n) - 1, n)

    @classmethod
    def parse(cls, label: str, n: int) -> "Coalition":
        """Parse a label such as ``"{1,3}"`` or ``"{}"``."""
        text = label.strip()
        if not (text.startswith("{") and text.endswith("}")):
            raise ValueError(f"malformed coalition label {label!r}")
        body = text[1:-1].strip()
        if not body:
            return cls(0, n)
        try:
            players = [int(tok) for tok in body.split(",")]
        except ValueError:
            raise ValueError(f"malformed coalition label {label!r}") from None
        if len(set(players)) != len(players):
            raise ValueError(f"repeated player in coalition label {label!r}")
        return cls.from_players(players, n)

    @property
    def players(self) -> tuple[int, ...]:
        return tuple(i + 1 for i in range(self.n) if self.mask >> i & 1)

    def __contains__(self, player: int) -> bool:
        _check_player(player, self.n)
        return bool(self.mask >> (player - 1) & 1)

    def __len__(self) -> int:
        return bin(self.mask).count("1")

    def __iter__(self) -> Iterator[int]:
        return iter(self.players)

    def _other(self, other: "Coalition") -> int:
        if not isinstance(other, Coalition):
            return NotImplemented
        if other.n != self.n:
            raise ValueError("coalitions over different player sets")
        return other.mask

    def __or__(self, other: "Coalition") -> "Coalition":
        return Coalition(self.mask | self._other(other), self.n)

    def __and__(self, other: "Coalition") -> "Coalition":
        return Coalition(self.mask & self._other(other), self.n)

    def __sub__(self, other: "Coalition") -> "Coalition":
        return Coalition(self.mask & ~self._other(other), self.n)

    def issubset(self, other: "Coalition") -> bool:
        return self.mask & ~self._other(other) == 0

    def add(self, player: int) -> "Coalition":
        _check_player(player, self.n)
        return Coalition(self.mask | 1 << (player - 1), self.n)

    def label(self) -> str:
        return "{" + ",".join(str(p) for p in self.players) + "}"

    def __str__(self) -> str:
        return self.label()


CoalitionLike = Union[Coalition, int]


def as_mask(S: CoalitionLike, n: int) -> int:
    """Normalize a :class:`Coalition` or raw bitmask to an int mask for ``n`` players."""
    if isinstance(S, Coalition):
        if S.n != n:
            raise ValueError(f"coalition is over {S.n} players, expected {n}")
        return S.mask
    if isinstance(S, (int, np.integer)) and not isinstance(S, bool):
        if not 0 <= S < (1 << n):
            raise ValueError(f"mask {S} out of range for n={n}")
        return int(S)
    raise TypeError(f"expected Coalition or int mask, got {type(S).__name__}")


def coalition_label(mask: int, n: int) -> str:
    return Coalition(mask, n).label()


class Game:
    """Characteristic function over ``n`` players, stored in bitmask order.

    Values are an immutable float64 vector of length ``2**n``. Predicates such
    as monotonicity are computed on demand and never cached as trusted flags.
    """

    __slots__ = ("n", "values")

    def __init__(self, n: int, values: Sequence[float] | np.ndarray):
        _check_n(n)
        arr = np.array(values, dtype=np.float64)
        if arr.shape != (1 << n,):
            raise ValueError(
                f"game on {n} players needs {1 << n} values, got shape {arr.shape}"
            )
        if not np.all(np.isfinite(arr)):
            raise ValueError("game values must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "values", arr)

    def __setattr__(self, name, value):
        raise AttributeError("Game is immutable")

    @classmethod
    def from_function(cls, n: int, f: Callable[[Coalition], float]) -> "Game":
        return cls(n, [f(Coalition(m, n)) for m in range(1 << n)])

    @classmethod
    def zero(cls, n: int) -> "Game":
        return cls(n, np.zeros(1 << n))

    def __call__(self, S: CoalitionLike) -> float:
        return float(self.values[as_mask(S, self.n)])

    def __len__(self) -> int:
        return len(self.values)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Game):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.values, other.values)

    def __hash__(self) -> int:
        return hash((self.n, self.values.tobytes()))

    def __add__(self, other: "Game") -> "Game":
        if not isinstance(other, Game) or other.n != self.n:
            return NotImplemented
        return Game(self.n, self.values + other.values)

    def __sub__(self, other: "Game") -> "Game":
        if not isinstance(other, Game) or other.n != self.n:
            return NotImplemented
        return Game(self.n, self.values - other.values)

    def __mul__(self, scalar: float) -> "Game":
        return Game(self.n, self.values * float(scalar))

    __rmul__ = __mul__

    @property
    def is_binary(self) -> bool:
        return bool(np.all((self.values == 0.0) | (self.values == 1.0)))

    def __repr__(self) -> str:
        return f"Game(n={self.n}, values={self.values.tolist()!r})"


@dataclass(frozen=True)
class SetChain:
    """Chain ``{} = M_0 < M_1 < ... < M_n = N`` adding ``permutation[k]`` at step ``k``."""

    permutation: tuple[int, ...]

    def __post_init__(self):
        perm = tuple(int(p) for p in self.permutation)
        n = len(perm)
        _check_n(n)
        if sorted(perm) != list(range(1, n + 1)):
            raise ValueError(f"{self.permutation!r} is not a permutation of 1..{n}")
        object.__setattr__(self, "permutation", perm)

    @property
    def n(self) -> int:
        return len(self.permutation)

    def masks(self) -> list[int]:
        """Bitmasks of ``M_0, ..., M_n``."""
        out = [0]
        for p in self.permutation:
            out.append(out[-1] | 1 << (p - 1))
        return out

    def links(self) -> list[tuple[int, int, int]]:
        """``(player, mask before, mask after)`` for each step of the chain."""
        masks = self.masks()
        return [(p, masks[k], masks[k + 1]) for k, p in enumerate(self.permutation)]

    @classmethod
    def from_masks(cls, masks: Sequence[int]) -> "SetChain":
        perm = []
        for a, b in zip(masks, masks[1:]):
            diff = b & ~a
            if a & ~b or diff == 0 or diff & (diff - 1):
                raise ValueError("consecutive sets must differ by exactly one player")
            perm.append(diff.bit_length())
        if masks[0] != 0:
            raise ValueError("chain must start at the empty coalition")
        return cls(tuple(perm))


def all_chains(n: int) -> Iterator[SetChain]:
    """Every set chain on ``n`` players, in lexicographic permutation order."""
    for perm in itertools.permutations(range(1, n + 1)):
        yield SetChain(perm)


# -- basic quantities ---------------------------------------------------------


def marginal_contribution(v: Game, i: int, S: CoalitionLike) -> float:
    """``v(S + {i}) - v(S)``; ``i`` must not be a member of ``S``."""
    _check_player(i, v.n)
    m = as_mask(S, v.n)
    bit = 1 << (i - 1)
    if m & bit:
        raise ValueError(f"player {i} already belongs to {coalition_label(m, v.n)}")
    return float(v.values[m | bit] - v.values[m])


def marginal_contributions(values: np.ndarray, n: int, i: int) -> np.ndarray:
    """All marginal contributions of player ``i``.

    ``values`` may be a single game vector or a batch with coalitions on the
    last axis. The result has the coalitions ``S`` not containing ``i`` on the
    last axis, in increasing mask order.
    """
    bit = 1 << (i - 1)
    without = np.flatnonzero((np.arange(1 << n) & bit) == 0)
    return values[..., without | bit] - values[..., without]


def is_monotone(v: Game, tol: float = 0.0) -> bool:
    """Whether ``v(S) <= v(T)`` whenever ``S`` is a subset of ``T``.

    Only the covers ``(S, S + {i})`` are scanned; transitivity gives the rest.
    """
    for i in range(1, v.n + 1):
        if np.any(marginal_contributions(v.values, v.n, i) < -tol):
            return False
    return True


def is_superadditive(v: Game, tol: float = 0.0) -> bool:
    """Whether ``v(S | T) >= v(S) + v(T)`` for every disjoint pair ``S``, ``T``."""
    size = 1 << v.n
    masks = np.arange(size)
    vals = v.values
    for s in range(size):
        t = masks[(masks & s) == 0]
        if np.any(vals[s | t] < vals[s] + vals[t] - tol):
            return False
    return True


def minimal_sets(v: Game) -> list[Coalition]:
    """Coalitions ``S`` with ``v(S) > 0`` and no proper subset of positive value.

    Returned in increasing mask order.
    """
    size = 1 << v.n
    positive = v.values > 0
    # below[S]: some proper subset of S has positive value
    below = np.zeros(size, dtype=bool)
    for m in range(1, size):
        sub = m
        hit = False
        while sub:
            low = sub & -sub
            r = m ^ low
            if positive[r] or below[r]:
                hit = True
                break
            sub ^= low
        below[m] = hit
    return [Coalition(m, v.n) for m in range(size) if positive[m] and not below[m]]


# -- transforms -----------------------------------------------------------------


def truncate(v: Game, S: CoalitionLike) -> Game:
    """Zero the value of the minimal coalition ``S``.

    Raises:
        ValueError: if ``S`` is not minimal in ``v``. Monotonicity and
            superadditivity are only preserved for minimal truncating sets.
    """
    m = as_mask(S, v.n)
    if m not in {c.mask for c in minimal_sets(v)}:
        raise ValueError(f"{coalition_label(m, v.n)} is not a minimal set of the game")
    vals = v.values.copy()
    vals[m] = 0.0
    return Game(v.n, vals)


def pair_truncate(v: Game, S: CoalitionLike, p: int) -> Game:
    """Truncate at ``S`` and then at ``S + {p}``."""
    _check_player(p, v.n)
    m = as_mask(S, v.n)
    bit = 1 << (p - 1)
    if m & bit:
        raise ValueError(f"player {p} belongs to the truncating set")
    return truncate(truncate(v, m), m | bit)


def extend(vM: Game, n_players: int, embedding: Sequence[int]) -> Game:
    """Lift a game on ``M`` players to ``n_players`` via ``v_N(S) = v_M(S & M)``.

    Local player ``k`` of ``vM`` becomes global player ``embedding[k - 1]``;
    the players outside the image are null in the result.
    """
    _check_n(n_players)
    emb = [int(e) for e in embedding]
    if len(emb) != vM.n:
        raise ValueError(f"embedding needs {vM.n} targets, got {len(emb)}")
    if vM.n >= n_players:
        raise ValueError("the extended player set must be strictly larger")
    for e in emb:
        _check_player(e, n_players)
    if len(set(emb)) != len(emb):
        raise ValueError(f"embedding {emb} is not injective")
    masks = np.arange(1 << n_players)
    local = np.zeros_like(masks)
    for k, e in enumerate(emb):
        local |= ((masks >> (e - 1)) & 1) << k
    return Game(n_players, vM.values[local])


def build_probe_game(
    kind: str, n: int, S: CoalitionLike | None = None, i: int | None = None
) -> Game:
    """Binary superadditive probe games used to pin down allocation matrices.

    ``carrier``
        1 exactly on coalitions containing player ``i``.
    ``vSa``
        1 iff ``S`` is a subset of ``T``.
    ``vSb``
        1 iff ``S`` is a proper subset of ``T - {i}``; requires ``i`` not in ``S``.
    ``vSc``
        1 iff ``S`` is a proper subset of ``T``.

    ``S`` must be nonempty for the three ``vS*`` kinds: with ``S`` empty they
    either put value at the empty coalition or stop being superadditive.
    """
    _check_n(n)
    masks = np.arange(1 << n)
    if kind == "carrier":
        if i is None:
            raise ValueError("carrier game needs its player i")
        _check_player(i, n)
        return Game(n, ((masks >> (i - 1)) & 1).astype(float))
    if kind not in PROBE_KINDS:
        raise ValueError(f"unknown probe kind {kind!r}; expected one of {PROBE_KINDS}")
    if S is None:
        raise ValueError(f"{kind} needs a coalition S")
    s = as_mask(S, n)
    if s == 0:
        raise ValueError(f"{kind} needs a nonempty coalition S")
    contains = (masks & s) == s
    if kind == "vSa":
        return Game(n, contains.astype(float))
    if kind == "vSc":
        return Game(n, (contains & (masks != s)).astype(float))
    if i is None:
        raise ValueError("vSb needs the player i")
    _check_player(i, n)
    bit = 1 << (i - 1)
    if s & bit:
        raise ValueError(f"player {i} must not belong to S for vSb")
    rest = masks & ~bit
    return Game(n, (((rest & s) == s) & (rest != s)).astype(float))


def majority_game(n: int) -> Game:
    """Simple majority: 1 iff the coalition holds more than half the players."""
    _check_n(n)
    return Game(n, (popcounts(n) * 2 > n).astype(float))


def additive_game(weights: Sequence[float]) -> Game:
    w = np.asarray(weights, dtype=float)
    n = len(w)
    _check_n(n)
    masks = np.arange(1 << n)
    bits = (masks[:, None] >> np.arange(n)) & 1
    return Game(n, bits @ w)


def unanimity_game(n: int, S: CoalitionLike) -> Game:
    return build_probe_game("vSa", n, S)


# -- enumeration and spanning -----------------------------------------------------


def enumerate_monotone_binary_games(n: int) -> list[Game]:
    """Every monotone 0/1 game with ``v({}) = 0``, each exactly once.

    Built by backtracking over coalitions in mask order: a coalition may take
    value 0 only if all of its covers-from-below are 0. Order is
    lexicographic on the value vector read from the empty coalition up.
    """
    _check_n(n)
    if n > MAX_ENUMERATION_PLAYERS:
        raise ValueError(
            f"enumeration is limited to n <= {MAX_ENUMERATION_PLAYERS} "
            "(the count grows like the Dedekind numbers)"
        )
    size = 1 << n
    vals = [0] * size
    out: list[Game] = []

    def forced_one(m: int) -> bool:
        sub = m
        while sub:
            low = sub & -sub
            if vals[m ^ low]:
                return True
            sub ^= low
        return False

    def fill(m: int) -> None:
        if m == size:
            out.append(Game(n, vals))
            return
        choices = (1,) if forced_one(m) else (0, 1)
        for c in choices:
            vals[m] = c
            fill(m + 1)
        vals[m] = 0

    fill(1)
    return out


def span_decompose_monotone_binary(v: Game) -> list[tuple[float, Game]]:
    """Integer combination of binary superadditive games equal to ``v``.

    Works upward through coalitions by cardinality (ties by mask). Whenever the
    running sum disagrees with ``v`` at a coalition ``S`` the up-set game of
    ``S`` (1 on every superset of ``S``, the union of all chains starting at
    ``S``) is added or subtracted to close the gap. Up-set games never hold two
    disjoint winning coalitions, so each term is superadditive. A game that is
    already superadditive is returned as its own single term.
    """
    if not v.is_binary:
        raise ValueError("game is not binary")
    if v.values[0] != 0.0:
        raise ValueError("game must vanish on the empty coalition")
    if not is_monotone(v):
        raise ValueError("game is not monotone")
    if not np.any(v.values):
        return []
    if is_superadditive(v):
        return [(1.0, v)]
    n = v.n
    order = sorted(range(1, 1 << n), key=lambda m: (bin(m).count("1"), m))
    running = np.zeros(1 << n)
    terms: list[tuple[float, Game]] = []
    for m in order:
        gap = v.values[m] - running[m]
        if gap != 0.0:
            g = build_probe_game("vSa", n, m)
            terms.append((float(gap), g))
            running = running + gap * g.values
    return terms


# -- random games -----------------------------------------------------------------


def monotone_closure(values: np.ndarray, n: int) -> np.ndarray:
    """Replace each ``v(S)`` by the max over subsets of ``S``; works on batches."""
    out = np.array(values, dtype=float, copy=True)
    for m in range(1, 1 << n):
        sub = m
        while sub:
            low = sub & -sub
            np.maximum(out[..., m], out[..., m ^ low], out=out[..., m])
            sub ^= low
    return out


def random_monotone_games(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` monotone games as a ``(count, 2**n)`` array.

    Uniform draws on ``[0, 1]``, ``v({}) = 0``, then the monotone closure.
    """
    raw = rng.random((count, 1 << n))
    raw[:, 0] = 0.0
    return monotone_closure(raw, n)


def random_superadditive_game(
    n: int, rng: np.random.Generator, sparsity: float = 0.5
) -> Game:
    """Superadditive closure of a sparse nonnegative random vector.

    ``w(S) = max(r(S), max over splits S = A + B of w(A) + w(B))``, filled in mask
    order so both parts of a split are already final.
    """
    size = 1 << n
    r = rng.random(size) * (rng.random(size) >= sparsity)
    r[0] = 0.0
    w = np.zeros(size)
    for m in range(1, size):
        best = r[m]
        a = (m - 1) & m
        while a:
            best = max(best, w[a] + w[m ^ a])
            a = (a - 1) & m
        w[m] = best
    return Game(n, w)
