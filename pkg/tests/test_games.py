import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from shapleylike import (
    Coalition,
    Game,
    SetChain,
    additive_game,
    build_probe_game,
    enumerate_monotone_binary_games,
    extend,
    is_monotone,
    is_superadditive,
    majority_game,
    marginal_contribution,
    minimal_sets,
    pair_truncate,
    random_superadditive_game,
    span_decompose_monotone_binary,
    truncate,
)
from shapleylike.games import monotone_closure, random_monotone_games


def C(*players, n=3):
    return Coalition.from_players(players, n)


def subsets(mask):
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def brute_monotone(v):
    """All pairs S subset T, no cover shortcut."""
    size = 1 << v.n
    return all(v.values[s] <= v.values[t] for t in range(size) for s in subsets(t))


def brute_superadditive(v):
    size = 1 << v.n
    return all(
        v.values[s | t] >= v.values[s] + v.values[t]
        for s in range(size)
        for t in range(size)
        if s & t == 0
    )


def binary_games(n):
    for bits in itertools.product((0.0, 1.0), repeat=1 << n):
        yield Game(n, bits)


# -- Coalition ------------------------------------------------------------------


class TestCoalition:
    def test_set_semantics(self):
        a, b = C(1, 2), C(2, 3)
        assert (a | b).players == (1, 2, 3)
        assert (a & b).players == (2,)
        assert (a - b).players == (1,)
        assert len(a) == 2
        assert 1 in a and 3 not in a
        assert C(2).issubset(a) and not a.issubset(C(2))

    def test_mask_is_bitmask_of_players(self):
        assert C(1, 3).mask == 0b101
        assert Coalition.grand(3).mask == 7
        assert Coalition.empty(3).players == ()

    def test_labels_round_trip(self):
        for m in range(8):
            c = Coalition(m, 3)
            assert Coalition.parse(c.label(), 3) == c
        assert Coalition.parse(" { 3 , 1 } ", 3) == C(1, 3)

    @pytest.mark.parametrize("bad", ["1,2", "{1,,2}", "{1,1}", "{4}", "{a}"])
    def test_bad_labels(self, bad):
        with pytest.raises(ValueError):
            Coalition.parse(bad, 3)

    def test_range_checks(self):
        with pytest.raises(ValueError):
            Coalition(8, 3)
        with pytest.raises(ValueError):
            Coalition(0, 17)
        with pytest.raises(ValueError):
            C(1) | Coalition(1, 4)

    @given(st.integers(1, 6).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, (1 << n) - 1), st.integers(0, (1 << n) - 1))))
    def test_algebra_matches_python_sets(self, case):
        n, a, b = case
        A, B = Coalition(a, n), Coalition(b, n)
        sa, sb = set(A.players), set(B.players)
        assert set((A | B).players) == sa | sb
        assert set((A & B).players) == sa & sb
        assert set((A - B).players) == sa - sb
        assert len(A) == len(sa)
        assert A.issubset(B) == (sa <= sb)


def test_game_validation():
    with pytest.raises(ValueError):
        Game(3, [0] * 7)
    with pytest.raises(ValueError):
        Game(2, [0, 1, np.inf, 1])
    v = Game(2, [0, 1, 0, 1])
    with pytest.raises(AttributeError):
        v.n = 3
    with pytest.raises(ValueError):
        v.values[0] = 5.0


def test_set_chain():
    chain = SetChain((2, 1, 3))
    assert chain.masks() == [0, 0b010, 0b011, 0b111]
    assert SetChain.from_masks(chain.masks()) == chain
    with pytest.raises(ValueError):
        SetChain((1, 1, 3))
    with pytest.raises(ValueError):
        SetChain.from_masks([0, 0b011, 0b111])


# -- marginal contributions and predicates ------------------------------------------


class TestMarginalContribution:
    def test_majority(self, maj3):
        assert marginal_contribution(maj3, 1, C(2)) == 1.0
        assert marginal_contribution(maj3, 1, C()) == 0.0

    def test_carrier_contributes_one_everywhere(self):
        v = build_probe_game("carrier", 2, i=2)
        for S in (Coalition(0, 2), Coalition(1, 2)):
            assert marginal_contribution(v, 2, S) == 1.0

    def test_rejects_member(self, maj3):
        with pytest.raises(ValueError):
            marginal_contribution(maj3, 1, C(1, 2))

    def test_rejects_bad_player(self, maj3):
        with pytest.raises(ValueError):
            marginal_contribution(maj3, 4, C(2))

    def test_accepts_raw_mask(self, maj3):
        assert marginal_contribution(maj3, 3, 0b011) == 0.0


class TestPredicates:
    def test_monotone_examples(self, maj3):
        assert is_monotone(Game.zero(4))
        assert is_monotone(maj3)
        assert not is_monotone(Game(2, [0, 1, 0, 0]))

    def test_superadditive_examples(self, maj3):
        assert is_superadditive(additive_game([1, 1, 1]))
        assert is_superadditive(build_probe_game("vSa", 3, C(1, 2)))
        assert is_superadditive(maj3)
        assert not is_superadditive(Game(2, [0, 1, 1, 1]))

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_cover_scan_agrees_with_all_pairs(self, n):
        for v in binary_games(n):
            assert is_monotone(v) == brute_monotone(v)

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_superadditive_agrees_with_brute_force(self, n):
        for v in binary_games(n):
            assert is_superadditive(v) == brute_superadditive(v)

    @given(st.integers(1, 4), st.integers(0, 2**32 - 1))
    @settings(max_examples=60)
    def test_random_real_games(self, n, seed):
        r = np.random.default_rng(seed)
        v = Game(n, np.round(r.normal(size=1 << n), 1))
        assert is_monotone(v) == brute_monotone(v)
        assert is_superadditive(v) == brute_superadditive(v)

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_binary_superadditive_implies_monotone(self, n):
        # v(S | T) >= v(S) + v(T) >= v(S) once values are nonnegative
        for bits in itertools.product((0.0, 1.0), repeat=(1 << n) - 1):
            v = Game(n, (0.0,) + bits)
            if is_superadditive(v):
                assert is_monotone(v)


class TestMinimalSets:
    def test_majority(self, maj3):
        assert [c.players for c in minimal_sets(maj3)] == [(1, 2), (1, 3), (2, 3)]

    def test_zero_game(self):
        assert minimal_sets(Game.zero(3)) == []

    def test_carrier(self):
        v = build_probe_game("carrier", 2, i=1)
        assert minimal_sets(v) == [Coalition.from_players([1], 2)]

    @pytest.mark.parametrize("n", [2, 3])
    def test_matches_definition(self, n):
        for v in binary_games(n):
            expected = [
                m
                for m in range(1 << n)
                if v.values[m] > 0 and not any(v.values[s] > 0 for s in subsets(m) if s != m)
            ]
            assert [c.mask for c in minimal_sets(v)] == expected


# -- transforms ---------------------------------------------------------------------


class TestTruncate:
    def test_truncating_vSa_gives_vSc(self):
        S = C(1, 2)
        assert truncate(build_probe_game("vSa", 3, S), S) == build_probe_game("vSc", 3, S)

    def test_zero_game_has_no_minimal_set(self):
        with pytest.raises(ValueError, match="not a minimal set"):
            truncate(Game.zero(3), C(1))

    def test_majority(self, maj3):
        w = truncate(maj3, C(1, 2))
        expected = maj3.values.copy()
        expected[0b011] = 0.0
        assert np.array_equal(w.values, expected)
        assert brute_monotone(w)

    def test_rejects_non_minimal(self, maj3):
        with pytest.raises(ValueError):
            truncate(maj3, Coalition.grand(3))

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_preserves_monotone_exhaustively(self, n):
        for v in enumerate_monotone_binary_games(n):
            for S in minimal_sets(v):
                w = truncate(v, S)
                assert brute_monotone(w)
                if is_superadditive(v):
                    assert is_superadditive(w)

    def test_preserves_superadditive_on_random_games(self):
        r = np.random.default_rng(7)
        checked = 0
        for k in range(200):
            v = random_superadditive_game(int(r.integers(2, 6)), r)
            assert brute_superadditive(v)
            for S in minimal_sets(v):
                assert is_superadditive(truncate(v, S))
                checked += 1
        assert checked >= 200


class TestPairTruncate:
    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_vSa_to_vSb(self, n):
        for s in range(1, (1 << n) - 1):
            for i in range(1, n + 1):
                if s >> (i - 1) & 1:
                    continue
                vSa = build_probe_game("vSa", n, s)
                assert pair_truncate(vSa, s, i) == build_probe_game("vSb", n, s, i)
                assert truncate(vSa, s) == build_probe_game("vSc", n, s)

    def test_carrier_keeps_zero_contribution(self):
        n, m, p = 3, 1, 2
        v = build_probe_game("carrier", n, i=m)
        S = C(1)
        w = pair_truncate(v, S, p)
        assert np.count_nonzero(w.values != v.values) == 2
        for T in range(1 << n):
            if not T >> (p - 1) & 1:
                assert marginal_contribution(w, p, T) == 0.0

    def test_rejects_member(self):
        v = build_probe_game("vSa", 3, C(1, 2))
        with pytest.raises(ValueError):
            pair_truncate(v, C(1, 2), 1)

    def test_rejects_non_minimal_second_set(self, maj3):
        # {1,2} + {3} is the grand coalition, which stays non-minimal after truncating {1,2}
        with pytest.raises(ValueError):
            pair_truncate(maj3, C(1, 2), 3)


class TestExtend:
    def test_unanimity(self):
        vM = Game(2, [0, 0, 0, 1])
        vN = extend(vM, 3, [1, 2])
        assert [m for m in range(8) if vN.values[m]] == [0b011, 0b111]

    def test_definition_pointwise(self):
        r = np.random.default_rng(3)
        vM = Game(2, r.random(4))
        vN = extend(vM, 4, [4, 2])
        for S in range(16):
            local = (S >> 3 & 1) | ((S >> 1 & 1) << 1)
            assert vN.values[S] == vM.values[local]

    def test_outside_players_are_null(self):
        vM = Game(2, [0, 0.3, 0.5, 1.2])
        vN = extend(vM, 4, [3, 1])
        for i in (2, 4):
            for S in range(16):
                if not S >> (i - 1) & 1:
                    assert marginal_contribution(vN, i, S) == 0.0

    def test_rejects_non_injective(self):
        with pytest.raises(ValueError, match="injective"):
            extend(Game(2, [0, 0, 0, 1]), 3, [1, 1])

    def test_rejects_same_size(self):
        with pytest.raises(ValueError):
            extend(Game(2, [0, 0, 0, 1]), 2, [1, 2])

    @pytest.mark.parametrize("m", [1, 2, 3])
    def test_preserves_predicates(self, m):
        for vM in enumerate_monotone_binary_games(m):
            sup = is_superadditive(vM)
            for emb in itertools.permutations(range(1, 5), m):
                vN = extend(vM, 4, emb)
                assert is_monotone(vN)
                assert is_superadditive(vN) == sup


class TestProbeGames:
    def test_carrier(self):
        assert build_probe_game("carrier", 2, i=1).values.tolist() == [0, 1, 0, 1]

    def test_vSa(self):
        v = build_probe_game("vSa", 3, C(1, 2))
        assert [m for m in range(8) if v.values[m]] == [0b011, 0b111]

    def test_vSb(self):
        v = build_probe_game("vSb", 3, C(2), 1)
        expected = [T for T in range(8) if (T & ~1) & 0b010 and (T & ~1) != 0b010]
        assert [m for m in range(8) if v.values[m]] == expected == [0b110, 0b111]

    def test_vSb_rejects_member(self):
        with pytest.raises(ValueError):
            build_probe_game("vSb", 3, C(1, 2), 1)

    @pytest.mark.parametrize("kind", ["vSa", "vSc"])
    def test_empty_S_rejected(self, kind):
        with pytest.raises(ValueError):
            build_probe_game(kind, 3, 0)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            build_probe_game("vSd", 3, 1)

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_all_probes_binary_superadditive(self, n):
        for m in range(1, n + 1):
            assert brute_superadditive(build_probe_game("carrier", n, i=m))
        for s in range(1, 1 << n):
            for kind in ("vSa", "vSc"):
                g = build_probe_game(kind, n, s)
                assert g.is_binary and brute_superadditive(g)
            for i in range(1, n + 1):
                if not s >> (i - 1) & 1:
                    g = build_probe_game("vSb", n, s, i)
                    assert g.is_binary and brute_superadditive(g)


# -- enumeration and spanning ----------------------------------------------------------


class TestEnumeration:
    @pytest.mark.parametrize("n,count", [(1, 2), (2, 5), (3, 19), (4, 167)])
    def test_counts(self, n, count):
        assert len(enumerate_monotone_binary_games(n)) == count

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_matches_full_scan(self, n):
        scan = {v for v in binary_games(n) if v.values[0] == 0 and brute_monotone(v)}
        got = enumerate_monotone_binary_games(n)
        assert len(got) == len(set(got)) == len(scan)
        assert set(got) == scan

    def test_deterministic_order(self):
        assert enumerate_monotone_binary_games(3) == enumerate_monotone_binary_games(3)
        assert enumerate_monotone_binary_games(1) == [Game(1, [0, 0]), Game(1, [0, 1])]

    def test_guard(self):
        with pytest.raises(ValueError):
            enumerate_monotone_binary_games(5)


def moebius(v):
    """Harsanyi dividends: d(S) = sum over T subset S of (-1)^{|S|-|T|} v(T)."""
    d = np.zeros(1 << v.n)
    for s in range(1 << v.n):
        d[s] = sum((-1) ** (bin(s).count("1") - bin(t).count("1")) * v.values[t] for t in subsets(s))
    return d


class TestSpan:
    def test_two_player_or_game(self):
        terms = span_decompose_monotone_binary(Game(2, [0, 1, 1, 1]))
        assert [(c, g.values.tolist()) for c, g in terms] == [
            (1.0, [0, 1, 0, 1]),
            (1.0, [0, 0, 1, 1]),
            (-1.0, [0, 0, 0, 1]),
        ]

    def test_superadditive_input_is_one_term(self):
        v = build_probe_game("vSa", 3, C(1, 2))
        assert span_decompose_monotone_binary(v) == [(1.0, v)]

    def test_zero_game(self):
        assert span_decompose_monotone_binary(Game.zero(3)) == []

    @pytest.mark.parametrize("bad", [Game(2, [0, 0.5, 1, 1]), Game(2, [0, 1, 0, 0]), Game(2, [1, 1, 1, 1])])
    def test_rejects(self, bad):
        with pytest.raises(ValueError):
            span_decompose_monotone_binary(bad)

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_reconstructs_exactly(self, n):
        for v in enumerate_monotone_binary_games(n):
            terms = span_decompose_monotone_binary(v)
            total = np.zeros(1 << n)
            for c, g in terms:
                assert c == int(c)
                assert g.is_binary and is_superadditive(g)
                total += c * g.values
            assert np.array_equal(total, v.values)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_coefficients_are_dividends(self, n):
        # outside the single-term shortcut, the greedy lands on the Moebius inverse
        for v in enumerate_monotone_binary_games(n):
            if is_superadditive(v):
                continue
            d = moebius(v)
            got = np.zeros(1 << n)
            for c, g in span_decompose_monotone_binary(v):
                (s,) = [c_.mask for c_ in minimal_sets(g)]
                got[s] += c
            assert np.array_equal(got, d)


# -- random generators ------------------------------------------------------------------


def test_random_monotone_games_are_monotone():
    r = np.random.default_rng(0)
    batch = random_monotone_games(4, 50, r)
    assert batch.shape == (50, 16)
    for row in batch:
        v = Game(4, row)
        assert v.values[0] == 0.0 and brute_monotone(v)


def test_monotone_closure_is_idempotent():
    r = np.random.default_rng(1)
    once = monotone_closure(r.random((5, 8)), 3)
    assert np.array_equal(monotone_closure(once, 3), once)
