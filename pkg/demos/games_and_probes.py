"""
Games on bitmasks
=================

A game on n players is a vector of 2**n values. Bit i-1 of an index says
whether player i is in the coalition.
"""

from shapleylike import (
    Coalition,
    Game,
    build_probe_game,
    enumerate_monotone_binary_games,
    is_monotone,
    is_superadditive,
    majority_game,
    minimal_sets,
    span_decompose_monotone_binary,
    truncate,
)

# three-player majority: any two players win
v = majority_game(3)
for m in range(8):
    print(Coalition(m, 3).label(), v.values[m])

print("monotone", is_monotone(v), "superadditive", is_superadditive(v))
print("minimal winning sets", [c.label() for c in minimal_sets(v)])

# zeroing a minimal set keeps the game monotone
w = truncate(v, Coalition.from_players([1, 2], 3))
print("after truncating {1,2}:", w.values, is_monotone(w))

# probe games used to test reasonableness
S = Coalition.from_players([1], 3)
for kind in ("vSa", "vSc"):
    g = build_probe_game(kind, 3, S)
    print(kind, [Coalition(m, 3).label() for m in range(8) if g.values[m]])

# there are 19 monotone binary games on three players with v({}) = 0
games = enumerate_monotone_binary_games(3)
print(len(games), "monotone binary games")

# each one is an integer combination of superadditive binary games
# "player 2 or player 3" is monotone but not superadditive: {2} and {3} both win
either = Game.from_function(3, lambda c: float(2 in c or 3 in c))
print("superadditive:", is_superadditive(either))
for coef, g in span_decompose_monotone_binary(either):
    print(f"{coef:+.0f} x", [Coalition(m, 3).label() for m in range(8) if g.values[m]])
