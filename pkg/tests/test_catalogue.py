import random
from fractions import Fraction

import pytest

from hats import (
    complete_game, cycle_game, verify_strategy, is_precise, correct_count,
    ValidationError,
)
from hats.catalogue import (
    almost_clique_classify, almost_complete_game, almost_reciprocal_sum,
    arithmetic_clique_strategy, classify_game, clique_classify,
    cycle_classify, generalized_bow, hall_clique_strategy, named_game,
    path_ends2_strategy, reciprocal_sum, strategy_6623, sylvester_max_hatness,
    NAMED_GAME_IDS,
)
import oracles


# -- complete graphs ---------------------------------------------------------


def test_clique_classify_examples():
    assert clique_classify([4, 5, 5, 5, 6]).is_winning
    v = clique_classify([2, 3, 7])
    assert v.is_losing and v.reason == "clique-sum<1"
    assert reciprocal_sum([2, 3, 7]) == Fraction(41, 42)
    assert clique_classify([1]).is_winning


def test_clique_witness_verifies():
    for hats in ([2, 2], [2, 4, 4], [3, 3, 3], [2, 2, 5], [4, 5, 5, 5, 6]):
        v = clique_classify(hats)
        assert v.is_winning
        assert verify_strategy(complete_game(hats), v.witness).winning


def test_arithmetic_strategy_classical_case():
    # constant hatness n on n sages: the modular-sum strategy, precise
    g = complete_game([3, 3, 3])
    s = arithmetic_clique_strategy(g)
    assert verify_strategy(g, s).winning
    assert is_precise(g, s)


def test_arithmetic_strategy_244():
    g = complete_game([2, 4, 4])
    s = arithmetic_clique_strategy(g)
    assert verify_strategy(g, s).winning
    assert g.total_arrangements == 32


def test_arithmetic_strategy_236_precise():
    g = complete_game([2, 3, 6])
    s = arithmetic_clique_strategy(g)
    assert is_precise(g, s)


def test_arithmetic_requires_enough_colors():
    with pytest.raises(ValidationError):
        arithmetic_clique_strategy(complete_game([2, 3]))


def test_hall_strategy_cases():
    g22 = complete_game([2, 2])
    assert is_precise(g22, hall_clique_strategy(g22))
    g236 = complete_game([2, 3, 6])
    s = hall_clique_strategy(g236)
    assert verify_strategy(g236, s).winning and is_precise(g236, s)
    g222 = complete_game([2, 2, 2])
    s = hall_clique_strategy(g222)
    assert verify_strategy(g222, s).winning
    assert not is_precise(g222, s)  # lonely candidate sets exist


def test_both_strategies_precise_iff_sum_is_one():
    rng = random.Random(5)
    cases = [[2, 2], [2, 4, 4], [2, 3, 6], [2, 2, 2], [2, 2, 3], [3, 3, 3], [2, 3, 4]]
    for hats in cases:
        if reciprocal_sum(hats) < 1:
            continue
        g = complete_game(hats)
        tight = reciprocal_sum(hats) == 1
        for s in (arithmetic_clique_strategy(g), hall_clique_strategy(g)):
            assert verify_strategy(g, s).winning
            assert is_precise(g, s) == tight, hats


# -- almost complete graphs -----------------------------------------------------


def test_almost_examples():
    v = almost_clique_classify([3, 6, 3, 4])
    assert v.is_losing and v.reason == "divisibility"
    v = almost_clique_classify([2, 10, 4, 5])
    assert v.is_losing and v.reason == "equality-clique-2"
    v = almost_clique_classify([6, 6, 2, 3])
    assert v.is_winning
    g = almost_complete_game([6, 6, 2, 3])
    assert g.total_arrangements == 216
    assert verify_strategy(g, v.witness).winning


def test_almost_inequality_is_necessary():
    # below the counting bound: always losing
    v = almost_clique_classify([4, 4, 4, 4])
    assert v.is_losing and v.reason == "almost-ineq"
    assert almost_reciprocal_sum([4, 4, 4, 4]) < 1


def test_almost_boundary_three_two_pattern():
    # equality case, divisibility passes, but a clique 3 beside a pair 2
    assert almost_reciprocal_sum([3, 12, 2, 6]) == 1
    v = almost_clique_classify([3, 12, 2, 6])
    assert v.is_losing and v.reason == "equality-pair-3-2"


def test_almost_never_wins_below_the_bound():
    rng = random.Random(2)
    for _ in range(200):
        n = rng.randint(3, 5)
        hats = [rng.randint(2, 9) for _ in range(n)]
        v = almost_clique_classify(hats)
        if v.is_winning:
            assert almost_reciprocal_sum(hats) >= 1


def test_6623_strategy_detail():
    g, s = strategy_6623()
    assert verify_strategy(g, s).winning
    assert correct_count(g, s, "C") == 108  # exactly half of 216
    v = almost_clique_classify([6, 6, 3, 2])
    assert v.is_winning
    assert verify_strategy(almost_complete_game([6, 6, 3, 2]), v.witness).winning


def test_almost_unknown_defers():
    # strict inequality without a known construction stays open
    v = almost_clique_classify([6, 6, 2, 2])
    assert v.status == "unknown"


# -- maximum hatness ---------------------------------------------------------------


def test_sylvester_small():
    assert sylvester_max_hatness(1) == 1
    assert sylvester_max_hatness(2) == 2


def test_sylvester_matches_brute_force():
    assert sylvester_max_hatness(3) == oracles.max_hatness_brute(3, cap=64) == 6
    assert sylvester_max_hatness(4) == oracles.max_hatness_brute(4, cap=50) == 42
    assert Fraction(1, 2) + Fraction(1, 3) + Fraction(1, 7) + Fraction(1, 42) == 1


def test_sylvester_growth():
    assert sylvester_max_hatness(5) == 1806
    assert len(str(sylvester_max_hatness(8) + 1)) == 27  # a 27-digit bound for 8 sages


# -- cycles ---------------------------------------------------------------------


def verify_cycle(hats, want_status, want_reason=None):
    g = cycle_game(hats)
    v = cycle_classify(g)
    assert v.status == want_status, (hats, v.status, v.reason)
    if want_reason:
        assert v.reason == want_reason
    if v.is_winning:
        assert verify_strategy(g, v.witness).winning, hats
    return v


def test_cycle_triangle():
    verify_cycle([2, 4, 4], "winning", "cycle-triangle")
    verify_cycle([2, 3, 4], "winning")


def test_cycle_two_twos():
    verify_cycle([2, 4, 4, 4, 2], "winning", "cycle-two-2s")
    verify_cycle([2, 4, 2, 4], "winning")
    verify_cycle([2, 2, 4, 4, 4, 4], "winning")


def test_cycle_neighbor_threes():
    verify_cycle([2, 3, 4, 3], "winning", "cycle-neighbors-33")
    verify_cycle([2, 3, 4, 4, 3], "winning")


def test_cycle_run_of_threes():
    verify_cycle([2, 3, 3, 4], "winning", "cycle-2-33-run")
    verify_cycle([2, 3, 3, 4, 4], "winning")
    verify_cycle([4, 3, 3, 2, 4, 4], "winning")


def test_cycle_conjecture_instances_stay_open():
    verify_cycle([2, 4, 3, 4], "unknown")
    verify_cycle([2, 4, 4, 3, 4], "unknown")


def test_cycle_rejects_bad_input():
    with pytest.raises(ValidationError):
        cycle_classify(cycle_game([2, 5, 4]))
    with pytest.raises(ValidationError):
        cycle_classify(cycle_game([3, 3, 3, 3]))


def test_path_pattern_builder():
    cg = path_ends2_strategy(["P", "Q", "R", "S"])
    assert cg.game.hatness == (2, 4, 4, 2)
    assert cg.verified


# -- bows and named games --------------------------------------------------------


def test_generalized_bow_medium():
    cg = generalized_bow([5, 5, 5], [5, 5, 5], 5, 2)
    assert cg.game.total_arrangements == 5**7
    assert cg.verified


def test_named_games_all_verify():
    for game_id in NAMED_GAME_IDS:
        cg = named_game(game_id)
        assert cg.status == "winning"
        assert cg.verified is True, game_id


def test_named_big_bow_shape():
    cg = named_game("big-bow")
    assert cg.game.n == 9
    assert sorted(cg.game.hatness) == [4, 4, 5, 5, 5, 5, 5, 5, 37]
    assert cg.game.total_arrangements == 9_250_000


def test_named_medium_bow_shape():
    cg = named_game("medium-bow")
    assert cg.game.n == 7
    assert set(cg.game.hatness) == {5}
    assert len(cg.game.edges) == 12  # two 4-cliques sharing a vertex


def test_named_cone_example_shape():
    cg = named_game("cone-example")
    assert sorted(cg.game.hatness) == sorted([4, 6, 3, 3, 3, 6, 3, 3, 6, 3, 3])


def test_named_triangle():
    cg = named_game("triangle-244")
    assert sorted(cg.game.hatness) == [2, 4, 4]


def test_named_unknown_id():
    with pytest.raises(ValidationError):
        named_game("no-such-game")


# -- dispatch ---------------------------------------------------------------------


def test_classify_game_dispatch():
    assert classify_game(complete_game([2, 3])).reason == "clique-sum<1"
    v = classify_game(almost_complete_game([6, 6, 2, 3]))
    assert v.is_winning
    assert classify_game(cycle_game([2, 3, 4, 3])).is_winning
    from hats import path_game
    assert classify_game(path_game([2, 2, 2, 2])).status == "unknown"


def test_classify_game_almost_any_order():
    # removed edge in a non-canonical position still routes correctly
    from hats import Game
    g = Game([("P", 2), ("Q", 6), ("R", 3), ("S", 6)],
             [("P", "Q"), ("P", "S"), ("Q", "R"), ("Q", "S"), ("R", "S")])
    v = classify_game(g)  # removed edge P-R: hatness layout (6,6 | 2,3)
    assert v.is_winning
    assert verify_strategy(g, v.witness).winning
