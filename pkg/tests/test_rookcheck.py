import random

import pytest

from hats import cycle_game, verify_strategy, ValidationError
from hats import kernels
from hats.rookcheck import (
    Board, BoardPair, RookStrategyPair, ROOK, QUEEN, KING,
    attacks, attack_set, board_pair_of_cycle, board_to_dimacs,
    boards_from_strategy, catalogue_rook, king_check_classify, king_spread, queen_4x4_5x5_strategy,
    queen_5player_11x11, queen_two_color_strategy, solve_rook,
    strategy_from_boards, verify_by_enumeration, verify_king_strategy,
    verify_queen_strategy, verify_rook_strategy, weak_cells, win3_strategy,
    WIN4_PAIR, WIN4_STRATEGY, WIN5_PAIR, WIN5_STRATEGY,
)
from hats.solver import parse_dimacs, solve_cnf

import oracles


# -- geometry -----------------------------------------------------------------


def test_weak_cells_examples():
    assert weak_cells(Board(2, 3), 0) == {4, 5}
    assert weak_cells(Board(1, 7), 3) == set()
    assert weak_cells(Board(2, 2), 0) == {3}


def test_attack_sets_contain_own_cell():
    for piece in (ROOK, QUEEN, KING):
        b = Board(3, 4)
        for cell in range(b.cells):
            assert cell in attack_set(piece, b, cell)


def test_rook_cross_subset_of_queen():
    for rows in range(1, 7):
        for cols in range(1, 7):
            b = Board(rows, cols)
            for cell in range(b.cells):
                assert attack_set(ROOK, b, cell) <= attack_set(QUEEN, b, cell)


# -- verification engines ------------------------------------------------------


def random_pair_strategy(rng, pair):
    return RookStrategyPair(
        tuple(rng.randrange(pair.right.cells) for _ in range(pair.left.cells)),
        tuple(rng.randrange(pair.left.cells) for _ in range(pair.right.cells)))


def test_lemma_form_equals_enumeration():
    rng = random.Random(0)
    for _ in range(60):
        pair = BoardPair(Board(rng.randint(1, 5), rng.randint(1, 6)),
                         Board(rng.randint(1, 5), rng.randint(1, 6)))
        s = random_pair_strategy(rng, pair)
        a = verify_rook_strategy(pair, s)["winning"]
        b = verify_by_enumeration(pair, s)["winning"]
        assert a == b
        assert b == oracles.board_strategy_wins(
            pair, s, lambda brd, f, t: attacks(ROOK, brd, f, t))


def test_figure_strategies_verify():
    assert verify_rook_strategy(WIN4_PAIR, WIN4_STRATEGY)["winning"]
    assert verify_by_enumeration(WIN4_PAIR, WIN4_STRATEGY)["winning"]
    assert verify_rook_strategy(WIN5_PAIR, WIN5_STRATEGY)["winning"]


def test_degenerate_strategy_refuted():
    pair = BoardPair(Board(2, 3), Board(4, 4))
    s = RookStrategyPair((0,) * 6, (0,) * 16)
    res = verify_by_enumeration(pair, s)
    assert not res["winning"] and res["violation"] is not None


def test_strategy_validation():
    pair = BoardPair(Board(2, 2), Board(2, 2))
    with pytest.raises(ValidationError):
        RookStrategyPair((0,), (0, 0, 0, 0)).validate(pair)
    with pytest.raises(ValidationError):
        RookStrategyPair((9, 0, 0, 0), (0, 0, 0, 0)).validate(pair)


# -- the exhaustive solver -----------------------------------------------------------


TABLE = [
    ("win1", BoardPair(Board(1, 4), Board(5, 5)), "winning"),
    ("win2", BoardPair(Board(2, 3), Board(2, 4)), "winning"),
    ("win3", BoardPair(Board(3, 3), Board(3, 3)), "winning"),
    ("win4", BoardPair(Board(2, 3), Board(3, 4)), "winning"),
    ("win5", BoardPair(Board(2, 4), Board(3, 3)), "winning"),
    ("win6", BoardPair(Board(2, 2), Board(4, 5)), "winning"),
    ("lose1", BoardPair(Board(2, 3), Board(4, 4)), "losing"),
    ("lose2", BoardPair(Board(2, 3), Board(3, 5)), "losing"),
    ("lose3", BoardPair(Board(2, 4), Board(3, 4)), "losing"),
    ("lose4", BoardPair(Board(2, 5), Board(3, 3)), "losing"),
    ("lose5", BoardPair(Board(3, 3), Board(3, 4)), "losing"),
    ("lose6", BoardPair(Board(2, 2), Board(5, 5)), "losing"),
]

_heavy = {"lose2", "lose3", "lose4", "lose5"}


@pytest.mark.parametrize("name,pair,want", TABLE,
                         ids=[t[0] for t in TABLE])
def test_solve_rook_reproduces_table(name, pair, want):
    if name in _heavy and kernels.get_backend() != "numba":
        pytest.skip("exhaustion of this case needs the compiled backend")
    v = solve_rook(pair)
    assert v.status == want
    if want == "winning":
        assert verify_rook_strategy(pair, v.witness_pair)["winning"]


def test_symmetry_reduction_is_sound():
    for pair in (BoardPair(Board(2, 2), Board(3, 3)),
                 BoardPair(Board(2, 3), Board(3, 3)),
                 BoardPair(Board(2, 2), Board(4, 4))):
        a = solve_rook(pair, symmetry=True).status
        b = solve_rook(pair, symmetry=False).status
        assert a == b


def test_solve_rook_budget():
    v = solve_rook(BoardPair(Board(2, 3), Board(4, 4)), budget=10)
    assert v.status == "unknown" and v.reason == "budget"


def test_catalogue_matches_solver_on_the_table():
    for name, pair, want in TABLE:
        v = catalogue_rook(pair)
        assert v.status == want, name
        if want == "winning":
            assert verify_rook_strategy(pair, v.witness_pair)["winning"]


def test_catalogue_dominance_and_symmetry():
    cases = [
        (BoardPair(Board(3, 4), Board(3, 4)), "losing"),
        (BoardPair(Board(2, 3), Board(3, 3)), "winning"),
        (BoardPair(Board(1, 9), Board(7, 7)), "winning"),
        (BoardPair(Board(4, 4), Board(2, 3)), "losing"),   # swapped
        (BoardPair(Board(3, 2), Board(4, 3)), "winning"),  # transposed win4
        (BoardPair(Board(5, 2), Board(3, 3)), "losing"),   # transposed lose4
        (BoardPair(Board(2, 2), Board(4, 40)), "winning"),
        (BoardPair(Board(2, 2), Board(5, 6)), "losing"),
        (BoardPair(Board(2, 40), Board(2, 2)), "winning"),
    ]
    for pair, want in cases:
        v = catalogue_rook(pair)
        assert v.status == want, str(pair)
        if want == "winning":
            assert verify_rook_strategy(pair, v.witness_pair)["winning"], str(pair)
        # swapping the boards never changes the verdict
        swapped = catalogue_rook(BoardPair(pair.right, pair.left))
        assert swapped.status == want


def test_win3_strategy_and_figure_transcription():
    s = win3_strategy()
    pair = BoardPair(Board(3, 3), Board(3, 3))
    assert verify_rook_strategy(pair, s)["winning"]
    # the published arrow diagrams, in color coordinates (column, row):
    board = Board(3, 3)
    col_of = {2: 0, 0: 1, 1: 2}  # color -> picture column
    row_of = {1: 0, 0: 1, 2: 2}  # color -> picture row (top to bottom)

    def cell(p, q):  # (x-color, y-color) -> cell index
        return board.idx(row_of[q], col_of[p])

    l_map = {(0, 0): (0, 0), (1, 0): (1, 1), (1, 1): (2, 0), (2, 0): (2, 2),
             (0, 2): (2, 1), (1, 2): (0, 2), (0, 1): (1, 2), (2, 1): (0, 1),
             (2, 2): (1, 0)}
    r_map = {(0, 0): (0, 0), (2, 2): (2, 0), (1, 0): (2, 2), (1, 1): (1, 0),
             (2, 0): (1, 1), (0, 2): (1, 2), (1, 2): (0, 1), (0, 1): (2, 1),
             (2, 1): (0, 2)}
    r_placement = [0] * 9
    l_labels = [0] * 9
    for (p, q), (p2, q2) in r_map.items():
        r_placement[cell(p, q)] = cell(p2, q2)
    for (p, q), (p2, q2) in l_map.items():
        l_labels[cell(p, q)] = cell(p2, q2)
    fig = RookStrategyPair(tuple(r_placement), tuple(l_labels))
    assert verify_rook_strategy(pair, fig)["winning"]
    # the center-sees-center rule
    assert fig.r_placement[board.idx(1, 1)] == board.idx(1, 1)
    assert fig.l_labels[board.idx(1, 1)] == board.idx(1, 1)


# -- the 4-cycle bridge ----------------------------------------------------------------


def test_bridge_dimensions():
    pair = board_pair_of_cycle(cycle_game([2, 4, 3, 4]))
    assert (pair.left.rows, pair.left.cols) == (2, 3)
    assert (pair.right.rows, pair.right.cols) == (4, 4)


def test_bridge_round_trip():
    g = cycle_game([3, 3, 3, 3])
    pair = board_pair_of_cycle(g)
    s = win3_strategy()
    w = strategy_from_boards(g, pair, s)
    assert verify_strategy(g, w).winning
    assert boards_from_strategy(g, w) == s


def test_bridge_win_predicate_preserved():
    rng = random.Random(4)
    for _ in range(20):
        hats = [rng.randint(1, 3) for _ in range(4)]
        g = cycle_game(hats)
        pair = board_pair_of_cycle(g)
        s = random_pair_strategy(rng, pair)
        w = strategy_from_boards(g, pair, s)
        assert verify_strategy(g, w).winning == \
            verify_by_enumeration(pair, s)["winning"]


def test_bridge_rejects_non_cycle():
    from hats import complete_game
    with pytest.raises(ValidationError):
        board_pair_of_cycle(complete_game([2, 2, 2, 2]))


# -- queen check -------------------------------------------------------------------


def test_queen_two_color_strategy():
    pair, s = queen_two_color_strategy()
    assert pair.left.cells * 1 == 20
    res = verify_queen_strategy(pair, s)
    assert res["winning"]


def test_queen_4x4_5x5_strategy():
    pair, s = queen_4x4_5x5_strategy()
    res = verify_queen_strategy(pair, s)
    assert res["winning"]


def test_queen_figures_fail_with_rook_attacks():
    # the queen wins genuinely use the diagonals
    pair, s = queen_two_color_strategy()
    assert not verify_by_enumeration(pair, s, ROOK)["winning"]


def test_queen_five_player_lemma_small_sample():
    rep = queen_5player_11x11(seed=7, samples=20_000)
    assert rep["dominated"] == 121
    assert rep["slice_failures"] == 0
    assert rep["random_failures"] == 0
    assert len(rep["weights"]) == 121


def test_queen_five_player_deterministic():
    a = queen_5player_11x11(seed=3, samples=1000)
    b = queen_5player_11x11(seed=3, samples=1000)
    assert a == b


# -- king check --------------------------------------------------------------------


def test_king_spread_matches_brute_force():
    for rows in range(1, 8):
        for cols in range(1, 8):
            assert king_spread(Board(rows, cols)) == \
                oracles.king_spread_brute(rows, cols), (rows, cols)


def test_king_classify_examples():
    v = king_check_classify(BoardPair(Board(3, 6), Board(3, 6)))
    assert v.status == "winning"
    assert verify_king_strategy(BoardPair(Board(3, 6), Board(3, 6)),
                                v.witness_pair)["winning"]
    assert king_check_classify(BoardPair(Board(4, 4), Board(2, 4))).status == "losing"
    assert king_check_classify(BoardPair(Board(1, 2), Board(9, 9))).status == "winning"


def test_king_classify_matches_condition():
    for rows in range(1, 8):
        for cols in range(1, 8):
            for rows2 in range(1, 8):
                l = king_spread(Board(rows, cols))
                r = king_spread(Board(rows2, rows2))
                v = king_check_classify(BoardPair(Board(rows, cols),
                                                  Board(rows2, rows2)))
                want = "winning" if min(l, r) == 1 or (l == 2 and r == 2) \
                    else "losing"
                assert v.status == want
                if v.status == "winning":
                    assert verify_king_strategy(
                        BoardPair(Board(rows, cols), Board(rows2, rows2)),
                        v.witness_pair)["winning"]


def test_king_same_square_convention():
    # cells 0, 3, 6 of a 1x7 board are pairwise safe, so the spread is 3
    assert king_spread(Board(1, 7)) == 3
    b = Board(1, 7)
    assert attacks(KING, b, 0, 0)
    assert not attacks(KING, b, 0, 3)


# -- DIMACS export -----------------------------------------------------------------


def test_board_dimacs_rook_sat():
    pair = BoardPair(Board(2, 2), Board(2, 2))
    nv, cls = parse_dimacs(board_to_dimacs(pair, ROOK))
    status, model = solve_cnf(nv, cls, node_budget=200_000)
    assert status == "sat"


def test_board_dimacs_queen_export_shape():
    pair = BoardPair(Board(3, 4), Board(7, 7))
    text = board_to_dimacs(pair, QUEEN)
    nv, cls = parse_dimacs(text)
    nl, nr = 12, 49
    assert nv == 2 * nl * nr
    want = nr + nr * nl * (nl - 1) // 2 + nl + nl * nr * (nr - 1) // 2 + nl * nr
    assert len(cls) == want


def test_queen_chessboard_coloring_variant():
    pair, s = queen_two_color_strategy(coloring="chess")
    assert verify_queen_strategy(pair, s)["winning"]


def test_solve_rook_size_guards():
    from hats.core import SizeLimitError
    with pytest.raises(SizeLimitError):
        solve_rook(BoardPair(Board(5, 5), Board(2, 2)))
    with pytest.raises(SizeLimitError):
        solve_rook(BoardPair(Board(2, 2), Board(8, 8)))
