"""Independent reference implementations used only by the tests.

Everything here is deliberately naive (plain loops over itertools
products) and shares no scan code with the package, so that the fast
paths can be checked against it.
"""

from __future__ import annotations

import itertools
from fractions import Fraction


def all_arrangements(game):
    return itertools.product(*[range(h) for h in game.hatness])


def guess_of(game, strategy, v, colors):
    entry = strategy.by_name[game.names[v]]
    idx = 0
    weight = 1
    for u in game.nbrs[v]:
        idx += colors[u] * weight
        weight *= game.hatness[u]
    return entry.table[idx]


def naive_verify(game, strategy):
    """(winning, first losing arrangement) by a double loop."""
    for colors in all_arrangements(game):
        if not any(guess_of(game, strategy, v, colors) == colors[v]
                   for v in range(game.n)):
            return False, tuple(colors)
    return True, None


def naive_correct_count(game, strategy, v):
    return sum(1 for colors in all_arrangements(game)
               if guess_of(game, strategy, v, colors) == colors[v])


def naive_precise(game, strategy):
    for colors in all_arrangements(game):
        hits = sum(1 for v in range(game.n)
                   if guess_of(game, strategy, v, colors) == colors[v])
        if hits != 1:
            return False
    return True


def all_strategies(game):
    """Yield every strategy of a (tiny) game as raw tables."""
    from hats.core import strategy_from_tables
    sizes = []
    for v in range(game.n):
        size = 1
        for u in game.nbrs[v]:
            size *= game.hatness[u]
        sizes.append(size)
    slots = [(v, k) for v in range(game.n) for k in range(sizes[v])]
    for values in itertools.product(*[range(game.hatness[v]) for v, _ in slots]):
        tables = [[0] * s for s in sizes]
        for (v, k), val in zip(slots, values):
            tables[v][k] = val
        yield strategy_from_tables(game, tables)


def brute_force_solve(game):
    """'winning' iff some strategy wins, by full enumeration."""
    for s in all_strategies(game):
        if naive_verify(game, s)[0]:
            return "winning", s
    return "losing", None


def max_hatness_brute(n, cap=64):
    """Largest max(a_i) with sum(1/a_i) >= 1 but every proper subsum < 1.

    Without the subsum condition (no winning proper sub-clique) the
    maximum is unbounded; with it, the worst subset is the one dropping
    the largest entry, so the best last entry is floor(1/(1 - subsum)).
    """
    if n == 1:
        return 1
    best = 0

    def rec(k, smallest, s):
        nonlocal best
        if k == 0:
            gap = 1 - s
            if gap > 0:
                best = max(best, int(Fraction(1) / gap))
            return
        for a in range(smallest, cap + 1):
            if s + Fraction(1, a) < 1:
                rec(k - 1, a, s + Fraction(1, a))

    rec(n - 1, 2, Fraction(0))
    return best


def king_spread_brute(rows, cols):
    """Maximum set of cells pairwise not attackable by one king (exact search)."""
    cells = [(r, c) for r in range(rows) for c in range(cols)]

    def compatible(a, b):
        return max(abs(a[0] - b[0]), abs(a[1] - b[1])) >= 3

    best = 0

    def rec(start, chosen):
        nonlocal best
        best = max(best, len(chosen))
        if len(chosen) + (len(cells) - start) <= best:
            return
        for i in range(start, len(cells)):
            if all(compatible(cells[i], c) for c in chosen):
                chosen.append(cells[i])
                rec(i + 1, chosen)
                chosen.pop()

    rec(0, [])
    return best


def board_strategy_wins(pair, s, attack):
    """Direct king-pair enumeration with a caller-supplied attack predicate."""
    for i in range(pair.left.cells):
        for q in range(pair.right.cells):
            if not attack(pair.left, s.l_labels[q], i) and \
               not attack(pair.right, s.r_placement[i], q):
                return False
    return True
