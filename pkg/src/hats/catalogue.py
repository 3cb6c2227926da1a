"""Closed-form classifications and explicit strategies.

Covers complete graphs (reciprocal-sum law with two strategy
constructions), almost-complete graphs (necessary conditions plus the one
known boundary win), the Sylvester bound on maximum hatness, cycles with
hat values in [2,4], and the named example games.

All reciprocal sums use exact rational arithmetic; there are no tolerance
parameters anywhere in this module.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from .core import (
    Game, Strategy, Verdict, ValidationError, SizeLimitError,
    build_strategy, complete_game, cycle_game,
    strategy_from_tables, verify_strategy,
)
from .constructors import (
    ConstructedGame, InternalInconsistencyError,
    attach_path_two_three, attach_vertex2, cone, embed_strategy, lookup,
    product, restrict_hatness, substitute, won,
)

HALL_BOUND = 10**6


def reciprocal_sum(hatnesses: Sequence[int]) -> Fraction:
    return sum((Fraction(1, a) for a in hatnesses), Fraction(0))


def _require_complete(game: Game) -> None:
    n = game.n
    if len(game.edges) != n * (n - 1) // 2:
        raise ValidationError("expected a complete graph")


# -- complete graphs ----------------------------------------------------------


def arithmetic_clique_strategy(game: Game) -> Strategy:
    """Modular-sum strategy on a complete graph with reciprocal sum >= 1.

    Colors of a hatness-a sage are identified with the multiples of N/a
    modulo N = lcm of all hatnesses; sage k claims the k-th block of
    residues for the total sum.
    """
    _require_complete(game)
    hats = game.hatness
    if reciprocal_sum(hats) < 1:
        raise ValidationError("arithmetic strategy requires reciprocal sum >= 1")
    n_mod = math.lcm(*hats) if hats else 1
    d = [n_mod // a for a in hats]
    lo = [0] * len(hats)
    for k in range(1, len(hats)):
        lo[k] = lo[k - 1] + d[k - 1]

    def value(i, c):
        return ((c + 1) * d[i]) % n_mod

    def rule(v, view):
        k = game.index[v]
        t = sum(value(game.index[u], cu) for u, cu in view.items()) % n_mod
        s = lo[k] + 1 + ((t - lo[k] - 1) % d[k])
        val = (s - t) % n_mod
        return (val // d[k] - 1) % hats[k]

    return build_strategy(game, rule)


def hall_clique_strategy(game: Game, bound: int = HALL_BOUND) -> Strategy:
    """Matching-based strategy on a complete graph with reciprocal sum >= 1.

    Pairs every arrangement with one sage's candidate set via a maximum
    bipartite matching (augmenting-path algorithm); the marked candidate
    becomes that sage's guess.  Marked-in-every-set (a perfect matching on
    both sides) happens exactly in the reciprocal-sum-1 case.
    """
    _require_complete(game)
    hats = game.hatness
    if reciprocal_sum(hats) < 1:
        raise ValidationError("hall strategy requires reciprocal sum >= 1")
    total = game.total_arrangements
    if total > bound:
        raise SizeLimitError(f"{total} arrangements exceed the matching bound {bound}")
    import scipy.sparse as sp
    from scipy.sparse.csgraph import maximum_bipartite_matching

    n = game.n
    idx = np.arange(total, dtype=np.int64)
    colors = [(idx // s) % h for s, h in zip(game.strides, game.hatness)]
    view_sizes = []
    offsets = [0]
    for v in range(n):
        size = 1
        for u in game.nbrs[v]:
            size *= hats[u]
        view_sizes.append(size)
        offsets.append(offsets[-1] + size)
    views = []
    for v in range(n):
        acc = np.zeros(total, dtype=np.int64)
        w = 1
        for u in game.nbrs[v]:
            acc += colors[u] * w
            w *= hats[u]
        views.append(acc + offsets[v])
    rows = np.tile(idx, n)
    cols = np.concatenate(views)
    mat = sp.csr_matrix((np.ones(rows.size, dtype=np.int8), (rows, cols)),
                        shape=(total, offsets[-1]))
    match = maximum_bipartite_matching(mat, perm_type="column")
    if np.any(match < 0):
        raise InternalInconsistencyError(
            "hall_clique_strategy: no perfect matching on arrangements")
    tables = [np.zeros(view_sizes[v], dtype=np.int64) for v in range(n)]
    for boy in range(total):
        girl = int(match[boy])
        v = int(np.searchsorted(offsets, girl, side="right")) - 1
        tables[v][girl - offsets[v]] = int(colors[v][boy])
    return strategy_from_tables(game, [t.tolist() for t in tables])


def clique_classify(hatnesses: Sequence[int],
                    names: Optional[Sequence[str]] = None) -> Verdict:
    """Win/lose law for complete graphs: winning iff the reciprocal sum is >= 1."""
    if len(hatnesses) < 1:
        raise ValidationError("clique_classify: need at least one vertex")
    game = complete_game(hatnesses, names)
    if reciprocal_sum(hatnesses) >= 1:
        return Verdict(Verdict.WINNING, witness=arithmetic_clique_strategy(game),
                       reason="clique-win")
    return Verdict(Verdict.LOSING, reason="clique-sum<1")


# -- almost complete graphs ----------------------------------------------------


def almost_complete_game(hatnesses: Sequence[int],
                         names: Optional[Sequence[str]] = None) -> Game:
    """Complete graph minus the edge between the last two vertices."""
    n = len(hatnesses)
    if n < 3:
        raise ValidationError("almost-complete graphs need at least 3 vertices")
    game = complete_game(hatnesses, names)
    nm = game.names
    edges = [e for e in game.edge_names() if set(e) != {nm[n - 2], nm[n - 1]}]
    return Game(list(zip(nm, hatnesses)), edges)


def almost_reciprocal_sum(hatnesses: Sequence[int]) -> Fraction:
    a = list(hatnesses)
    return reciprocal_sum(a) - Fraction(1, a[-2] * a[-1])


def strategy_6623(names: Sequence[str] = ("A", "B", "C", "D")) -> tuple[Game, Strategy]:
    """The winning strategy on the almost-complete (6,6 | 2,3) game.

    The hatness-2 and hatness-3 sages announce the sum of the two big hats
    modulo 2 and 3; the big sages decode complementary residues by CRT.
    """
    game = almost_complete_game([6, 6, 2, 3], names)
    a, b, c, d = game.names
    crt = {(x % 2, x % 3): x for x in range(6)}

    def rule(v, view):
        if v == c:
            return (view[a] + view[b]) % 2
        if v == d:
            return (view[a] + view[b]) % 3
        if v == a:
            s = crt[((view[c] + 1) % 2, (view[d] + 1) % 3)]
            return (s - view[b]) % 6
        s = crt[((view[c] + 1) % 2, (view[d] + 2) % 3)]
        return (s - view[a]) % 6

    return game, build_strategy(game, rule)


def almost_clique_classify(hatnesses: Sequence[int],
                           names: Optional[Sequence[str]] = None) -> Verdict:
    """Partial decision procedure for complete-minus-one-edge games.

    Applies, in order: the counting inequality, the divisibility condition
    on the boundary, the two boundary losing patterns, and the explicit
    (6,6 | 2,3) win.  Everything else is Unknown and defers to the solver.
    """
    a = list(hatnesses)
    n = len(a)
    if n < 3:
        raise ValidationError("almost_clique_classify: need at least 3 vertices")
    s = almost_reciprocal_sum(a)
    if s < 1:
        return Verdict(Verdict.LOSING, reason="almost-ineq")
    if s == 1:
        alpha = math.prod(a[:-2])
        if alpha % (a[-2] * a[-1]) != 0:
            return Verdict(Verdict.LOSING, reason="divisibility")
        if n >= 4 and any(x == 2 for x in a[:-2]):
            return Verdict(Verdict.LOSING, reason="equality-clique-2")
        if n >= 4 and any(x == 3 for x in a[:-2]) and 2 in (a[-2], a[-1]):
            return Verdict(Verdict.LOSING, reason="equality-pair-3-2")
    if n == 4 and sorted(a[:2]) == [6, 6] and sorted(a[2:]) == [2, 3]:
        game = almost_complete_game(a, names)
        ref, s6623 = strategy_6623()
        ref_names = ["A", "B", "D", "C"] if a[2] == 3 else ["A", "B", "C", "D"]
        perm = {game.names[k]: ref_names[k] for k in range(4)}
        witness = build_strategy(
            game, lambda v, view: lookup(
                ref, s6623, perm[v], {perm[u]: cu for u, cu in view.items()}))
        res = verify_strategy(game, witness)
        if not res.winning:
            raise InternalInconsistencyError("6623 witness failed verification")
        return Verdict(Verdict.WINNING, witness=witness, reason="win-6623")
    return Verdict(Verdict.UNKNOWN, reason="almost-open")


# -- maximum hatness -----------------------------------------------------------


def sylvester_max_hatness(n: int) -> int:
    """Largest hatness of any sage in a winning n-clique with no winning
    proper sub-clique (otherwise the question degenerates).

    Follows the doubly exponential recurrence s_1 = 2,
    s_{k+1} = s_k (s_k - 1) + 1; the answer is s_n - 1.
    """
    if n < 1:
        raise ValidationError("sylvester_max_hatness: n must be >= 1")
    s = 2
    for _ in range(n - 1):
        s = s * (s - 1) + 1
    return s - 1


# -- path and cycle patterns -----------------------------------------------------


def path_ends2_strategy(names: Sequence[str]) -> ConstructedGame:
    """Winning witness on a path with hatness 2 ends and hatness 4 interior.

    Built by multiplying edge games along the path, which doubles every
    interior vertex twice.
    """
    names = list(names)
    if len(names) < 2:
        raise ValidationError("need a path with at least two vertices")

    def edge_game(x, y):
        g = Game([(x, 2), (y, 2)], [(x, y)])
        s = build_strategy(
            g, lambda v, view: view[y] if v == x else (1 - view[x]) % 2)
        return won(g, s, "edge-2-2")

    cur = edge_game(names[0], names[1])
    for k in range(2, len(names)):
        cur = product(cur, edge_game(names[k - 1], names[k]), names[k - 1])
    return cur


def _cycle_order(game: Game) -> list[int]:
    n = game.n
    if n < 3 or any(len(nb) != 2 for nb in game.nbrs):
        raise ValidationError("expected a cycle graph")
    order = [0, game.nbrs[0][0]]
    while len(order) < n:
        a, b = order[-2], order[-1]
        nxt = [x for x in game.nbrs[b] if x != a]
        order.append(nxt[0])
    if order[0] not in game.nbrs[order[-1]] or len(set(order)) != n:
        raise ValidationError("expected a single cycle")
    return order


def _deliver(pattern: ConstructedGame, game: Game) -> Strategy:
    """Restrict a maximal-pattern witness to the actual hat function and re-layout."""
    tgt = Game(
        [(n, game.hatness_of(n)) for n in pattern.game.names], pattern.game.edge_names())
    w = restrict_hatness(pattern.game, pattern.witness, tgt)
    return embed_strategy(tgt, w, game)


def cycle_classify(game: Game) -> Verdict:
    """Winning cases for cycles with hat values in [2,4] and a hatness-2 vertex.

    Four families are decided Winning (with a constructor-built witness);
    anything else stays Unknown — losing is never claimed here.
    """
    order = _cycle_order(game)
    n = game.n
    if any(not 2 <= h <= 4 for h in game.hatness):
        raise ValidationError("cycle_classify: hat values must lie in [2,4]")
    twos = [v for v in order if game.hatness[v] == 2]
    if not twos:
        raise ValidationError("cycle_classify: need a vertex of hatness 2")
    names = game.names
    if n == 3:
        witness = arithmetic_clique_strategy(game)
        return Verdict(Verdict.WINNING, witness=witness, reason="cycle-triangle")
    if len(twos) >= 2:
        a, b = twos[0], twos[1]
        i, j = order.index(a), order.index(b)
        arc = [order[(i + k) % n] for k in range((j - i) % n + 1)]
        pattern = path_ends2_strategy([names[v] for v in arc])
        sub = Game([(names[v], game.hatness[v]) for v in arc],
                   pattern.game.edge_names())
        w = restrict_hatness(pattern.game, pattern.witness, sub)
        return Verdict(Verdict.WINNING, witness=embed_strategy(sub, w, game),
                       reason="cycle-two-2s")
    for a in twos:
        i = order.index(a)
        left, right = order[(i - 1) % n], order[(i + 1) % n]
        if game.hatness[left] <= 3 and game.hatness[right] <= 3:
            arc = [order[(i + 1 + k) % n] for k in range(n - 1)]  # right ... left
            pattern = path_ends2_strategy([names[v] for v in arc])
            pattern = attach_vertex2(pattern, names[right], names[left], names[a])
            return Verdict(Verdict.WINNING, witness=_deliver(pattern, game),
                           reason="cycle-neighbors-33")
        for sign in (1, -1):
            b = order[(i + sign) % n]
            c = order[(i + 2 * sign) % n]
            z = order[(i - sign) % n]
            if game.hatness[b] <= 3 and game.hatness[c] <= 3:
                arc = [order[(i - sign - k * sign) % n] for k in range(n - 2)]  # z ... c
                pattern = path_ends2_strategy([names[v] for v in arc])
                pattern = attach_path_two_three(
                    pattern, names[z], names[c], names[a], names[b])
                return Verdict(Verdict.WINNING, witness=_deliver(pattern, game),
                               reason="cycle-2-33-run")
    return Verdict(Verdict.UNKNOWN, reason="cycle-open")


# -- bow games -------------------------------------------------------------------


def generalized_bow(left: Sequence[int], right: Sequence[int], center: int,
                    multiplier: int,
                    verify_bound: Optional[int] = None) -> ConstructedGame:
    """Two cliques sharing a center whose hatness exceeds the product bound.

    Residue arithmetic modulo M = center * lcm(outer hatnesses): each outer
    sage claims a block of sum-residues (largest blocks first); the center
    resolves the two leftover windows, reading his color through two
    different unit multipliers so the candidate sets meet in at most one
    color.
    """
    if center < 1 or multiplier < 1:
        raise ValidationError("generalized_bow: bad center or multiplier")
    d_center = math.lcm(*left, *right)
    m_mod = center * d_center
    l_names = [f"L{i + 1}" for i in range(len(left))]
    r_names = [f"R{i + 1}" for i in range(len(right))]
    vertices = [(n, a) for n, a in zip(l_names, left)]
    vertices.append(("A", center))
    vertices += [(n, a) for n, a in zip(r_names, right)]
    edges = []
    for side in (l_names + ["A"], ["A"] + r_names):
        edges += [(side[i], side[j]) for i in range(len(side))
                  for j in range(i + 1, len(side))]
    game = Game(vertices, edges)

    def intervals(hatnesses, side_names):
        # largest blocks (smallest hatness) first
        ds = {n: m_mod // a for n, a in zip(side_names, hatnesses)}
        lo = {}
        acc = 0
        for n in sorted(side_names, key=lambda x: (-ds[x], side_names.index(x))):
            lo[n] = acc
            acc += ds[n]
        return ds, lo, acc

    d_l, lo_l, used_l = intervals(left, l_names)
    d_r, lo_r, used_r = intervals(right, r_names)
    if used_l >= m_mod or used_r >= m_mod:
        raise ValidationError("generalized_bow: outer cliques leave no window for the center")

    def center_left(c):
        return ((c + 1) * d_center) % m_mod

    def center_right(c):
        return (d_center * ((multiplier * (c + 1)) % center)) % m_mod

    def value(name, c):
        d = d_l.get(name) or d_r.get(name)
        return ((c + 1) * d) % m_mod

    def in_window(s, used):
        return s == 0 or s > used

    l_set, r_set = set(l_names), set(r_names)
    # candidate masks for the center, cached per side view
    _masks: dict[tuple, int] = {}

    def side_mask(key, names_side, conv, used):
        cached = _masks.get(key)
        if cached is None:
            t = sum(value(u, c) for u, c in zip(names_side, key[1:])) % m_mod
            cached = 0
            for c in range(center):
                if in_window((t + conv(c)) % m_mod, used):
                    cached |= 1 << c
            _masks[key] = cached
        return cached

    def rule(v, view):
        if v == "A":
            m1 = side_mask(("L",) + tuple(view[u] for u in l_names),
                           l_names, center_left, used_l)
            m2 = side_mask(("R",) + tuple(view[u] for u in r_names),
                           r_names, center_right, used_r)
            both = m1 & m2
            return (both & -both).bit_length() - 1 if both else 0
        mine = l_set if v in l_set else r_set
        ds, lo, conv = (d_l, lo_l, center_left) if v in l_set else (d_r, lo_r, center_right)
        t = sum(value(u, view[u]) for u in mine if u != v)
        t = (t + conv(view["A"])) % m_mod
        s = lo[v] + 1 + ((t - lo[v] - 1) % ds[v])
        val = (s - t) % m_mod
        a = game.hatness_of(v)
        return (val // ds[v] - 1) % a

    witness = build_strategy(game, rule)
    from .constructors import _finish_winning
    return _finish_winning(game, witness, "bow", [],
                           {"left": list(left), "right": list(right),
                            "center": center, "multiplier": multiplier},
                           verify_bound)


# -- named games -----------------------------------------------------------------

NAMED_GAME_IDS = ("big-bow", "medium-bow", "cone-example", "triangle-244", "baobab-c4")


@lru_cache(maxsize=None)
def named_game(game_id: str) -> ConstructedGame:
    """Catalogue of fully realized example games, each with a verified witness."""
    if game_id == "big-bow":
        return generalized_bow([4, 5, 5, 5], [5, 5, 5, 4], 37, 6)
    if game_id == "medium-bow":
        return generalized_bow([5, 5, 5], [5, 5, 5], 5, 2)
    if game_id == "triangle-244":
        def edge22(x, y):
            g = Game([(x, 2), (y, 2)], [(x, y)])
            s = build_strategy(g, lambda v, view: view[y] if v == x else (1 - view[x]) % 2)
            return won(g, s, "edge-2-2")
        return substitute(edge22("A", "S"), "S", edge22("B", "C"))
    if game_id == "cone-example":
        frame = complete_game([3, 3, 3], names=["F1", "F2", "F3"])
        frame_cg = won(frame, arithmetic_clique_strategy(frame), "clique-win")
        comps = []
        for k, size in enumerate((5, 4, 4), start=1):
            hats = [4, 2, 3, 3, 3][:size]
            nm = [f"{x}{k}" for x in ["O", "A", "B", "C", "D"][:size]]
            cyc = cycle_game(hats, names=nm)
            v = cycle_classify(cyc)
            comps.append((won(cyc, v.witness, v.reason), f"O{k}", f"A{k}"))
        return cone(frame_cg, comps, apex="O")
    if game_id == "baobab-c4":
        from . import rookcheck
        game = cycle_game([3, 3, 3, 3])
        pair = rookcheck.board_pair_of_cycle(game)
        rs = rookcheck.win3_strategy()
        witness = rookcheck.strategy_from_boards(game, pair, rs)
        return won(game, witness, "rook-3x3")
    raise ValidationError(f"unknown named game {game_id!r}; "
                          f"ids: {', '.join(NAMED_GAME_IDS)}")


# -- game-shape dispatch (used by the CLI) ----------------------------------------


def classify_game(game: Game) -> Verdict:
    """Route a game to the matching closed-form classifier, if any."""
    n = game.n
    full = n * (n - 1) // 2
    if n >= 1 and len(game.edges) == full:
        return clique_classify(list(game.hatness), names=list(game.names))
    if n >= 3 and len(game.edges) == full - 1:
        present = set(game.edges)
        missing = [(i, j) for i in range(n) for j in range(i + 1, n)
                   if (i, j) not in present][0]
        reorder = [v for v in range(n) if v not in missing] + list(missing)
        hats = [game.hatness[v] for v in reorder]
        v = almost_clique_classify(hats)
        if v.witness is not None:
            from .constructors import rename_strategy
            ref = almost_complete_game(hats)
            named_ref = almost_complete_game(hats, names=[game.names[i] for i in reorder])
            w = rename_strategy(v.witness, dict(zip(ref.names, named_ref.names)))
            v.witness = embed_strategy(named_ref, w, game)
        return v
    if n >= 3 and all(len(nb) == 2 for nb in game.nbrs):
        return cycle_classify(game)
    return Verdict(Verdict.UNKNOWN, reason="no-closed-form")
