"""Transformations that build new games with known verdicts.

Each winning constructor emits both the new game and an executable witness
strategy; losing constructors emit a verdict-only result (the adversary
arguments are not executable objects).  Witnesses are verified
exhaustively after construction whenever the arrangement count is under
``VERIFY_BOUND``; larger results carry ``verified=None``.

Composite colors at a glued vertex are always little-endian pairs:
``color = c1 + h1 * c2`` with the first factor's color in the low part.
Tie-breaks ("first winner in the pre-compiled list") use canonical vertex
order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .core import (
    Game, Strategy, Verdict, HatsError, ValidationError,
    build_strategy, subgame, verify_strategy, arrangements,
)

VERIFY_BOUND = 10**7

WINNING = "winning"
LOSING = "losing"


@dataclass
class ConstructedGame:
    """A game plus its verdict and the tree of constructor applications."""
    game: Game
    witness: Optional[Strategy]
    status: str
    reason: str
    provenance: dict
    verified: Optional[bool] = None  # None: verification skipped (too large)

    @property
    def verdict(self) -> Verdict:
        return Verdict(self.status, witness=self.witness, reason=self.reason)


class InternalInconsistencyError(HatsError):
    """A constructor produced a witness that fails verification (a bug)."""


def _ref(cg: ConstructedGame) -> dict:
    if cg.provenance:
        return cg.provenance
    return {"game": cg.game.sha256()[:12]}


def _finish_winning(game: Game, witness: Strategy, rule: str, operands, args=None,
                    verify_bound: Optional[int] = None) -> ConstructedGame:
    bound = VERIFY_BOUND if verify_bound is None else verify_bound
    prov = {"rule": rule, "operands": [_ref(o) for o in operands]}
    if args:
        prov["args"] = args
    verified: Optional[bool] = None
    if game.total_arrangements <= bound:
        res = verify_strategy(game, witness)
        if not res.winning:
            raise InternalInconsistencyError(
                f"constructor {rule!r} emitted a losing witness "
                f"(counterexample {res.first_losing})")
        verified = True
    game = Game(list(zip(game.names, game.hatness)), game.edge_names(), provenance=prov)
    return ConstructedGame(game, witness, WINNING, rule, prov, verified)


def _finish_losing(game: Game, rule: str, operands, args=None) -> ConstructedGame:
    prov = {"rule": rule, "operands": [_ref(o) for o in operands]}
    if args:
        prov["args"] = args
    game = Game(list(zip(game.names, game.hatness)), game.edge_names(), provenance=prov)
    return ConstructedGame(game, None, LOSING, rule, prov)


def won(game: Game, witness: Strategy, reason: str = "given",
        verify_bound: Optional[int] = None) -> ConstructedGame:
    """Wrap a known-winning game with its witness (verified when feasible)."""
    return _finish_winning(game, witness, reason, [], verify_bound=verify_bound)


def lost(game: Game, reason: str = "given") -> ConstructedGame:
    """Wrap a known-losing game."""
    return ConstructedGame(game, None, LOSING, reason, {"rule": reason, "operands": []})


def _require_witness(cg: ConstructedGame, role: str) -> Strategy:
    if cg.status != WINNING or cg.witness is None:
        raise ValidationError(f"{role}: operand must be a winning game with a witness")
    return cg.witness


def _require_losing(cg: ConstructedGame, role: str) -> None:
    if cg.status != LOSING:
        raise ValidationError(f"{role}: operand must be a known-losing game")


def lookup(game: Game, strategy: Strategy, vertex: str, view: dict,
           clamp: bool = False) -> int:
    """Table lookup given neighbor colors by name.

    With ``clamp`` set, colors outside a neighbor's range (new colors
    introduced by an enclosing construction) are read as color 0.
    """
    v = game.index[vertex]
    idx = 0
    weight = 1
    for u in game.nbrs[v]:
        c = view[game.names[u]]
        if not 0 <= c < game.hatness[u]:
            if not clamp:
                raise ValidationError(
                    f"color {c} for {game.names[u]!r} out of range during lookup")
            c = 0
        idx += c * weight
        weight *= game.hatness[u]
    return strategy.by_name[vertex].table[idx]


# -- strategy transport -------------------------------------------------------


def rename_game(game: Game, mapping: dict) -> Game:
    names = [mapping.get(n, n) for n in game.names]
    return Game(list(zip(names, game.hatness)),
                [(mapping.get(a, a), mapping.get(b, b)) for a, b in game.edge_names()])


def rename_strategy(strategy: Strategy, mapping: dict) -> Strategy:
    from .core import VertexTable
    return Strategy([
        VertexTable(mapping.get(e.name, e.name),
                    tuple(mapping.get(x, x) for x in e.neighbors), e.table)
        for e in strategy.entries])


def embed_strategy(small: Game, strategy: Strategy, big: Game) -> Strategy:
    """Lift a winning strategy onto a supergraph.

    ``big`` may add vertices and edges; shared vertices keep their hatness.
    Existing sages ignore the extra visibility, new sages guess 0.  Sound:
    extra information can be discarded and extra sages are not needed.
    """
    strategy.validate(small)
    for n in small.names:
        if n not in big.index:
            raise ValidationError(f"vertex {n!r} missing from supergraph")
        if big.hatness_of(n) != small.hatness_of(n):
            raise ValidationError(f"vertex {n!r}: hatness differs between games")
    for a, b in small.edge_names():
        if not big.has_edge(a, b):
            raise ValidationError(f"edge ({a},{b}) missing from supergraph")
    small_set = set(small.names)

    def rule(v, view):
        if v not in small_set:
            return 0
        return lookup(small, strategy, v, view)

    return build_strategy(big, rule)


def restrict_hatness(high: Game, strategy: Strategy, low: Game) -> Strategy:
    """Project a winning strategy down to a pointwise smaller hat function.

    Same graph, ``low.hatness <= high.hatness``; views are restricted and
    out-of-range guesses are replaced by color 0 (any existing color works).
    """
    strategy.validate(high)
    if low.names != high.names or low.edges != high.edges:
        raise ValidationError("restrict_hatness requires the same graph")
    for n, hl, hh in zip(low.names, low.hatness, high.hatness):
        if hl > hh:
            raise ValidationError(f"vertex {n!r}: hatness must not increase")

    def rule(v, view):
        g = lookup(high, strategy, v, view)
        return g if g < low.hatness_of(v) else 0

    return build_strategy(low, rule)


# -- winning constructors -------------------------------------------------------


def product(cg1: ConstructedGame, cg2: ConstructedGame, shared: str,
            verify_bound: Optional[int] = None) -> ConstructedGame:
    """Glue two winning games at a shared vertex; its hatness multiplies."""
    w1, w2 = _require_witness(cg1, "product"), _require_witness(cg2, "product")
    g1, g2 = cg1.game, cg2.game
    if shared not in g1.index or shared not in g2.index:
        raise ValidationError(f"product: shared vertex {shared!r} must be in both games")
    overlap = set(g1.names) & set(g2.names)
    if overlap != {shared}:
        raise ValidationError(f"product: games must overlap exactly in {shared!r}, got {sorted(overlap)}")
    h1a, h2a = g1.hatness_of(shared), g2.hatness_of(shared)
    vertices = [(n, h1a * h2a if n == shared else h) for n, h in zip(g1.names, g1.hatness)]
    vertices += [(n, h) for n, h in zip(g2.names, g2.hatness) if n != shared]
    game = Game(vertices, list(g1.edge_names()) + list(g2.edge_names()))
    n1 = set(g1.names)

    def rule(v, view):
        if v == shared:
            c1 = lookup(g1, w1, shared, view)
            c2 = lookup(g2, w2, shared, view)
            return c1 + h1a * c2
        src, w = (g1, w1) if v in n1 else (g2, w2)
        sub = dict(view)
        if shared in sub:
            sub[shared] = sub[shared] % h1a if v in n1 else sub[shared] // h1a
        return lookup(src, w, v, sub)

    witness = build_strategy(game, rule)
    return _finish_winning(game, witness, "product", [cg1, cg2],
                           {"at": shared}, verify_bound)


def substitute(cg1: ConstructedGame, vertex: str, cg2: ConstructedGame,
               verify_bound: Optional[int] = None) -> ConstructedGame:
    """Replace a vertex of the first game by the whole second game."""
    w1, w2 = _require_witness(cg1, "substitute"), _require_witness(cg2, "substitute")
    g1, g2 = cg1.game, cg2.game
    if vertex not in g1.index:
        raise ValidationError(f"substitute: {vertex!r} not in first game")
    if set(g1.names) & set(g2.names):
        raise ValidationError("substitute: games must have disjoint vertex sets")
    h1v = g1.hatness_of(vertex)
    pos = g1.index[vertex]
    vertices = [(n, h) for n, h in zip(g1.names, g1.hatness)][:pos]
    vertices += [(n, h * h1v) for n, h in zip(g2.names, g2.hatness)]
    vertices += [(n, h) for n, h in zip(g1.names, g1.hatness)][pos + 1:]
    nbrs1 = set(g1.neighbors(vertex))
    edges = [(a, b) for a, b in g1.edge_names() if vertex not in (a, b)]
    edges += list(g2.edge_names())
    edges += [(u, x) for u in nbrs1 for x in g2.names]
    game = Game(vertices, edges)
    v2 = list(g2.names)

    def inner_first(view):
        # the substituted team's shared first component
        return lookup(g1, w1, vertex, {u: view[u] for u in nbrs1})

    def rule(v, view):
        if v in g2.index:
            c1 = inner_first(view)
            c2 = lookup(g2, w2, v, {y: view[y] // h1v for y in g2.neighbors(v)})
            return c1 + h1v * c2
        if v in nbrs1:
            # locate the first inner sage whose second component is right
            chosen = v2[0]
            for x in v2:
                guess2 = lookup(g2, w2, x, {y: view[y] // h1v for y in g2.neighbors(x)})
                if guess2 == view[x] // h1v:
                    chosen = x
                    break
            sub = {u: view[u] for u in g1.neighbors(v) if u != vertex}
            sub[vertex] = view[chosen] % h1v
            return lookup(g1, w1, v, sub)
        return lookup(g1, w1, v, view)

    witness = build_strategy(game, rule)
    return _finish_winning(game, witness, "substitute", [cg1, cg2],
                           {"vertex": vertex}, verify_bound)


def attach_vertex2(cg: ConstructedGame, b: str, c: str, new_name: str = "A*",
                   verify_bound: Optional[int] = None) -> ConstructedGame:
    """Add a hatness-2 vertex adjacent to b and c; their hatnesses grow by 1."""
    w = _require_witness(cg, "attach_vertex2")
    g = cg.game
    if b == c:
        raise ValidationError("attach_vertex2: b and c must differ")
    for x in (b, c):
        if x not in g.index:
            raise ValidationError(f"attach_vertex2: unknown vertex {x!r}")
    if new_name in g.index:
        raise ValidationError(f"attach_vertex2: name {new_name!r} already used")
    hb, hc = g.hatness_of(b), g.hatness_of(c)
    vertices = [(n, h + 1 if n in (b, c) else h) for n, h in zip(g.names, g.hatness)]
    vertices.append((new_name, 2))
    game = Game(vertices, list(g.edge_names()) + [(new_name, b), (new_name, c)])

    def rule(v, view):
        if v == new_name:
            return 1 if (view[b] == hb or view[c] == hc) else 0
        if v in (b, c):
            if view[new_name] == 0:
                return hb if v == b else hc  # the new color
            return lookup(g, w, v, view, clamp=True)
        return lookup(g, w, v, view, clamp=True)

    witness = build_strategy(game, rule)
    return _finish_winning(game, witness, "attach-vertex2", [cg],
                           {"to": [b, c], "new": new_name}, verify_bound)


def attach_vertex2_to_edge(cg: ConstructedGame, b: str, c: str, new_name: str = "A*",
                           verify_bound: Optional[int] = None) -> ConstructedGame:
    """Add a hatness-2 vertex onto an existing edge bc; both endpoints double."""
    w = _require_witness(cg, "attach_vertex2_to_edge")
    g = cg.game
    if not g.has_edge(b, c):
        raise ValidationError(f"attach_vertex2_to_edge: ({b},{c}) is not an edge")
    if new_name in g.index:
        raise ValidationError(f"attach_vertex2_to_edge: name {new_name!r} already used")
    hb, hc = g.hatness_of(b), g.hatness_of(c)
    vertices = [(n, 2 * h if n in (b, c) else h) for n, h in zip(g.names, g.hatness)]
    vertices.append((new_name, 2))
    game = Game(vertices, list(g.edge_names()) + [(new_name, b), (new_name, c)])

    def rule(v, view):
        if v == new_name:
            return (view[b] // hb + view[c] // hc) % 2
        if v in (b, c):
            other, h_other = (c, hc) if v == b else (b, hb)
            sub = {u: view[u] for u in g.neighbors(v)}
            sub[other] = view[other] % h_other
            base = lookup(g, w, v, sub)
            eps = (view[new_name] + view[other] // h_other + 1) % 2
            return base + (hb if v == b else hc) * eps
        sub = {}
        for u in g.neighbors(v):
            cu = view[u]
            if u == b:
                cu %= hb
            elif u == c:
                cu %= hc
            sub[u] = cu
        return lookup(g, w, v, sub)

    witness = build_strategy(game, rule)
    return _finish_winning(game, witness, "attach-vertex2-edge", [cg],
                           {"edge": [b, c], "new": new_name}, verify_bound)


def attach_path_two_three(cg: ConstructedGame, z: str, c: str,
                          name_a: str = "A*", name_b: str = "B*",
                          verify_bound: Optional[int] = None) -> ConstructedGame:
    """Attach a two-vertex path from z to c: z - a(h2) - b(h3) - c.

    z's hatness doubles, c gains one color.
    """
    w = _require_witness(cg, "attach_path_two_three")
    g = cg.game
    if z == c:
        raise ValidationError("attach_path_two_three: z and c must differ")
    for x in (z, c):
        if x not in g.index:
            raise ValidationError(f"attach_path_two_three: unknown vertex {x!r}")
    for x in (name_a, name_b):
        if x in g.index or name_a == name_b:
            raise ValidationError(f"attach_path_two_three: bad new name {x!r}")
    hz, hc = g.hatness_of(z), g.hatness_of(c)
    vertices = []
    for n, h in zip(g.names, g.hatness):
        if n == z:
            vertices.append((n, 2 * h))
        elif n == c:
            vertices.append((n, h + 1))
        else:
            vertices.append((n, h))
    vertices += [(name_a, 2), (name_b, 3)]
    game = Game(vertices, list(g.edge_names()) + [(z, name_a), (name_a, name_b), (name_b, c)])

    def old_view(v, view):
        sub = {}
        for u in g.neighbors(v):
            cu = view[u]
            if u == z:
                cu %= hz
            elif u == c and cu >= hc:
                cu = 0  # the new color is read as color 0
            sub[u] = cu
        return sub

    def rule(v, view):
        if v == name_a:
            return view[name_b] if view[name_b] != 2 else view[z] // hz
        if v == name_b:
            return 2 if view[c] == hc else 1 - view[name_a]
        if v == c:
            if view[name_b] != 2:
                return hc  # claim the new color
            return lookup(g, w, v, old_view(v, view))
        if v == z:
            eps = 1 - view[name_a]
            return lookup(g, w, v, old_view(v, view)) + hz * eps
        return lookup(g, w, v, old_view(v, view))

    witness = build_strategy(game, rule)
    return _finish_winning(game, witness, "attach-path-2-3", [cg],
                           {"from": z, "to": c, "new": [name_a, name_b]}, verify_bound)


def attach_leaf(cg: ConstructedGame, b: str, hatness: int, new_name: str = "A*",
                verify_bound: Optional[int] = None) -> ConstructedGame:
    """Attach a leaf of hatness >= 3; the result is winning iff the base is."""
    w = _require_witness(cg, "attach_leaf")
    if hatness < 3:
        raise ValidationError("attach_leaf: leaf hatness must be >= 3")
    g = cg.game
    if b not in g.index:
        raise ValidationError(f"attach_leaf: unknown vertex {b!r}")
    if new_name in g.index:
        raise ValidationError(f"attach_leaf: name {new_name!r} already used")
    vertices = list(zip(g.names, g.hatness)) + [(new_name, hatness)]
    game = Game(vertices, list(g.edge_names()) + [(b, new_name)])

    def rule(v, view):
        if v == new_name:
            return 0
        return lookup(g, w, v, view)

    witness = build_strategy(game, rule)
    return _finish_winning(game, witness, "attach-leaf", [cg],
                           {"at": b, "hatness": hatness, "new": new_name}, verify_bound)


def remove_leaf(game2: Game, leaf: str, witness: Strategy) -> Strategy:
    """Recover a winning strategy after deleting a leaf of hatness >= 3.

    Enumerates the reduced game's arrangements; wherever nobody else wins,
    the leaf's neighbor is forced.  A conflict would mean the given witness
    was not winning.
    """
    witness.validate(game2)
    if leaf not in game2.index:
        raise ValidationError(f"remove_leaf: unknown vertex {leaf!r}")
    nbrs = game2.neighbors(leaf)
    if len(nbrs) != 1:
        raise ValidationError(f"remove_leaf: {leaf!r} is not a leaf")
    if game2.hatness_of(leaf) < 3:
        raise ValidationError("remove_leaf: leaf hatness must be >= 3")
    b = nbrs[0]
    g1 = subgame(game2, [n for n in game2.names if n != leaf])
    others = [n for n in g1.names if n != b]
    b_nbrs = g1.neighbors(b)
    size = 1
    for u in b_nbrs:
        size *= g1.hatness_of(u)
    forced: dict[int, int] = {}
    for colors in arrangements(g1):
        view_all = dict(zip(g1.names, colors))
        if any(lookup(g1, witness, u, view_all) == view_all[u] for u in others):
            continue
        idx = 0
        weight = 1
        for u in b_nbrs:
            idx += view_all[u] * weight
            weight *= g1.hatness_of(u)
        want = view_all[b]
        if forced.setdefault(idx, want) != want:
            raise InternalInconsistencyError(
                "remove_leaf: conflicting requirements; the given witness cannot be winning")
    tables = []
    for v, name in enumerate(g1.names):
        if name == b:
            tables.append([forced.get(k, 0) for k in range(size)])
        else:
            tables.append(list(witness.by_name[name].table))
    from .core import strategy_from_tables
    return strategy_from_tables(g1, tables)


def stitch(cg1: ConstructedGame, marked1: Sequence[str],
           cg2: ConstructedGame, marked2: Sequence[str],
           verify_bound: Optional[int] = None) -> ConstructedGame:
    """Join two winning games by a complete bipartite bridge between marked sets.

    Every marked vertex gains one color ("red"); the red protocol decides
    which side falls back to its own game.
    """
    w1, w2 = _require_witness(cg1, "stitch"), _require_witness(cg2, "stitch")
    g1, g2 = cg1.game, cg2.game
    if set(g1.names) & set(g2.names):
        raise ValidationError("stitch: games must have disjoint vertex sets")
    m1, m2 = list(marked1), list(marked2)
    if not m1 or not m2:
        raise ValidationError("stitch: marked sets must be nonempty")
    for x in m1:
        if x not in g1.index:
            raise ValidationError(f"stitch: {x!r} not in first game")
    for x in m2:
        if x not in g2.index:
            raise ValidationError(f"stitch: {x!r} not in second game")
    red1 = {x: g1.hatness_of(x) for x in m1}
    red2 = {x: g2.hatness_of(x) for x in m2}
    vertices = [(n, h + 1 if n in red1 else h) for n, h in zip(g1.names, g1.hatness)]
    vertices += [(n, h + 1 if n in red2 else h) for n, h in zip(g2.names, g2.hatness)]
    edges = list(g1.edge_names()) + list(g2.edge_names())
    edges += [(a, b) for a in m1 for b in m2]
    game = Game(vertices, edges)
    in1 = set(g1.names)

    def rule(v, view):
        if v in red1:
            if any(view[b] == red2[b] for b in m2):
                return red1[v]
            return lookup(g1, w1, v, view, clamp=True)
        if v in red2:
            if any(view[a] == red1[a] for a in m1):
                return lookup(g2, w2, v, view, clamp=True)
            return red2[v]
        src, w = (g1, w1) if v in in1 else (g2, w2)
        return lookup(src, w, v, view, clamp=True)

    witness = build_strategy(game, rule)
    return _finish_winning(game, witness, "stitch", [cg1, cg2],
                           {"left": m1, "right": m2}, verify_bound)


def sew(cg1: ConstructedGame, a: str, cg2: ConstructedGame, b: str,
        verify_bound: Optional[int] = None) -> ConstructedGame:
    """Delete hatness-2 vertices a and b and join their neighborhoods completely."""
    w1, w2 = _require_witness(cg1, "sew"), _require_witness(cg2, "sew")
    g1, g2 = cg1.game, cg2.game
    if set(g1.names) & set(g2.names):
        raise ValidationError("sew: games must have disjoint vertex sets")
    if g1.hatness_of(a) != 2 or g2.hatness_of(b) != 2:
        raise ValidationError("sew: both removed vertices must have hatness 2")
    na, nb = list(g1.neighbors(a)), list(g2.neighbors(b))
    vertices = [(n, h) for n, h in zip(g1.names, g1.hatness) if n != a]
    vertices += [(n, h) for n, h in zip(g2.names, g2.hatness) if n != b]
    edges = [(x, y) for x, y in g1.edge_names() if a not in (x, y)]
    edges += [(x, y) for x, y in g2.edge_names() if b not in (x, y)]
    edges += [(x, y) for x in na for y in nb]
    game = Game(vertices, edges)
    in1 = set(g1.names)
    set_na, set_nb = set(na), set(nb)

    def rule(v, view):
        if v in set_na:
            a_color = lookup(g2, w2, b, {y: view[y] for y in nb})
            sub = {u: view[u] for u in g1.neighbors(v) if u != a}
            sub[a] = a_color
            return lookup(g1, w1, v, sub)
        if v in set_nb:
            b_color = 1 - lookup(g1, w1, a, {x: view[x] for x in na})
            sub = {u: view[u] for u in g2.neighbors(v) if u != b}
            sub[b] = b_color
            return lookup(g2, w2, v, sub)
        src, w = (g1, w1) if v in in1 else (g2, w2)
        return lookup(src, w, v, view)

    witness = build_strategy(game, rule)
    return _finish_winning(game, witness, "sew", [cg1, cg2],
                           {"removed": [a, b]}, verify_bound)


def fasten(cg_frame: ConstructedGame,
           components: Sequence[tuple[ConstructedGame, Sequence[str]]],
           verify_bound: Optional[int] = None) -> ConstructedGame:
    """Fasten component games along a winning frame game.

    Component i stands in for the frame's i-th vertex; its marked vertices
    gain the frame vertex's colors (minus one) as new colors and act as a
    single "megasage".
    """
    wf = _require_witness(cg_frame, "fasten")
    frame = cg_frame.game
    if len(components) != frame.n:
        raise ValidationError("fasten: need exactly one component per frame vertex")
    games, witnesses, markings = [], [], []
    all_names: set[str] = set()
    for cg_i, marked in components:
        w_i = _require_witness(cg_i, "fasten")
        if not marked:
            raise ValidationError("fasten: marked sets must be nonempty")
        for x in marked:
            if x not in cg_i.game.index:
                raise ValidationError(f"fasten: {x!r} not in its component")
        if all_names & set(cg_i.game.names):
            raise ValidationError("fasten: component vertex sets must be disjoint")
        all_names |= set(cg_i.game.names)
        games.append(cg_i.game)
        witnesses.append(w_i)
        markings.append(list(marked))
    vertices = []
    comp_of: dict[str, int] = {}
    old_h: dict[str, int] = {}
    for i, g_i in enumerate(games):
        extra = frame.hatness[i] - 1
        for n, h in zip(g_i.names, g_i.hatness):
            comp_of[n] = i
            old_h[n] = h
            vertices.append((n, h + extra if n in markings[i] else h))
    edges = [e for g_i in games for e in g_i.edge_names()]
    for i, j in frame.edges:
        edges += [(x, y) for x in markings[i] for y in markings[j]]
    game = Game(vertices, edges)

    def megacolor(i, view):
        best = 0
        for x in markings[i]:
            cx = view[x]
            if cx >= old_h[x]:
                best = max(best, cx - old_h[x] + 1)
        return best

    def rule(v, view):
        i = comp_of[v]
        if v in markings[i]:
            mega_view = {frame.names[j]: megacolor(j, view) for j in frame.nbrs[i]}
            mega_guess = lookup(frame, wf, frame.names[i], mega_view)
            if mega_guess >= 1:
                return old_h[v] + mega_guess - 1
            return lookup(games[i], witnesses[i], v, view, clamp=True)
        return lookup(games[i], witnesses[i], v, view, clamp=True)

    witness = build_strategy(game, rule)
    return _finish_winning(game, witness, "fasten",
                           [cg_frame] + [c for c, _ in components],
                           {"marked": markings}, verify_bound)


def fasten_single(cg_frame: ConstructedGame,
                  components: Sequence[tuple[ConstructedGame, str]],
                  verify_bound: Optional[int] = None) -> ConstructedGame:
    """Fasten with one marked vertex per component: hatnesses multiply.

    Realized as the iterated product of the frame with each component at
    its marked vertex.
    """
    _require_witness(cg_frame, "fasten_single")
    frame = cg_frame.game
    if len(components) != frame.n:
        raise ValidationError("fasten_single: need exactly one component per frame vertex")
    marks = [m for _, m in components]
    if len(set(marks)) != len(marks):
        raise ValidationError("fasten_single: marked vertices must be distinct")
    mapping = dict(zip(frame.names, marks))
    cur = ConstructedGame(rename_game(frame, mapping),
                          rename_strategy(cg_frame.witness, mapping),
                          WINNING, cg_frame.reason, cg_frame.provenance or
                          {"rule": "frame", "operands": []}, cg_frame.verified)
    for cg_i, mark in components:
        cur = product(cur, cg_i, mark, verify_bound=verify_bound)
    prov = {"rule": "fasten-single",
            "operands": [_ref(cg_frame)] + [_ref(c) for c, _ in components],
            "args": {"marked": marks}}
    game = Game(list(zip(cur.game.names, cur.game.hatness)), cur.game.edge_names(),
                provenance=prov)
    return ConstructedGame(game, cur.witness, WINNING, "fasten-single", prov, cur.verified)


def cone(cg_frame: ConstructedGame,
         components: Sequence[tuple[ConstructedGame, str, str]],
         apex: str = "O",
         verify_bound: Optional[int] = None) -> ConstructedGame:
    """Glue components at a common apex and join their marked vertices like the frame.

    ``components[i]`` is (game, apex-vertex-name, marked-neighbor-name) for
    the frame's i-th vertex.  The apex watches which marked vertex wins the
    frame coordinate and plays that component.
    """
    wf = _require_witness(cg_frame, "cone")
    frame = cg_frame.game
    if len(components) != frame.n:
        raise ValidationError("cone: need exactly one component per frame vertex")
    games, wits, o_names, a_names = [], [], [], []
    o_h = None
    used: set[str] = {apex}
    for cg_i, o_i, a_i in components:
        w_i = _require_witness(cg_i, "cone")
        g_i = cg_i.game
        if o_i not in g_i.index or a_i not in g_i.index:
            raise ValidationError("cone: apex or marked vertex missing from component")
        if a_i not in g_i.neighbors(o_i):
            raise ValidationError(f"cone: {a_i!r} must neighbor the apex in its component")
        if o_h is None:
            o_h = g_i.hatness_of(o_i)
        elif g_i.hatness_of(o_i) != o_h:
            raise ValidationError("cone: apex hatness must agree across components")
        rest = set(g_i.names) - {o_i}
        if used & rest:
            raise ValidationError("cone: component vertex sets must be disjoint")
        used |= rest
        games.append(g_i)
        wits.append(w_i)
        o_names.append(o_i)
        a_names.append(a_i)
    # rename every component apex to the shared name
    games = [rename_game(g, {o: apex}) for g, o in zip(games, o_names)]
    wits = [rename_strategy(w, {o: apex}) for w, o in zip(wits, o_names)]
    vertices = [(apex, o_h)]
    low_h: dict[str, int] = {}
    for i, g_i in enumerate(games):
        for n, h in zip(g_i.names, g_i.hatness):
            if n == apex:
                continue
            if n == a_names[i]:
                low_h[n] = h
                vertices.append((n, h * frame.hatness[i]))
            else:
                vertices.append((n, h))
    edges = [e for g_i in games for e in g_i.edge_names()]
    edges += [(a_names[i], a_names[j]) for i, j in frame.edges]
    game = Game(vertices, edges)
    comp_of = {n: i for i, g_i in enumerate(games) for n in g_i.names if n != apex}

    def frame_guess(i, view):
        return lookup(frame, wf, frame.names[i],
                      {frame.names[j]: view[a_names[j]] // low_h[a_names[j]]
                       for j in frame.nbrs[i]})

    def comp_view(i, v, view):
        sub = {}
        for u in games[i].neighbors(v):
            cu = view[u]
            if u == a_names[i]:
                cu %= low_h[u]
            sub[u] = cu
        return sub

    def rule(v, view):
        if v == apex:
            target = 0
            for i in range(frame.n):
                if frame_guess(i, view) == view[a_names[i]] // low_h[a_names[i]]:
                    target = i
                    break
            return lookup(games[target], wits[target], apex, comp_view(target, apex, view))
        i = comp_of[v]
        if v == a_names[i]:
            return lookup(games[i], wits[i], v, comp_view(i, v, view)) \
                + low_h[v] * frame_guess(i, view)
        return lookup(games[i], wits[i], v, comp_view(i, v, view))

    witness = build_strategy(game, rule)
    return _finish_winning(game, witness, "cone",
                           [cg_frame] + [c for c, _, _ in components],
                           {"apex": apex, "marked": a_names}, verify_bound)


# -- predictable sets and the dispatcher cone ----------------------------------


@dataclass
class PredictableResult:
    ok: bool
    members: tuple[str, ...] = ()
    selector: Optional[list] = None      # per member-view index: member position
    violation: Optional[dict] = None     # member colors with no common winner
    weights: Optional[list] = None       # mixed-radix weights over members

    def choose(self, colors: dict) -> str:
        """Selected vertex name for a coloring of the member set."""
        idx = 0
        for pos, name in enumerate(self.members):
            idx += colors[name] * self.weights[pos]
        return self.members[self.selector[idx]]


def check_predictable(game: Game, witness: Strategy, members: Sequence[str]) -> PredictableResult:
    """Decide whether a vertex subset is predictable for a fixed witness.

    A subset is predictable when an observer of its colors alone can name a
    member that is guaranteed to guess correctly whenever any member does.
    The selector returned picks the canonically first always-safe member.
    """
    witness.validate(game)
    from . import kernels
    idxs = sorted(game.index[m] for m in members)
    and_mask, seen, ordered = kernels.predictable_scan(game, witness, idxs)
    names = tuple(game.names[v] for v in ordered)
    radices = [game.hatness[v] for v in ordered]
    weights = []
    w = 1
    for r in radices:
        weights.append(w)
        w *= r
    selector = []
    for view in range(len(and_mask)):
        if seen[view] and and_mask[view] == 0:
            colors = {}
            rem = view
            for name, r in zip(names, radices):
                colors[name] = rem % r
                rem //= r
            return PredictableResult(False, names, None, colors)
        mask = int(and_mask[view]) if seen[view] else (1 << len(names)) - 1
        selector.append((mask & -mask).bit_length() - 1)
    return PredictableResult(True, names, selector, None, weights)


def cone_dispatchers(cg_frame: ConstructedGame,
                     sets: Sequence[Sequence[str]],
                     principal: Sequence[int],
                     components: Sequence[tuple[ConstructedGame, str, str]],
                     dispatcher_names: Optional[Sequence[str]] = None,
                     verify_bound: Optional[int] = None) -> ConstructedGame:
    """Cone over a frame whose apex is split into one dispatcher per predictable set.

    ``sets[j]`` lists frame vertices visible to dispatcher j; ``principal[l]``
    names the dispatcher owning the frame's l-th vertex; ``components[l]``
    is (game, dispatcher-vertex-name, marked-neighbor-name).
    """
    wf = _require_witness(cg_frame, "cone_dispatchers")
    frame = cg_frame.game
    m = len(sets)
    if len(components) != frame.n or len(principal) != frame.n:
        raise ValidationError("cone_dispatchers: need one component and one principal index per frame vertex")
    sets = [list(s) for s in sets]
    covered = set().union(*[set(s) for s in sets]) if sets else set()
    if covered != set(frame.names):
        raise ValidationError("cone_dispatchers: sets must cover the frame's vertices")
    for j, s in enumerate(sets):
        rest = set().union(*[set(t) for k, t in enumerate(sets) if k != j]) if m > 1 else set()
        if set(s) <= rest:
            raise ValidationError(f"cone_dispatchers: set {j} is contained in the union of the others")
    for l, j in enumerate(principal):
        if not 0 <= j < m:
            raise ValidationError("cone_dispatchers: principal index out of range")
        if frame.names[l] not in sets[j]:
            raise ValidationError(
                f"cone_dispatchers: frame vertex {frame.names[l]!r} not in its principal set")
    preds = []
    for j, s in enumerate(sets):
        pr = check_predictable(frame, wf, s)
        if not pr.ok:
            raise ValidationError(
                f"cone_dispatchers: set {j} ({s}) is not predictable; "
                f"no common winner for member colors {pr.violation}")
        preds.append(pr)
    if dispatcher_names is None:
        dispatcher_names = [f"O{j + 1}" for j in range(m)]
    games, wits, a_names = [], [], []
    o_h = [None] * m
    used: set[str] = set(dispatcher_names)
    if len(used) != m:
        raise ValidationError("cone_dispatchers: dispatcher names must be distinct")
    for l, (cg_l, o_l, a_l) in enumerate(components):
        w_l = _require_witness(cg_l, "cone_dispatchers")
        g_l = cg_l.game
        j = principal[l]
        if o_l not in g_l.index or a_l not in g_l.index:
            raise ValidationError("cone_dispatchers: dispatcher or marked vertex missing")
        if a_l not in g_l.neighbors(o_l):
            raise ValidationError("cone_dispatchers: marked vertex must neighbor its dispatcher")
        if o_h[j] is None:
            o_h[j] = g_l.hatness_of(o_l)
        elif g_l.hatness_of(o_l) != o_h[j]:
            raise ValidationError("cone_dispatchers: dispatcher hatness must agree")
        rest = set(g_l.names) - {o_l}
        if used & rest:
            raise ValidationError("cone_dispatchers: component vertex sets must be disjoint")
        used |= rest
        games.append(rename_game(g_l, {o_l: dispatcher_names[j]}))
        wits.append(rename_strategy(w_l, {o_l: dispatcher_names[j]}))
        a_names.append(a_l)
    for j in range(m):
        if o_h[j] is None:
            raise ValidationError(f"cone_dispatchers: dispatcher {j} has no component")
    mark_of = dict(zip(frame.names, a_names))
    low_h = {a_names[l]: games[l].hatness_of(a_names[l]) for l in range(frame.n)}
    vertices = [(dispatcher_names[j], o_h[j]) for j in range(m)]
    for l, g_l in enumerate(games):
        for n, h in zip(g_l.names, g_l.hatness):
            if n in dispatcher_names:
                continue
            vertices.append((n, h * frame.hatness[l] if n == a_names[l] else h))
    edges = [e for g_l in games for e in g_l.edge_names()]
    edges += [(a_names[i], a_names[j]) for i, j in frame.edges]
    edges += [(dispatcher_names[j], mark_of[x]) for j in range(m) for x in sets[j]]
    game = Game(vertices, edges)
    comp_of = {n: l for l, g_l in enumerate(games) for n in g_l.names
               if n not in dispatcher_names}
    disp_index = {d: j for j, d in enumerate(dispatcher_names)}

    def high(l, view):
        return view[a_names[l]] // low_h[a_names[l]]

    def frame_guess(l, view):
        return lookup(frame, wf, frame.names[l],
                      {frame.names[j]: high(j, view) for j in frame.nbrs[l]})

    def comp_view(l, v, view):
        sub = {}
        for u in games[l].neighbors(v):
            cu = view[u]
            if u == a_names[l]:
                cu %= low_h[u]
            sub[u] = cu
        return sub

    def rule(v, view):
        if v in disp_index:
            j = disp_index[v]
            pr = preds[j]
            sel = pr.choose({name: high(frame.index[name], view) for name in pr.members})
            l = frame.index[sel]
            if principal[l] != j:
                return 0
            return lookup(games[l], wits[l], v, comp_view(l, v, view))
        l = comp_of[v]
        if v == a_names[l]:
            return lookup(games[l], wits[l], v, comp_view(l, v, view)) \
                + low_h[v] * frame_guess(l, view)
        return lookup(games[l], wits[l], v, comp_view(l, v, view))

    witness = build_strategy(game, rule)
    return _finish_winning(game, witness, "cone-dispatchers",
                           [cg_frame] + [c for c, _, _ in components],
                           {"sets": sets, "principal": list(principal)}, verify_bound)


# -- losing constructors --------------------------------------------------------


def losing_pendant(cg: ConstructedGame, b: str, new_name: str = "A*") -> ConstructedGame:
    """Attach a hatness-2 pendant to a losing game, raising b to 2h(b)-1; still losing."""
    _require_losing(cg, "losing_pendant")
    g = cg.game
    if b not in g.index:
        raise ValidationError(f"losing_pendant: unknown vertex {b!r}")
    if new_name in g.index:
        raise ValidationError(f"losing_pendant: name {new_name!r} already used")
    vertices = [(n, 2 * h - 1 if n == b else h) for n, h in zip(g.names, g.hatness)]
    vertices.append((new_name, 2))
    game = Game(vertices, list(g.edge_names()) + [(b, new_name)])
    return _finish_losing(game, "pendant-2h-1", [cg], {"at": b, "new": new_name})


def losing_attach_two(cg: ConstructedGame, b: str, c: str,
                      new_name: str = "A*") -> ConstructedGame:
    """Attach a hatness-2 vertex to two hatness-2 vertices of a losing game.

    Their hatnesses grow to 3 and 7; the pigeonhole argument keeps the game
    losing.
    """
    _require_losing(cg, "losing_attach_two")
    g = cg.game
    if b == c or b not in g.index or c not in g.index:
        raise ValidationError("losing_attach_two: need two distinct existing vertices")
    if g.hatness_of(b) != 2 or g.hatness_of(c) != 2:
        raise ValidationError("losing_attach_two: both targets must have hatness 2")
    if new_name in g.index:
        raise ValidationError(f"losing_attach_two: name {new_name!r} already used")
    vertices = []
    for n, h in zip(g.names, g.hatness):
        if n == b:
            vertices.append((n, 3))
        elif n == c:
            vertices.append((n, 7))
        else:
            vertices.append((n, h))
    vertices.append((new_name, 2))
    game = Game(vertices, list(g.edge_names()) + [(new_name, b), (new_name, c)])
    return _finish_losing(game, "ramsey-3x7", [cg], {"to": [b, c], "new": new_name})


def glue_losing(cg1: ConstructedGame, cg2: ConstructedGame, shared: str) -> ConstructedGame:
    """Glue two losing games at a vertex with hatness 2 in the second; still losing."""
    _require_losing(cg1, "glue_losing")
    _require_losing(cg2, "glue_losing")
    g1, g2 = cg1.game, cg2.game
    if shared not in g1.index or shared not in g2.index:
        raise ValidationError(f"glue_losing: {shared!r} must be in both games")
    if set(g1.names) & set(g2.names) != {shared}:
        raise ValidationError("glue_losing: games must overlap exactly in the shared vertex")
    if g2.hatness_of(shared) != 2:
        raise ValidationError("glue_losing: the shared vertex must have hatness 2 in the second game")
    if g1.hatness_of(shared) < 2:
        raise ValidationError("glue_losing: the shared vertex must have hatness >= 2 in the first game")
    vertices = list(zip(g1.names, g1.hatness))
    vertices += [(n, h) for n, h in zip(g2.names, g2.hatness) if n != shared]
    game = Game(vertices, list(g1.edge_names()) + list(g2.edge_names()))
    return _finish_losing(game, "glue-losing", [cg1, cg2], {"at": shared})
