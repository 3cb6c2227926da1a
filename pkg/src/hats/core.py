"""Canonical representation of hat games, arrangements and strategies.

A game is a visibility graph plus a per-vertex hat count ("hatness").
Colors are 0-based residues 0..h(v)-1 everywhere.  Vertex order is the
order of appearance in the input and is the canonical order for all
indexing.  Strategy tables are indexed little-endian mixed radix over the
vertex's neighbors, first listed neighbor least significant.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

FORMAT_TAG = "hats/1"

# Exhaustive scans use int64 arithmetic internally; anything beyond this is
# rejected with an explicit error rather than silently overflowing.
MAX_SCAN_ARRANGEMENTS = 2**62


class HatsError(Exception):
    """Base error for this package."""


class ValidationError(HatsError):
    """Malformed game, strategy or file content."""


class SizeLimitError(HatsError):
    """An exhaustive operation would exceed its size bound."""


class Game:
    """Immutable visibility graph with a hat function.

    Vertices are (name, hatness) pairs in canonical order; edges are
    unordered name pairs.  All derived structure (neighbor lists, strides)
    is precomputed once.
    """

    __slots__ = (
        "names", "hatness", "edges", "index", "nbrs",
        "_strides", "_total", "provenance",
    )

    def __init__(self, vertices: Sequence[tuple[str, int]],
                 edges: Iterable[tuple[str, str]],
                 provenance: Optional[dict] = None):
        names = tuple(str(n) for n, _ in vertices)
        hatness = tuple(int(h) for _, h in vertices)
        if len(set(names)) != len(names):
            raise ValidationError("duplicate vertex names")
        for n, h in zip(names, hatness):
            if h < 1:
                raise ValidationError(f"vertex {n!r}: hatness must be >= 1, got {h}")
        index = {n: i for i, n in enumerate(names)}
        norm_edges = set()
        for a, b in edges:
            if a == b:
                raise ValidationError(f"self-loop at {a!r}")
            if a not in index or b not in index:
                raise ValidationError(f"edge ({a!r},{b!r}) references unknown vertex")
            i, j = index[a], index[b]
            norm_edges.add((min(i, j), max(i, j)))
        nbr_sets: list[set[int]] = [set() for _ in names]
        for i, j in norm_edges:
            nbr_sets[i].add(j)
            nbr_sets[j].add(i)
        self.names = names
        self.hatness = hatness
        self.edges = tuple(sorted(norm_edges))
        self.index = index
        self.nbrs = tuple(tuple(sorted(s)) for s in nbr_sets)
        # lexicographic arrangement order: first vertex most significant
        strides = [1] * len(names)
        for i in range(len(names) - 2, -1, -1):
            strides[i] = strides[i + 1] * hatness[i + 1]
        self._strides = tuple(strides)
        total = 1
        for h in hatness:
            total *= h
        self._total = total
        self.provenance = provenance

    # -- basic accessors ---------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.names)

    @property
    def total_arrangements(self) -> int:
        return self._total

    @property
    def strides(self) -> tuple[int, ...]:
        return self._strides

    def hatness_of(self, name: str) -> int:
        return self.hatness[self.index[name]]

    def neighbors(self, name: str) -> tuple[str, ...]:
        return tuple(self.names[j] for j in self.nbrs[self.index[name]])

    def edge_names(self) -> tuple[tuple[str, str], ...]:
        return tuple((self.names[i], self.names[j]) for i, j in self.edges)

    def has_edge(self, a: str, b: str) -> bool:
        i, j = self.index[a], self.index[b]
        return (min(i, j), max(i, j)) in set(self.edges)

    # -- equality / hashing ------------------------------------------------

    def _key(self):
        return (self.names, self.hatness, self.edges)

    def __eq__(self, other):
        return isinstance(other, Game) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        vs = ",".join(f"{n}:{h}" for n, h in zip(self.names, self.hatness))
        return f"Game({vs}; {len(self.edges)} edges)"

    # -- serialization -----------------------------------------------------

    def to_json_dict(self) -> dict:
        d = {
            "format": FORMAT_TAG,
            "vertices": [{"name": n, "hatness": h}
                         for n, h in zip(self.names, self.hatness)],
            "edges": [[self.names[i], self.names[j]] for i, j in self.edges],
        }
        if self.provenance is not None:
            d["provenance"] = self.provenance
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), separators=(",", ":"))

    @staticmethod
    def from_json_dict(d: dict) -> "Game":
        if not isinstance(d, dict):
            raise ValidationError("game JSON must be an object")
        if d.get("format") != FORMAT_TAG:
            raise ValidationError(f'game JSON: missing or wrong "format" (want {FORMAT_TAG!r})')
        try:
            vertices = [(v["name"], v["hatness"]) for v in d["vertices"]]
        except (KeyError, TypeError) as e:
            raise ValidationError(f"game JSON: bad vertices field ({e})")
        edges = [tuple(e) for e in d.get("edges", [])]
        return Game(vertices, edges, provenance=d.get("provenance"))

    @staticmethod
    def from_json(text: str) -> "Game":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as e:
            raise ValidationError(f"invalid JSON: {e}")
        return Game.from_json_dict(d)

    def sha256(self) -> str:
        # hash excludes provenance so constructed copies of a game agree
        d = self.to_json_dict()
        d.pop("provenance", None)
        return hashlib.sha256(json.dumps(d, separators=(",", ":")).encode()).hexdigest()


def make_game(hatnesses: Sequence[int], edges: Iterable[tuple[int, int]],
              names: Optional[Sequence[str]] = None) -> Game:
    """Build a game from hatness list and index edges; names default to A,B,C..."""
    n = len(hatnesses)
    if names is None:
        names = default_names(n)
    vertices = list(zip(names, hatnesses))
    return Game(vertices, [(names[i], names[j]) for i, j in edges])


def default_names(n: int) -> list[str]:
    abc = [chr(ord("A") + i) for i in range(26)]
    if n <= 26:
        return abc[:n]
    return [f"V{i}" for i in range(n)]


def complete_game(hatnesses: Sequence[int], names=None) -> Game:
    n = len(hatnesses)
    return make_game(hatnesses, [(i, j) for i in range(n) for j in range(i + 1, n)], names)


def path_game(hatnesses: Sequence[int], names=None) -> Game:
    n = len(hatnesses)
    return make_game(hatnesses, [(i, i + 1) for i in range(n - 1)], names)


def cycle_game(hatnesses: Sequence[int], names=None) -> Game:
    n = len(hatnesses)
    edges = [(i, i + 1) for i in range(n - 1)]
    if n > 2:
        edges.append((0, n - 1))
    return make_game(hatnesses, edges, names)


def empty_game(hatnesses: Sequence[int], names=None) -> Game:
    return make_game(hatnesses, [], names)


# -- arrangements ----------------------------------------------------------

Arrangement = tuple  # colors in canonical vertex order


def arrangement_to_index(game: Game, colors: Sequence[int]) -> int:
    if len(colors) != game.n:
        raise ValidationError("arrangement length mismatch")
    idx = 0
    for c, h, s in zip(colors, game.hatness, game.strides):
        if not 0 <= c < h:
            raise ValidationError(f"color {c} out of range 0..{h - 1}")
        idx += c * s
    return idx


def index_to_arrangement(game: Game, idx: int) -> Arrangement:
    if not 0 <= idx < game.total_arrangements:
        raise ValidationError("arrangement index out of range")
    return tuple((idx // s) % h for s, h in zip(game.strides, game.hatness))


def arrangements(game: Game, start: int = 0, stop: Optional[int] = None) -> Iterator[Arrangement]:
    """Yield arrangements in lexicographic order; [start, stop) supports range splitting."""
    total = game.total_arrangements
    if stop is None:
        stop = total
    if not (0 <= start <= stop <= total):
        raise ValidationError("bad arrangement range")
    if start == stop:
        return
    colors = list(index_to_arrangement(game, start))
    h = game.hatness
    n = game.n
    for _ in range(start, stop):
        yield tuple(colors)
        v = n - 1
        while v >= 0:
            colors[v] += 1
            if colors[v] < h[v]:
                break
            colors[v] = 0
            v -= 1


# -- strategies ------------------------------------------------------------

@dataclass(frozen=True)
class VertexTable:
    """One sage's lookup table: neighbor view -> guess."""
    name: str
    neighbors: tuple[str, ...]
    table: tuple[int, ...]


class Strategy:
    """Collective strategy: one table per vertex, canonical neighbor order."""

    __slots__ = ("entries", "by_name")

    def __init__(self, entries: Sequence[VertexTable]):
        self.entries = tuple(entries)
        self.by_name = {e.name: e for e in self.entries}
        if len(self.by_name) != len(self.entries):
            raise ValidationError("duplicate vertex in strategy")

    def table(self, name: str) -> VertexTable:
        return self.by_name[name]

    def _key(self):
        return self.entries

    def __eq__(self, other):
        return isinstance(other, Strategy) and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def validate(self, game: Game) -> None:
        """Check shape against a game; raises ValidationError naming vertex and index."""
        if set(self.by_name) != set(game.names):
            raise ValidationError("strategy vertices do not match game vertices")
        for v, name in enumerate(game.names):
            e = self.by_name[name]
            want_nbrs = tuple(game.names[j] for j in game.nbrs[v])
            if e.neighbors != want_nbrs:
                raise ValidationError(
                    f"vertex {name!r}: neighbor order must be {want_nbrs}, got {e.neighbors}")
            size = 1
            for u in game.nbrs[v]:
                size *= game.hatness[u]
            if len(e.table) != size:
                raise ValidationError(
                    f"vertex {name!r}: table length {len(e.table)}, expected {size}")
            hv = game.hatness[v]
            for k, g in enumerate(e.table):
                if not 0 <= g < hv:
                    raise ValidationError(
                        f"vertex {name!r}: guess {g} at index {k} out of range 0..{hv - 1}")

    def to_json_dict(self) -> dict:
        return {
            "format": FORMAT_TAG,
            "vertices": [{"name": e.name,
                          "neighbors": list(e.neighbors),
                          "table": list(e.table)} for e in self.entries],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), separators=(",", ":"))

    @staticmethod
    def from_json_dict(d: dict) -> "Strategy":
        if d.get("format") != FORMAT_TAG:
            raise ValidationError(f'strategy JSON: missing or wrong "format" (want {FORMAT_TAG!r})')
        entries = []
        try:
            for v in d["vertices"]:
                entries.append(VertexTable(v["name"], tuple(v["neighbors"]),
                                           tuple(int(x) for x in v["table"])))
        except (KeyError, TypeError) as e:
            raise ValidationError(f"strategy JSON: bad vertices field ({e})")
        return Strategy(entries)

    @staticmethod
    def from_json(text: str) -> "Strategy":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as e:
            raise ValidationError(f"invalid JSON: {e}")
        return Strategy.from_json_dict(d)


def strategy_from_tables(game: Game, tables: Sequence[Sequence[int]]) -> Strategy:
    """Wrap raw per-vertex tables (canonical order) into a Strategy."""
    entries = []
    for v, name in enumerate(game.names):
        nbrs = tuple(game.names[j] for j in game.nbrs[v])
        entries.append(VertexTable(name, nbrs, tuple(int(x) for x in tables[v])))
    s = Strategy(entries)
    s.validate(game)
    return s


def build_strategy(game: Game, guess) -> Strategy:
    """Materialize tables from a callable guess(vertex_name, view_dict) -> color.

    view_dict maps neighbor name -> color.  Handy for rule-based strategies.
    """
    tables = []
    for v in range(game.n):
        nbr = game.nbrs[v]
        nbr_names = [game.names[j] for j in nbr]
        radices = [game.hatness[j] for j in nbr]
        size = 1
        for r in radices:
            size *= r
        tab = []
        for k in range(size):
            rem = k
            view = {}
            for name, r in zip(nbr_names, radices):
                view[name] = rem % r
                rem //= r
            g = int(guess(game.names[v], view))
            tab.append(g)
        tables.append(tab)
    return strategy_from_tables(game, tables)


def view_index(game: Game, strategy: Strategy, vertex: str, arrangement: Sequence[int]) -> int:
    """Table index encoding the neighbor colors, first listed neighbor least significant."""
    strategy.validate(game)
    v = game.index[vertex]
    idx = 0
    weight = 1
    for u in game.nbrs[v]:
        idx += arrangement[u] * weight
        weight *= game.hatness[u]
    return idx


# -- verdicts ---------------------------------------------------------------

@dataclass
class Verdict:
    """Outcome of a decision procedure.

    status is one of "winning", "losing", "unknown".  A winning verdict
    carries a witness strategy; a counterexample is only attached when a
    concrete submitted strategy was refuted.
    """
    status: str
    witness: Optional[Strategy] = None
    reason: str = ""
    counterexample: Optional[tuple] = None

    WINNING = "winning"
    LOSING = "losing"
    UNKNOWN = "unknown"

    @property
    def is_winning(self) -> bool:
        return self.status == Verdict.WINNING

    @property
    def is_losing(self) -> bool:
        return self.status == Verdict.LOSING


@dataclass
class VerifyResult:
    winning: bool
    first_losing: Optional[tuple] = None


def _check_scan_size(game: Game) -> None:
    if game.total_arrangements > MAX_SCAN_ARRANGEMENTS:
        raise SizeLimitError(
            f"{game.total_arrangements} arrangements exceed the exhaustive scan "
            f"bound {MAX_SCAN_ARRANGEMENTS}")


def verify_strategy(game: Game, strategy: Strategy) -> VerifyResult:
    """Exhaustively check a strategy; reports the lexicographically first losing arrangement."""
    strategy.validate(game)
    _check_scan_size(game)
    from . import kernels
    idx = kernels.first_failure(game, strategy)
    if idx is None:
        return VerifyResult(True, None)
    return VerifyResult(False, index_to_arrangement(game, idx))


def correct_count(game: Game, strategy: Strategy, vertex: str) -> int:
    """Number of arrangements on which `vertex` guesses its own color."""
    strategy.validate(game)
    _check_scan_size(game)
    from . import kernels
    return kernels.count_correct(game, strategy, game.index[vertex])


def is_precise(game: Game, strategy: Strategy) -> bool:
    """True iff every arrangement has exactly one correct guess."""
    strategy.validate(game)
    _check_scan_size(game)
    from . import kernels
    return kernels.first_precision_violation(game, strategy) is None


def subgame(game: Game, subset: Iterable[str]) -> Game:
    """Induced subgraph with the hat function restricted to `subset`."""
    wanted = set(subset)
    unknown = wanted - set(game.names)
    if unknown:
        raise ValidationError(f"unknown vertices: {sorted(unknown)}")
    vertices = [(n, h) for n, h in zip(game.names, game.hatness) if n in wanted]
    edges = [(a, b) for a, b in game.edge_names() if a in wanted and b in wanted]
    return Game(vertices, edges)
