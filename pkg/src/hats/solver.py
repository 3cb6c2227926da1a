"""Exhaustive decision of small games by constraint search, plus DIMACS export.

The strategy-existence problem is a multi-valued CSP: one variable per
(vertex, view) with domain 0..h(v)-1, and one clause per arrangement
demanding that some vertex's table entry equal its own color.  The search
combines watched-literal unit propagation, clause-driven branching (an
unsatisfied clause with the fewest open literals, failed branches recorded
as forbidden values), an optional zero-view symmetry normalization, and a
sound coverage bound: an assignment satisfies at most a fixed number of
clauses, so a branch whose unassigned variables cannot cover the remaining
unsatisfied clauses is pruned.  Complete graphs bypass the search
entirely: there every assignment covers exactly one clause, making the
problem a clause-saturating bipartite matching.

No restarts and no clause learning; the DIMACS export exists precisely so
an external CDCL engine can be swapped in.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .core import (
    Game, Strategy, Verdict, HatsError, ValidationError, SizeLimitError,
    strategy_from_tables, verify_strategy,
)

CSP_CLAUSE_BOUND = 2 * 10**6
CSP_VAR_BOUND = 2 * 10**6

SAT, UNSAT, BUDGET = "sat", "unsat", "budget"


@dataclass
class SolveStats:
    nodes: int = 0
    propagations: int = 0
    wall_time: float = 0.0
    method: str = "csp"


@dataclass
class SolveResult:
    verdict: Verdict
    stats: SolveStats = field(default_factory=SolveStats)


class _Engine:
    """Backtracking over multi-valued variables with watched-literal propagation.

    Branching is clause-driven: the search picks an unsatisfied clause with
    the fewest open literals and branches on which of them is made true,
    recording the failed alternatives as forbidden values.  A coverage
    bound (``caps``) prunes branches whose unassigned variables cannot
    satisfy the remaining clauses.
    """

    def __init__(self, domains: Sequence[int], clauses: Sequence[Sequence[tuple[int, int]]],
                 caps: Optional[Sequence[int]] = None):
        self.domains = list(domains)
        self.clauses = [list(c) for c in clauses]
        nvars = len(self.domains)
        self.value = [-1] * nvars
        self.forb = [0] * nvars
        self.domsize = list(self.domains)
        self.occ_val: dict[tuple[int, int], list[int]] = {}
        for cid, lits in enumerate(self.clauses):
            for x, a in lits:
                self.occ_val.setdefault((x, a), []).append(cid)
        self.sat = [False] * len(self.clauses)
        self.num_unsat = len(self.clauses)
        self.dead = any(not c for c in self.clauses)
        self.watchlist: list[list[int]] = [[] for _ in range(nvars)]
        self.watch_pos: list[list[int]] = []
        for cid, lits in enumerate(self.clauses):
            if not lits:
                self.watch_pos.append([0, 0])
                continue
            w = [0, 1 if len(lits) > 1 else 0]
            self.watch_pos.append(w)
            self.watchlist[lits[w[0]][0]].append(cid)
            if w[1] != w[0]:
                self.watchlist[lits[w[1]][0]].append(cid)
        self.caps = list(caps) if caps is not None else None
        self.cap_remaining = sum(self.caps) if self.caps else 0
        self.trail: list[tuple] = []       # ('a', var) or ('f', var, val)
        self.sat_trail: list[int] = []
        self.nodes = 0
        self.propagations = 0

    # -- literal state --

    def _false(self, x, a) -> bool:
        v = self.value[x]
        if v != -1:
            return v != a
        return bool((self.forb[x] >> a) & 1)

    # -- state maintenance --

    def _mark(self):
        return len(self.trail), len(self.sat_trail)

    def _undo(self, mark):
        tmark, smark = mark
        while len(self.sat_trail) > smark:
            cid = self.sat_trail.pop()
            self.sat[cid] = False
            self.num_unsat += 1
        while len(self.trail) > tmark:
            entry = self.trail.pop()
            if entry[0] == "a":
                x = entry[1]
                self.value[x] = -1
                if self.caps:
                    self.cap_remaining += self.caps[x]
            else:
                _, x, a = entry
                self.forb[x] &= ~(1 << a)
                self.domsize[x] += 1

    def _satisfy(self, cid):
        if not self.sat[cid]:
            self.sat[cid] = True
            self.num_unsat -= 1
            self.sat_trail.append(cid)

    def _assign(self, x, a, queue) -> bool:
        if self.value[x] != -1:
            return self.value[x] == a
        if (self.forb[x] >> a) & 1:
            return False
        self.value[x] = a
        self.trail.append(("a", x))
        if self.caps:
            self.cap_remaining -= self.caps[x]
        for cid in self.occ_val.get((x, a), ()):
            self._satisfy(cid)
        queue.append(x)
        return True

    def _forbid(self, x, a, queue) -> bool:
        if self.value[x] != -1:
            return self.value[x] != a
        if (self.forb[x] >> a) & 1:
            return True
        self.forb[x] |= 1 << a
        self.domsize[x] -= 1
        self.trail.append(("f", x, a))
        if self.domsize[x] == 0:
            return False
        if self.domsize[x] == 1:
            rest = next(c for c in range(self.domains[x])
                        if not (self.forb[x] >> c) & 1)
            self.propagations += 1
            return self._assign(x, rest, queue)
        queue.append(x)
        return True

    def _propagate(self, queue) -> bool:
        """Move watches off falsified literals; returns False on conflict."""
        while queue:
            x = queue.pop()
            wl = self.watchlist[x]
            keep = []
            i = 0
            while i < len(wl):
                cid = wl[i]
                i += 1
                if self.sat[cid]:
                    keep.append(cid)
                    continue
                lits = self.clauses[cid]
                w = self.watch_pos[cid]
                conflict = False
                still_here = False
                for slot in (0, 1):
                    pos = w[slot]
                    lx, lv = lits[pos]
                    if lx != x:
                        continue
                    if not self._false(x, lv):
                        still_here = True
                        continue
                    found = -1
                    for p in range(len(lits)):
                        if p == w[0] or p == w[1]:
                            continue
                        px, pv = lits[p]
                        if not self._false(px, pv):
                            found = p
                            break
                    if found >= 0:
                        w[slot] = found
                        self.watchlist[lits[found][0]].append(cid)
                        continue
                    other = w[1 - slot]
                    still_here = True
                    if other == pos:
                        conflict = True
                        break
                    ox, ov = lits[other]
                    if self._false(ox, ov):
                        conflict = True
                        break
                    if self.value[ox] == ov:
                        self._satisfy(cid)
                        break
                    # unit: the surviving watch must be made true
                    self.propagations += 1
                    if not self._assign(ox, ov, queue):
                        conflict = True
                    break
                if conflict:
                    keep.append(cid)
                    keep.extend(wl[i:])
                    self.watchlist[x] = keep
                    return False
                if still_here:
                    keep.append(cid)
            self.watchlist[x] = keep
        if self.caps is not None and self.num_unsat > self.cap_remaining:
            return False
        return True

    def assign_and_propagate(self, x, a) -> bool:
        queue: list[int] = []
        if not self._assign(x, a, queue):
            return False
        return self._propagate(queue)

    def forbid_and_propagate(self, x, a) -> bool:
        queue: list[int] = []
        if not self._forbid(x, a, queue):
            return False
        return self._propagate(queue)

    def _pick_clause(self) -> Optional[list[tuple[int, int]]]:
        """Open literals of an unsatisfied clause with the fewest choices."""
        best = None
        best_open = None
        for cid, lits in enumerate(self.clauses):
            if self.sat[cid]:
                continue
            open_lits = [(x, a) for x, a in lits if not self._false(x, a)]
            if best is None or len(open_lits) < len(best_open):
                best, best_open = cid, open_lits
                if len(open_lits) <= 1:
                    break
        return best_open

    # -- search --

    def search(self, node_budget: Optional[int] = None,
               time_budget: Optional[float] = None) -> str:
        if self.dead:
            return UNSAT
        deadline = time.monotonic() + time_budget if time_budget else None
        if not self._propagate([]):  # root coverage check
            return UNSAT
        # frame: [open literals, next index, level mark, in-flight branch mark]
        frames: list[list] = []
        if self.num_unsat == 0:
            return SAT

        def open_frame():
            lits = self._pick_clause()
            frames.append([lits, 0, self._mark(), None])

        open_frame()
        while True:
            if node_budget is not None and self.nodes >= node_budget:
                return BUDGET
            if deadline is not None and self.nodes % 256 == 0 and time.monotonic() > deadline:
                return BUDGET
            frame = frames[-1]
            lits, idx = frame[0], frame[1]
            if idx >= len(lits):
                # alternatives exhausted at this level
                self._undo(frame[2])
                frames.pop()
                if not frames:
                    return UNSAT
                parent = frames[-1]
                self._undo(parent[3])
                x, a = parent[0][parent[1]]
                parent[1] += 1
                if not self.forbid_and_propagate(x, a):
                    parent[1] = len(parent[0])  # level dead: exhaust it
                elif self.num_unsat == 0:
                    return SAT
                continue
            x, a = lits[idx]
            self.nodes += 1
            frame[3] = self._mark()
            if self.assign_and_propagate(x, a):
                if self.num_unsat == 0:
                    return SAT
                open_frame()
            else:
                self._undo(frame[3])
                frame[1] += 1
                if not self.forbid_and_propagate(x, a):
                    frame[1] = len(frame[0])
                elif self.num_unsat == 0:
                    return SAT


# -- the hats CSP ---------------------------------------------------------------


@dataclass
class StrategyCSP:
    """One variable per (vertex, view); one clause per arrangement."""
    game: Game
    domains: list[int]
    var_vertex: list[int]          # owning vertex per variable
    var_view: list[int]
    var_of: dict[tuple[int, int], int]
    clauses: list[list[tuple[int, int]]]
    caps: list[int]                # max clauses one assignment of the variable covers


def view_counts(game: Game) -> list[int]:
    out = []
    for v in range(game.n):
        size = 1
        for u in game.nbrs[v]:
            size *= game.hatness[u]
        out.append(size)
    return out


def build_csp(game: Game) -> StrategyCSP:
    counts = view_counts(game)
    nvars = sum(counts)
    if nvars > CSP_VAR_BOUND:
        raise SizeLimitError(f"{nvars} CSP variables exceed the bound {CSP_VAR_BOUND}")
    total = game.total_arrangements
    if total > CSP_CLAUSE_BOUND:
        raise SizeLimitError(f"{total} clauses exceed the bound {CSP_CLAUSE_BOUND}")
    domains, var_vertex, var_view = [], [], []
    var_of = {}
    for v in range(game.n):
        for k in range(counts[v]):
            var_of[(v, k)] = len(domains)
            domains.append(game.hatness[v])
            var_vertex.append(v)
            var_view.append(k)
    caps_vertex = []
    for v in range(game.n):
        cap = 1
        closed = set(game.nbrs[v]) | {v}
        for u in range(game.n):
            if u not in closed:
                cap *= game.hatness[u]
        caps_vertex.append(cap)
    caps = [caps_vertex[v] for v in var_vertex]
    clauses = []
    from .core import arrangements
    for colors in arrangements(game):
        lits = []
        for v in range(game.n):
            idx = 0
            w = 1
            for u in game.nbrs[v]:
                idx += colors[u] * w
                w *= game.hatness[u]
            lits.append((var_of[(v, idx)], colors[v]))
        clauses.append(lits)
    return StrategyCSP(game, domains, var_vertex, var_view, var_of, clauses, caps)


def _solve_complete_by_matching(game: Game, t0: float) -> SolveResult:
    """Exact decision for complete graphs via clause-saturating matching.

    On a complete graph every (variable, value) pair satisfies exactly one
    arrangement clause, so a winning strategy exists iff the clauses admit
    a matching into distinct variable options.  Deciding this by matching
    is polynomial where plain backtracking degenerates on the tight
    (reciprocal sum 1) instances.
    """
    import numpy as np
    import scipy.sparse as sp
    from scipy.sparse.csgraph import maximum_bipartite_matching

    counts = view_counts(game)
    total = game.total_arrangements
    if total > CSP_CLAUSE_BOUND:
        raise SizeLimitError(f"{total} clauses exceed the bound {CSP_CLAUSE_BOUND}")
    var_base = [0]
    for c in counts:
        var_base.append(var_base[-1] + c)
    idx = np.arange(total, dtype=np.int64)
    colors = [(idx // s) % h for s, h in zip(game.strides, game.hatness)]
    cols = []
    for v in range(game.n):
        acc = np.zeros(total, dtype=np.int64)
        w = 1
        for u in game.nbrs[v]:
            acc += colors[u] * w
            w *= game.hatness[u]
        cols.append(acc + var_base[v])
    rows = np.tile(idx, game.n)
    mat = sp.csr_matrix((np.ones(rows.size, dtype=np.int8),
                         (rows, np.concatenate(cols))),
                        shape=(total, var_base[-1]))
    match = maximum_bipartite_matching(mat, perm_type="column")
    stats = SolveStats(method="csp+matching", wall_time=time.monotonic() - t0)
    if np.any(match < 0):
        return SolveResult(Verdict(Verdict.LOSING, reason="exhausted"), stats)
    tables = [[0] * c for c in counts]
    for phi in range(total):
        var = int(match[phi])
        v = int(np.searchsorted(var_base, var, side="right")) - 1
        tables[v][var - var_base[v]] = int(colors[v][phi])
    witness = strategy_from_tables(game, tables)
    check = verify_strategy(game, witness)
    if not check.winning:
        raise HatsError("internal inconsistency: matching witness fails verification")
    stats.wall_time = time.monotonic() - t0
    return SolveResult(Verdict(Verdict.WINNING, witness=witness, reason="csp-sat"), stats)


def solve(game: Game, node_budget: Optional[int] = None,
          time_budget: Optional[float] = None,
          symmetry: bool = True, counting: bool = True,
          matching: bool = True) -> SolveResult:
    """Decide a game by exhaustive constraint search.

    Returns Winning with a verified witness, Losing ("exhausted"), or
    Unknown when a node/time budget ran out.  Complete graphs take the
    polynomial matching route unless ``matching`` is disabled.
    """
    t0 = time.monotonic()
    if node_budget is None:
        env = os.environ.get("HATS_BUDGET_NODES")
        node_budget = int(env) if env else None
    if game.n == 0:
        return SolveResult(Verdict(Verdict.LOSING, reason="exhausted"),
                           SolveStats(wall_time=time.monotonic() - t0))
    if any(h == 1 for h in game.hatness):
        tables = [[0] * c for c in view_counts(game)]
        witness = strategy_from_tables(game, tables)
        return SolveResult(Verdict(Verdict.WINNING, witness=witness, reason="hatness-1"),
                           SolveStats(wall_time=time.monotonic() - t0))
    if matching and game.n >= 2 and len(game.edges) == game.n * (game.n - 1) // 2:
        return _solve_complete_by_matching(game, t0)
    csp = build_csp(game)
    eng = _Engine(csp.domains, csp.clauses, csp.caps if counting else None)
    if symmetry:
        # any single vertex's colors can be relabeled, so one zero-view guess
        # may be normalized to 0
        x0 = csp.var_of[(0, 0)]
        if not eng.assign_and_propagate(x0, 0):
            stats = SolveStats(eng.nodes, eng.propagations, time.monotonic() - t0)
            return SolveResult(Verdict(Verdict.LOSING, reason="exhausted"), stats)
    status = eng.search(node_budget, time_budget)
    stats = SolveStats(eng.nodes, eng.propagations, time.monotonic() - t0)
    if status == SAT:
        tables = []
        counts = view_counts(game)
        for v in range(game.n):
            tables.append([max(0, eng.value[csp.var_of[(v, k)]]) for k in range(counts[v])])
        witness = strategy_from_tables(game, tables)
        check = verify_strategy(game, witness)
        if not check.winning:
            raise HatsError("internal inconsistency: solver witness fails verification")
        return SolveResult(Verdict(Verdict.WINNING, witness=witness, reason="csp-sat"), stats)
    if status == UNSAT:
        return SolveResult(Verdict(Verdict.LOSING, reason="exhausted"), stats)
    return SolveResult(Verdict(Verdict.UNKNOWN, reason="budget"), stats)


def naive_solve(game: Game, limit: int = 10**6) -> Verdict:
    """Oracle-grade decision by enumerating every strategy table."""
    counts = view_counts(game)
    space = 1
    for v, c in enumerate(counts):
        space *= game.hatness[v] ** c
    if space > limit:
        raise SizeLimitError(f"{space} strategies exceed the naive bound {limit}")
    from .core import arrangements
    arrs = list(arrangements(game))
    slots = [(v, k) for v in range(game.n) for k in range(counts[v])]
    tables = [[0] * c for c in counts]
    views = []
    for colors in arrs:
        per = []
        for v in range(game.n):
            idx = 0
            w = 1
            for u in game.nbrs[v]:
                idx += colors[u] * w
                w *= game.hatness[u]
            per.append(idx)
        views.append(per)
    while True:
        ok = True
        for colors, per in zip(arrs, views):
            if not any(tables[v][per[v]] == colors[v] for v in range(game.n)):
                ok = False
                break
        if ok:
            return Verdict(Verdict.WINNING,
                           witness=strategy_from_tables(game, tables),
                           reason="naive-enumeration")
        pos = len(slots) - 1
        while pos >= 0:
            v, k = slots[pos]
            tables[v][k] += 1
            if tables[v][k] < game.hatness[v]:
                break
            tables[v][k] = 0
            pos -= 1
        if pos < 0:
            return Verdict(Verdict.LOSING, reason="naive-enumeration")


# -- DIMACS ------------------------------------------------------------------------


def dimacs_layout(game: Game):
    """Variable ids: offset(v) + view*h(v) + color + 1, vertices in canonical order."""
    counts = view_counts(game)
    offsets = [0]
    for v in range(game.n):
        offsets.append(offsets[-1] + counts[v] * game.hatness[v])
    return counts, offsets


def to_dimacs(game: Game) -> str:
    """One-hot boolean encoding of the strategy CSP.

    Clauses: per (vertex, view) at-least-one color and pairwise
    at-most-one, then one winning disjunction per arrangement.
    """
    counts, offsets = dimacs_layout(game)
    nvars = offsets[-1]
    if nvars > CSP_VAR_BOUND:
        raise SizeLimitError(f"{nvars} DIMACS variables exceed the bound")
    total = game.total_arrangements
    amo = sum(counts[v] * game.hatness[v] * (game.hatness[v] - 1) // 2
              for v in range(game.n))
    nclauses = sum(counts) + amo + total
    if nclauses > 4 * CSP_CLAUSE_BOUND:
        raise SizeLimitError(f"{nclauses} DIMACS clauses exceed the bound")

    def var(v, k, c):
        return offsets[v] + k * game.hatness[v] + c + 1

    lines = [f"c hats/1 {game.sha256()}"]
    for v in range(game.n):
        for k in range(counts[v]):
            for c in range(game.hatness[v]):
                lines.append(f"c var {var(v, k, c)} = {game.names[v]}/{k}/{c}")
    lines.append(f"p cnf {nvars} {nclauses}")
    for v in range(game.n):
        for k in range(counts[v]):
            lines.append(" ".join(str(var(v, k, c)) for c in range(game.hatness[v])) + " 0")
            for c1 in range(game.hatness[v]):
                for c2 in range(c1 + 1, game.hatness[v]):
                    lines.append(f"-{var(v, k, c1)} -{var(v, k, c2)} 0")
    from .core import arrangements
    for colors in arrangements(game):
        lits = []
        for v in range(game.n):
            idx = 0
            w = 1
            for u in game.nbrs[v]:
                idx += colors[u] * w
                w *= game.hatness[u]
            lits.append(str(var(v, idx, colors[v])))
        lines.append(" ".join(lits) + " 0")
    return "\n".join(lines) + "\n"


def parse_dimacs(text: str) -> tuple[int, list[list[int]]]:
    nvars = None
    clauses = []
    cur: list[int] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ValidationError(f"bad DIMACS header: {line!r}")
            nvars = int(parts[2])
            continue
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                clauses.append(cur)
                cur = []
            else:
                cur.append(lit)
    if cur:
        clauses.append(cur)
    if nvars is None:
        raise ValidationError("DIMACS input has no problem line")
    return nvars, clauses


def solve_cnf(nvars: int, clauses: Sequence[Sequence[int]],
              node_budget: Optional[int] = None) -> tuple[str, Optional[list[int]]]:
    """Boolean DPLL on parsed DIMACS clauses; returns (status, model)."""
    mv = []
    for cl in clauses:
        lits = []
        for lit in cl:
            x = abs(lit) - 1
            if x >= nvars:
                raise ValidationError(f"literal {lit} out of range")
            lits.append((x, 1 if lit > 0 else 0))
        mv.append(lits)
    eng = _Engine([2] * nvars, mv)
    status = eng.search(node_budget)
    if status != SAT:
        return status, None
    model = [(x + 1) if eng.value[x] == 1 else -(x + 1) for x in range(nvars)]
    return SAT, model


def decode_model(game: Game, assignment) -> Strategy:
    """Strategy from a one-hot DIMACS model (iterable of signed literals or a dict)."""
    counts, offsets = dimacs_layout(game)
    nvars = offsets[-1]
    truth = [None] * (nvars + 1)
    if isinstance(assignment, dict):
        for k, val in assignment.items():
            truth[int(k)] = bool(val)
    else:
        for lit in assignment:
            lit = int(lit)
            if lit == 0 or abs(lit) > nvars:
                continue
            truth[abs(lit)] = lit > 0
    tables = []
    for v in range(game.n):
        h = game.hatness[v]
        tab = []
        for k in range(counts[v]):
            chosen = [c for c in range(h)
                      if truth[offsets[v] + k * h + c + 1]]
            if len(chosen) != 1:
                raise ValidationError(
                    f"non-one-hot assignment at {game.names[v]}/view {k}: {chosen}")
            tab.append(chosen[0])
        tables.append(tab)
    return strategy_from_tables(game, tables)


def strategy_to_model(game: Game, strategy: Strategy) -> list[int]:
    """Signed-literal model corresponding to a strategy (inverse of decode_model)."""
    counts, offsets = dimacs_layout(game)
    model = []
    for v in range(game.n):
        h = game.hatness[v]
        tab = strategy.by_name[game.names[v]].table
        for k in range(counts[v]):
            for c in range(h):
                vid = offsets[v] + k * h + c + 1
                model.append(vid if tab[k] == c else -vid)
    return model


# -- the 4-cycle shortcut -------------------------------------------------------------


def solve_c4_via_rook(game: Game, node_budget: Optional[int] = None) -> SolveResult:
    """Decide a 4-cycle game through its board-game form.

    The catalogue of solved boards decides every pair by case or dominance;
    the exhaustive board search is the fallback for anything it leaves open.
    """
    t0 = time.monotonic()
    from . import rookcheck
    pair = rookcheck.board_pair_of_cycle(game)
    verdict = rookcheck.catalogue_rook(pair)
    if verdict.status == "unknown":
        rv = rookcheck.solve_rook(pair, budget=node_budget)
        verdict = rv
    stats = SolveStats(method="rook", wall_time=time.monotonic() - t0)
    if verdict.status == "winning":
        witness = rookcheck.strategy_from_boards(game, pair, verdict.witness_pair)
        check = verify_strategy(game, witness)
        if not check.winning:
            raise HatsError("internal inconsistency: board witness fails on the cycle")
        return SolveResult(Verdict(Verdict.WINNING, witness=witness,
                                   reason=verdict.reason), stats)
    if verdict.status == "losing":
        return SolveResult(Verdict(Verdict.LOSING, reason=verdict.reason), stats)
    return SolveResult(Verdict(Verdict.UNKNOWN, reason=verdict.reason), stats)
