"""Exhaustive-scan kernels over the arrangement space.

Two interchangeable backends:

* ``numba`` (default when importable): @njit odometer loops, compiled once
  and cached on disk.
* ``numpy``: chunked vectorized scans, no compilation.

Select with the ``HATS_KERNELS`` environment variable (``numba`` or
``numpy``) or :func:`set_backend`.  Both backends implement the same
contracts and are exercised against each other in the benchmark and tests.
"""

from __future__ import annotations

import os
from typing import Optional

import numpy as np

from .core import Game, Strategy, SizeLimitError

_CHUNK = 1 << 20

_backend: Optional[str] = None


def available_backends() -> list[str]:
    out = ["numpy"]
    try:
        import numba  # noqa: F401
        out.insert(0, "numba")
    except ImportError:
        pass
    return out


def get_backend() -> str:
    global _backend
    if _backend is None:
        want = os.environ.get("HATS_KERNELS", "").strip().lower()
        avail = available_backends()
        if want:
            if want not in ("numba", "numpy"):
                raise ValueError(f"HATS_KERNELS must be 'numba' or 'numpy', got {want!r}")
            if want == "numba" and "numba" not in avail:
                raise ImportError("HATS_KERNELS=numba but numba is not importable")
            _backend = want
        else:
            _backend = avail[0]
    return _backend


def set_backend(name: Optional[str]) -> None:
    """Force a backend ('numba'/'numpy'); None re-reads the environment."""
    global _backend
    if name is not None and name not in ("numba", "numpy"):
        raise ValueError(name)
    _backend = name


def set_threads(n: int) -> None:
    try:
        import numba
        numba.set_num_threads(max(1, n))
    except ImportError:
        pass


# -- array compilation -------------------------------------------------------

def game_arrays(game: Game):
    """Flat int64 arrays describing the game for kernel consumption."""
    n = game.n
    h = np.array(game.hatness, dtype=np.int64)
    strides = np.array(game.strides, dtype=np.int64)
    nbr_ptr = np.zeros(n + 1, dtype=np.int64)
    nbr_idx = []
    nbr_w = []
    for v in range(n):
        w = 1
        for u in game.nbrs[v]:
            nbr_idx.append(u)
            nbr_w.append(w)
            w *= game.hatness[u]
        nbr_ptr[v + 1] = len(nbr_idx)
    # reverse index: for each vertex v, the (observer, weight) pairs whose
    # view changes when v's color changes
    in_ptr = np.zeros(n + 1, dtype=np.int64)
    in_obs = []
    in_w = []
    for v in range(n):
        for u in game.nbrs[v]:
            w = 1
            for x in game.nbrs[u]:
                if x == v:
                    break
                w *= game.hatness[x]
            in_obs.append(u)
            in_w.append(w)
        in_ptr[v + 1] = len(in_obs)
    return (h, strides,
            np.array(nbr_idx, dtype=np.int64), np.array(nbr_w, dtype=np.int64), nbr_ptr,
            np.array(in_obs, dtype=np.int64), np.array(in_w, dtype=np.int64), in_ptr)


def strategy_arrays(game: Game, strategy: Strategy):
    tab_ptr = np.zeros(game.n + 1, dtype=np.int64)
    tabs = []
    for v, name in enumerate(game.names):
        t = strategy.by_name[name].table
        tabs.extend(t)
        tab_ptr[v + 1] = len(tabs)
    return np.array(tabs, dtype=np.int64), tab_ptr


def _total_checked(game: Game) -> int:
    total = game.total_arrangements
    if total > 2**62:
        raise SizeLimitError(f"{total} arrangements exceed the int64 scan bound")
    return total


# -- numba backend ------------------------------------------------------------

_NUMBA_FNS = None


def _numba_fns():
    global _NUMBA_FNS
    if _NUMBA_FNS is not None:
        return _NUMBA_FNS
    from numba import njit

    @njit(cache=True)
    def _init_state(start, h, strides, nbr_idx, nbr_w, nbr_ptr):
        n = h.shape[0]
        colors = np.empty(n, dtype=np.int64)
        for v in range(n):
            colors[v] = (start // strides[v]) % h[v]
        views = np.zeros(n, dtype=np.int64)
        for v in range(n):
            acc = 0
            for k in range(nbr_ptr[v], nbr_ptr[v + 1]):
                acc += colors[nbr_idx[k]] * nbr_w[k]
            views[v] = acc
        return colors, views

    @njit(cache=True)
    def _step(colors, views, h, in_obs, in_w, in_ptr):
        v = h.shape[0] - 1
        while v >= 0:
            colors[v] += 1
            if colors[v] < h[v]:
                for k in range(in_ptr[v], in_ptr[v + 1]):
                    views[in_obs[k]] += in_w[k]
                return
            colors[v] = 0
            back = h[v] - 1
            for k in range(in_ptr[v], in_ptr[v + 1]):
                views[in_obs[k]] -= back * in_w[k]
            v -= 1

    @njit(cache=True)
    def first_failure(start, stop, h, strides, nbr_idx, nbr_w, nbr_ptr,
                      in_obs, in_w, in_ptr, tab, tab_ptr):
        n = h.shape[0]
        colors, views = _init_state(start, h, strides, nbr_idx, nbr_w, nbr_ptr)
        for pos in range(start, stop):
            ok = False
            for v in range(n):
                if tab[tab_ptr[v] + views[v]] == colors[v]:
                    ok = True
                    break
            if not ok:
                return pos
            _step(colors, views, h, in_obs, in_w, in_ptr)
        return np.int64(-1)

    from numba import prange

    @njit(cache=True, parallel=True)
    def first_failure_par(start, stop, span, h, strides, nbr_idx, nbr_w, nbr_ptr,
                          in_obs, in_w, in_ptr, tab, tab_ptr):
        # chunk-level parallelism; min-reduction keeps the result deterministic
        nchunks = (stop - start + span - 1) // span
        best = stop
        for c in prange(nchunks):
            lo = start + c * span
            hi = min(lo + span, stop)
            r = first_failure(lo, hi, h, strides, nbr_idx, nbr_w, nbr_ptr,
                              in_obs, in_w, in_ptr, tab, tab_ptr)
            best = min(best, r if r >= 0 else stop)
        return best if best < stop else np.int64(-1)

    @njit(cache=True)
    def count_correct(start, stop, vtx, h, strides, nbr_idx, nbr_w, nbr_ptr,
                      in_obs, in_w, in_ptr, tab, tab_ptr):
        colors, views = _init_state(start, h, strides, nbr_idx, nbr_w, nbr_ptr)
        cnt = 0
        for pos in range(start, stop):
            if tab[tab_ptr[vtx] + views[vtx]] == colors[vtx]:
                cnt += 1
            _step(colors, views, h, in_obs, in_w, in_ptr)
        return cnt

    @njit(cache=True, parallel=True)
    def count_correct_par(start, stop, span, vtx, h, strides, nbr_idx, nbr_w,
                          nbr_ptr, in_obs, in_w, in_ptr, tab, tab_ptr):
        nchunks = (stop - start + span - 1) // span
        total = 0
        for c in prange(nchunks):
            lo = start + c * span
            hi = min(lo + span, stop)
            total += count_correct(lo, hi, vtx, h, strides, nbr_idx, nbr_w,
                                   nbr_ptr, in_obs, in_w, in_ptr, tab, tab_ptr)
        return total

    @njit(cache=True)
    def precision_violation(start, stop, h, strides, nbr_idx, nbr_w, nbr_ptr,
                            in_obs, in_w, in_ptr, tab, tab_ptr):
        n = h.shape[0]
        colors, views = _init_state(start, h, strides, nbr_idx, nbr_w, nbr_ptr)
        for pos in range(start, stop):
            hits = 0
            for v in range(n):
                if tab[tab_ptr[v] + views[v]] == colors[v]:
                    hits += 1
                    if hits > 1:
                        break
            if hits != 1:
                return pos
            _step(colors, views, h, in_obs, in_w, in_ptr)
        return np.int64(-1)

    @njit(cache=True)
    def predictable_fold(start, stop, h, strides, nbr_idx, nbr_w, nbr_ptr,
                         in_obs, in_w, in_ptr, tab, tab_ptr,
                         s_members, s_w, and_mask, seen):
        n = h.shape[0]
        m = s_members.shape[0]
        colors, views = _init_state(start, h, strides, nbr_idx, nbr_w, nbr_ptr)
        for pos in range(start, stop):
            mask = np.uint64(0)
            for k in range(m):
                v = s_members[k]
                if tab[tab_ptr[v] + views[v]] == colors[v]:
                    mask |= np.uint64(1) << np.uint64(k)
            if mask != np.uint64(0):
                sv = 0
                for k in range(m):
                    sv += colors[s_members[k]] * s_w[k]
                and_mask[sv] &= mask
                seen[sv] = True
            _step(colors, views, h, in_obs, in_w, in_ptr)

    _NUMBA_FNS = {
        "first_failure": first_failure,
        "first_failure_par": first_failure_par,
        "count_correct": count_correct,
        "count_correct_par": count_correct_par,
        "precision_violation": precision_violation,
        "predictable_fold": predictable_fold,
    }
    return _NUMBA_FNS


# -- numpy backend -------------------------------------------------------------

def _np_colors(idx, h, strides):
    return [(idx // strides[v]) % h[v] for v in range(len(h))]


def _np_chunk_eval(game: Game, tab, tab_ptr, lo, hi):
    """Per-arrangement correct-guess count for indices [lo, hi) (vectorized)."""
    ga = game_arrays(game)
    h, strides, nbr_idx, nbr_w, nbr_ptr = ga[0], ga[1], ga[2], ga[3], ga[4]
    idx = np.arange(lo, hi, dtype=np.int64)
    colors = _np_colors(idx, h, strides)
    hits = np.zeros(hi - lo, dtype=np.int64)
    for v in range(game.n):
        view = np.zeros(hi - lo, dtype=np.int64)
        for k in range(nbr_ptr[v], nbr_ptr[v + 1]):
            view += colors[nbr_idx[k]] * nbr_w[k]
        guess = tab[tab_ptr[v] + view]
        hits += (guess == colors[v])
    return hits, colors


def _np_first_failure(game, tab, tab_ptr, start, stop):
    lo = start
    while lo < stop:
        hi = min(lo + _CHUNK, stop)
        hits, _ = _np_chunk_eval(game, tab, tab_ptr, lo, hi)
        bad = np.flatnonzero(hits == 0)
        if bad.size:
            return int(lo + bad[0])
        lo = hi
    return -1


def _np_count_correct(game, tab, tab_ptr, vtx, start, stop):
    ga = game_arrays(game)
    h, strides, nbr_idx, nbr_w, nbr_ptr = ga[0], ga[1], ga[2], ga[3], ga[4]
    cnt = 0
    lo = start
    while lo < stop:
        hi = min(lo + _CHUNK, stop)
        idx = np.arange(lo, hi, dtype=np.int64)
        colors = _np_colors(idx, h, strides)
        view = np.zeros(hi - lo, dtype=np.int64)
        for k in range(nbr_ptr[vtx], nbr_ptr[vtx + 1]):
            view += colors[nbr_idx[k]] * nbr_w[k]
        cnt += int(np.count_nonzero(tab[tab_ptr[vtx] + view] == colors[vtx]))
        lo = hi
    return cnt


def _np_precision_violation(game, tab, tab_ptr, start, stop):
    lo = start
    while lo < stop:
        hi = min(lo + _CHUNK, stop)
        hits, _ = _np_chunk_eval(game, tab, tab_ptr, lo, hi)
        bad = np.flatnonzero(hits != 1)
        if bad.size:
            return int(lo + bad[0])
        lo = hi
    return -1


def _np_predictable_fold(game, tab, tab_ptr, s_members, s_w, and_mask, seen, start, stop):
    ga = game_arrays(game)
    h, strides, nbr_idx, nbr_w, nbr_ptr = ga[0], ga[1], ga[2], ga[3], ga[4]
    lo = start
    while lo < stop:
        hi = min(lo + _CHUNK, stop)
        idx = np.arange(lo, hi, dtype=np.int64)
        colors = _np_colors(idx, h, strides)
        mask = np.zeros(hi - lo, dtype=np.uint64)
        sview = np.zeros(hi - lo, dtype=np.int64)
        for k, v in enumerate(s_members):
            view = np.zeros(hi - lo, dtype=np.int64)
            for t in range(nbr_ptr[v], nbr_ptr[v + 1]):
                view += colors[nbr_idx[t]] * nbr_w[t]
            win = tab[tab_ptr[v] + view] == colors[v]
            mask |= win.astype(np.uint64) << np.uint64(k)
            sview += colors[v] * s_w[k]
        nz = mask != 0
        if np.any(nz):
            np.bitwise_and.at(and_mask, sview[nz], mask[nz])
            seen[sview[nz]] = True
        lo = hi


# -- public entry points --------------------------------------------------------

def _thread_count() -> int:
    try:
        import numba
        return numba.get_num_threads()
    except ImportError:
        return 1


def first_failure(game: Game, strategy: Strategy,
                  start: int = 0, stop: Optional[int] = None) -> Optional[int]:
    """Smallest arrangement index in [start, stop) with zero correct guesses."""
    total = _total_checked(game)
    stop = total if stop is None else stop
    if game.n == 0:
        return 0 if stop > start else None  # the empty arrangement has no correct guess
    tab, tab_ptr = strategy_arrays(game, strategy)
    if get_backend() == "numba":
        fns = _numba_fns()
        ga = game_arrays(game)
        threads = _thread_count()
        lo, width = start, 1 << 16
        while lo < stop:  # growing chunks: early exit without scanning the tail
            hi = min(lo + width, stop)
            if threads > 1 and hi - lo >= 1 << 20:
                span = (hi - lo + 4 * threads - 1) // (4 * threads)
                r = fns["first_failure_par"](lo, hi, span, *ga, tab, tab_ptr)
            else:
                r = fns["first_failure"](lo, hi, *ga, tab, tab_ptr)
            if r >= 0:
                return int(r)
            lo, width = hi, min(width * 8, 1 << 24)
        return None
    r = _np_first_failure(game, tab, tab_ptr, start, stop)
    return None if r < 0 else r


def count_correct(game: Game, strategy: Strategy, vertex_index: int) -> int:
    total = _total_checked(game)
    tab, tab_ptr = strategy_arrays(game, strategy)
    if get_backend() == "numba":
        fns = _numba_fns()
        ga = game_arrays(game)
        threads = _thread_count()
        if threads > 1 and total >= 1 << 20:
            span = (total + 4 * threads - 1) // (4 * threads)
            return int(fns["count_correct_par"](0, total, span, vertex_index,
                                                *ga, tab, tab_ptr))
        return int(fns["count_correct"](0, total, vertex_index, *ga, tab, tab_ptr))
    return _np_count_correct(game, tab, tab_ptr, vertex_index, 0, total)


def first_precision_violation(game: Game, strategy: Strategy) -> Optional[int]:
    total = _total_checked(game)
    if game.n == 0:
        return 0 if total else None
    tab, tab_ptr = strategy_arrays(game, strategy)
    if get_backend() == "numba":
        fns = _numba_fns()
        ga = game_arrays(game)
        lo, width = 0, 1 << 16
        while lo < total:
            hi = min(lo + width, total)
            r = fns["precision_violation"](lo, hi, *ga, tab, tab_ptr)
            if r >= 0:
                return int(r)
            lo, width = hi, min(width * 8, 1 << 24)
        return None
    r = _np_precision_violation(game, tab, tab_ptr, 0, total)
    return None if r < 0 else r


def predictable_scan(game: Game, strategy: Strategy, member_indices):
    """Fold winner masks per view of the member subset.

    Returns (and_mask, seen): for each subset view index, the AND of the
    in-subset winner bitmasks across arrangements that had at least one
    in-subset winner, and whether any such arrangement was seen.
    """
    total = _total_checked(game)
    members = np.array(sorted(member_indices), dtype=np.int64)
    if members.shape[0] > 63:
        raise SizeLimitError("predictable-set check supports at most 63 members")
    s_w = np.empty(members.shape[0], dtype=np.int64)
    w = 1
    for k, v in enumerate(members):
        s_w[k] = w
        w *= game.hatness[v]
    nviews = int(w)
    full = np.uint64((1 << members.shape[0]) - 1)
    and_mask = np.full(nviews, full, dtype=np.uint64)
    seen = np.zeros(nviews, dtype=np.bool_)
    tab, tab_ptr = strategy_arrays(game, strategy)
    if get_backend() == "numba":
        fns = _numba_fns()
        ga = game_arrays(game)
        fns["predictable_fold"](0, total, *ga, tab, tab_ptr, members, s_w, and_mask, seen)
    else:
        _np_predictable_fold(game, tab, tab_ptr, members, s_w, and_mask, seen, 0, total)
    return and_mask, seen, members
