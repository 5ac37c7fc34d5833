"""Distance engine used only by verifiers.

Built on scipy.sparse.csgraph so that certificates are re-checked by code that
shares nothing with the pipelines' own shortest-path routines.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, dijkstra

_CHUNK_CELLS = 4_000_000


def rows(csr, sources, limit=np.inf):
    """Yield (source_block, distance_block) with a bounded memory footprint."""
    sources = np.asarray(sources, dtype=np.int64)
    n = csr.shape[0]
    step = max(1, _CHUNK_CELLS // max(n, 1))
    for i in range(0, len(sources), step):
        block = sources[i:i + step]
        yield block, np.atleast_2d(dijkstra(csr, directed=True, indices=block, limit=limit))


def nearest(csr, sources, limit=np.inf):
    """Distance to the nearest source and the identity of that source (-1 if beyond limit)."""
    dist, _, src = dijkstra(csr, directed=True, indices=np.asarray(sources, dtype=np.int64),
                            min_only=True, return_predecessors=True, limit=limit)
    return dist, src


def set_distance(csr, a, b) -> float:
    if not len(a) or not len(b):
        return math.inf
    dist, _ = nearest(csr, sorted(a))
    return float(dist[np.asarray(sorted(b), dtype=np.int64)].min())


def _ball(csr, members: np.ndarray):
    """Ball around one member holding every shortest path between members, or None.

    The ball radius is grown by doubling until it contains every member; all
    shortest paths between members then stay within three times that radius.
    """
    x0 = members[0]
    limit = 4.0
    full = False
    while True:
        d0 = dijkstra(csr, directed=True, indices=int(x0), limit=limit if not full else np.inf)
        ecc = d0[members].max()
        if np.isfinite(ecc):
            break
        if full:
            return None
        if limit > 1e12:
            full = True
        limit *= 2
    d0 = dijkstra(csr, directed=True, indices=int(x0), limit=3 * ecc + 1e-9)
    ball = np.flatnonzero(np.isfinite(d0))
    return csr[ball][:, ball], np.searchsorted(ball, members)


def _member_diameter(csr, members: np.ndarray, unit: bool = False):
    """Exact max distance over member pairs as (value, i, j) with member positions i, j.

    Eccentricity bounds from the triangle inequality prune members that cannot
    beat the best pair found so far; each surviving member gets one search.
    """
    local = _ball(csr, members)
    if local is None:
        return math.inf, 0, 0
    sub, pos = local
    k = len(pos)
    lower = np.zeros(k)
    upper = np.full(k, np.inf)
    active = np.ones(k, dtype=bool)
    best, bi, bj = 0.0, 0, 0
    x = 0
    flip = False
    while True:
        d = dijkstra(sub, directed=True, indices=int(pos[x]), unweighted=unit)[pos]
        ecc = d.max()
        if not np.isfinite(ecc):
            return math.inf, x, int(np.argmax(d))
        if ecc > best:
            best, bi, bj = float(ecc), x, int(np.argmax(d))
        np.maximum(lower, np.maximum(d, ecc - d), out=lower)
        np.minimum(upper, ecc + d, out=upper)
        active[x] = False
        active &= upper > best + 1e-9
        if not active.any():
            return best, bi, bj
        idx = np.flatnonzero(active)
        flip = not flip
        x = int(idx[np.argmax(upper[idx])]) if flip else int(idx[np.argmin(lower[idx])])


def weak_diameter_in_g(csr, members) -> float:
    """Max d_G over pairs of `members`; inf if some pair is disconnected."""
    members = np.asarray(sorted(members), dtype=np.int64)
    if len(members) <= 1:
        return 0.0
    return _member_diameter(csr, members)[0]


def farthest_pair(csr, members):
    members = np.asarray(sorted(members), dtype=np.int64)
    if len(members) == 0:
        return 0.0, None
    if len(members) == 1:
        return 0.0, (int(members[0]), int(members[0]))
    value, i, j = _member_diameter(csr, members)
    if not math.isfinite(value):
        return math.inf, None
    return value, (int(members[i]), int(members[j]))


def power_components(csr, unit: bool, members, ell: int) -> list[np.ndarray]:
    """Components of G^ell induced on `members`."""
    members = np.asarray(sorted(members), dtype=np.int64)
    k = len(members)
    if k == 0:
        return []
    n = csr.shape[0]
    pos = np.full(n, -1, dtype=np.int64)
    pos[members] = np.arange(k)
    if unit:
        step = csr.copy()
        step.data[:] = 1.0
        reach = step[members]
        frontier = reach
        for _ in range(ell - 1):
            frontier = frontier @ step
            reach = reach + frontier
            reach.data[:] = 1.0
            frontier = reach
        reach = reach.tocoo()
        keep = pos[reach.col] >= 0
        r_idx, c_idx = reach.row[keep], pos[reach.col[keep]]
    else:
        r_list, c_list = [], []
        for block, dist in rows(csr, members, limit=ell):
            for bi, src in enumerate(block):
                hit = np.flatnonzero(np.isfinite(dist[bi]))
                hit = hit[pos[hit] >= 0]
                r_list.append(np.full(len(hit), pos[src]))
                c_list.append(pos[hit])
        r_idx = np.concatenate(r_list)
        c_idx = np.concatenate(c_list)
    adj = csr_matrix((np.ones(len(r_idx)), (r_idx, c_idx)), shape=(k, k))
    ncomp, labels = connected_components(adj, directed=False)
    order = np.argsort(labels, kind="stable")
    splits = np.flatnonzero(np.diff(labels[order])) + 1
    return [members[idx] for idx in np.split(order, splits)]


def power_weak_diameter(csr, unit: bool, members, ell: int) -> float:
    """Max G^ell hop distance over pairs of `members`."""
    members = np.asarray(sorted(members), dtype=np.int64)
    if len(members) <= 1:
        return 0.0
    if unit:
        d = _member_diameter(csr, members, unit=True)[0]
        return math.inf if not math.isfinite(d) else float(math.ceil(round(d) / ell))
    best = 0
    target = set(int(x) for x in members)
    for x in members:
        seen = {int(x): 0}
        frontier = [int(x)]
        hop = 0
        while frontier and len(target.difference(seen)) > 0:
            hop += 1
            dist, _ = nearest(csr, frontier, limit=ell)
            new = [int(v) for v in np.flatnonzero(np.isfinite(dist)) if int(v) not in seen]
            for v in new:
                seen[v] = hop
            frontier = new
        if target.difference(seen):
            return math.inf
        best = max(best, max(seen[t] for t in target))
    return float(best)
