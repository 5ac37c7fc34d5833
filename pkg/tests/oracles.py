"""Brute-force reference computations for small graphs.

Deliberately naive: Floyd-Warshall distances, explicit power graphs and
exhaustive searches. Nothing here calls into asdim's distance code.
"""

import itertools
import math
from collections import deque


def apsp(g):
    n = g.n
    d = [[math.inf] * n for _ in range(n)]
    for v in range(n):
        d[v][v] = 0.0
    for u, v, w in g.edges:
        d[u][v] = d[v][u] = min(d[u][v], w)
    for k in range(n):
        dk = d[k]
        for i in range(n):
            dik = d[i][k]
            if dik == math.inf:
                continue
            di = d[i]
            for j in range(n):
                if dik + dk[j] < di[j]:
                    di[j] = dik + dk[j]
    return d


def power_hops(g, ell, d=None):
    """Hop distances in the explicit graph joining pairs at distance <= ell."""
    d = apsp(g) if d is None else d
    n = g.n
    adj = [[j for j in range(n) if j != i and d[i][j] <= ell] for i in range(n)]
    out = []
    for s in range(n):
        hop = [math.inf] * n
        hop[s] = 0
        queue = deque([s])
        while queue:
            x = queue.popleft()
            for y in adj[x]:
                if hop[y] == math.inf:
                    hop[y] = hop[x] + 1
                    queue.append(y)
        out.append(hop)
    return out


def weak_diam(d, subset):
    s = list(subset)
    return max((d[a][b] for a in s for b in s), default=0)


def closure(subset, r, d):
    """Classes of the relation 'distance <= r', closed transitively."""
    left = set(subset)
    parts = []
    while left:
        seed = left.pop()
        part, stack = {seed}, [seed]
        while stack:
            x = stack.pop()
            for y in list(left):
                if d[x][y] <= r:
                    left.remove(y)
                    part.add(y)
                    stack.append(y)
        parts.append(frozenset(part))
    return parts


def coloring_check(g, col, d=None):
    """(ok, worst): every monochromatic G^ell component has weak diameter <= bound in G^ell."""
    d = apsp(g) if d is None else d
    hops = power_hops(g, col.ell, d)
    worst = 0
    for c in set(col.colors):
        members = [v for v in range(g.n) if col.colors[v] == c]
        for comp in closure(members, col.ell, d):
            worst = max(worst, weak_diam(hops, comp))
    return worst <= col.bound + 1e-9, worst


def cover_check(g, cover, d=None):
    """(ok, worst) for coverage, r-disjointness per family and the diameter bound."""
    d = apsp(g) if d is None else d
    seen = set()
    worst = 0
    ok = True
    for fam in cover.families:
        for a, b in itertools.combinations(fam, 2):
            if min(d[x][y] for x in a for y in b) <= cover.scale:
                ok = False
        for s in fam:
            seen |= s
            worst = max(worst, weak_diam(d, s))
    ok = ok and seen == set(range(g.n)) and worst <= cover.certified_bound + 1e-9
    return ok, worst


def connected_subsets(g, limit=None):
    """All vertex sets inducing a connected subgraph (small graphs only)."""
    adj = [set(u for u, _ in g.neighbors(v)) for v in range(g.n)]
    found = set()
    for v in range(g.n):
        frontier = [frozenset([v])]
        while frontier:
            s = frontier.pop()
            if s in found:
                continue
            found.add(s)
            if limit and len(s) >= limit:
                continue
            for x in s:
                for y in adj[x] - s:
                    if y > v:
                        frontier.append(s | {y})
    return [s for s in found]


def has_k2p_minor(g, p):
    """Exhaustive search for disjoint connected branch sets A1, A2, B1..Bp forming K_{2,p}."""
    subsets = connected_subsets(g)
    adj = [set(u for u, _ in g.neighbors(v)) for v in range(g.n)]

    def touches(a, b):
        return any(adj[x] & b for x in a)

    subsets.sort(key=len)
    for a1, a2 in itertools.combinations(subsets, 2):
        if a1 & a2:
            continue
        cands = [b for b in subsets if not (b & (a1 | a2)) and touches(b, a1) and touches(b, a2)]

        def pick(chosen, start, used):
            if len(chosen) == p:
                return True
            for i in range(start, len(cands)):
                if not cands[i] & used:
                    if pick(chosen + [cands[i]], i + 1, used | cands[i]):
                        return True
            return False

        if pick([], 0, frozenset()):
            return True
    return False
