"""Covers, coloured partitions, their verification and conversions between them."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import _exact
from .metric import WeightedGraph, r_components, shortest_paths

_REL_TOL = 1e-9


def _within(observed: float, bound: float) -> bool:
    return observed <= bound + _REL_TOL * max(1.0, abs(bound))


@dataclass(frozen=True, eq=True)
class Cover:
    """Ordered families of vertex sets at scale r with a certified weak-diameter bound."""

    scale: float
    families: tuple[tuple[frozenset[int], ...], ...]
    certified_bound: float
    producer: str = ""

    @classmethod
    def build(cls, scale: float, families: Iterable[Iterable[Iterable[int]]], bound: float,
              producer: str = "") -> "Cover":
        fams = tuple(tuple(frozenset(s) for s in fam if len(s)) for fam in families)
        return cls(float(scale), fams, float(bound), producer)

    @property
    def num_families(self) -> int:
        return len(self.families)

    def sets(self) -> list[frozenset[int]]:
        return [s for fam in self.families for s in fam]

    def covered(self) -> set[int]:
        out: set[int] = set()
        for s in self.sets():
            out |= s
        return out

    def with_bound(self, bound: float, producer: str | None = None) -> "Cover":
        return Cover(self.scale, self.families, float(bound),
                     self.producer if producer is None else producer)


@dataclass(frozen=True, eq=True)
class ColoredPartition:
    """Colouring with colours 1..m; monochromatic G^ell-components have weak diameter <= bound."""

    colors: tuple[int, ...]
    ell: int
    bound: float
    m: int

    @classmethod
    def from_map(cls, n: int, colors: dict[int, int], ell: int, bound: float,
                 m: int | None = None) -> "ColoredPartition":
        missing = [v for v in range(n) if v not in colors]
        if missing:
            raise ValueError(f"colouring is not total: vertex {missing[0]} has no colour")
        seq = tuple(int(colors[v]) for v in range(n))
        used = max(seq, default=1)
        return cls(seq, int(ell), float(bound), int(m if m is not None else used))

    def classes(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for v, c in enumerate(self.colors):
            out.setdefault(c, []).append(v)
        return out

    def colours_used(self) -> int:
        return len(set(self.colors))


# ---------------------------------------------------------------- verification


@dataclass
class CoverReport:
    passed: bool
    coverage_ok: bool
    uncovered: list[int]
    disjoint_ok: list[bool]
    bounded_ok: list[bool]
    observed_bound: float
    failures: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.passed


def _family_clash(g: WeightedGraph, family: Sequence[frozenset[int]], r: float):
    """Return (i, j, distance) for two sets of the family within distance <= r, else None.

    One nearest-source search from the whole family; two distinct sets are
    within r exactly when some edge joins differently-labelled regions with
    d(u) + w + d(v) <= r, or a vertex lies in both sets.
    """
    owner: dict[int, int] = {}
    for i, s in enumerate(family):
        for v in s:
            if v in owner and owner[v] != i:
                return owner[v], i, 0.0
            owner[v] = i
    if len(family) < 2:
        return None
    csr = g.csr()
    dist, src = _exact.nearest(csr, sorted(owner), limit=r)
    label = np.full(g.n, -1, dtype=np.int64)
    ok = src >= 0
    lookup = np.full(g.n, -1, dtype=np.int64)
    for v, i in owner.items():
        lookup[v] = i
    label[ok] = lookup[src[ok]]
    if not g.num_edges:
        return None
    e = np.asarray(g.edges, dtype=float)
    u = e[:, 0].astype(np.int64)
    v = e[:, 1].astype(np.int64)
    w = e[:, 2]
    lu, lv = label[u], label[v]
    cand = (lu >= 0) & (lv >= 0) & (lu != lv)
    total = dist[u] + w + dist[v]
    cand &= total <= r + _REL_TOL * max(1.0, r)
    hits = np.flatnonzero(cand)
    if not len(hits):
        return None
    k = hits[np.argmin(total[hits])]
    i, j = int(lu[k]), int(lv[k])
    exact = _exact.set_distance(csr, family[i], family[j])
    return min(i, j), max(i, j), exact


def verify_cover(g: WeightedGraph, cover: Cover, target: Iterable[int] | None = None,
                 check_bound: bool = True) -> CoverReport:
    """Independently re-check disjointness, boundedness and coverage of a cover."""
    failures = []
    for fam in cover.families:
        for s in fam:
            bad = [v for v in s if not 0 <= v < g.n]
            if bad:
                raise ValueError(f"cover references non-vertex {bad[0]}")
    want = set(range(g.n)) if target is None else set(target)
    uncovered = sorted(want - cover.covered())
    if uncovered:
        failures.append(f"coverage: vertex {uncovered[0]} lies in no set")
    csr = g.csr()
    disjoint_ok, bounded_ok = [], []
    observed = 0.0
    for fi, fam in enumerate(cover.families):
        clash = _family_clash(g, fam, cover.scale)
        disjoint_ok.append(clash is None)
        if clash is not None:
            i, j, d = clash
            failures.append(f"family {fi}: sets {i} and {j} at distance {d} <= r={cover.scale}")
        ok = True
        for si, s in enumerate(fam):
            diam = _exact.weak_diameter_in_g(csr, s)
            observed = max(observed, diam)
            if check_bound and not _within(diam, cover.certified_bound):
                ok = False
                failures.append(
                    f"family {fi}: set {si} has weak diameter {diam} > {cover.certified_bound}")
        bounded_ok.append(ok)
    passed = not uncovered and all(disjoint_ok) and all(bounded_ok)
    return CoverReport(passed, not uncovered, uncovered, disjoint_ok, bounded_ok, observed, failures)


@dataclass
class ColoringReport:
    passed: bool
    total_ok: bool
    colours: int
    components: int
    observed_bound: float
    worst_component: tuple[int, ...] = ()
    failures: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.passed


def monochromatic_components(g: WeightedGraph, coloring: ColoredPartition) -> list[np.ndarray]:
    """Monochromatic components of G^ell, computed by the verifier's engine."""
    out = []
    csr = g.csr()
    for c, verts in sorted(coloring.classes().items()):
        out.extend(_exact.power_components(csr, g.is_unit, verts, coloring.ell))
    return out


def verify_coloring(g: WeightedGraph, coloring: ColoredPartition) -> ColoringReport:
    """Re-check that every monochromatic G^ell-component has G^ell weak diameter <= bound."""
    failures = []
    total = len(coloring.colors) == g.n and all(1 <= c <= coloring.m for c in coloring.colors)
    if not total:
        failures.append("colouring is not a total map into 1..m")
        return ColoringReport(False, False, 0, 0, math.inf, (), failures)
    csr = g.csr()
    observed = 0.0
    worst: tuple[int, ...] = ()
    comps = monochromatic_components(g, coloring)
    for comp in comps:
        diam = _exact.power_weak_diameter(csr, g.is_unit, comp, coloring.ell)
        if diam > observed or not worst:
            observed, worst = max(observed, diam), tuple(int(x) for x in comp)
        if not _within(diam, coloring.bound):
            failures.append(
                f"component containing vertex {int(comp[0])} has weak diameter {diam} > {coloring.bound}")
    return ColoringReport(not failures, True, coloring.colours_used(), len(comps), observed,
                          worst, failures)


# ---------------------------------------------------------------- conversions


def trim_first_wins(cover: Cover) -> list[list[frozenset[int]]]:
    """Make the sets pairwise disjoint, keeping each vertex in the first set that contains it."""
    taken: set[int] = set()
    out = []
    for fam in cover.families:
        trimmed = []
        for s in fam:
            t = frozenset(s - taken)
            taken |= t
            if t:
                trimmed.append(t)
        out.append(trimmed)
    return out


def cover_to_coloring(g: WeightedGraph, cover: Cover) -> ColoredPartition:
    """Colour each vertex by the index (1-based) of the first family containing it."""
    ell = int(round(cover.scale))
    if ell < 1 or abs(ell - cover.scale) > 1e-12:
        raise ValueError("cover_to_coloring needs an integer scale >= 1")
    if g.num_edges and min(w for _, _, w in g.edges) < 1:
        raise ValueError("power-graph hop bounds need edge weights >= 1")
    colors: dict[int, int] = {}
    for fi, fam in enumerate(trim_first_wins(cover), start=1):
        for s in fam:
            for v in s:
                colors[v] = fi
    for v in range(g.n):
        if v not in colors:
            raise ValueError(f"vertex {v} is covered by no set")
    return ColoredPartition.from_map(g.n, colors, ell, math.floor(cover.certified_bound + 1e-9),
                                     m=max(1, cover.num_families))


def coloring_to_cover(g: WeightedGraph, coloring: ColoredPartition, producer: str = "") -> Cover:
    """Families are the per-colour monochromatic components of G^ell."""
    fams = []
    classes = coloring.classes()
    for c in range(1, coloring.m + 1):
        verts = classes.get(c, [])
        fams.append(list(r_components(g, verts, coloring.ell).parts))
    return Cover.build(coloring.ell, fams, coloring.ell * coloring.bound,
                       producer or "coloring_to_cover")


# ---------------------------------------------------------------- multiplicity


@dataclass(frozen=True)
class MultiplicityReport:
    r: float
    multiplicity: int
    sigma: float
    tau: int
    center: int | None = None


def r_multiplicity(g: WeightedGraph, cover: Cover, r_query: float) -> MultiplicityReport:
    """Exact maximum number of sets meeting a ball of radius r_query, over all centres."""
    if r_query < 0:
        raise ValueError("r_query must be nonnegative")
    count = [0] * g.n
    for s in cover.sets():
        for v in shortest_paths(g, s, r_query):
            count[v] += 1
    best = max(count, default=0)
    centre = count.index(best) if count else None
    sigma = cover.certified_bound / r_query if r_query > 0 else math.inf
    return MultiplicityReport(r_query, best, sigma, best, centre)


@dataclass(frozen=True)
class SparsePartition:
    parts: tuple[frozenset[int], ...]
    r: float
    sigma: float
    tau: int


def sparse_partition(g: WeightedGraph, cover: Cover, r: float) -> SparsePartition:
    """Disjointify a cover (first family wins); sigma = bound / r, tau measured at radius r."""
    if r <= 0:
        raise ValueError("r must be positive")
    parts = tuple(s for fam in trim_first_wins(cover) for s in fam)
    covered = set().union(*parts) if parts else set()
    missing = [v for v in range(g.n) if v not in covered]
    if missing:
        raise ValueError(f"vertex {missing[0]} is covered by no set")
    as_cover = Cover(cover.scale, (parts,), cover.certified_bound, cover.producer)
    tau = r_multiplicity(g, as_cover, r).multiplicity
    return SparsePartition(parts, r, cover.certified_bound / r, tau)


# ---------------------------------------------------------------- serialization


def cover_to_json(cover: Cover) -> str:
    doc = {
        "scale": cover.scale,
        "bound": cover.certified_bound,
        "families": [[sorted(s) for s in fam] for fam in cover.families],
        "producer": cover.producer,
    }
    return json.dumps(doc, sort_keys=True)


def cover_from_json(text: str) -> Cover:
    doc = json.loads(text)
    try:
        return Cover.build(doc["scale"], doc["families"], doc["bound"], doc.get("producer", ""))
    except KeyError as exc:
        raise ValueError(f"cover JSON lacks field {exc.args[0]!r}") from None


def coloring_to_json(c: ColoredPartition) -> str:
    return json.dumps({"ell": c.ell, "bound": c.bound, "colors": list(c.colors), "m": c.m},
                      sort_keys=True)


def coloring_from_json(text: str) -> ColoredPartition:
    doc = json.loads(text)
    try:
        colors = [int(x) for x in doc["colors"]]
        return ColoredPartition(tuple(colors), int(doc["ell"]), float(doc["bound"]),
                                int(doc.get("m", max(colors, default=1))))
    except KeyError as exc:
        raise ValueError(f"colouring JSON lacks field {exc.args[0]!r}") from None


SWEEP_COLUMNS = ["r", "families", "certified_bound", "observed_bound", "tau", "wall_time"]


def write_sweep_csv(rows: list[dict], path: str | Path, extra: Sequence[str] = ()) -> None:
    cols = SWEEP_COLUMNS + [c for c in extra if c not in SWEEP_COLUMNS]
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=cols, extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
