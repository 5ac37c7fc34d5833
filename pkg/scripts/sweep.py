"""Scale sweeps over generated graph families; one CSV per experiment.

    python3 scripts/sweep.py --out results [--quick]
"""

import argparse
import time
from pathlib import Path

from asdim.annulus import annulus_cover, k3p_pipeline
from asdim.cover import (coloring_to_cover, r_multiplicity, verify_coloring, verify_cover,
                         write_sweep_csv)
from asdim.decomposition import RootedTreeDecomposition
from asdim.euclid import embed_color, grid_embedding
from asdim.generators import (gen_cactus, gen_grid, gen_partial_ktree, gen_planar_triangulation,
                              grid_column_td, grid_row_layering)
from asdim.layers import layered_tw_pipeline
from asdim.treeglue import tw_pipeline

EXTRA = ["experiment", "graph", "n", "passed", "target_families", "family_gap"]


def path_td(n):
    return RootedTreeDecomposition.from_edges({i: [i, i + 1] for i in range(n - 1)},
                                              [(i, i + 1) for i in range(n - 2)], 0)


def coloring_row(g, make, **meta):
    start = time.perf_counter()
    col = make()
    elapsed = time.perf_counter() - start
    rep = verify_coloring(g, col)
    tau = r_multiplicity(g, coloring_to_cover(g, col), col.ell / 2).multiplicity
    return dict(r=col.ell, families=col.m, certified_bound=col.bound,
                observed_bound=rep.observed_bound, tau=tau, wall_time=round(elapsed, 4),
                passed=rep.passed, n=g.n, **meta)


def cover_row(g, make, **meta):
    start = time.perf_counter()
    cover = make()
    elapsed = time.perf_counter() - start
    rep = verify_cover(g, cover)
    tau = r_multiplicity(g, cover, cover.scale / 2).multiplicity
    return dict(r=cover.scale, families=cover.num_families, certified_bound=cover.certified_bound,
                observed_bound=rep.observed_bound, tau=tau, wall_time=round(elapsed, 4),
                passed=rep.passed, n=g.n, **meta)


def treewidth(quick):
    rows = []
    for seed in range(5 if quick else 40):
        g, td = gen_partial_ktree(200 if quick else 1500, 3, seed)
        for ell in (1, 2, 4):
            rows.append(coloring_row(g, lambda: tw_pipeline(g, td, ell),
                                     experiment="tw", graph=f"ktree-{seed}"))
    for n in (100, 200, 400, 800, 1600, 3200)[: 3 if quick else 6]:
        g = gen_grid([n])
        td = path_td(n)
        rows.append(coloring_row(g, lambda: tw_pipeline(g, td, 1), experiment="path", graph=f"P{n}"))
    return rows


def layered(quick):
    rows = []
    for side in (10, 20, 40, 80)[: 2 if quick else 4]:
        g = gen_grid([side, side])
        lay, td = grid_row_layering(side, side), grid_column_td(side, side)
        for ell in (1, 2):
            rows.append(coloring_row(g, lambda: layered_tw_pipeline(g, lay, td, ell),
                                     experiment="layered-tw", graph=f"grid{side}"))
    return rows


def annulus(quick):
    rows = []
    for seed in range(3 if quick else 20):
        g = gen_cactus(300 if quick else 2000, seed)
        for r in (1, 2, 3, 4, 5):
            rows.append(cover_row(g, lambda: annulus_cover(g, 0, r, r, 1, 3)[0],
                                  experiment="annulus", graph=f"cactus-{seed}"))
    return rows


def planar(quick):
    rows = []
    for seed in range(2 if quick else 10):
        g, _ = gen_planar_triangulation(500 if quick else 5000, seed)
        for r in (1, 2, 4):
            row = cover_row(g, lambda: k3p_pipeline(g, 3, r), experiment="k3p", graph=f"tri-{seed}")
            row["target_families"] = 3
            row["family_gap"] = row["families"] - 3
            rows.append(row)
    return rows


def euclid(quick):
    rows = []
    for side in (10, 20, 40)[: 2 if quick else 3]:
        g = gen_grid([side, side])
        emb = grid_embedding([side, side], 2.0)
        for ell in (1, 2):
            rows.append(coloring_row(g, lambda: embed_color(g, emb, ell),
                                     experiment="embed", graph=f"grid{side}"))
    return rows


EXPERIMENTS = {"tw": treewidth, "layered": layered, "annulus": annulus, "planar": planar,
               "euclid": euclid}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results")
    ap.add_argument("--quick", action="store_true")
    ap.add_argument("--only", choices=sorted(EXPERIMENTS))
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, run in EXPERIMENTS.items():
        if args.only and name != args.only:
            continue
        rows = run(args.quick)
        write_sweep_csv(rows, out / f"{name}.csv", EXTRA)
        bad = sum(not r["passed"] for r in rows)
        print(f"{name}: {len(rows)} rows, {bad} failed -> {out / (name + '.csv')}")


if __name__ == "__main__":
    main()
