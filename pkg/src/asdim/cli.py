"""Command-line front end: run a pipeline over a scale sweep, verify, and write artifacts.

Exit status: 0 when everything verifies, 1 on a verification failure, 2 on bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from .annulus import annulus_cover, extract_fat_witness, find_violations, genus_pipeline, \
    k3p_pipeline, verify_fat_model
from .cover import (ColoredPartition, Cover, coloring_from_json, coloring_to_cover,
                    coloring_to_json, cover_from_json, cover_to_json, r_multiplicity,
                    verify_coloring, verify_cover, write_sweep_csv)
from .decomposition import RootedTreeDecomposition, read_td, write_td
from .euclid import grid_embedding, read_embedding, write_embedding, embed_color
from .generators import (gen_cactus, gen_cycle, gen_grid, gen_partial_ktree,
                         gen_planar_triangulation, gen_random_tree, gen_stretch, gen_torus_grid,
                         grid_column_td, grid_row_layering)
from .layers import layered_tw_pipeline, read_layering, write_layering
from .metric import GraphFormatError, WeightedGraph, read_graph, write_graph
from .minor import TorsoCertificate, minor_pipeline, trivial_certificates
from .treeglue import tw_pipeline

PIPELINES = ("tw", "layered-tw", "k3p", "genus", "minor", "embed", "annulus")


class InputError(Exception):
    pass


@dataclass
class RunSpec:
    command: str
    graph: str | None = None
    td: str | None = None
    td_root: int | None = None
    layering: str | None = None
    embedding: str | None = None
    torso: str | None = None
    cover: list[str] = field(default_factory=list)
    ell: list[int] = field(default_factory=lambda: [1])
    r: list[float] = field(default_factory=lambda: [1.0])
    q: float = 1.0
    kappa: float = 1.0
    p: int = 3
    genus: int = 0
    width: int | None = None
    C: float = 1.0
    root: int = 1
    seed: int = 0
    out_cover: str | None = None
    out_csv: str | None = None
    out_witness: str | None = None
    verify: bool = True
    family: str = "grid"
    dims: list[int] = field(default_factory=lambda: [10, 10])
    n: int = 100
    k: int = 3
    out_graph: str | None = None
    out_td: str | None = None
    out_layering: str | None = None
    out_embedding: str | None = None

    def validate(self) -> None:
        needs_graph = self.command != "gen"
        if needs_graph and not self.graph:
            raise InputError("--graph is required")
        if self.command in ("tw", "layered-tw", "minor") and not self.td:
            raise InputError("--td is required")
        if self.command == "layered-tw" and not self.layering:
            raise InputError("--layering is required")
        if self.command == "embed" and not self.embedding:
            raise InputError("--embedding is required")
        if self.command == "verify" and not self.cover:
            raise InputError("--cover is required")
        if any(e < 1 for e in self.ell):
            raise InputError("--ell values must be positive integers")
        if any(not x > 0 for x in self.r):
            raise InputError("--r values must be positive")
        if self.q <= 0 or self.kappa <= 0:
            raise InputError("--q and --kappa must be positive")
        if self.p < 1 or self.genus < 0:
            raise InputError("--p must be positive and --genus nonnegative")
        if self.width is not None and self.width < 0:
            raise InputError("--width must be nonnegative")
        if self.C < 1:
            raise InputError("--C must be at least 1")


def _numbers(kind):
    def parse(text):
        try:
            return [kind(x) for x in text.split(",") if x]
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    return parse


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="asdim", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=PIPELINES + ("verify", "gen"))
    ap.add_argument("--graph")
    ap.add_argument("--td")
    ap.add_argument("--td-root", type=int, help="root bag id (default: bag 1)")
    ap.add_argument("--layering")
    ap.add_argument("--embedding")
    ap.add_argument("--torso", help="JSON file of per-bag torso certificates (minor)")
    ap.add_argument("--cover", action="append", default=[], help="cover or colouring JSON (verify)")
    ap.add_argument("--ell", type=_numbers(int), default=[1])
    ap.add_argument("--r", type=_numbers(float), default=[1.0])
    ap.add_argument("--q", type=float, default=1.0)
    ap.add_argument("--kappa", type=float, default=1.0)
    ap.add_argument("--p", type=int, default=3)
    ap.add_argument("--genus", type=int, default=0)
    ap.add_argument("--width", type=int)
    ap.add_argument("--C", type=float, default=1.0)
    ap.add_argument("--root", type=int, default=1, help="1-indexed root vertex (annulus)")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out-cover")
    ap.add_argument("--out-csv")
    ap.add_argument("--out-witness")
    ap.add_argument("--no-verify", action="store_true", help="skip verification (timing runs)")
    ap.add_argument("--family", default="grid",
                    choices=["grid", "king", "torus", "path", "cycle", "tree", "cactus", "ktree",
                             "triangulation", "stretch"])
    ap.add_argument("--dims", type=_numbers(int), default=[10, 10])
    ap.add_argument("--n", type=int, default=100)
    ap.add_argument("--k", type=int, default=3)
    ap.add_argument("--out-graph")
    ap.add_argument("--out-td")
    ap.add_argument("--out-layering")
    ap.add_argument("--out-embedding")
    return ap


def spec_from_args(ns: argparse.Namespace) -> RunSpec:
    fields = dict(vars(ns))
    fields["verify"] = not fields.pop("no_verify")
    return RunSpec(**fields)


def _scaled_path(path: str, scale, many: bool) -> Path:
    if "{scale}" in path:
        return Path(path.format(scale=scale))
    if not many:
        return Path(path)
    p = Path(path)
    return p.with_name(f"{p.stem}-{scale}{p.suffix}")


def _load_torso(path: str, g: WeightedGraph) -> tuple[dict[int, TorsoCertificate], int, int]:
    doc = json.loads(Path(path).read_text())
    certs = {}
    for key, item in doc["bags"].items():
        tdoc = item["td"]
        td = RootedTreeDecomposition.from_edges(
            {int(t): [v - 1 for v in b] for t, b in tdoc["bags"].items()},
            [tuple(e) for e in tdoc.get("edges", [])], tdoc.get("root"))
        layers = {int(v) - 1: int(layer) for v, layer in item["layers"]}
        certs[int(key)] = TorsoCertificate(frozenset(v - 1 for v in item.get("apex", [])), layers, td)
    return certs, int(doc["p"]), int(doc["w"])


def _one_indexed(model) -> dict:
    doc = json.loads(model.to_json())
    doc["branch_sets"] = {k: [v + 1 for v in vs] for k, vs in doc["branch_sets"].items()}
    for item in doc["connectors"]:
        item["path"] = [v + 1 for v in item["path"]]
    return doc


def _coloring_row(g, col: ColoredPartition, verify: bool) -> tuple[dict, bool, Cover]:
    cover = coloring_to_cover(g, col)
    row = {"r": col.ell, "families": col.m, "certified_bound": col.bound}
    if not verify:
        return row, True, cover
    rep = verify_coloring(g, col)
    row["observed_bound"] = rep.observed_bound
    row["tau"] = r_multiplicity(g, cover, col.ell / 2).multiplicity
    row["passed"] = rep.passed
    if not rep.passed:
        for msg in rep.failures[:3]:
            print(f"  FAIL: {msg}", file=sys.stderr)
    return row, rep.passed, cover


def _cover_row(g, cover: Cover, verify: bool) -> tuple[dict, bool]:
    row = {"r": cover.scale, "families": cover.num_families, "certified_bound": cover.certified_bound}
    if not verify:
        return row, True
    rep = verify_cover(g, cover)
    row["observed_bound"] = rep.observed_bound
    row["tau"] = r_multiplicity(g, cover, cover.scale / 2).multiplicity
    row["passed"] = rep.passed
    if not rep.passed:
        for msg in rep.failures[:3]:
            print(f"  FAIL: {msg}", file=sys.stderr)
    return row, rep.passed


def _generate(spec: RunSpec) -> int:
    td = layers = emb = None
    fam = spec.family
    if fam in ("grid", "king"):
        g = gen_grid(spec.dims, diagonals=fam == "king")
        if len(spec.dims) == 2 and fam == "grid":
            rows, cols = spec.dims
            td, layers = grid_column_td(rows, cols), grid_row_layering(rows, cols)
        if fam == "grid":
            emb = grid_embedding(spec.dims, 1.0)
    elif fam == "torus":
        g = gen_torus_grid(*spec.dims[:2])
    elif fam == "path":
        g = gen_grid([spec.n])
    elif fam == "cycle":
        g = gen_cycle(spec.n)
    elif fam == "tree":
        g = gen_random_tree(spec.n, spec.seed)
    elif fam == "cactus":
        g = gen_cactus(spec.n, spec.seed)
    elif fam == "ktree":
        g, td = gen_partial_ktree(spec.n, spec.k, spec.seed)
    elif fam == "triangulation":
        g, _ = gen_planar_triangulation(spec.n, spec.seed)
    else:
        g = gen_stretch(gen_grid(spec.dims), spec.k, spec.p).graph
    if spec.out_graph:
        write_graph(g, spec.out_graph)
    else:
        sys.stdout.write(f"c {fam} n={g.n} m={g.num_edges}\n")
    for path, obj, writer in ((spec.out_td, td, lambda o, p: write_td(o, g.n, p)),
                              (spec.out_layering, layers, write_layering),
                              (spec.out_embedding, emb, write_embedding)):
        if path:
            if obj is None:
                raise InputError(f"family {fam} has no such side file")
            writer(obj, path)
    return 0


def _verify_files(spec: RunSpec, g: WeightedGraph) -> int:
    ok = True
    for path in spec.cover:
        text = Path(path).read_text()
        doc = json.loads(text)
        if "colors" in doc:
            col = coloring_from_json(text)
            if len(col.colors) != g.n:
                raise InputError(f"{path}: colouring has {len(col.colors)} entries for {g.n} vertices")
            rep = verify_coloring(g, col)
        else:
            rep = verify_cover(g, cover_from_json(text))
        print(f"{path}: {'PASS' if rep.passed else 'FAIL'} observed={rep.observed_bound}")
        for msg in rep.failures[:3]:
            print(f"  {msg}")
        ok &= rep.passed
    return 0 if ok else 1


def run(spec: RunSpec) -> int:
    spec.validate()
    if spec.command == "gen":
        return _generate(spec)
    g = read_graph(spec.graph)
    if spec.command == "verify":
        return _verify_files(spec, g)

    rows, ok = [], True
    scales = spec.ell if spec.command in ("tw", "layered-tw", "minor", "embed") else spec.r
    many = len(scales) > 1
    td = read_td(spec.td, g.n, spec.td_root) if spec.td else None
    for scale in scales:
        start = time.perf_counter()
        artifact: str
        witness_docs = []
        if spec.command in ("tw", "layered-tw", "minor", "embed"):
            if spec.command == "tw":
                col = tw_pipeline(g, td, scale, spec.width)
            elif spec.command == "layered-tw":
                col = layered_tw_pipeline(g, read_layering(spec.layering, g.n), td, scale, spec.width)
            elif spec.command == "minor":
                if spec.torso:
                    certs, p, w = _load_torso(spec.torso, g)
                else:
                    certs, p, w = trivial_certificates(td), td.adhesion(), td.width() + 1
                col = minor_pipeline(g, td, certs, scale, p, w)
            else:
                col = embed_color(g, read_embedding(spec.embedding, g.n, spec.C), scale)
            elapsed = time.perf_counter() - start
            row, passed, _ = _coloring_row(g, col, spec.verify)
            artifact = coloring_to_json(col)
        else:
            if spec.command == "k3p":
                cover = k3p_pipeline(g, spec.p, scale)
            elif spec.command == "genus":
                cover = genus_pipeline(g, spec.genus, scale)
            else:
                if not 1 <= spec.root <= g.n:
                    raise InputError(f"--root {spec.root} is not a vertex")
                cover, decs = annulus_cover(g, spec.root - 1, scale, spec.q, spec.kappa, spec.p)
            elapsed = time.perf_counter() - start
            row, passed = _cover_row(g, cover, spec.verify)
            if spec.command == "annulus" and not passed:
                owner = {v: d for d in decs for v in d.dist}
                for vio in find_violations(g, cover):
                    model = extract_fat_witness(g, owner[vio.x], vio.x, vio.y, vio.component)
                    good = verify_fat_model(g, model).passed
                    witness_docs.append({"pair": [vio.x + 1, vio.y + 1], "distance": vio.distance,
                                         "verified": good, "model": _one_indexed(model)})
                print(f"  promise violated at r={scale}: {len(witness_docs)} fat K2,{spec.p} "
                      f"witness(es), {sum(w['verified'] for w in witness_docs)} verified",
                      file=sys.stderr)
            if spec.command in ("k3p", "genus"):
                row["target_families"] = 3
                row["family_gap"] = cover.num_families - 3
            artifact = cover_to_json(cover)
        row["wall_time"] = round(elapsed, 4)
        row["command"] = spec.command
        rows.append(row)
        ok &= passed
        if spec.out_cover:
            _scaled_path(spec.out_cover, scale, many).write_text(artifact)
        if spec.out_witness and witness_docs:
            _scaled_path(spec.out_witness, scale, many).write_text(
                json.dumps(witness_docs, sort_keys=True))
        status = "ok" if passed else "FAIL"
        print(f"{spec.command} scale={scale} families={row['families']} "
              f"certified={row['certified_bound']:.6g} observed={row.get('observed_bound', '-')} "
              f"{status}")
    if spec.out_csv:
        write_sweep_csv(rows, spec.out_csv,
                        extra=["passed", "command", "target_families", "family_gap"])
    return 0 if ok else 1


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        return run(spec_from_args(ns))
    except (InputError, GraphFormatError, FileNotFoundError, json.JSONDecodeError, KeyError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
