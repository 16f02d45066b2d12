#!/usr/bin/env python3
# Copyright (c) 2026 Mark Menkhus <mark.menkhus@gmail.com>
# SPDX-License-Identifier: MIT
"""
quadlab.py - Command-line front door for the quadrangulation lab

Usage:
    # Every well-labeled g-tree of genus 1 with 3 edges
    ./quadlab.py enumerate --genus 1 --edges 3

    # Exact |T_n| and |Q_n|
    ./quadlab.py count --genus 1 --edges 200

    # 100 uniform samples, reproducible from the seed
    ./quadlab.py sample --genus 1 --edges 1000 --count 100 --seed 7 --out samples.json

    # One pointed quadrangulation
    ./quadlab.py quadrangulate --genus 2 --edges 50 --seed 3

    # Rescaled two-point distances and the distance profile
    ./quadlab.py stats --genus 1 --edges 1000 --count 500 --seed 1 --format csv --out d.csv

    # Ball-growth dimension
    ./quadlab.py dimension --genus 1 --edges 100000 --centers 20 --seed 5

    # Closed-form t_g, optionally with the Monte Carlo cross-check
    ./quadlab.py tg --genus 1 --precision 200 --mc-samples 1000000

    # Desk-scale consistency checks
    ./quadlab.py check --genus 1 --edges 4

Exit codes: 0 success, 1 domain error or failed check, 2 usage error.
QUADLAB_OUTPUT_DIR sets where artifacts go when --out is not given;
without it results are printed to stdout.
"""

import argparse
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional

from cms import check_label_distance, cms_forward, cms_inverse
from errors import QuadLabError, UsageError
from gtree import enumerate_well_labeled_gtrees
from map_core import torus_grid_map
from metrics import (SampleBundle, compare_batches, dimension_estimate,
                     profile_and_radius, rescale_factor)
from report import SCHEMAS, artifact_metadata, compute_column_stats, render_csv, render_json, write_report
from sampler import count_gtrees, count_quadrangulations, resolve_mode, sample_batch
from scheme import decompose, recompose
from settings import LabSettings, DEFAULTS
from streams import Stream, derive_seed
from tg import (asymptotic_ratio, check_lemag, check_p_bracket, estimate_upsilon,
                tg_closed_form, upsilon_from_tg)

logger = logging.getLogger("quadlab")

@dataclass
class ExperimentConfig:
    command: str
    genus: int = 1
    n_edges: int = 0
    samples: int = 1
    seed: int = 0
    mode: str = "auto"
    out: Optional[Path] = None
    fmt: str = "json"
    precision: int = DEFAULTS.precision_bits
    mc_samples: int = 0
    radii: Optional[List[int]] = None
    centers: int = 10
    control_side: int = 0
    ratio_edges: Optional[List[int]] = None
    workers: int = 1

    def to_dict(self) -> dict:
        """Echo written into artifacts; output path and worker count do not change results."""
        return {
            "command": self.command,
            "genus": self.genus,
            "n_edges": self.n_edges,
            "samples": self.samples,
            "seed": self.seed,
            "mode": self.mode,
            "format": self.fmt,
            "precision": self.precision,
            "mc_samples": self.mc_samples,
            "radii": self.radii,
            "centers": self.centers,
            "control_side": self.control_side,
            "ratio_edges": self.ratio_edges,
        }

    def metadata(self, mode: Optional[str] = None) -> dict:
        return artifact_metadata(self.to_dict(), self.seed, mode or self.mode)


# =============================================================================
# OUTPUT
# =============================================================================

def artifact_path(config: ExperimentConfig) -> Optional[Path]:
    """--out, else a default name under QUADLAB_OUTPUT_DIR, else None for stdout."""
    if config.out is not None:
        return config.out
    out_dir = LabSettings.from_env().output_dir
    if out_dir == Path("."):
        return None
    return out_dir / f"{config.command}_g{config.genus}_n{config.n_edges}_s{config.seed}.{config.fmt}"


def emit(config: ExperimentConfig, results: dict, label: str) -> None:
    path = artifact_path(config)
    if path is None:
        if config.fmt == "csv":
            print(render_csv(results.get("rows", []), SCHEMAS[results["schema"]],
                             results.get("metadata")), end="")
        else:
            print(render_json(results), end="")
        return
    written = write_report(results, config.fmt, path)
    print(f">>> {label}: {written.absolute()}", file=sys.stderr)


# =============================================================================
# COMMANDS
# =============================================================================

def cmd_enumerate(config: ExperimentConfig) -> int:
    trees = enumerate_well_labeled_gtrees(config.genus, config.n_edges)
    print(f"{len(trees)} well-labeled g-trees (g={config.genus}, n={config.n_edges})", file=sys.stderr)
    results = {"metadata": config.metadata("exact"), "count": len(trees),
               "trees": [t.to_dict() for t in trees]}
    emit(config, results, "TREES JSON")
    return 0


def cmd_count(config: ExperimentConfig) -> int:
    mode = "exact" if config.mode == "auto" else config.mode
    trees = count_gtrees(config.genus, config.n_edges, mode)
    results = {"metadata": config.metadata(mode), "genus": config.genus,
               "n_edges": config.n_edges, "gtrees": str(trees)}
    if mode == "exact":
        results["quadrangulations"] = str(count_quadrangulations(config.genus, config.n_edges))
    emit(config, results, "COUNT JSON")
    return 0


def cmd_sample(config: ExperimentConfig) -> int:
    mode = resolve_mode(config.mode, config.n_edges)
    print(f"Sampling {config.samples} g-trees (g={config.genus}, n={config.n_edges}, mode={mode})...",
          file=sys.stderr)
    batch = sample_batch(config.genus, config.n_edges, config.samples, config.seed,
                         mode, config.workers)
    results = {"metadata": config.metadata(mode),
               "samples": [{"index": i, "seed": derive_seed(config.seed, i), **t.to_dict()}
                           for i, t in enumerate(batch)]}
    emit(config, results, "SAMPLES JSON")
    return 0


def cmd_quadrangulate(config: ExperimentConfig) -> int:
    mode = resolve_mode(config.mode, config.n_edges)
    b = SampleBundle.from_seed(config.genus, config.n_edges, config.seed, mode)
    results = {"metadata": config.metadata(mode), "tree": b.tree.to_dict(),
               "quadrangulation": b.pq.to_dict()}
    emit(config, results, "QUADRANGULATION JSON")
    return 0


def _stats_task(task: tuple) -> tuple:
    genus, n, seed, mode = task
    b = SampleBundle.from_seed(genus, n, seed, mode)
    hist, _ = profile_and_radius(b.pq, "pointed")
    return b.distances.d(0, n) / rescale_factor(n), hist.tolist()


def cmd_stats(config: ExperimentConfig) -> int:
    n = config.n_edges
    mode = resolve_mode(config.mode, n)
    seeds = [derive_seed(config.seed, i) for i in range(config.samples)]
    tasks = [(config.genus, n, s, mode) for s in seeds]
    print(f"Measuring {len(tasks)} samples (g={config.genus}, n={n})...", file=sys.stderr)
    if config.workers <= 1:
        out = [_stats_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=config.workers) as executor:
            out = list(executor.map(_stats_task, tasks, chunksize=4))

    rows = [{"n": n, "seed": s, "value": v} for s, (v, _) in zip(seeds, out)]
    profile: List[int] = []
    for _, hist in out:
        if len(hist) > len(profile):
            profile.extend([0] * (len(hist) - len(profile)))
        for d, c in enumerate(hist):
            profile[d] += c
    profile_rows = [{"distance": d, "count": c} for d, c in enumerate(profile)]

    meta = config.metadata(mode)
    if config.fmt == "csv":
        emit(config, {"schema": "two_point", "rows": rows, "metadata": meta}, "TWO-POINT CSV")
        path = artifact_path(config)
        if path is not None:
            path = path.with_name(path.stem + "_profile.csv")
            written = write_report({"schema": "profile", "rows": profile_rows, "metadata": meta}, "csv", path)
            print(f">>> PROFILE CSV: {written.absolute()}", file=sys.stderr)
        return 0

    values = [r["value"] for r in rows]
    half = len(values) // 2
    results = {"metadata": meta, "schema": "two_point", "rows": rows,
               "summary": compute_column_stats(rows, "value"), "profile": profile_rows}
    if half >= 1:
        results["split_halves"] = compare_batches(values[:half], values[half:])
    emit(config, results, "STATS JSON")
    return 0


def cmd_dimension(config: ExperimentConfig) -> int:
    rng = Stream(config.seed)
    if config.control_side:
        target = torus_grid_map(config.control_side)
        mode = "exact"
    else:
        mode = resolve_mode(config.mode, config.n_edges)
        target = SampleBundle.from_seed(config.genus, config.n_edges, config.seed, mode).pq
    est = dimension_estimate(target, config.centers, rng.spawn(1), config.radii)
    print(f"Ball-growth slope: {est.slope:.3f} over radii {est.radii}", file=sys.stderr)
    results = {"metadata": config.metadata(mode), "schema": "dimension", "rows": est.rows,
               "slope": est.slope, "slopes": est.slopes, "radii": est.radii}
    emit(config, results, "DIMENSION " + config.fmt.upper())
    return 0


def cmd_tg(config: ExperimentConfig) -> int:
    res = tg_closed_form(config.genus, config.precision)
    results = res.to_dict()
    results["metadata"] = config.metadata("exact")
    if config.mc_samples:
        est, err = estimate_upsilon(config.genus, config.mc_samples, Stream(config.seed))
        factor = 1.0 / upsilon_from_tg(config.genus, 1.0)
        results["upsilon"] = {"estimate": est, "std_error": err,
                              "t_g_estimate": factor * est, "t_g_std_error": factor * err}
        print(f"Monte Carlo t_g: {factor * est:.6g} +/- {factor * err:.2g}", file=sys.stderr)
    if config.ratio_edges:
        ratio = asymptotic_ratio(config.genus, config.ratio_edges, float(res.value) / 2.0)
        if not ratio.monotone:
            print("Warning: ratio deviation is not decreasing over --ratio-edges", file=sys.stderr)
        results["ratio"] = ratio.to_dict()
    emit(config, results, "TG JSON")
    return 0


def _desk_checks(genus: int, n: int) -> List[dict]:
    rows = []
    trees = enumerate_well_labeled_gtrees(genus, n)
    dp = count_gtrees(genus, n)
    rows.append({"check": "enumeration matches exact count", "ok": len(trees) == dp,
                 "detail": f"{len(trees)} enumerated, {dp} counted"})
    try:
        q = count_quadrangulations(genus, n)
        rows.append({"check": "(n+2-2g) |Q_n| = 2 |T_n|", "ok": True, "detail": f"|Q_n| = {q}"})
    except QuadLabError as e:
        rows.append({"check": "(n+2-2g) |Q_n| = 2 |T_n|", "ok": False, "detail": str(e)})

    bad = sum(1 for t in trees if recompose(decompose(t)) != t)
    rows.append({"check": "recompose(decompose(t)) = t", "ok": bad == 0, "detail": f"{bad} failures"})

    bad = 0
    seen = set()
    for t in trees:
        for eps in (-1, 1):
            pq = cms_forward(t, eps)
            seen.add((pq.map, pq.pointed_vertex))
            if cms_inverse(pq) != (t, eps) or not check_label_distance(pq):
                bad += 1
    rows.append({"check": "quadrangulation round trip", "ok": bad == 0, "detail": f"{bad} failures"})
    rows.append({"check": "forward map injective", "ok": len(seen) == 2 * len(trees),
                 "detail": f"{len(seen)} images of {2 * len(trees)}"})

    r = check_lemag(1.0, 1.0, 2.0)
    rows.append({"check": "Gaussian kernel convolution", "ok": r < 1e-8, "detail": f"residual {r:.3g}"})
    r = check_p_bracket(genus)
    rows.append({"check": "p^[10g-4](0) closed form", "ok": r < 1e-10, "detail": f"residual {r:.3g}"})
    return rows


def cmd_check(config: ExperimentConfig) -> int:
    rows = _desk_checks(config.genus, config.n_edges)
    for r in rows:
        status = "ok  " if r["ok"] else "FAIL"
        print(f"  [{status}] {r['check']}: {r['detail']}", file=sys.stderr)
    results = {"metadata": config.metadata("exact"), "schema": "checks", "rows": rows}
    emit(config, results, "CHECK " + config.fmt.upper())
    return 0 if all(r["ok"] for r in rows) else 1


HANDLERS = {
    "enumerate": cmd_enumerate,
    "count": cmd_count,
    "sample": cmd_sample,
    "quadrangulate": cmd_quadrangulate,
    "stats": cmd_stats,
    "dimension": cmd_dimension,
    "tg": cmd_tg,
    "check": cmd_check,
}


def run_command(config: ExperimentConfig) -> int:
    """Dispatch to the command handler; returns the exit status."""
    logger.debug("running %s with %s", config.command, config.to_dict())
    try:
        return HANDLERS[config.command](config)
    except UsageError as e:
        print(f"Error: {e}")
        return 2
    except QuadLabError as e:
        logger.debug("%s failed", config.command, exc_info=True)
        print(f"Error: {e}")
        return 1


# =============================================================================
# MAIN
# =============================================================================

def _int_list(text: str) -> List[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Sample and measure bipartite quadrangulations of genus g",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  ./quadlab.py count --genus 1 --edges 3          |T_3| = 30
  ./quadlab.py sample --genus 1 --edges 500 --count 10 --seed 1
  ./quadlab.py tg --genus 1                       t_1 = 1/24
        """
    )
    subparsers = parser.add_subparsers(dest="command", help="Command to run")

    def common(p, edges="required"):
        p.add_argument("--genus", type=int, default=1, help="Genus g >= 1")
        if edges == "required":
            p.add_argument("--edges", type=int, required=True, help="Number of edges n (faces of the quadrangulation)")
        elif edges == "optional":
            p.add_argument("--edges", type=int, default=0, help="Number of edges n (faces of the quadrangulation)")
        p.add_argument("--seed", type=int, default=0, help="Master seed")
        p.add_argument("--out", "-o", type=Path, help="Write the artifact to this file")
        p.add_argument("--format", choices=["json", "csv"], default="json", help="Artifact format")
        p.add_argument("--verbose", "-v", action="store_true", help="Debug logging")

    p = subparsers.add_parser("enumerate", help="List every well-labeled g-tree")
    common(p)

    p = subparsers.add_parser("count", help="Exact |T_n| and |Q_n|")
    common(p)
    p.add_argument("--mode", choices=["exact", "float", "auto"], default="exact")

    for name, help_text in (("sample", "Uniform well-labeled g-trees"),
                            ("quadrangulate", "One pointed quadrangulation"),
                            ("stats", "Two-point distances and profile over a batch")):
        p = subparsers.add_parser(name, help=help_text)
        common(p)
        p.add_argument("--count", type=int, default=1, help="Number of samples")
        p.add_argument("--mode", choices=["exact", "float", "auto"], default="auto")
        p.add_argument("--workers", type=int, default=1, help="Worker processes")

    p = subparsers.add_parser("dimension", help="Ball-growth dimension estimate")
    common(p, edges="optional")
    p.add_argument("--mode", choices=["exact", "float", "auto"], default="auto")
    p.add_argument("--centers", type=int, default=10, help="Random centers")
    p.add_argument("--radii", type=_int_list, help="Comma-separated radii (default: geometric grid)")
    p.add_argument("--control-side", type=int, default=0, help="Use a side x side torus grid instead")

    p = subparsers.add_parser("tg", help="Closed-form t_g")
    common(p, edges=None)
    p.add_argument("--precision", type=int, default=DEFAULTS.precision_bits, help="Bits of precision")
    p.add_argument("--mc-samples", type=int, default=0, help="Also estimate Upsilon by Monte Carlo")
    p.add_argument("--ratio-edges", type=_int_list,
                   help="Comma-separated n values for |T_n| 12^-n n^-(5g-3)/2 against t_g / 2")

    p = subparsers.add_parser("check", help="Desk-scale consistency checks")
    common(p)
    return parser


def config_from_args(args, parser) -> ExperimentConfig:
    if args.genus < 1:
        parser.error(f"--genus must be >= 1 (got {args.genus})")
    for name in ("edges", "count", "mc_samples", "centers", "workers", "control_side", "precision"):
        value = getattr(args, name, None)
        if value is not None and value < 0:
            parser.error(f"--{name.replace('_', '-')} must be non-negative (got {value})")
    if args.command == "dimension" and not args.edges and not args.control_side:
        parser.error("dimension needs --edges or --control-side")
    if args.format == "csv" and args.command not in ("stats", "dimension", "check"):
        parser.error("--format csv is only available for stats, dimension and check")
    return ExperimentConfig(
        command=args.command,
        genus=args.genus,
        n_edges=getattr(args, "edges", 0) or 0,
        samples=getattr(args, "count", 1),
        seed=args.seed,
        mode=getattr(args, "mode", "auto"),
        out=args.out,
        fmt=args.format,
        precision=getattr(args, "precision", DEFAULTS.precision_bits),
        mc_samples=getattr(args, "mc_samples", 0),
        radii=getattr(args, "radii", None),
        centers=getattr(args, "centers", 10),
        control_side=getattr(args, "control_side", 0),
        ratio_edges=getattr(args, "ratio_edges", None),
        workers=getattr(args, "workers", 1),
    )


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help()
        return 2
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    config = config_from_args(args, parser)
    return run_command(config)


if __name__ == "__main__":
    sys.exit(main())
