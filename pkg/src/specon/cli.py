"""Command-line front end: ``specon eval | verify | search``.

Reports are JSON (sorted keys) with an embedded run manifest; tabular data
goes to CSV files, each with a ``.manifest.json`` sidecar.  The output
directory is ``$SPECON_OUT`` (default ``./out``) unless ``--out`` is given.

Exit codes: 0 success, 1 a verification report failed, 2 bad arguments.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from . import bounds
from .intervals import GapVector, IntervalUnion, from_gaps, rearrange, to_gaps
from .search import SearchConfig, certificate_check, counterexample_scan, minimize_h, remark1_search
from .spectral import concentration, h_gap

SCHEMA_VERSION = 1
SUITES = ("identities", "thresholds", "l2", "avg", "special")


@dataclass
class RunManifest:
    command: str
    config: dict
    seed: int | None
    artifact_version: str = __version__
    schema_version: int = SCHEMA_VERSION
    started: str = ""
    finished: str = ""


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _clean(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to None."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _dumps(payload: dict) -> str:
    return json.dumps(_clean(payload), sort_keys=True, indent=2) + "\n"


def _out_dir(args) -> Path:
    path = Path(args.out or os.environ.get("SPECON_OUT", "out"))
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_json(path: Path, manifest: RunManifest, body: dict) -> None:
    path.write_text(_dumps({"manifest": asdict(manifest), **body}))


def _write_csv(path: Path, manifest: RunManifest, header: Sequence[str], rows) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v
                             for v in row])
    sidecar = path.with_name(path.name + ".manifest.json")
    sidecar.write_text(_dumps({"manifest": asdict(manifest), "data_file": path.name}))


# -- argument types ------------------------------------------------------------

def _float_list(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if not values or not all(math.isfinite(v) for v in values):
        raise argparse.ArgumentTypeError("expected finite comma-separated numbers")
    return values


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError("must be a positive number")
    return v


# -- eval ----------------------------------------------------------------------

def cmd_eval(args) -> int:
    try:
        if args.gaps is not None:
            gv = GapVector(args.gaps)
            A = from_gaps(gv, canonical=False)
        else:
            A = IntervalUnion(args.endpoints)
            gv = to_gaps(A)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    W = args.bandwidth
    unit = gv.scaled(W)
    canon = unit.canonical()
    try:
        cert = certificate_check(unit, canonicalize=True).to_dict()
    except ValueError as exc:
        cert = {"error": str(exc)}
    payload = {
        "input": {"gaps": list(gv.gaps), "endpoints": list(A.endpoints), "bandwidth": W},
        "unit_bandwidth_gaps": list(unit.gaps),
        "canonical_gaps": list(canon.gaps),
        "concentration": asdict(concentration(A, W)),
        "concentration_rearranged": asdict(concentration(rearrange(A), W)),
        "h": h_gap(unit).to_dict(),
        "certificate": cert,
    }
    sys.stdout.write(_dumps(payload))
    return 0


# -- verify --------------------------------------------------------------------

def run_suite(suite: str, samples: int, seed: int, grid_step: float,
              extent: float = 6.0) -> list[bounds.BoundReport]:
    if suite == "identities":
        return [bounds.verify_t_identities(samples, seed),
                bounds.verify_prop_equal(samples, seed),
                bounds.verify_form_agreement(samples, seed)]
    if suite == "thresholds":
        return [bounds.verify_t0(),
                bounds.verify_wt_threshold(samples, seed),
                bounds.verify_two_interval(grid_step, samples, seed, extent),
                bounds.verify_iac_and_cor_new(samples, seed)]
    if suite == "l2":
        return [bounds.verify_l2_bounds(samples, seed)]
    if suite == "avg":
        return [bounds.verify_avg_lemma(samples, seed)]
    if suite == "special":
        return [bounds.verify_special_cases()]
    raise ValueError(f"unknown suite {suite!r}")


def cmd_verify(args) -> int:
    suites = SUITES if args.suite == "all" else (args.suite,)
    config = {"suite": args.suite, "samples": args.samples, "seed": args.seed,
              "grid_step": args.grid_step, "extent": args.extent}
    manifest = RunManifest("verify", config, args.seed, started=_now())
    reports = []
    for suite in suites:
        t = time.perf_counter()
        suite_reports = run_suite(suite, args.samples, args.seed, args.grid_step, args.extent)
        print(f"suite {suite}: {time.perf_counter() - t:.1f}s")
        for rep in suite_reports:
            reports.append((suite, rep))
            status = "PASS" if rep.passed else "FAIL"
            print(f"{status} {suite}/{rep.name} worst_slack={rep.worst_slack:.3e}")
            for name in rep.failures():
                print(f"  failed: {name}")
    manifest.finished = _now()
    out = _out_dir(args)
    stem = f"verify-{args.suite}-seed{args.seed}"
    _write_json(out / f"{stem}.json", manifest,
                {"reports": [dict(suite=s, **r.to_dict()) for s, r in reports],
                 "passed": all(r.passed for _, r in reports)})
    _write_csv(out / f"{stem}.csv", manifest,
               ["suite", "name", "samples", "worst_slack", "tolerance", "passed"],
               [(s, r.name, r.samples, r.worst_slack, r.tolerance, r.passed) for s, r in reports])
    return 0 if all(r.passed for _, r in reports) else 1


# -- search --------------------------------------------------------------------

def cmd_search(args) -> int:
    mode = args.mode
    if mode in ("minimize", "scan") and args.n is None:
        print("error: --n is required for this mode", file=sys.stderr)
        return 2
    if mode == "remark1" and args.t is None:
        print("error: --t is required for remark1", file=sys.stderr)
        return 2
    out = _out_dir(args)
    config = {k: v for k, v in vars(args).items() if k not in ("func", "out")}
    manifest = RunManifest("search", config, args.seed, started=_now())
    try:
        if mode == "minimize":
            cfg = SearchConfig(n=args.n, gap_bounds=(args.lo, args.hi), restarts=args.restarts,
                               rng_seed=args.seed, t_max=args.t_max)
            result = minimize_h(cfg)
            body = result.to_dict()
            header = [f"a{k + 1}" for k in range(cfg.dim)] + ["h", "interior"]
            rows = [list(r.gaps) + [r.h_value, r.interior] for r in result.restarts]
            stem = f"search-minimize-n{args.n}-seed{args.seed}"
        elif mode == "scan":
            report = counterexample_scan(args.n, args.t_max or 4.0, args.grid, args.seed,
                                         args.samples, tied=args.tied, even=args.even)
            body = report.to_dict()
            m = 2 * args.n - 1
            header = [f"a{k + 1}" for k in range(m)] + ["h"]
            rows = report.rows.tolist()
            stem = f"search-scan-n{args.n}-seed{args.seed}"
        else:
            report = remark1_search(args.t)
            body = {"min_h": None, "argmin_gaps": [], "certificate": None,
                    "violations": [], "config_echo": config, "remark1": report.to_dict()}
            header = ["lo", "hi", "value"]
            rows = [] if report.function is None else list(report.function.pieces)
            stem = f"search-remark1-t{args.t:g}"
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    manifest.finished = _now()
    _write_json(out / f"{stem}.json", manifest, body)
    _write_csv(out / f"{stem}.csv", manifest, header, rows)
    summary = {k: body.get(k) for k in ("min_h", "argmin_gaps")}
    summary["violations"] = len(body.get("violations", []))
    if mode == "remark1":
        summary["margin"] = body["remark1"]["margin"]
        summary["oracle_margin"] = body["remark1"]["oracle_margin"]
    sys.stdout.write(_dumps(summary))
    return 0


# -- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="specon",
        description="Spectral concentration of interval unions and their rearrangements.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate one configuration")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--gaps", type=_float_list, help="a1,a2,...: lengths and holes")
    group.add_argument("--endpoints", type=_float_list, help="x1,x2,...: sorted endpoints")
    p.add_argument("--bandwidth", type=_positive_float, default=1.0)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("verify", help="run sampled verification suites")
    p.add_argument("--suite", choices=SUITES + ("all",), required=True)
    p.add_argument("--samples", type=_positive_int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--grid-step", type=_positive_float, default=0.05,
                   help="lattice step of the two-interval grid")
    p.add_argument("--extent", type=_positive_float, default=6.0,
                   help="upper bound per coordinate of the two-interval grid")
    p.add_argument("--out", help="output directory (overrides SPECON_OUT)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("search", help="minimize H, scan for counterexamples, or build f_T")
    p.add_argument("--mode", choices=("minimize", "scan", "remark1"), default="minimize")
    p.add_argument("--n", type=int, help="number of intervals (at least 2)")
    p.add_argument("--restarts", type=_positive_int, default=16)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--t-max", type=_positive_float, default=None,
                   help="cap on the total length")
    p.add_argument("--lo", type=float, default=1e-3, help="lower gap bound")
    p.add_argument("--hi", type=_positive_float, default=5.0, help="upper gap bound")
    p.add_argument("--grid", type=_positive_int, default=8, help="lattice points per axis")
    p.add_argument("--samples", type=_positive_int, default=4096, help="quasi-random samples")
    p.add_argument("--tied", action="store_true", help="n = 3 with a2 = a5")
    p.add_argument("--even", action="store_true", help="even-integer lattice")
    p.add_argument("--t", type=_positive_float, help="support measure for remark1")
    p.add_argument("--out", help="output directory (overrides SPECON_OUT)")
    p.set_defaults(func=cmd_search)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
