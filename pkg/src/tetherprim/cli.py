"""Command-line front end.

    tetherprim run SPEC [--out-dir DIR] [--jobs N] [--seed S]
    tetherprim metrics TRAJECTORY.csv --ideal SPEC
    tetherprim gen-path SPEC [--out-dir DIR]

Exit codes: 0 success, 1 configuration error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from tetherprim.bench import (
    densified_waypoint_rows,
    read_trajectory,
    run_benchmark,
    write_csv,
)
from tetherprim.errors import ConfigError, TetherPrimError
from tetherprim.metrics import evaluate_positions
from tetherprim.scenario import load_spec

log = logging.getLogger("tetherprim")

EXIT_OK, EXIT_CONFIG, EXIT_IO = 0, 1, 2


def _cmd_run(args) -> int:
    spec = load_spec(args.spec)
    artifact = run_benchmark(spec, args.out_dir, jobs=args.jobs, seed=args.seed)
    for row in artifact.summary:
        log.info(
            "%s %-9s %5.2f m  cte %.3f +/- %.3f m  smooth %.4f rad  (%d/%d completed)",
            row["scenario"], row["controller"], row["interval_m"], row["mean_cte_m"],
            row["std_cte_m"], row["mean_smoothness_rad"], row["completed"], row["trials"],
        )
    print(artifact.summary_csv)
    return EXIT_OK


def _cmd_metrics(args) -> int:
    spec = load_spec(args.ideal)
    cols = read_trajectory(args.trajectory)
    positions = list(zip(cols["x_true"], cols["y_true"], cols["z_true"]))
    resample = args.resample_interval or spec.resample_interval
    duration = float(cols["t"][-1]) if len(cols["t"]) else 0.0
    report = evaluate_positions(positions, spec.corners(), "unknown", duration, resample)
    json.dump(report.as_dict(), sys.stdout, indent=2)
    sys.stdout.write("\n")
    return EXIT_OK


def _cmd_gen_path(args) -> int:
    spec = load_spec(args.spec)
    rows = densified_waypoint_rows(spec)
    header = ("interval_m", "index", "x", "y", "z")
    if args.out_dir is None:
        print(",".join(header))
        for row in rows:
            print(",".join(row))
    else:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        target = out / f"{spec.name}__waypoints.csv"
        write_csv(target, header, rows)
        print(target)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tetherprim", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a benchmark scenario")
    run.add_argument("spec", type=Path)
    run.add_argument("--out-dir", type=Path, default=Path("runs"))
    run.add_argument("--jobs", type=int, default=1, help="parallel trials")
    run.add_argument("--seed", type=int, default=None, help="override base_seed")
    run.set_defaults(func=_cmd_run)

    metrics = sub.add_parser("metrics", help="re-evaluate a trajectory CSV")
    metrics.add_argument("trajectory", type=Path)
    metrics.add_argument("--ideal", type=Path, required=True, help="scenario file defining the ideal path")
    metrics.add_argument("--resample-interval", type=float, default=None)
    metrics.set_defaults(func=_cmd_metrics)

    gen = sub.add_parser("gen-path", help="emit densified waypoints")
    gen.add_argument("spec", type=Path)
    gen.add_argument("--out-dir", type=Path, default=None)
    gen.set_defaults(func=_cmd_gen_path)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(message)s",
    )
    if getattr(args, "jobs", 1) < 1:
        print("error: --jobs must be at least 1", file=sys.stderr)
        return EXIT_CONFIG
    if getattr(args, "seed", None) is not None and args.seed < 0:
        print("error: --seed must be non-negative", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (TetherPrimError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
