"""Command line interface.

Subcommands:

* ``run --config <path> --out <dir>`` -- run a rate experiment, writing
  report.csv, plot.csv and summary.json into the output directory;
* ``loworder-verify --c <v> --kappa <v>`` -- run the membership diagnostics
  for the low-order candidate and emit the report as JSON;
* ``check-axioms --config <path>`` -- run the scheme-axiom suites and emit
  the results as JSON.

``--seed`` and ``--grid-n`` override the corresponding config fields.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .harness import check_axioms, load_config, parse_config, run_rate_experiment
from .loworder import LogExampleParams, verify_membership


def _load_with_overrides(path: str, seed: int | None, grid_n: int | None):
    cfg = load_config(path)
    doc = dict(cfg.raw)
    if seed is not None:
        doc["seed"] = seed
    if grid_n is not None:
        op = dict(doc["operator"])
        if op["kind"] == "diagonal":
            op.pop("sigma", None)
            op["modes"] = grid_n
            op.setdefault("sigma_rule", "exp_decay")
        else:
            op["n"] = grid_n
        doc["operator"] = op
    return parse_config(doc)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="illposed",
        description="Regularization experiments for linear ill-posed problems "
        "under logarithmic and mixed source conditions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a rate experiment from a config file")
    run_p.add_argument("--config", required=True, help="path to the JSON config")
    run_p.add_argument("--out", required=True, help="output directory")
    run_p.add_argument("--seed", type=int, default=None, help="override the config seed")
    run_p.add_argument("--grid-n", type=int, default=None, help="override the grid size")

    low_p = sub.add_parser("loworder-verify", help="verify the low-order candidate")
    low_p.add_argument("--c", type=float, required=True)
    low_p.add_argument("--kappa", type=float, required=True)
    low_p.add_argument("--grid-n", type=int, default=512)
    low_p.add_argument("--out", default=None, help="write the JSON report here instead of stdout")

    ax_p = sub.add_parser("check-axioms", help="run the scheme-axiom suites")
    ax_p.add_argument("--config", required=True)
    ax_p.add_argument("--out", default=None, help="write the JSON report here instead of stdout")
    ax_p.add_argument("--seed", type=int, default=None)
    ax_p.add_argument("--grid-n", type=int, default=None)

    args = parser.parse_args(argv)

    if args.command == "run":
        cfg = _load_with_overrides(args.config, args.seed, args.grid_n)
        report = run_rate_experiment(cfg, out_dir=args.out)
        summary = dict(report.summary)
        print(json.dumps(summary, indent=2, sort_keys=True))
        return 0

    if args.command == "loworder-verify":
        params = LogExampleParams(c=args.c, kappa=args.kappa)
        report = verify_membership(params, n=args.grid_n)
        text = json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"
        if args.out:
            Path(args.out).write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)
        return 0

    if args.command == "check-axioms":
        cfg = _load_with_overrides(args.config, args.seed, args.grid_n)
        result = check_axioms(cfg)
        text = json.dumps(result, indent=2, sort_keys=True) + "\n"
        if args.out:
            Path(args.out).write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)
        return 0

    parser.error(f"unknown command {args.command!r}")
    return 2


if __name__ == "__main__":
    raise SystemExit(main())
