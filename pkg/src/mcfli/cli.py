"""Command-line entry point.

Subcommands::

    mcfli trial     one reconstruction trial (prints SNR and success)
    mcfli sweep     Monte-Carlo phase-transition sweep, CSV output
    mcfli rip       empirical restricted-isometry constants
    mcfli demo      2-D imaging demo (TV reconstruction + raster scan)
    mcfli calibrate synthetic phase-shifting calibration round trip

Common flags: ``--config <json>``, ``--seed <u64>``, ``--out <path>``,
``--threads <n>``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .harness import (
    SweepSpec,
    estimate_rip_constants,
    run_calibration_roundtrip,
    run_imaging_demo,
    run_sweep,
    run_trial,
)
from .solvers import SolverConfig


def _add_common(parser):
    parser.add_argument("--seed", type=int, default=0, help="master seed")
    parser.add_argument("--out", type=str, default=None, help="output path")
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--config", type=str, default=None, help="JSON config file")


def _load_json(path):
    with open(path) as fh:
        return json.load(fh)


def _cmd_trial(args):
    config = SolverConfig.from_json(args.config) if args.config else None
    result = run_trial(
        args.k, args.q, args.m, args.seed, solver=args.solver, n1=args.n1,
        threshold_db=args.threshold, config=config,
    )
    print(
        f"snr_db={result.snr_db:.2f} success={result.success} "
        f"visibilities={result.visibilities} iterations={result.iterations}"
    )
    return 0


def _cmd_sweep(args):
    if args.config:
        data = _load_json(args.config)
        data.setdefault("master_seed", args.seed)
        if args.out:
            data["out_path"] = args.out
        spec = SweepSpec(**data)
    else:
        spec = SweepSpec(
            k_values=args.k,
            m_values=args.m,
            q_values=args.q or [],
            vis_targets=args.vis or [],
            trials=args.trials,
            threshold_db=args.threshold,
            master_seed=args.seed,
            solver=args.solver,
            n1=args.n1,
            out_path=args.out,
        )
    result = run_sweep(spec, threads=args.threads)
    if not spec.out_path:
        sys.stdout.write(result.to_csv())
    return 0


def _cmd_rip(args):
    est = estimate_rip_constants(
        args.k, args.q, args.m, args.trials, args.seed, n1=args.n1
    )
    payload = {
        "lower": est.lower,
        "upper": est.upper,
        "envelope": est.envelope,
        "upper_ratio": est.upper_ratio,
        "visibilities": est.visibilities,
        "trials": est.trials,
    }
    text = json.dumps(payload, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def _cmd_demo(args):
    out_dir = args.out or "demo_out"
    os.makedirs(out_dir, exist_ok=True)
    config = SolverConfig.from_json(args.config) if args.config else None
    report = run_imaging_demo(
        out_dir=out_dir,
        scene_path=args.scene,
        n1=args.n1,
        q=args.q,
        m_values=args.m,
        compare_q=args.compare_q,
        seed=args.seed,
        config=config,
    )
    for entry in report.entries:
        print(
            f"q={entry.q} m={entry.m} rho={entry.rho:.3e} "
            f"snr_db={entry.snr_db:.2f} iterations={entry.iterations}"
        )
    if report.rs_snr_db is not None:
        print(f"rs_mode snr_db={report.rs_snr_db:.2f}")
    print(f"outputs written to {out_dir}")
    return 0


def _cmd_calibrate(args):
    perturbation = None
    if args.perturbation:
        perturbation = (args.perturbation, args.delta)
    report = run_calibration_roundtrip(
        n1=args.n1,
        q=args.q,
        noise_sigma=args.noise,
        n_test_sketches=args.sketches,
        perturbation=perturbation,
        seed=args.seed,
        out_dir=args.out,
    )
    print(json.dumps(report, indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mcfli", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("trial", help="single reconstruction trial")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n1", type=int, default=256)
    p.add_argument("--solver", choices=("lasso", "bpdn"), default="lasso")
    p.add_argument("--threshold", type=float, default=40.0)
    _add_common(p)
    p.set_defaults(func=_cmd_trial)

    p = sub.add_parser("sweep", help="phase-transition sweep")
    p.add_argument("--k", type=int, nargs="+", default=[4])
    p.add_argument("--m", type=int, nargs="+", default=[44])
    p.add_argument("--q", type=int, nargs="+", default=None)
    p.add_argument("--vis", type=int, nargs="+", default=None,
                   help="target distinct-visibility counts (instead of --q)")
    p.add_argument("--n1", type=int, default=256)
    p.add_argument("--trials", type=int, default=80)
    p.add_argument("--threshold", type=float, default=40.0)
    p.add_argument("--solver", choices=("lasso", "bpdn"), default="lasso")
    _add_common(p)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("rip", help="empirical restricted-isometry constants")
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--q", type=int, default=16)
    p.add_argument("--m", type=int, default=122)
    p.add_argument("--n1", type=int, default=256)
    p.add_argument("--trials", type=int, default=200)
    _add_common(p)
    p.set_defaults(func=_cmd_rip)

    p = sub.add_parser("demo", help="2-D imaging demo")
    p.add_argument("--scene", type=str, default=None, help="scene JSON file")
    p.add_argument("--n1", type=int, default=64)
    p.add_argument("--q", type=int, default=110)
    p.add_argument("--m", type=int, nargs="+", default=[3000])
    p.add_argument("--compare-q", type=int, nargs="+", default=None)
    _add_common(p)
    p.set_defaults(func=_cmd_demo)

    p = sub.add_parser("calibrate", help="synthetic calibration round trip")
    p.add_argument("--n1", type=int, default=32)
    p.add_argument("--q", type=int, default=12)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--sketches", type=int, default=20)
    p.add_argument("--perturbation", choices=("amplitude-ripple", "phase-aberration"),
                   default=None)
    p.add_argument("--delta", type=float, default=0.05)
    _add_common(p)
    p.set_defaults(func=_cmd_calibrate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
