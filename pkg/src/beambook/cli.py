"""Command-line interface: design, baseline, spatial, link, sweep.

Every flag can also be supplied through ``--config FILE`` holding ``key=value``
lines (keys are the long option names, ``-`` or ``_`` separated); explicit
flags override the file. Angles on the command line are degrees. Exit codes:
0 success, 2 configuration error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from .arrays import ArrayGeometry, Direction, load_codebook, save_codebook
from .baselines import (SteeringSpec, beam_steering_codebook, dft_codebook,
                        equispaced_ula_directions, table1_spec)
from .channel import ChannelParams, generate_training_set, load_training_set
from .evaluate import (ExperimentConfig, run_link_experiment,
                       run_spatial_response_experiment, write_report)
from .lloyd import LloydConfig, lloyd_design, quantized_lloyd_design
from .metrics import Metric


def _parse_geometry(text: str) -> ArrayGeometry:
    try:
        n_v, n_h = (int(p) for p in text.lower().split("x"))
    except ValueError:
        raise ValueError(f"geometry must look like 'NvxNh', e.g. 8x1 (got {text!r})")
    return ArrayGeometry(n_v=n_v, n_h=n_h)


def _with_spacing(geom: ArrayGeometry, spacing: str | None) -> ArrayGeometry:
    if spacing is None:
        return geom
    parts = [float(p) for p in spacing.split(",")]
    if len(parts) == 1:
        parts = parts * 2
    if len(parts) != 2:
        raise ValueError(f"spacing must be 'dv,dh' in wavelengths (got {spacing!r})")
    return ArrayGeometry(n_v=geom.n_v, n_h=geom.n_h, d_v=parts[0], d_h=parts[1])


def _parse_range_deg(text: str) -> tuple:
    parts = [float(p) for p in text.split(",")]
    if len(parts) != 2:
        raise ValueError(f"angle range must be 'lo,hi' in degrees (got {text!r})")
    return (math.radians(parts[0]), math.radians(parts[1]))


def _parse_float_list(text: str) -> tuple:
    if not text:
        return ()
    return tuple(float(p) for p in text.split(","))


def _metric_from_args(args, n: int) -> Metric:
    if args.metric == "avg":
        return Metric.avg_gain()
    if args.metric == "rate":
        return Metric.rate(snr_db=args.metric_snr_db)
    gamma = args.gamma
    if args.gamma_frac is not None:
        gamma = args.gamma_frac * n
    if gamma is None:
        raise ValueError("coverage metric needs --gamma or --gamma-frac")
    return Metric.coverage(gamma=gamma, alpha=args.alpha)


def _add_common(sub):
    sub.add_argument("--geometry", required=True, help="array as NvxNh, e.g. 8x1")
    sub.add_argument("--spacing", default=None, help="element spacing dv,dh in wavelengths")
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--out", required=True, help="output directory")


def _add_angle_ranges(sub):
    sub.add_argument("--theta-range", default="0,180", help="zenith range in degrees")
    sub.add_argument("--phi-range", default="-90,90", help="azimuth range in degrees")


def _add_channel(sub):
    sub.add_argument("--kappa", type=float, default=100.0, help="Ricean K-factor")
    sub.add_argument("--paths", type=int, default=5, help="NLOS path count")


def _channel_from_args(args) -> ChannelParams:
    return ChannelParams(kappa=args.kappa, n_nlos=args.paths,
                         theta_range=_parse_range_deg(args.theta_range),
                         phi_range=_parse_range_deg(args.phi_range))


def _resolve_codebook(args, geom: ArrayGeometry):
    """Spatial-experiment codebook source: file, baseline kind, or omni."""
    if args.codebook is not None:
        return load_codebook(args.codebook)
    if args.baseline is None:
        raise ValueError("give --codebook FILE or --baseline KIND")
    return _baseline_codebook(args.baseline, geom, args.k, getattr(args, "table_order", "theta-phi"))


def _baseline_codebook(kind: str, geom: ArrayGeometry, k, table_order="theta-phi"):
    if kind == "omni":
        return None
    if kind == "dft":
        return dft_codebook(geom)
    if kind == "steering":
        if k is None:
            raise ValueError("baseline 'steering' needs --k")
        return beam_steering_codebook(geom, equispaced_ula_directions(k))
    if kind in ("table1-3", "table1-4"):
        return beam_steering_codebook(geom, table1_spec(int(kind[-1]), order=table_order))
    raise ValueError(f"unknown baseline kind {kind!r}")


def cmd_design(args) -> int:
    geom = _with_spacing(_parse_geometry(args.geometry), args.spacing)
    metric = _metric_from_args(args, geom.n)
    if args.train_file is not None:
        samples = load_training_set(args.train_file)
        if samples.shape[1] != geom.n:
            raise ValueError(f"training file length {samples.shape[1]} != array size {geom.n}")
    else:
        params = ChannelParams(kappa=args.train_kappa, n_nlos=args.train_paths,
                               theta_range=_parse_range_deg(args.theta_range),
                               phi_range=_parse_range_deg(args.phi_range))
        rng = np.random.default_rng(args.seed)
        samples = generate_training_set(params, geom, args.train_count, rng)
    cfg = LloydConfig(k=args.k, step_size=args.step_size,
                      grad_steps_per_iter=args.grad_steps, max_iters=args.max_iters,
                      rel_tol=args.rel_tol, restarts=args.restarts,
                      quant_bits=args.bits, seed=args.seed)
    if args.bits is not None:
        result = quantized_lloyd_design(samples, metric, cfg)
    else:
        result = lloyd_design(samples, metric, cfg)
    os.makedirs(args.out, exist_ok=True)
    save_codebook(result.codebook, os.path.join(args.out, "codebook.txt"))
    with open(os.path.join(args.out, "objective.csv"), "w", encoding="ascii") as fh:
        fh.write("iter,objective\n")
        for i, obj in enumerate(result.objective_history):
            fh.write(f"{i},{obj:.12g}\n")
    print(f"designed K={result.codebook.k} codebook, objective "
          f"{result.objective_history[-1]:.6g} -> {args.out}")
    return 0


def cmd_baseline(args) -> int:
    geom = _with_spacing(_parse_geometry(args.geometry), args.spacing)
    if args.directions is not None:
        dirs = []
        for pair in args.directions.split(";"):
            th, ph = (float(p) for p in pair.split(","))
            dirs.append(Direction(math.radians(th), math.radians(ph)))
        cb = beam_steering_codebook(geom, SteeringSpec(tuple(dirs)))
    else:
        cb = _baseline_codebook(args.kind, geom, args.k, args.table_order)
        if cb is None:
            raise ValueError("the omni reference has no codebook file; use it in 'spatial'")
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "codebook.txt")
    save_codebook(cb, path)
    print(f"wrote {cb.k}-codeword baseline -> {path}")
    return 0


def cmd_spatial(args) -> int:
    geom = _with_spacing(_parse_geometry(args.geometry), args.spacing)
    cb = _resolve_codebook(args, geom)
    cfg = ExperimentConfig(
        geometry=geom, codebook=cb, trials=args.trials, seed=args.seed,
        theta_range=_parse_range_deg(args.theta_range),
        phi_range=_parse_range_deg(args.phi_range),
        gammas=_parse_float_list(args.gammas), grid=args.grid)
    report = run_spatial_response_experiment(cfg)
    write_report(report, args.out)
    print(f"spatial: mean gain {report.mean_gain:.4f} over {args.trials} trials -> {args.out}")
    return 0


def _summary_csv(path, reports, gammas) -> None:
    header = "snr_db,mean_gain,mean_rate" + "".join(f",outage@{g:g}" for g in gammas)
    lines = [header]
    for rep in reports:
        row = f"{rep.snr_db:.12g},{rep.mean_gain:.12g},{rep.mean_rate:.12g}"
        row += "".join(f",{rep.outage[float(g)]:.12g}" for g in gammas)
        lines.append(row)
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def _run_link(args, rx_cb, tx_cb, tx_geom) -> int:
    geom = _with_spacing(_parse_geometry(args.geometry), args.spacing)
    snr_db = _parse_float_list(args.snr_db)
    gammas = _parse_float_list(args.gammas)
    cfg = ExperimentConfig(
        geometry=geom, codebook=rx_cb, trials=args.trials, seed=args.seed,
        theta_range=_parse_range_deg(args.theta_range),
        phi_range=_parse_range_deg(args.phi_range),
        gammas=gammas, tx_geometry=tx_geom, tx_codebook=tx_cb,
        channel=_channel_from_args(args), snr_db=snr_db)
    reports = run_link_experiment(cfg)
    os.makedirs(args.out, exist_ok=True)
    for rep in reports:
        write_report(rep, os.path.join(args.out, f"snr_{rep.snr_db:g}dB"))
    _summary_csv(os.path.join(args.out, "summary.csv"), reports, gammas)
    for rep in reports:
        print(f"{rep.snr_db:g} dB: mean gain {rep.mean_gain:.4f}, mean rate {rep.mean_rate:.4f}")
    return 0


def cmd_link(args) -> int:
    rx_cb = load_codebook(args.codebook) if args.codebook else None
    if rx_cb is None:
        geom = _with_spacing(_parse_geometry(args.geometry), args.spacing)
        rx_cb = _baseline_codebook(args.baseline, geom, args.k)
        if rx_cb is None:
            raise ValueError("link experiments need a real Rx codebook")
    tx_cb = load_codebook(args.tx_codebook) if args.tx_codebook else None
    tx_geom = None
    if args.tx_geometry is not None:
        tx_geom = _with_spacing(_parse_geometry(args.tx_geometry), args.spacing)
    return _run_link(args, rx_cb, tx_cb, tx_geom)


def cmd_sweep(args) -> int:
    rx_cb = load_codebook(args.rx_codebook)
    tx_cb = load_codebook(args.tx_codebook)
    tx_geom = _with_spacing(_parse_geometry(args.tx_geometry), args.spacing)
    return _run_link(args, rx_cb, tx_cb, tx_geom)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="beambook",
                                     description="analog beamforming codebook design and evaluation")
    parser.add_argument("--config", default=None, help="key=value file mirroring the flags")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("design", help="run the iterative codebook designer")
    _add_common(p)
    _add_angle_ranges(p)
    p.add_argument("--k", type=int, required=True, help="codebook size")
    p.add_argument("--metric", choices=("avg", "rate", "cov"), default="avg")
    p.add_argument("--gamma", type=float, default=None, help="coverage threshold (absolute)")
    p.add_argument("--gamma-frac", type=float, default=None, help="coverage threshold as a fraction of N")
    p.add_argument("--alpha", type=float, default=8.0, help="sigmoid steepness")
    p.add_argument("--metric-snr-db", type=float, default=5.0, help="SNR used by the rate metric reporting")
    p.add_argument("--bits", type=int, default=None, help="phase-shifter bits (quantized design)")
    p.add_argument("--train-file", default=None, help="training set file")
    p.add_argument("--train-count", type=int, default=2000)
    p.add_argument("--train-kappa", type=float, default=math.inf,
                   help="training Ricean factor (default: single-ray)")
    p.add_argument("--train-paths", type=int, default=0)
    p.add_argument("--step-size", type=float, default=0.05)
    p.add_argument("--grad-steps", type=int, default=20)
    p.add_argument("--max-iters", type=int, default=200)
    p.add_argument("--rel-tol", type=float, default=1e-4)
    p.add_argument("--restarts", type=int, default=5)
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("baseline", help="emit a reference codebook")
    _add_common(p)
    p.add_argument("--kind", choices=("dft", "steering", "table1-3", "table1-4"), default="dft")
    p.add_argument("--k", type=int, default=None, help="codeword count for 'steering'")
    p.add_argument("--directions", default=None,
                   help="explicit 'theta,phi;theta,phi' list in degrees")
    p.add_argument("--table-order", choices=("theta-phi", "phi-theta"), default="theta-phi")
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("spatial", help="effective spatial response Monte Carlo")
    _add_common(p)
    _add_angle_ranges(p)
    p.add_argument("--codebook", default=None, help="codebook file")
    p.add_argument("--baseline", default=None,
                   help="baseline kind instead of a file (dft|steering|table1-3|table1-4|omni)")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--table-order", choices=("theta-phi", "phi-theta"), default="theta-phi")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--grid", action="store_true", help="deterministic dense direction grid")
    p.add_argument("--gammas", default="", help="outage thresholds, comma separated")
    p.set_defaults(func=cmd_spatial)

    p = sub.add_parser("link", help="noisy beam-swept link Monte Carlo")
    _add_common(p)
    _add_angle_ranges(p)
    _add_channel(p)
    p.add_argument("--codebook", default=None, help="Rx codebook file")
    p.add_argument("--baseline", default=None, help="Rx baseline kind instead of a file")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--tx-codebook", default=None, help="Tx codebook file (default: single element)")
    p.add_argument("--tx-geometry", default=None, help="Tx array as NvxNh")
    p.add_argument("--snr-db", default="5", help="SNR grid in dB, comma separated")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--gammas", default="", help="gain outage thresholds")
    p.set_defaults(func=cmd_link)

    p = sub.add_parser("sweep", help="two-codebook ping-pong link simulation")
    _add_common(p)
    _add_angle_ranges(p)
    _add_channel(p)
    p.add_argument("--tx-codebook", required=True)
    p.add_argument("--rx-codebook", required=True)
    p.add_argument("--tx-geometry", required=True, help="Tx array as NvxNh")
    p.add_argument("--snr-db", default="5")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--gammas", default="")
    p.set_defaults(func=cmd_sweep)
    return parser


def _inject_config(argv):
    """Expand --config FILE into leading pseudo-flags so real flags override."""
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    if i + 1 >= len(argv):
        raise ValueError("--config needs a file path")
    path = argv[i + 1]
    rest = argv[:i] + argv[i + 2:]
    try:
        with open(path, "r", encoding="ascii") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ValueError(f"cannot read config file {path}: {exc}")
    injected = []
    for line in lines:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"config line must be key=value (got {line!r})")
        key, value = (part.strip() for part in line.split("=", 1))
        flag = "--" + key.replace("_", "-")
        if value.lower() in ("true", "false"):
            if value.lower() == "true":
                injected.append(flag)
        else:
            injected.extend([flag, value])
    # keep the subcommand first, then config values, then explicit flags
    if rest and not rest[0].startswith("-"):
        return [rest[0]] + injected + rest[1:]
    return injected + rest


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = _inject_config(argv)
        args = build_parser().parse_args(argv)
        return args.func(args)
    except SystemExit as exc:  # argparse exits itself (bad flags, --help)
        return int(exc.code or 0)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
