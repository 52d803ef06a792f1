"""Command-line interface.

Subcommands: ``segment`` (CSV in, JSON result out), ``simulate`` (preset to
CSV plus truth sidecar), ``benchmark`` (replicated preset evaluation, CSV
table), ``cv-grid`` (cross-validation score grid as CSV).  Exit codes:
0 success, 2 configuration error, 3 data error.
"""

from __future__ import annotations

import argparse
import os
import sys

from .bench import run_benchmark, runtime_sweep
from .data import DataError, load_csv, save_csv, save_truth_sidecar
from .pipeline import segment, segment_cv, segment_multiscale, segment_multiscale_cv
from .simulate import generate, preset
from .tuning import BandwidthRule, cross_validate, generate_bandwidths

EXIT_CONFIG = 2
EXIT_DATA = 3


class ConfigError(ValueError):
    pass


def _write(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _preset_params(args) -> dict:
    params = {}
    for knob in ("sparsity", "delta", "kappa", "n"):
        val = getattr(args, knob, None)
        if val is not None:
            params[knob] = val
    return params


def _resolve_bandwidths(args, n: int) -> list[int]:
    if args.bandwidths:
        gs = sorted(int(g) for g in args.bandwidths)
    elif args.bandwidth_rule:
        if args.g1 is None:
            raise ConfigError("--bandwidth-rule requires --g1")
        rule = BandwidthRule(mode=args.bandwidth_rule, G1=args.g1, n=n,
                             H_cap=args.h_cap)
        gs = generate_bandwidths(rule)
    else:
        raise ConfigError("provide --bandwidths or --bandwidth-rule/--g1")
    for g in gs:
        if 2 * g > n:
            raise ConfigError(f"bandwidth {g} too large for n={n} (need 2G <= n)")
    return gs


def cmd_segment(args) -> int:
    dataset = load_csv(args.input, header=not args.no_header)
    if args.scale_columns:
        dataset = dataset.scale_columns()
    bandwidths = _resolve_bandwidths(args, dataset.n)
    multi = len(bandwidths) > 1
    alpha = args.alpha if args.alpha is not None else (0.75 if multi else 0.25)
    if args.cv:
        if args.lam is not None or args.threshold is not None:
            raise ConfigError("--cv is mutually exclusive with --lambda/--threshold")
        if multi:
            result = segment_multiscale_cv(dataset, bandwidths,
                                           resolution=args.resolution,
                                           alpha=alpha, threads=args.threads)
        else:
            result = segment_cv(dataset, bandwidths[0],
                                resolution=args.resolution, alpha=alpha,
                                threads=args.threads)
    else:
        if args.lam is None or args.threshold is None:
            raise ConfigError("without --cv, both --lambda and --threshold are required")
        if multi:
            result = segment_multiscale(dataset, bandwidths, args.lam,
                                        args.threshold, resolution=args.resolution,
                                        alpha=alpha, threads=args.threads)
        else:
            result = segment(dataset, bandwidths[0], args.lam, args.threshold,
                             resolution=args.resolution, alpha=alpha,
                             threads=args.threads)
    if args.emit_detector:
        if not result.detector_series:
            raise ConfigError("--emit-detector is unavailable under --cv")
        with open(args.emit_detector, "w") as fh:
            fh.write("k,T_k,bandwidth\n")
            for series in result.detector_series:
                for k, v in zip(series.grid.points, series.values):
                    fh.write(f"{k},{v:.17g},{series.grid.bandwidth}\n")
    _write(result.to_json(), args.output)
    return 0


def cmd_simulate(args) -> int:
    config = preset(args.preset, seed=args.seed, **_preset_params(args))
    dataset = generate(config)
    save_csv(args.output, dataset, header=not args.no_header)
    sidecar = args.sidecar or args.output + ".truth.json"
    save_truth_sidecar(sidecar, config.change_points, config.betas, config.seed)
    return 0


def cmd_benchmark(args) -> int:
    if args.vary_p:
        rows = runtime_sweep(args.preset, args.vary_p, seed=args.seed,
                             threads=args.threads,
                             preset_params=_preset_params(args))
        text = "p,seconds\n" + "".join(f"{p},{s:.3f}\n" for p, s in rows)
        _write(text, args.output)
        return 0
    methods = {"single": ("single",), "multiscale": ("multiscale",),
               "both": ("single", "multiscale")}[args.method]
    outcome = run_benchmark(args.preset, args.reps, base_seed=args.seed,
                            methods=methods, resolution=args.resolution,
                            single_bandwidth=args.bandwidth,
                            multi_bandwidths=args.bandwidths,
                            threads=args.threads,
                            preset_params=_preset_params(args))
    _write(outcome.to_csv(), args.output)
    return 0


def cmd_cv_grid(args) -> int:
    dataset = load_csv(args.input, header=not args.no_header)
    if args.scale_columns:
        dataset = dataset.scale_columns()
    if 2 * args.bandwidth > dataset.n:
        raise ConfigError(f"bandwidth {args.bandwidth} too large for n={dataset.n}")
    alpha = args.alpha if args.alpha is not None else 0.25
    report = cross_validate(dataset, args.bandwidth, resolution=args.resolution,
                            alpha=alpha, threads=args.threads)
    _write(report.scores_csv(), args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mosumseg",
        description="Moving-window change-point detection for high-dimensional regression.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--threads", type=int, default=os.cpu_count(),
                       help="worker pool size for the parallel maps")
        p.add_argument("--output", "-o", default=None,
                       help="output path (default: stdout)")

    ps = sub.add_parser("segment", help="detect change points in a CSV dataset")
    ps.add_argument("--input", "-i", required=True, help="CSV with y in the first column")
    ps.add_argument("--no-header", action="store_true")
    ps.add_argument("--bandwidths", "-G", type=int, nargs="+")
    ps.add_argument("--bandwidth-rule", choices=["fibonacci", "practical"])
    ps.add_argument("--g1", type=int)
    ps.add_argument("--h-cap", type=int, default=None)
    ps.add_argument("--resolution", "-r", type=float, default=None)
    ps.add_argument("--alpha", type=float, default=None)
    ps.add_argument("--lambda", dest="lam", type=float, default=None)
    ps.add_argument("--threshold", "-D", type=float, default=None)
    ps.add_argument("--cv", action="store_true",
                    help="select penalty and model size by cross-validation")
    ps.add_argument("--scale-columns", action="store_true",
                    help="divide covariates by full-sample standard deviations")
    ps.add_argument("--emit-detector", default=None,
                    help="also write the detector series CSV to this path")
    add_common(ps)
    ps.set_defaults(func=cmd_segment)

    pg = sub.add_parser("simulate", help="write a simulated dataset to CSV")
    pg.add_argument("--preset", required=True,
                    choices=["S1", "S2", "S3", "S4", "S5", "E_heavy", "E_dep"])
    pg.add_argument("--seed", type=int, default=0)
    pg.add_argument("--sparsity", type=int, default=None)
    pg.add_argument("--delta", type=float, default=None)
    pg.add_argument("--kappa", type=float, default=None)
    pg.add_argument("--n", type=int, default=None)
    pg.add_argument("--no-header", action="store_true")
    pg.add_argument("--sidecar", default=None,
                    help="truth JSON path (default: <output>.truth.json)")
    pg.add_argument("--output", "-o", required=True)
    pg.add_argument("--threads", type=int, default=os.cpu_count())
    pg.set_defaults(func=cmd_simulate)

    pb = sub.add_parser("benchmark", help="replicated evaluation of a preset")
    pb.add_argument("--preset", required=True,
                    choices=["S1", "S2", "S3", "S4", "S5", "E_heavy", "E_dep"])
    pb.add_argument("--reps", type=int, default=100)
    pb.add_argument("--seed", type=int, default=0)
    pb.add_argument("--method", choices=["single", "multiscale", "both"],
                    default="both")
    pb.add_argument("--bandwidth", type=int, default=None,
                    help="override the single-bandwidth method's G")
    pb.add_argument("--bandwidths", type=int, nargs="+", default=None,
                    help="override the multiscale bandwidth set")
    pb.add_argument("--resolution", "-r", type=float, default=None)
    pb.add_argument("--sparsity", type=int, default=None)
    pb.add_argument("--delta", type=float, default=None)
    pb.add_argument("--kappa", type=float, default=None)
    pb.add_argument("--n", type=int, default=None)
    pb.add_argument("--vary-p", type=int, nargs="+", default=None,
                    help="emit per-dimension runtimes instead of a table")
    add_common(pb)
    pb.set_defaults(func=cmd_benchmark)

    pc = sub.add_parser("cv-grid", help="print the (lambda, m) CV score grid")
    pc.add_argument("--input", "-i", required=True)
    pc.add_argument("--no-header", action="store_true")
    pc.add_argument("--bandwidth", "-G", type=int, required=True)
    pc.add_argument("--resolution", "-r", type=float, default=None)
    pc.add_argument("--alpha", type=float, default=None)
    pc.add_argument("--scale-columns", action="store_true")
    add_common(pc)
    pc.set_defaults(func=cmd_cv_grid)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        if isinstance(exc, DataError):
            print(f"data error: {exc}", file=sys.stderr)
            return EXIT_DATA
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
