"""``texdim`` command line: features, idim, geometry, vc, counts, report."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from texdim import capacity, counting, geometry
from texdim.errors import DomainError, ResourceError
from texdim.idim import IdimConfig, mle_intrinsic_dimension
from texdim.io import ingest_images, load_point_cloud_csv
from texdim.pipeline import (
    FeatureConfig,
    feature_columns,
    feature_matrix,
    feature_rows,
    fixture_estimate,
    format_offsets,
    parse_fixture,
    parse_offsets,
    raw_window_vectors,
    subsample,
)
from texdim.report import canonical_json, envelope, rows_to_csv


class CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # usage errors get the same JSON error record as everything else
    def error(self, message):
        raise CliError(f"{self.prog}: {message}")


def _emit(text: str, output: str | None):
    if output:
        Path(output).write_text(text, newline="")
    else:
        sys.stdout.write(text)


def _finish(args, command, config, results, rows=None, columns=None, flags=()):
    if args.format == "csv":
        if rows is None:
            raise CliError(f"{command}: CSV output is not available for this result; use --format json")
        text = rows_to_csv(rows, columns)
    else:
        text = canonical_json(envelope(command, config, results, flags)) + "\n"
    _emit(text, args.output)


def _feature_config(args) -> FeatureConfig:
    return FeatureConfig(
        window=args.n, stride=args.stride, kappa=args.kappa, offsets=parse_offsets(args.offsets), agg=args.agg
    )


def _ingest(args, kappa):
    result = ingest_images(args.input, kappa=kappa, strict=args.strict)
    if not result.images:
        raise DomainError(f"{args.input}: no images could be read")
    return result


def cmd_features(args):
    cfg = _feature_config(args)
    ingest = _ingest(args, cfg.kappa)
    dataset = args.dataset or Path(args.input).name
    rows = feature_rows(ingest, dataset, cfg)
    config = {"input": args.input, "dataset": dataset, "n": cfg.window, "stride": cfg.stride,
              "kappa": cfg.kappa, "offsets": format_offsets(cfg.offsets), "agg": cfg.agg}
    flags = [f"ingest_error:{path}:{msg}" for path, msg in ingest.errors]
    _finish(args, "features", config, {"rows": rows}, rows=rows, columns=feature_columns(cfg), flags=flags)


def cmd_idim(args):
    config_obj = IdimConfig(args.kmin, args.kmax, args.average)
    config = {"kmin": args.kmin, "kmax": args.kmax, "average": args.average, "seed": args.seed,
              "limit": args.limit}
    results, flags = {}, []
    for spec in args.fixture or []:
        p, d, n = parse_fixture(spec)
        results[f"fixture:{spec}"] = fixture_estimate(p, d, n, config_obj, args.seed)
    if args.input:
        config["input"] = args.input
        if args.input.lower().endswith(".csv"):
            X = subsample(load_point_cloud_csv(args.input), args.limit, args.seed)
            results["csv"] = mle_intrinsic_dimension(X, config_obj)
        else:
            cfg = _feature_config(args)
            config.update({"n": cfg.window, "stride": cfg.stride, "kappa": cfg.kappa,
                           "offsets": format_offsets(cfg.offsets), "agg": cfg.agg})
            ingest = _ingest(args, cfg.kappa)
            flags += [f"ingest_error:{path}:{msg}" for path, msg in ingest.errors]
            raw = raw_window_vectors(ingest, cfg)
            keep = subsample(raw, args.limit, args.seed)
            results["raw"] = mle_intrinsic_dimension(keep, config_obj)
            if args.features:
                rows = feature_rows(ingest, Path(args.input).name, cfg)
                feats = subsample(feature_matrix(rows, cfg), args.limit, args.seed)
                results["texture"] = mle_intrinsic_dimension(feats, config_obj)
    if not results:
        raise CliError("idim: give --input and/or --fixture")
    rows = [{"source": k, "global_value": v.global_value, "n_points": v.n_points,
             "merged_duplicates": v.merged_duplicates} for k, v in results.items()]
    _finish(args, "idim", config, results, rows=rows, flags=flags)


def _parse_dataset(text):
    try:
        name, p, n = text.rsplit(":", 2)
        return name, float(p), int(n)
    except ValueError as exc:
        raise DomainError(f"bad dataset {text!r}; expected NAME:P:N") from exc


def cmd_geometry(args):
    config = {"seed": args.seed, "trials": args.trials}
    results, rows = {}, []
    if args.table3:
        datasets = []
        for name, n in (("MNIST", args.mnist_n), ("CIFAR-10", args.cifar_n), ("DET", args.det_n)):
            if n is not None:
                datasets.append((name, geometry.REFERENCE_IDIM[name], n))
        datasets += [_parse_dataset(d) for d in args.dataset or []]
        if not datasets:
            raise CliError("geometry --table3 needs at least one of --mnist-n/--cifar-n/--det-n/--dataset")
        table = geometry.table3_report(datasets)
        config["table3"] = [list(d) for d in datasets]
        config["interpretation"] = "p = intrinsic dimension, N = training-set size"
        results["table3"] = table
        rows = [{"name": r.name, "p": r.p, "N": r.n, "D": r.formatted, "value": r.value} for r in table]
    if args.n is not None and args.p is not None:
        config.update({"n": args.n, "p": args.p})
        rep = geometry.geometry_report(args.n, args.p, trials=args.trials or None, seed=args.seed)
        results["report"] = rep
        row = {k: v for k, v in vars(rep).items() if k not in ("monte_carlo", "flags")}
        if rep.monte_carlo:
            row.update({f"mc_{k}": v for k, v in vars(rep.monte_carlo).items()})
        row["flags"] = rep.flags
        rows.append(row)
    if args.rc_sweep is not None:
        ps = [10.0**e for e in range(1, 9)]
        sweep = [{"n": args.rc_sweep, "p": p,
                  "rc_paper": geometry.relative_contrast(args.rc_sweep, p, "paper"),
                  "rc_corrected": geometry.relative_contrast(args.rc_sweep, p, "corrected")} for p in ps]
        results["rc_sweep"] = sweep
        results["rc_loglog_slope"] = {v: geometry.rc_decay_exponent(args.rc_sweep, ps, v)
                                      for v in ("paper", "corrected")}
        rows += sweep
    if not results:
        raise CliError("geometry: give --table3, -n/-p, or --rc-sweep")
    _finish(args, "geometry", config, results, rows=rows)


def cmd_vc(args):
    config = {k: v for k, v in vars(args).items() if k not in ("func", "output", "format")}
    results, flags = {}, []
    if args.cells:
        p, d = args.cells
        results["cells"] = {"p": p, "d": d, "count": capacity.cell_count(p, d),
                            "classes": capacity.classes_supported(p, d)}
    variant = args.variant
    if variant:
        if variant == "cnn":
            if None in (args.maps, args.kernel, args.subsample, args.layers):
                raise CliError("vc --cnn needs --maps, --kernel, --subsample, --layers")
            arch = capacity.ArchitectureSpec("cnn", maps=args.maps, kernel=args.kernel,
                                             subsample=args.subsample, layers=args.layers)
            m, k, s, l = args.maps, args.kernel, args.subsample, args.layers
            ops = {f: capacity.cnn_operation_count(m, k, s, l, f) for f in ("paper", "sum")}
            if s >= 2:
                ops["closed"] = capacity.cnn_operation_count(m, k, s, l, "closed")
            results["cnn"] = {"input_size": capacity.cnn_input_size(k, s, l), "operations": ops}
            if ops["paper"] != ops["sum"]:
                flags.append("cnn_operation_closed_form_disagrees_with_layer_sum")
            results["bound"] = capacity.bound_report(arch, args.N, args.eta)
        else:
            if args.layer_sizes:
                sizes = tuple(int(v) for v in args.layer_sizes.split(","))
                if args.w is not None and args.w != capacity.weight_count(sizes):
                    raise CliError("-w disagrees with --layer-sizes")
                w = capacity.weight_count(sizes)
            elif args.w is not None:
                w = args.w
            else:
                raise CliError(f"vc --{variant} needs -w or --layer-sizes")
            results["w"] = w
            results["vc_upper"] = {
                "dense": lambda: capacity.vc_bound_dense(w),
                "dropout": lambda: capacity.vc_bound_dropout(w, args.p),
                "dropconnect": lambda: capacity.vc_bound_dropconnect(w, args.p),
            }[variant]()
            if args.N is not None:
                h = results["vc_upper"]
                if not capacity.monotone_regime(h, args.N):
                    flags.append("outside_monotone_regime")
                try:
                    results["gamma"] = capacity.excess_error_bound(h, args.N, args.eta)
                except DomainError as exc:
                    flags.append(f"gamma_undefined:{exc}")
                if variant in ("dropout", "dropconnect"):
                    try:
                        g_do, g_dc, ordered = capacity.gamma_dropout_vs_dropconnect(w, args.p, args.N, args.eta)
                        results["comparison"] = {"gamma_dropout": g_do, "gamma_dropconnect": g_dc,
                                                 "ordered": ordered}
                    except DomainError as exc:
                        flags.append(f"comparison_undefined:{exc}")
            results["vc_dropout"] = capacity.vc_bound_dropout(w, args.p)
            results["vc_dropconnect"] = capacity.vc_bound_dropconnect(w, args.p)
    if not results:
        raise CliError("vc: choose --dense/--cnn/--dropout/--dropconnect or --cells")
    rows = [{"key": k, "value": v} for k, v in results.items() if not isinstance(v, (dict, capacity.BoundReport))]
    _finish(args, "vc", config, results, rows=rows, flags=flags)


def cmd_counts(args):
    params = counting.CountingParams(args.n, args.kappa)
    reports = counting.count_reports(params, brute_force=args.brute_force, cap=args.cap)
    config = {"n": args.n, "kappa": args.kappa, "brute_force": args.brute_force, "cap": args.cap}
    results = {"counts": reports}
    if any(r.statistic == "correlation" and r.oracle_value is not None for r in reports):
        results["correlation_oracle_rule"] = counting.CORRELATION_EXCLUSION_NOTE
    if args.w is not None:
        lhs, rhs, holds = counting.haralick_vs_vc_comparison(params, args.w)
        results["vc_comparison"] = {"feature_space": lhs, "vc_scale": rhs, "holds": holds, "w": args.w}
    flags = [f"{r.statistic}:{f}" for r in reports for f in r.flags]
    rows = [{"statistic": r.statistic, "formula_value": r.formula_value, "oracle_value": r.oracle_value,
             "agrees": r.agrees, "flags": r.flags} for r in reports]
    _finish(args, "counts", config, results, rows=rows, flags=flags)


def cmd_report(args):
    flags = []
    counts = counting.count_reports(counting.CountingParams(2, 2), brute_force=True)
    flags += [f"counts:{r.statistic}:{f}" for r in counts for f in r.flags]
    table = geometry.table3_report([("MNIST", 9.96, 60000), ("CIFAR-10", 15.9, 50000)])
    geo = [geometry.geometry_report(n, p, trials=args.trials, seed=args.seed) for n in (1, 3, 10) for p in (1, 2, 3, 5)]
    flags += [f"geometry:n={g.n},p={g.p}:{f}" for g in geo for f in g.flags]
    gammas = []
    for w in (10, 100, 1000):
        for i in range(10):
            p = i / 10
            entry = {"w": w, "p": p, "vc_dropout": capacity.vc_bound_dropout(w, p),
                     "vc_dropconnect": capacity.vc_bound_dropconnect(w, p)}
            try:
                entry.update(zip(("gamma_dropout", "gamma_dropconnect", "ordered"),
                                 capacity.gamma_dropout_vs_dropconnect(w, p, 10**6, 0.05)))
            except DomainError:
                flags.append(f"vc:w={w},p={p}:gamma_undefined")
            gammas.append(entry)
    idim = {p: fixture_estimate(p, 50, 2000, IdimConfig(), args.seed) for p in (1, 2, 5, 10)}
    results = {
        "counts_n2_k2": counts,
        "table3": table,
        "order_statistics": geo,
        "dropout_vs_dropconnect": gammas,
        "excess_error_h100_N10000_eta005": capacity.excess_error_bound(100, 10000, 0.05),
        "rc_n2": [{"p": 10.0**e, "paper": geometry.relative_contrast(2, 10.0**e, "paper"),
                   "corrected": geometry.relative_contrast(2, 10.0**e, "corrected")} for e in range(1, 9)],
        "idim_cube_fixtures": idim,
    }
    _finish(args, "report", {"trials": args.trials, "seed": args.seed}, results, flags=flags)


def _add_common(p, default_format="json"):
    p.add_argument("--output", "-o", help="write here instead of stdout")
    p.add_argument("--format", choices=("json", "csv"), default=default_format)


def _add_feature_opts(p):
    p.add_argument("--n", type=int, default=28, help="window side (default 28)")
    p.add_argument("--stride", type=int, default=1)
    p.add_argument("--kappa", type=int, default=256, help="gray levels (default 256)")
    p.add_argument("--offsets", default=format_offsets(FeatureConfig().offsets),
                   help="'dr,dc;dr,dc' (suffix s = symmetric)")
    p.add_argument("--agg", choices=("avg", "concat"), default="avg")
    p.add_argument("--strict", action="store_true", help="abort on the first unreadable file")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="texdim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("features", help="Haralick feature CSV for every window")
    p.add_argument("--input", "-i", required=True)
    p.add_argument("--dataset", help="dataset id column (default: input name)")
    _add_feature_opts(p)
    _add_common(p, "csv")
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("idim", help="MLE intrinsic dimension")
    p.add_argument("--input", "-i", help="point-cloud CSV, or images (PGM/PNG/IDX file or directory)")
    p.add_argument("--fixture", action="append", help="synthetic cube:P:D:N (repeatable)")
    p.add_argument("--features", action="store_true", help="also estimate on texture features of image input")
    p.add_argument("--kmin", type=int, default=10)
    p.add_argument("--kmax", type=int, default=20)
    p.add_argument("--average", choices=("mean", "inverse"), default="mean")
    p.add_argument("--limit", type=int, help="random subsample size")
    p.add_argument("--seed", type=int, default=0)
    _add_feature_opts(p)
    _add_common(p)
    p.set_defaults(func=cmd_idim)

    p = sub.add_parser("geometry", help="nearest/farthest distances and relative contrast")
    p.add_argument("--table3", action="store_true")
    p.add_argument("--mnist-n", type=int)
    p.add_argument("--cifar-n", type=int)
    p.add_argument("--det-n", type=int)
    p.add_argument("--dataset", action="append", help="NAME:P:N (repeatable)")
    p.add_argument("-n", "--n", type=int, help="sample count")
    p.add_argument("-p", type=float, help="dimension")
    p.add_argument("--trials", type=int, default=0, help="Monte Carlo trials (0 = analytic only)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rc-sweep", type=int, metavar="N", help="relative contrast for p = 1e1..1e8")
    _add_common(p)
    p.set_defaults(func=cmd_geometry)

    p = sub.add_parser("vc", help="VC-dimension scales and excess-error bounds")
    g = p.add_mutually_exclusive_group()
    for v in capacity.VARIANTS:
        g.add_argument(f"--{v}", dest="variant", action="store_const", const=v)
    p.add_argument("-w", type=int, help="adjustable parameter count")
    p.add_argument("--layer-sizes", help="comma separated, e.g. 784,500,10")
    p.add_argument("-p", type=float, default=0.0, help="drop probability")
    p.add_argument("-N", type=int, help="training samples")
    p.add_argument("--eta", type=float, default=0.05)
    p.add_argument("--maps", type=int)
    p.add_argument("--kernel", type=int)
    p.add_argument("--subsample", type=int)
    p.add_argument("--layers", type=int)
    p.add_argument("--cells", type=int, nargs=2, metavar=("P", "D"))
    _add_common(p)
    p.set_defaults(func=cmd_vc, variant=None)

    p = sub.add_parser("counts", help="GLCM feature-space cardinalities")
    p.add_argument("-n", "--n", type=int, required=True)
    p.add_argument("-k", "--kappa", type=int, required=True)
    p.add_argument("--brute-force", action="store_true")
    p.add_argument("--cap", type=int, default=counting.DEFAULT_ENUMERATION_CAP)
    p.add_argument("-w", type=int, help="compare n^2 k^2 + n^4 with w^4")
    _add_common(p)
    p.set_defaults(func=cmd_counts)

    p = sub.add_parser("report", help="bundle of all checks")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    _add_common(p)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        args.func(args)
    except (DomainError, ResourceError, CliError) as exc:
        sys.stderr.write(json.dumps({"error": {"type": type(exc).__name__, "message": str(exc)}}) + "\n")
        return 2
    except Exception as exc:  # noqa: BLE001 - every failure gets a machine-readable record
        sys.stderr.write(json.dumps({"error": {"type": type(exc).__name__, "message": str(exc)}}) + "\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
