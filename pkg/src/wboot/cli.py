"""Command-line entry point.

Exit status: 0 on success, 2 on a usage or configuration error, 1 on a
runtime failure. Values in ``--config file.json`` override command-line flags.
"""

from __future__ import annotations

import argparse
import json
import sys

import jsonschema

from . import experiments as ex
from .io import write_table_csv
from .validation import validate_config, validate_report


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config; its values override flags")
    p.add_argument("--seed", type=int, help="master seed (default 0)")
    p.add_argument("--scheme", choices=["exp-bayesian", "two-point", "efron"], help="weight scheme")
    p.add_argument("--a", type=float, help="two-point lower support value")
    p.add_argument("--b", type=float, help="two-point upper support value")
    p.add_argument("--m", type=int, help="efron resample size (default n)")
    p.add_argument("--out", help="output path")


def _add_data(p: argparse.ArgumentParser) -> None:
    p.add_argument("--data", help="single-column CSV of observations")
    p.add_argument("--header", action="store_true", default=None, help="skip the first CSV row")
    p.add_argument("--alpha", type=float, help="1 - nominal level (default 0.05)")
    p.add_argument("--boot", type=int, dest="n_boot", help="bootstrap replicates N (default 999)")
    p.add_argument("--summary", help="also write the JSON summary here")


def _add_kde(p: argparse.ArgumentParser) -> None:
    p.add_argument("--kernel", choices=["epanechnikov", "triangular", "uniform", "biweight"])
    p.add_argument("--h", type=float, help="fixed bandwidth (default rule n^-1/5)")
    p.add_argument("--bandwidth-c", type=float, help="c in h = c n^-gamma")
    p.add_argument("--bandwidth-gamma", type=float, help="gamma in h = c n^-gamma")


def _add_mc(p: argparse.ArgumentParser, multi_n: bool = True) -> None:
    if multi_n:
        p.add_argument("--n", type=_int_list, dest="n_grid", help="comma-separated sample sizes")
    else:
        p.add_argument("--n", type=int, help="sample size")
    p.add_argument("--reps", type=int, help="Monte Carlo replicates per n")
    p.add_argument("--dist", dest="distribution", choices=sorted(ex.DISTRIBUTIONS), help="data distribution F")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wboot", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("band", help="bootstrap confidence band for the CDF of --data")
    _add_common(p)
    _add_data(p)

    p = sub.add_parser("kde-band", help="bootstrap band for the kernel density estimate of --data")
    _add_common(p)
    _add_data(p)
    _add_kde(p)
    p.add_argument("--grid-points", type=int, help="evaluation grid size (default 201)")
    p.add_argument("--kde-out", help="CSV (x, f, f_star, gamma_star) for one bootstrap draw")

    p = sub.add_parser("coverage", help="Monte Carlo coverage of the CDF band")
    _add_common(p)
    _add_mc(p, multi_n=False)
    p.add_argument("--alpha", type=float)
    p.add_argument("--boot", type=int, dest="n_boot")

    p = sub.add_parser("rates", help="law of sup|alpha*_n| against the Kolmogorov law")
    _add_common(p)
    _add_mc(p)

    p = sub.add_parser("kiefer-rates", help="partial-sum statistic against Kiefer fields")
    _add_common(p)
    _add_mc(p)
    p.add_argument("--kiefer-grid", type=int, help="cap on Kiefer u-grid intervals (default 128)")
    p.add_argument("--no-sheet-reference", dest="sheet_reference", action="store_false", default=None)

    p = sub.add_parser("kde-rates", help="law of sup|gamma*_n| against the Kolmogorov law")
    _add_common(p)
    _add_mc(p)
    _add_kde(p)
    p.add_argument("--smoothed-bridge-reference", action="store_true", default=None)

    p = sub.add_parser("simulate", help="raw per-replicate statistics as CSV (n, rep, value)")
    _add_common(p)
    _add_mc(p)
    _add_kde(p)
    p.add_argument("--stat", dest="statistic", choices=list(ex.STATISTICS))
    return parser


def _config_from_args(args: argparse.Namespace) -> ex.ExperimentConfig:
    flags = {k: v for k, v in vars(args).items() if v is not None}
    d: dict = {"experiment": flags.pop("command")}
    scheme = {"kind": flags.pop("scheme", "exp-bayesian")}
    for key in ("a", "b", "m"):
        if key in flags:
            scheme[key] = flags.pop(key)
    d["scheme"] = scheme
    bw = {}
    if "h" in flags:
        bw["h"] = flags.pop("h")
    if "bandwidth_c" in flags:
        bw["c"] = flags.pop("bandwidth_c")
    if "bandwidth_gamma" in flags:
        bw["gamma"] = flags.pop("bandwidth_gamma")
    if bw:
        d["bandwidth"] = bw
    config_path = flags.pop("config", None)
    flags.pop("kde_out", None)
    d.update(flags)
    if config_path:
        try:
            with open(config_path) as fh:
                file_cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ex.ConfigError(f"cannot read config {config_path}: {exc}") from exc
        if not isinstance(file_cfg, dict):
            raise ex.ConfigError("config file must hold a JSON object")
        if file_cfg.get("experiment", d["experiment"]) != d["experiment"]:
            raise ex.ConfigError(f"config is for {file_cfg['experiment']!r}, not {d['experiment']!r}")
        d.update(file_cfg)
    try:
        validate_config(d)
    except jsonschema.ValidationError as exc:
        raise ex.ConfigError(f"config: {exc.message}") from exc
    return ex.ExperimentConfig.from_dict(d)


def _emit_report(report: dict, path: str | None) -> None:
    validate_report(report)
    text = ex.dump_report(report)
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _run(args: argparse.Namespace) -> None:
    cfg = _config_from_args(args)
    kind = cfg.experiment
    if kind in ex.RUNNERS:
        _emit_report(ex.RUNNERS[kind](cfg), cfg.out)
    elif kind == "band":
        report, table = ex.run_band(cfg)
        if cfg.out:
            write_table_csv(cfg.out, ("t", "lower", "fn", "upper"), table)
        _emit_summary(report, cfg.summary)
    elif kind == "kde-band":
        report, table, kde_rows = ex.run_kde_band(cfg)
        if cfg.out:
            write_table_csv(cfg.out, ("x", "lower", "upper", "f"), table)
        if getattr(args, "kde_out", None):
            write_table_csv(args.kde_out, ("x", "f", "f_star", "gamma_star"), kde_rows)
        _emit_summary(report, cfg.summary)
    elif kind == "simulate":
        rows = ex.simulate(cfg)
        if cfg.out:
            write_table_csv(cfg.out, ("n", "rep", "value"), rows)
        else:
            sys.stdout.write("n,rep,value\n")
            sys.stdout.writelines(f"{n},{r},{v!r}\n" for n, r, v in rows)


def _emit_summary(report: dict, path: str | None) -> None:
    validate_report(report)
    sys.stdout.write(ex.dump_report(report))
    if path:
        with open(path, "w") as fh:
            fh.write(ex.dump_report(report))


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        _run(args)
    except ex.ConfigError as exc:
        print(f"wboot {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"wboot {args.command}: runtime error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
