"""Command-line interface.

Subcommands: simulate, fit, detect, bootstrap, simstudy. Input series come
from CSV files with a header row; the value column is selected by name and
blank cells are treated as missing. All stochastic commands require an
explicit --seed. Exit codes: 0 success, 2 usage error, 3 data error,
4 estimation did not converge. ``detect`` encodes its verdict in the exit
code: 0 when misreporting evidence is found, 1 when not.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .arma import ArmaParams
from .bootstrap import parametric_bootstrap
from .detect import default_max_lag, log_acf_regression, sample_acf
from .errors import DataError, InvalidParamsError, MisreportError
from .model import EstimateOptions, MisreportModel, estimate, simulate_observed
from .series import Series
from .simstudy import GridSpec, run_grid, write_metrics_csv, write_records_csv

EXIT_OK = 0
EXIT_NO_DETECTION = 1
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NOCONV = 4


# ---------------------------------------------------------------------------
# serialization helpers

def read_series_csv(path: str | Path, column: str, index_column: str | None = None) -> Series:
    """Read one series from a CSV file with a mandatory header row.

    Blank cells become missing values; anything else must parse as a float
    (errors report the offending line number).
    """
    path = Path(path)
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise DataError(f"cannot open {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: file is empty (a header row is required)") from None
        header = [h.strip() for h in header]
        if column not in header:
            raise DataError(f"{path}: no column named {column!r}; available: {header}")
        value_idx = header.index(column)
        index_idx = None
        if index_column is not None:
            if index_column not in header:
                raise DataError(f"{path}: no column named {index_column!r}; available: {header}")
            index_idx = header.index(index_column)
        values: list[float] = []
        labels: list[str] = []
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if value_idx >= len(row):
                raise DataError(f"{path}:{line_no}: row has no {column!r} cell")
            cell = row[value_idx].strip()
            if cell == "":
                values.append(math.nan)
            else:
                try:
                    values.append(float(cell))
                except ValueError:
                    raise DataError(
                        f"{path}:{line_no}: cannot parse {cell!r} as a number"
                    ) from None
            if index_idx is not None:
                labels.append(row[index_idx].strip() if index_idx < len(row) else "")
        if not values:
            raise DataError(f"{path}: no data rows found")
        index = np.array(labels) if index_idx is not None else None
        return Series(np.array(values), index)


def _jsonable(obj):
    """Recursively convert to JSON-safe values; non-finite floats become null."""
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if math.isfinite(f) else None
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def write_json(report: dict, path: str | Path | None) -> None:
    text = json.dumps(_jsonable(report), indent=2, allow_nan=False) + "\n"
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _index_list(series: Series) -> list:
    return [x.item() if isinstance(x, np.generic) else x for x in series.index]


# ---------------------------------------------------------------------------
# subcommands

def cmd_simulate(args) -> int:
    params = ArmaParams(
        alpha=tuple(args.alpha), theta=tuple(args.theta),
        mu_eps=args.mu_eps, sigma2_eps=args.sigma2_eps,
    )
    model = MisreportModel(arma=params, q=args.q, omega=args.omega)
    sample = simulate_observed(model, args.n, args.seed, burn_in=args.burn_in)
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        if args.with_latent:
            writer.writerow(["t", "y", "x", "z"])
            for t in range(args.n):
                writer.writerow([t, repr(float(sample.y.values[t])),
                                 repr(float(sample.x.values[t])), int(sample.z[t])])
        else:
            writer.writerow(["t", "y"])
            for t in range(args.n):
                writer.writerow([t, repr(float(sample.y.values[t]))])
    return EXIT_OK


def cmd_fit(args) -> int:
    series = read_series_csv(args.input, args.column, args.index_column)
    options = EstimateOptions(
        direction=args.direction, tolerance=args.tolerance,
        max_iterations=args.max_iterations, seed=args.seed,
    )
    result = estimate(series, args.p, args.r, options=options)
    est = result.model
    report = {
        "command": "fit",
        "input": str(args.input),
        "column": args.column,
        "orders": {"p": args.p, "r": args.r},
        "options": {
            "direction": options.direction,
            "tolerance": options.tolerance,
            "max_iterations": options.max_iterations,
            "seed": options.seed,
        },
        "estimates": {
            "alpha": list(est.arma.alpha),
            "theta": list(est.arma.theta),
            "mu_eps": est.arma.mu_eps,
            "sigma2_eps": est.arma.sigma2_eps,
            "q": est.q,
            "omega": est.omega,
            "process_mean": result.arma_fit.process_mean,
        },
        "converged": result.converged,
        "iterations": result.iterations,
        "flags": list(result.flags),
        "trace": [
            {
                "iteration": rec.iteration,
                "q": rec.q,
                "omega": rec.omega,
                "alpha": list(rec.alpha),
                "theta": list(rec.theta),
                "distance": rec.distance,
            }
            for rec in result.trace
        ],
        "z_hat": [int(z) for z in result.z_hat],
        "posterior": list(result.responsibilities.posterior),
        "x_hat": list(result.x_hat.values),
        "index": _index_list(series),
        "latent_fit": {
            "loglik": result.arma_fit.loglik,
            "aic": result.arma_fit.aic,
            "converged": result.arma_fit.converged,
        },
    }
    write_json(report, args.out)
    if args.plot_data:
        with open(args.plot_data, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t", "observed", "reconstructed"])
            for label, obs, rec in zip(report["index"], series.values, result.x_hat.values):
                writer.writerow([
                    label,
                    "" if math.isnan(obs) else repr(float(obs)),
                    "" if math.isnan(rec) else repr(float(rec)),
                ])
    return EXIT_OK if result.converged else EXIT_NOCONV


def cmd_detect(args) -> int:
    series = read_series_csv(args.input, args.column, args.index_column)
    max_lag = args.max_lag if args.max_lag is not None else default_max_lag(len(series))
    acf = sample_acf(series, max_lag)
    report_obj = log_acf_regression(acf, alpha_level=args.alpha_level)
    report = {
        "command": "detect",
        "input": str(args.input),
        "column": args.column,
        "max_lag": max_lag,
        "alpha_level": args.alpha_level,
        "acf": {"lags": list(acf.lags), "rho": list(acf.rho), "n": acf.n},
        "regression": {
            "intercept": report_obj.intercept,
            "slope": report_obj.slope,
            "intercept_se": report_obj.intercept_se,
            "slope_se": report_obj.slope_se,
            "p_value": report_obj.p_value,
            "lags_used": list(report_obj.lags_used),
            "verdict": report_obj.verdict,
            "applicable": report_obj.applicable,
            "message": report_obj.message,
        },
    }
    write_json(report, args.out)
    if args.acf_csv:
        with open(args.acf_csv, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["k", "rho", "log_rho", "fitted", "used"])
            for k in range(1, max_lag + 1):
                rho = acf.rho[k]
                writer.writerow([
                    k,
                    repr(float(rho)),
                    repr(float(np.log(rho))) if rho > 0 else "",
                    repr(float(report_obj.intercept + report_obj.slope * k)),
                    int(k in report_obj.lags_used),
                ])
    return EXIT_OK if report_obj.verdict else EXIT_NO_DETECTION


def cmd_bootstrap(args) -> int:
    series = read_series_csv(args.input, args.column, args.index_column)
    options = EstimateOptions(
        direction=args.direction, tolerance=args.tolerance,
        max_iterations=args.max_iterations, seed=args.fit_seed,
    )
    result = estimate(series, args.p, args.r, options=options)
    if not result.converged:
        print("estimation on the input series did not converge; not bootstrapping",
              file=sys.stderr)
        return EXIT_NOCONV
    summary = parametric_bootstrap(
        result, n=len(series), B=args.B, seed=args.seed, level=args.level,
        n_jobs=args.threads,
    )
    report = {
        "command": "bootstrap",
        "input": str(args.input),
        "column": args.column,
        "orders": {"p": args.p, "r": args.r},
        "B": args.B,
        "level": args.level,
        "seed": args.seed,
        "replicates_requested": summary.replicates_requested,
        "replicates_converged": summary.replicates_converged,
        "flags": list(summary.flags),
        "parameters": [
            {
                "name": rec.name,
                "point": rec.point,
                "boot_mean": rec.boot_mean,
                "boot_se": rec.boot_se,
                "ci_low": rec.ci_low,
                "ci_high": rec.ci_high,
            }
            for rec in summary.records
        ],
    }
    write_json(report, args.out)
    return EXIT_OK


def _parse_structure(text: str) -> tuple[int, int]:
    try:
        p_str, r_str = text.split(",")
        return int(p_str), int(r_str)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"structure must look like 'p,r' (e.g. '1,0'), got {text!r}"
        ) from None


def cmd_simstudy(args) -> int:
    spec = GridSpec(
        structures=tuple(args.structures),
        alpha_values=tuple(args.alpha_values),
        theta_values=tuple(args.theta_values),
        q_values=tuple(args.q_values),
        omega_values=tuple(args.omega_values),
        n=args.n,
        replicates=args.replicates,
        B=args.B,
        seed=args.seed,
        mu_eps=args.mu_eps,
        sigma2_eps=args.sigma2_eps,
        level=args.level,
    )
    result = run_grid(spec, n_jobs=args.threads)
    write_metrics_csv(result.rows, args.out)
    if args.records:
        write_records_csv(result.records, args.records)
    for line in result.skipped:
        print(f"skipped: {line}", file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="misreport",
        description="Fit, detect and correct random misreporting in continuous time series.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="simulate an observed (misreported) series to CSV")
    sim.add_argument("--n", type=int, required=True, help="series length")
    sim.add_argument("--alpha", type=float, nargs="*", default=[], help="AR coefficients")
    sim.add_argument("--theta", type=float, nargs="*", default=[], help="MA coefficients")
    sim.add_argument("--mu-eps", type=float, default=0.0, help="innovation mean")
    sim.add_argument("--sigma2-eps", type=float, default=1.0, help="innovation variance")
    sim.add_argument("--q", type=float, required=True, help="misreporting intensity")
    sim.add_argument("--omega", type=float, required=True, help="misreporting frequency")
    sim.add_argument("--seed", type=int, required=True, help="RNG seed (mandatory)")
    sim.add_argument("--burn-in", type=int, default=None)
    sim.add_argument("--with-latent", action="store_true", help="also write x and z columns")
    sim.add_argument("--out", required=True, help="output CSV path")
    sim.set_defaults(func=cmd_simulate)

    fit = sub.add_parser("fit", help="fit the misreporting model to a CSV series")
    fit.add_argument("--input", required=True)
    fit.add_argument("--column", required=True, help="value column name")
    fit.add_argument("--index-column", default=None)
    fit.add_argument("--p", type=int, required=True, help="AR order")
    fit.add_argument("--r", type=int, required=True, help="MA order")
    fit.add_argument("--direction", choices=["under", "over", "auto"], default="under")
    fit.add_argument("--tolerance", type=float, default=1e-6)
    fit.add_argument("--max-iterations", type=int, default=100)
    fit.add_argument("--seed", type=int, default=0, help="seed for mixture restarts")
    fit.add_argument("--out", required=True, help="output JSON path ('-' for stdout)")
    fit.add_argument("--plot-data", default=None,
                     help="also write a (t, observed, reconstructed) CSV")
    fit.set_defaults(func=cmd_fit)

    det = sub.add_parser(
        "detect",
        help="log-ACF regression diagnostic (exit 0: evidence found, 1: none)",
    )
    det.add_argument("--input", required=True)
    det.add_argument("--column", required=True)
    det.add_argument("--index-column", default=None)
    det.add_argument("--max-lag", type=int, default=None)
    det.add_argument("--alpha-level", type=float, default=0.05)
    det.add_argument("--out", required=True, help="output JSON path ('-' for stdout)")
    det.add_argument("--acf-csv", default=None,
                     help="also write (k, rho, log_rho, fitted, used) points")
    det.set_defaults(func=cmd_detect)

    boot = sub.add_parser("bootstrap", help="parametric bootstrap around a fitted model")
    boot.add_argument("--input", required=True)
    boot.add_argument("--column", required=True)
    boot.add_argument("--index-column", default=None)
    boot.add_argument("--p", type=int, required=True)
    boot.add_argument("--r", type=int, required=True)
    boot.add_argument("--direction", choices=["under", "over", "auto"], default="under")
    boot.add_argument("--tolerance", type=float, default=1e-6)
    boot.add_argument("--max-iterations", type=int, default=100)
    boot.add_argument("--fit-seed", type=int, default=0, help="seed for mixture restarts")
    boot.add_argument("--B", type=int, default=500, help="bootstrap replicates")
    boot.add_argument("--level", type=float, default=0.95)
    boot.add_argument("--seed", type=int, required=True, help="bootstrap master seed (mandatory)")
    boot.add_argument("--threads", type=int, default=1)
    boot.add_argument("--out", required=True)
    boot.set_defaults(func=cmd_bootstrap)

    study = sub.add_parser(
        "simstudy",
        help="Monte Carlo study (misreport vs standard estimator); the default "
             "grid is desk-scale but still takes hours, shrink it for smoke tests",
    )
    study.add_argument("--structures", type=_parse_structure, nargs="+",
                       default=[(1, 0), (0, 1), (1, 1)], metavar="P,R")
    study.add_argument("--alpha-values", type=float, nargs="+", default=[0.3, 0.5, 0.7])
    study.add_argument("--theta-values", type=float, nargs="+", default=[0.3, 0.5, 0.7])
    study.add_argument("--q-values", type=float, nargs="+", default=[0.3, 0.5, 0.7])
    study.add_argument("--omega-values", type=float, nargs="+", default=[0.3, 0.5, 0.7])
    study.add_argument("--n", type=int, default=1000)
    study.add_argument("--replicates", type=int, default=50)
    study.add_argument("--B", type=int, default=100)
    study.add_argument("--mu-eps", type=float, default=20.0)
    study.add_argument("--sigma2-eps", type=float, default=1.0)
    study.add_argument("--level", type=float, default=0.95)
    study.add_argument("--seed", type=int, required=True, help="master seed (mandatory)")
    study.add_argument("--threads", type=int, default=1)
    study.add_argument("--out", required=True, help="metrics CSV path")
    study.add_argument("--records", default=None, help="per-replicate records CSV path")
    study.set_defaults(func=cmd_simstudy)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except InvalidParamsError as exc:
        print(f"invalid parameters: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MisreportError as exc:
        print(f"estimation failed: {exc}", file=sys.stderr)
        return EXIT_NOCONV
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
