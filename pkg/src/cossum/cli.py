"""``cossum`` command-line interface.

Exit codes: 0 success, 2 usage error, 3 input parse error, 4 solver failure,
5 solver finished without reaching its tolerance (report still written).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Optional

import numpy as np
from numpy.linalg import LinAlgError

from . import __version__
from .bessel import BesselSpec, bessel_mod
from .espira import espira1_recover, espira2_recover
from .esprit import EspritConfig, RecoveryError, esprit_recover
from .model import (EXAMPLE1, CosineSum, SampleVector, SamplingGrid, add_noise,
                    default_error_interval, evaluate, relative_errors, sample, snr_psnr)
from .oracle import PronyError, prony_solve
from .transforms import dct2, g_vector

logger = logging.getLogger("cossum")

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_SOLVER, EXIT_NOT_CONVERGED = 0, 2, 3, 4, 5
SCHEMA = 1
METHODS = ("esprit", "espira1", "espira2", "prony")

# values used when neither a flag nor the config file sets an option
DEFAULTS = {
    "method": "espira1",
    "tol": 1e-13,
    "eps": 1e-10,
    "fixed_m": None,
    "upper_l": None,
    "half_spectrum": None,
    "seed": 0,
    "error_interval": None,
    "amplitude": 10.0,
    "trials": 10,
    "methods": "esprit,espira1,espira2",
    "jobs": 1,
    "distribution": "uniform",
}


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def fmt(x: float) -> str:
    return f"{x:.17g}"


# ---------------------------------------------------------------- input/output

def load_params(path: Optional[str], preset: Optional[str]) -> CosineSum:
    if preset is not None:
        if preset != "example1":
            raise CliError(f"unknown preset {preset!r}", EXIT_USAGE)
        return EXAMPLE1
    if path is None:
        raise CliError("give --params FILE or --preset example1", EXIT_USAGE)
    try:
        with open(path) as fh:
            doc = json.load(fh)
        cs = CosineSum(doc["gamma"], doc["phi"])
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}", EXIT_PARSE) from exc
    except (ValueError, KeyError, TypeError) as exc:
        raise CliError(f"malformed parameter file {path}: {exc}", EXIT_PARSE) from exc
    try:
        cs.validate()
    except ValueError as exc:
        raise CliError(f"invalid parameters: {exc}", EXIT_USAGE) from exc
    return cs


def read_samples(path: str, K: float) -> SampleVector:
    """Parse a ``k,t,value[,...]`` CSV and check it against ``h = pi/K``."""
    try:
        fh = sys.stdin if path == "-" else open(path, newline="")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}", EXIT_PARSE) from exc
    with fh:
        rows = list(csv.reader(fh))
    if not rows or [c.strip() for c in rows[0][:3]] != ["k", "t", "value"]:
        raise CliError("CSV header must start with k,t,value", EXIT_PARSE)
    width = len(rows[0])
    ks, ts, vals = [], [], []
    for line, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != width:
            raise CliError(f"line {line}: expected {width} fields, got {len(row)}", EXIT_PARSE)
        try:
            ks.append(int(row[0]))
            ts.append(float(row[1]))
            vals.append(float(row[2]))
        except ValueError as exc:
            raise CliError(f"line {line}: {exc}", EXIT_PARSE) from exc
    if not vals:
        raise CliError("CSV has no sample rows", EXIT_PARSE)
    if ks != list(range(len(ks))):
        raise CliError("sample indices must run 0, 1, ..., N-1", EXIT_PARSE)
    if not np.all(np.isfinite(vals)):
        raise CliError("sample values must be finite", EXIT_PARSE)
    grid = SamplingGrid(len(vals), K)
    if not np.allclose(ts, grid.nodes, rtol=1e-9, atol=1e-12):
        raise CliError(f"sample times do not match the grid for K={K}", EXIT_USAGE)
    return SampleVector(np.array(vals), grid)


def write_text(text: str, path: Optional[str]) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(x) if isinstance(x, float) else x for x in row])
    return buf.getvalue()


def json_text(doc: dict) -> str:
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def load_config(path: Optional[str]) -> dict:
    """Flat JSON object mapping option names (``fixed_m``, ``tol``, ...) to values."""
    if path is None:
        return {}
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise CliError(f"cannot read config {path}: {exc}", EXIT_PARSE) from exc
    except ValueError as exc:
        raise CliError(f"malformed config {path}: {exc}", EXIT_PARSE) from exc
    if not isinstance(doc, dict) or any(isinstance(v, (dict, list)) for v in doc.values()):
        raise CliError("config must be a flat key-value object", EXIT_PARSE)
    return {k.replace("-", "_"): v for k, v in doc.items()}


def resolve(args: argparse.Namespace) -> argparse.Namespace:
    """Fill unset options from the config file, then from :data:`DEFAULTS`."""
    config = load_config(args.config)
    unknown = set(config) - set(DEFAULTS) - set(vars(args))
    if unknown:
        raise CliError(f"unknown config keys: {', '.join(sorted(unknown))}", EXIT_USAGE)
    for key in set(DEFAULTS) | set(config):
        if getattr(args, key, None) is None:
            setattr(args, key, config.get(key, DEFAULTS.get(key)))
    return args


# ---------------------------------------------------------------- recovery

def run_method(method: str, samples: SampleVector, args) -> dict:
    """Run one solver; returns sum, diagnostics, convergence and extras."""
    fixed_m = None if args.fixed_m is None else int(args.fixed_m)
    extra: dict = {}
    if method == "esprit":
        L = None if args.upper_l is None else int(args.upper_l)
        res = esprit_recover(samples, EspritConfig(L, float(args.eps), fixed_m),
                             full_output=True)
        return {"sum": res.sum, "diagnostics": res.diagnostics, "converged": True, "extra": extra}
    if method == "espira1":
        res = espira1_recover(samples, float(args.tol), fixed_m, half=args.half_spectrum,
                              full_output=True)
        extra["grid_frequencies"] = [
            {"k": e.k, "phi": e.phi, "gamma": e.gamma} for e in res.grid_report.entries]
        return {"sum": res.sum, "diagnostics": res.diagnostics,
                "converged": res.converged, "extra": extra}
    if method == "espira2":
        res = espira2_recover(samples, float(args.tol), fixed_m, half=args.half_spectrum,
                              full_output=True)
        return {"sum": res.sum, "diagnostics": res.diagnostics,
                "converged": res.converged, "extra": extra}
    if method == "prony":
        if fixed_m is None:
            raise CliError("method prony needs --fixed-m", EXIT_USAGE)
        return {"sum": prony_solve(samples, fixed_m), "diagnostics": [],
                "converged": True, "extra": extra}
    raise CliError(f"unknown method {method!r}", EXIT_USAGE)


SOLVER_ERRORS = (RecoveryError, PronyError, LinAlgError, ValueError)


def _solve_or_fail(method, samples, args) -> dict:
    try:
        return run_method(method, samples, args)
    except CliError:
        raise
    except SOLVER_ERRORS as exc:
        raise CliError(f"{method} failed: {exc}", EXIT_SOLVER) from exc


def _report(method: str, out: dict, timings: dict, errors=None) -> dict:
    cs = out["sum"].sorted()
    doc = {
        "schema": SCHEMA,
        "method": method,
        "M": cs.M,
        "phi": cs.phi.tolist(),
        "gamma": cs.gamma.tolist(),
        "errors": errors,
        "converged": out["converged"],
        "timings": {k: round(v, 3) for k, v in timings.items()},
        "diagnostics": list(out["diagnostics"]),
    }
    doc.update(out["extra"])
    return doc


def _ms(t0: float) -> float:
    return (time.perf_counter() - t0) * 1e3


# ---------------------------------------------------------------- commands

def cmd_generate(args) -> int:
    cs = load_params(args.params, args.preset)
    grid = SamplingGrid(args.N, args.K)
    clean = sample(cs, grid)
    k = np.arange(grid.N)
    if args.noise is None:
        rows = zip(k.tolist(), grid.nodes.tolist(), clean.values.tolist())
        write_text(csv_text(["k", "t", "value"], rows), args.out)
    else:
        noisy = add_noise(clean, args.noise, int(args.seed), args.distribution)
        rows = zip(k.tolist(), grid.nodes.tolist(), noisy.values.tolist(),
                   clean.values.tolist())
        write_text(csv_text(["k", "t", "value", "clean"], rows), args.out)
    return EXIT_OK


def cmd_recover(args) -> int:
    t0 = time.perf_counter()
    samples = read_samples(args.samples, args.K)
    truth = load_params(args.truth, None) if args.truth else None
    timings = {"parse_ms": _ms(t0)}
    t0 = time.perf_counter()
    out = _solve_or_fail(args.method, samples, args)
    timings["solve_ms"] = _ms(t0)
    errors = None
    if truth is not None:
        t0 = time.perf_counter()
        end = args.error_interval or default_error_interval(samples.grid)
        errors = relative_errors(truth, out["sum"], float(end)).as_dict()
        timings["errors_ms"] = _ms(t0)
    doc = _report(args.method, out, timings, errors)
    doc["grid"] = {"N": samples.grid.N, "K": samples.grid.K}
    write_text(json_text(doc), args.out)
    return EXIT_OK if out["converged"] else EXIT_NOT_CONVERGED


def _bench_trial(task) -> list:
    truth, N, K, amplitude, seed, methods, args, interval = task
    grid = SamplingGrid(N, K)
    clean = sample(truth, grid)
    noisy = add_noise(clean, amplitude, seed, args.distribution)
    try:
        snr, psnr = snr_psnr(clean, noisy)
    except ValueError:
        snr = psnr = math.inf
    rows = []
    for method in methods:
        try:
            out = run_method(method, noisy, args)
            e = relative_errors(truth, out["sum"], interval)
            rows.append({"seed": seed, "method": method, "e_f": e.e_f, "e_phi": e.e_phi,
                         "e_gamma": e.e_gamma, "snr": snr, "psnr": psnr, "status": "ok"})
        except SOLVER_ERRORS as exc:
            rows.append({"seed": seed, "method": method, "e_f": None, "e_phi": None,
                         "e_gamma": None, "snr": snr, "psnr": psnr,
                         "status": f"error: {exc}"})
    return rows


def bench_rows(truth, N, K, amplitude, seeds, methods, args, interval) -> list:
    tasks = [(truth, N, K, amplitude, s, methods, args, interval) for s in seeds]
    if int(args.jobs) > 1:
        with ProcessPoolExecutor(max_workers=int(args.jobs)) as pool:
            results = list(pool.map(_bench_trial, tasks))
    else:
        results = [_bench_trial(t) for t in tasks]
    return [row for rows in results for row in rows]


def summarize(rows: list, methods) -> list:
    fields = ("e_f", "e_phi", "e_gamma", "snr", "psnr")
    out = []
    for method in methods:
        mine = [r for r in rows if r["method"] == method]
        for name, fn in (("min", np.min), ("max", np.max), ("average", np.mean)):
            row = {"row": name, "seed": "", "method": method, "status": ""}
            for f in fields:
                vals = [r[f] for r in mine if r[f] is not None]
                row[f] = float(fn(vals)) if vals else None
            out.append(row)
    return out


def cmd_noise_bench(args) -> int:
    truth = load_params(args.params, args.preset)
    methods = [m.strip() for m in str(args.methods).split(",") if m.strip()]
    bad = [m for m in methods if m not in METHODS]
    if bad or not methods:
        raise CliError(f"unknown methods: {bad}", EXIT_USAGE)
    if int(args.trials) < 1:
        raise CliError("--trials must be at least 1", EXIT_USAGE)
    if args.fixed_m is None:
        args.fixed_m = truth.M
    interval = 10.0 if args.error_interval is None else float(args.error_interval)
    seeds = [int(args.seed) + i for i in range(int(args.trials))]
    rows = bench_rows(truth, args.N, args.K, args.amplitude, seeds, methods, args, interval)
    header = ["row", "seed", "method", "e_f", "e_phi", "e_gamma", "snr", "psnr", "status"]
    table = [{"row": "trial", **r} for r in rows] + summarize(rows, methods)
    lines = [["" if r[h] is None else r[h] for h in header] for r in table]
    write_text(csv_text(header, lines), args.out)
    return EXIT_OK


def cmd_bessel(args) -> int:
    if args.n % 2 == 0:
        raise CliError("order n must be odd so that the target is even", EXIT_USAGE)
    if not 1 <= args.M < args.N / 2:
        raise CliError("need 1 <= M < N/2", EXIT_USAGE)
    spec = BesselSpec(args.n, args.B)
    grid = SamplingGrid(args.N, args.K)
    if grid.nodes[-1] > spec.B:
        raise CliError("sampling grid extends beyond [0, B]", EXIT_USAGE)
    samples = SampleVector(bessel_mod(spec, grid.nodes), grid)
    args.fixed_m = args.M
    if args.half_spectrum is None:
        args.half_spectrum = False  # exact samples: keep the whole transform
    t0 = time.perf_counter()
    out = _solve_or_fail(args.method, samples, args)
    timings = {"solve_ms": _ms(t0)}
    t0 = time.perf_counter()
    t = np.arange(0.0, spec.B + args.step / 2, args.step)
    t = t[t <= spec.B]
    target = bessel_mod(spec, t)
    approx = evaluate(out["sum"], t)
    err = np.abs(approx - target)
    timings["scan_ms"] = _ms(t0)
    doc = _report(args.method, out, timings)
    doc.update({"bessel": {"n": spec.n, "B": spec.B, "N": grid.N, "K": grid.K},
                "max_error": float(err.max())})
    write_text(json_text(doc), args.out)
    if args.scan:
        rows = zip(t.tolist(), target.tolist(), approx.tolist(), err.tolist())
        write_text(csv_text(["t", "target", "approx", "error"], rows), args.scan)
    return EXIT_OK


def cmd_dct(args) -> int:
    samples = read_samples(args.samples, args.K)
    fhat = dct2(samples)
    data = g_vector(fhat, half=bool(args.half_spectrum))
    rows = []
    for k in range(samples.grid.N):
        g = fmt(data.g[k]) if k < data.count else ""
        rows.append([k, fmt(math.cos(math.pi * k / samples.grid.N)),
                     fmt(fhat.values[k]), g])
    write_text(csv_text(["k", "z", "fhat", "g"], rows), args.out)
    return EXIT_OK


# ---------------------------------------------------------------- parser

def _common(p: argparse.ArgumentParser, *, method=True) -> None:
    p.add_argument("--config", help="flat JSON file with option defaults")
    if method:
        p.add_argument("--method", choices=METHODS)
    p.add_argument("--tol", type=float, help="ESPIRA tolerance (default 1e-13)")
    p.add_argument("--eps", type=float, help="ESPRIT rank threshold (default 1e-10)")
    p.add_argument("--fixed-m", type=int, dest="fixed_m", help="known number of terms")
    p.add_argument("--upper-l", type=int, dest="upper_l", help="ESPRIT bound L")
    p.add_argument("--half-spectrum", action=argparse.BooleanOptionalAction,
                   dest="half_spectrum", default=None,
                   help="use only the first half of the DCT data")
    p.add_argument("--out", help="output file (default stdout)")


def _signal(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group()
    src.add_argument("--params", help='JSON file {"gamma": [...], "phi": [...]}')
    src.add_argument("--preset", choices=["example1"])
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--K", type=float, required=True)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cossum", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="sample a cosine sum to CSV")
    _signal(p)
    p.add_argument("--noise", type=float, help="noise amplitude; adds a clean column")
    p.add_argument("--distribution", choices=["uniform", "gaussian"])
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.add_argument("--config")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("recover", help="recover a cosine sum from a sample CSV")
    p.add_argument("samples", help="CSV with header k,t,value ('-' for stdin)")
    p.add_argument("--K", type=float, required=True)
    _common(p)
    p.add_argument("--truth", help="parameter JSON for error reporting")
    p.add_argument("--error-interval", type=float, dest="error_interval",
                   help="errors on [0, T] (default pi N / K)")
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("noise-bench", help="repeated recovery from noisy samples")
    _signal(p)
    _common(p, method=False)
    p.add_argument("--methods", help="comma-separated (default esprit,espira1,espira2)")
    p.add_argument("--amplitude", type=float, help="noise amplitude (default 10)")
    p.add_argument("--distribution", choices=["uniform", "gaussian"])
    p.add_argument("--trials", type=int, help="number of seeds (default 10)")
    p.add_argument("--seed", type=int, help="first seed (default 0)")
    p.add_argument("--jobs", type=int, help="worker processes (default 1)")
    p.add_argument("--error-interval", type=float, dest="error_interval",
                   help="errors on [0, T] (default 10)")
    p.set_defaults(func=cmd_noise_bench)

    p = sub.add_parser("bessel", help="approximate (B/t) J_n(t) by a cosine sum")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--B", type=float, default=126.0)
    p.add_argument("--M", type=int, default=25)
    p.add_argument("--N", type=int, default=400)
    p.add_argument("--K", type=float, default=10.0)
    p.add_argument("--step", type=float, default=0.001, help="error scan spacing")
    p.add_argument("--scan", help="CSV file for the error curve")
    _common(p)
    p.set_defaults(func=cmd_bessel)

    p = sub.add_parser("dct", help="dump DCT-II values and the scaled data g")
    p.add_argument("samples")
    p.add_argument("--K", type=float, required=True)
    p.add_argument("--half-spectrum", action=argparse.BooleanOptionalAction,
                   dest="half_spectrum", default=None)
    p.add_argument("--out")
    p.add_argument("--config")
    p.set_defaults(func=cmd_dct)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        resolve(args)
        return args.func(args)
    except CliError as exc:
        print(f"cossum: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
