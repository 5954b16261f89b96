"""Command line experiment runner.

Four subcommands cover the study workflow:

  rate                strong-error table over levels k plus a fitted
                      convergence rate (rate.csv, rate.json)
  moments             E|X_T|**p across horizons (moments.csv)
  compare             error-versus-work curves for the adaptive scheme
                      and the fixed-step baseline (compare.csv)
  verify-assumptions  grid sweep of the dissipativity and one-sided
                      Lipschitz margins (assumptions.json)

Data goes to files under --out; progress and failure counts go to
standard error.  All floats are written with round-trip precision, so a
rerun with identical flags and seed reproduces every output byte.

Seed layout: each level k draws paths from the block seed + k * 2**32,
each horizon index shifts by 2**40 and the baseline scheme by 2**50, so
enlarging the level range or horizon list never perturbs existing cells.
"""

import argparse
import csv
import json
import math
import os
import random
import sys
from dataclasses import dataclass

from .analysis import (SEED_STRIDE_K, SEED_STRIDE_T, compare_schemes,
                       fit_convergence_rate)
from .errors import Error, EstimationError, InputError
from .model import check_dissipativity, check_one_sided_lipschitz, get_model
from .montecarlo import estimate_moment, estimate_mse
from .scheme import SchemeConfig

__all__ = ["ExperimentConfig", "run_experiment", "main"]


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment description, one per CLI invocation."""

    kind: str
    model: str
    k_min: int = 1
    k_max: int = 5
    n_paths: int = 10_000
    t_values: tuple = (1.0,)
    p_values: tuple = (2.0,)
    h0: float = 1.0
    l0: float = 2.0
    seed: int = 0
    out_dir: str = "."
    threads: int = 1
    grid: str = "-50:50:10000"

    def __post_init__(self):
        if self.kind not in ("rate", "moments", "compare",
                             "verify-assumptions"):
            raise InputError(f"unknown experiment kind {self.kind!r}")
        if self.k_min < 1 or self.k_max < self.k_min:
            raise InputError(
                f"invalid level range: need 1 <= k-min <= k-max, got "
                f"k-min={self.k_min} k-max={self.k_max}")
        if self.n_paths < 2:
            raise InputError(f"n_paths must be >= 2, got {self.n_paths}")
        for t_end in self.t_values:
            if not t_end > 0.0:
                raise InputError(f"T must be > 0, got {t_end}")
        if self.threads < 1:
            raise InputError(f"threads must be >= 1, got {self.threads}")


def _fmt(value):
    """Round-trip text for one CSV cell."""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


def _parse_grid(text):
    parts = text.split(":")
    if len(parts) != 3:
        raise InputError(
            f"grid must look like lo:hi:n, got {text!r}")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise InputError(f"grid must look like lo:hi:n, got {text!r}") from None
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi and n >= 2):
        raise InputError(
            f"grid needs finite lo < hi and n >= 2, got {text!r}")
    return lo, hi, n


def _grid_points(lo, hi, n):
    span = hi - lo
    return [lo + span * (i / (n - 1)) for i in range(n)]


def _run_rate(config, model):
    rows = []
    for k in range(config.k_min, config.k_max + 1):
        row = estimate_mse(model, config.h0, config.l0, k, config.n_paths,
                           config.t_values[0],
                           config.seed + k * SEED_STRIDE_K,
                           n_jobs=config.threads)
        rows.append(row)
        print(f"[rate] k={k} log2_mse={row.log2_mse:.4f} "
              f"failures={row.n_failures}", file=sys.stderr)
    fit = fit_convergence_rate(rows)
    _write_csv(
        os.path.join(config.out_dir, "rate.csv"),
        ["k", "delta", "n_paths", "mse", "log2_mse", "std_error",
         "mean_fine_steps", "mean_coarse_steps"],
        [(r.k, r.delta, r.n_paths, r.mse, r.log2_mse, r.std_error,
          r.mean_fine_steps, r.mean_coarse_steps) for r in rows])
    summary = {
        "slope": fit.slope,
        "intercept": fit.intercept,
        "empirical_rate": fit.empirical_rate,
        "alpha_prime": fit.alpha_prime,
        "r_squared": fit.r_squared,
        "theoretical_rate": (1.0 + model.regularity.alpha) / 2.0,
    }
    _write_json(os.path.join(config.out_dir, "rate.json"), summary)
    print(f"[rate] empirical_rate={fit.empirical_rate:.4f} "
          f"r_squared={fit.r_squared:.4f}", file=sys.stderr)


def _run_moments(config, model):
    delta = 2.0 ** (-config.k_min)
    out_rows = []
    for t_idx, t_end in enumerate(config.t_values):
        scheme_config = SchemeConfig(delta=delta, t_end=t_end,
                                     h0=config.h0, l0=config.l0)
        for p_idx, p in enumerate(config.p_values):
            est = estimate_moment(
                model, scheme_config, p, config.n_paths,
                config.seed + t_idx * SEED_STRIDE_T + p_idx * SEED_STRIDE_K,
                n_jobs=config.threads)
            out_rows.append((float(t_end), float(p), est.mean_abs_p,
                             est.std_error))
            print(f"[moments] T={t_end} p={p} mean={est.mean_abs_p:.6g} "
                  f"failures={est.n_failures}", file=sys.stderr)
    _write_csv(os.path.join(config.out_dir, "moments.csv"),
               ["T", "p", "mean_abs_p", "std_error"], out_rows)


def _run_compare(config, model):
    ks = list(range(config.k_min, config.k_max + 1))
    rows = compare_schemes(model, config.h0, config.l0, ks, config.n_paths,
                           list(config.t_values), config.seed,
                           n_jobs=config.threads)
    _write_csv(os.path.join(config.out_dir, "compare.csv"),
               ["scheme", "T", "k", "log2_NT", "log2_mse"],
               [(r.scheme, float(r.t_end), r.k, r.log2_nt, r.log2_mse)
                for r in rows])
    print(f"[compare] wrote {len(rows)} rows", file=sys.stderr)


def _run_verify_assumptions(config, model):
    lo, hi, n = _parse_grid(config.grid)
    xs = _grid_points(lo, hi, n)
    diss = check_dissipativity(model, xs)
    # Pair sample for the two-point condition: every consecutive grid pair
    # plus as many seeded random pairs, so both near-diagonal and far-apart
    # pairs are covered.
    pairs = [(xs[i], xs[i + 1]) for i in range(n - 1)]
    rng = random.Random(config.seed)
    for _ in range(n):
        pairs.append((xs[rng.randrange(n)], xs[rng.randrange(n)]))
    osl = check_one_sided_lipschitz(model, pairs)
    report = {
        "model": model.name,
        "grid": {"lo": lo, "hi": hi, "n": n},
        "dissipativity": {
            "holds": diss.holds,
            "worst_x": diss.worst_x,
            "worst_margin": diss.worst_margin,
        },
        "one_sided_lipschitz": {
            "holds": osl.holds,
            "worst_pair": list(osl.worst_pair),
            "worst_margin": osl.worst_margin,
        },
    }
    _write_json(os.path.join(config.out_dir, "assumptions.json"), report)
    print(f"[verify-assumptions] dissipativity holds={diss.holds} "
          f"one_sided_lipschitz holds={osl.holds}", file=sys.stderr)


def run_experiment(config):
    """Execute one configured experiment, writing files under out_dir."""
    model = get_model(config.model)
    os.makedirs(config.out_dir, exist_ok=True)
    if config.kind == "rate":
        _run_rate(config, model)
    elif config.kind == "moments":
        _run_moments(config, model)
    elif config.kind == "compare":
        _run_compare(config, model)
    else:
        _run_verify_assumptions(config, model)


def _add_common(parser, default_paths):
    parser.add_argument("--model", required=True,
                        help="builtin model name or path to a model JSON file")
    parser.add_argument("--paths", type=int, default=default_paths,
                        help="Monte Carlo paths per cell")
    parser.add_argument("--h0", type=float, default=1.0,
                        help="step-size scale of the adaptive rule")
    parser.add_argument("--l0", type=float, default=2.0,
                        help="state-growth exponent of the adaptive rule")
    parser.add_argument("--seed", type=int, default=0,
                        help="base seed; all cells derive from it")
    parser.add_argument("--out", default=".",
                        help="output directory (created if missing)")
    parser.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                        help="worker budget for path simulation")


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="tamsde",
        description="Adaptive tamed Milstein experiments for scalar SDEs")
    sub = parser.add_subparsers(dest="kind", required=True)

    rate = sub.add_parser("rate", help="strong-error table and fitted rate")
    _add_common(rate, default_paths=10_000)
    rate.add_argument("--k-min", type=int, default=1)
    rate.add_argument("--k-max", type=int, default=5)
    rate.add_argument("--T", type=float, default=1.0, help="time horizon")

    moments = sub.add_parser("moments", help="E|X_T|**p across horizons")
    _add_common(moments, default_paths=1_000)
    moments.add_argument("--k", type=int, default=4,
                         help="level fixing the base step 2**-k")
    moments.add_argument("--T", type=float, nargs="+", default=[1.0],
                         help="time horizons")
    moments.add_argument("--p", type=float, nargs="+", default=[2.0],
                         help="moment orders")

    compare = sub.add_parser(
        "compare", help="error-versus-work curves for both schemes")
    _add_common(compare, default_paths=1_000)
    compare.add_argument("--k-min", type=int, default=1)
    compare.add_argument("--k-max", type=int, default=5)
    compare.add_argument("--T", type=float, nargs="+", default=[1.0],
                         help="time horizons")

    verify = sub.add_parser(
        "verify-assumptions",
        help="sweep the dissipativity and one-sided Lipschitz margins")
    verify.add_argument("--model", required=True)
    verify.add_argument("--grid", default="-50:50:10000",
                        help="state grid as lo:hi:n")
    verify.add_argument("--seed", type=int, default=0,
                        help="seed for the random pair sample")
    verify.add_argument("--out", default=".")

    return parser


def _config_from_args(args):
    if args.kind == "rate":
        return ExperimentConfig(
            kind="rate", model=args.model, k_min=args.k_min,
            k_max=args.k_max, n_paths=args.paths, t_values=(args.T,),
            h0=args.h0, l0=args.l0, seed=args.seed, out_dir=args.out,
            threads=args.threads)
    if args.kind == "moments":
        return ExperimentConfig(
            kind="moments", model=args.model, k_min=args.k, k_max=args.k,
            n_paths=args.paths, t_values=tuple(args.T),
            p_values=tuple(args.p), h0=args.h0, l0=args.l0, seed=args.seed,
            out_dir=args.out, threads=args.threads)
    if args.kind == "compare":
        return ExperimentConfig(
            kind="compare", model=args.model, k_min=args.k_min,
            k_max=args.k_max, n_paths=args.paths, t_values=tuple(args.T),
            h0=args.h0, l0=args.l0, seed=args.seed, out_dir=args.out,
            threads=args.threads)
    return ExperimentConfig(
        kind="verify-assumptions", model=args.model, seed=args.seed,
        out_dir=args.out, grid=args.grid)


def _fold_grid_value(argv):
    # argparse lexes "-50:50:10000" as an option flag; fold it into
    # --grid= form so a leading minus in the range survives parsing
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok == "--grid" and i + 1 < len(argv):
            out.append(f"--grid={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv=None):
    if argv is None:
        argv = sys.argv[1:]
    args = _build_parser().parse_args(_fold_grid_value(list(argv)))
    try:
        run_experiment(_config_from_args(args))
    except EstimationError as exc:
        print(f"estimation error: {exc}", file=sys.stderr)
        return 3
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Error as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
