"""Monte Carlo estimators for strong error, moments and step counts.

The strong-error probe at level k couples the base steps 2**-(k+1) and
2**-k on one Brownian path per sample and averages the squared terminal
difference.  Path m always uses seed base_seed + m, so results are
reproducible, independent of worker count, and unaffected by adding more
paths or more levels elsewhere.

All reductions go through math.fsum (exact summation), which makes every
aggregate independent of chunking and scheduling order; a worker pool can
only change how fast the answer arrives, never its bytes.

Paths that raise PathExplosion are excluded from the averages and counted;
once failures reach 1% of the requested paths the estimate is refused
(EstimationError) rather than silently biased.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .driver import NoiseSource, simulate_coupled_pair, simulate_coupled_tm_pair
from .errors import EstimationError, InputError, PathExplosion
from .scheme import DEFAULT_MAX_STEPS, simulate_path

__all__ = [
    "MseRow",
    "MomentEstimate",
    "estimate_mse",
    "estimate_tm_mse",
    "estimate_moment",
    "mean_step_count",
    "tm_step_count",
]


@dataclass(frozen=True)
class MseRow:
    """One level of the strong-error table."""

    k: int
    delta: float
    n_paths: int
    mse: float
    log2_mse: float
    std_error: float
    mean_fine_steps: float
    mean_coarse_steps: float
    n_failures: int = 0


@dataclass(frozen=True)
class MomentEstimate:
    mean_abs_p: float
    std_error: float
    n_failures: int = 0


def _check_counts(n_paths, base_seed):
    if isinstance(n_paths, bool) or not isinstance(n_paths, int) or n_paths < 1:
        raise InputError(f"n_paths must be an integer >= 1, got {n_paths!r}")
    if isinstance(base_seed, bool) or not isinstance(base_seed, int) or base_seed < 0:
        raise InputError(f"base_seed must be a non-negative integer, got {base_seed!r}")


def _run_pairs(args):
    """Worker: simulate coupled pairs for a block of consecutive seeds.

    Returns one entry per seed, in order: (squared_diff, fine_steps,
    coarse_steps), or None for a path that exploded.
    """
    kind, model, h0, l0, k, t_end, seeds, max_steps = args
    out = []
    for seed in seeds:
        try:
            if kind == "tam":
                cs = simulate_coupled_pair(model, h0, l0, k, t_end, seed,
                                           max_steps=max_steps)
            else:
                cs = simulate_coupled_tm_pair(model, k, t_end, seed,
                                              max_steps=max_steps)
            out.append((cs.squared_diff, cs.fine_steps, cs.coarse_steps))
        except PathExplosion:
            out.append(None)
    return out


def _run_paths(args):
    """Worker: uncoupled adaptive paths; (|X_T|**p, step_count) per seed."""
    model, config, p, seeds = args
    out = []
    for seed in seeds:
        try:
            traj = simulate_path(model, config, NoiseSource(seed))
            out.append((abs(float(traj.values[-1])) ** p, traj.step_count))
        except PathExplosion:
            out.append(None)
    return out


def _collect(worker, args_builder, n_paths, base_seed, n_jobs):
    """Run the worker over seeds base_seed..base_seed+n_paths-1.

    args_builder(seed_block) -> worker args.  Outcomes come back in path
    order whatever the worker count, so aggregation downstream is
    scheduling-independent.
    """
    seeds = range(base_seed, base_seed + n_paths)
    if n_jobs <= 1 or n_paths < 2 * n_jobs:
        return worker(args_builder(list(seeds)))
    chunk = max(1, -(-n_paths // (4 * n_jobs)))
    blocks = [list(seeds[i:i + chunk]) for i in range(0, n_paths, chunk)]
    out = []
    with ProcessPoolExecutor(max_workers=n_jobs) as pool:
        for res in pool.map(worker, [args_builder(b) for b in blocks]):
            out.extend(res)
    return out


def _mean_and_stderr(values, n_ok):
    mean = math.fsum(values) / n_ok
    if n_ok < 2:
        return mean, 0.0
    var = math.fsum((v - mean) ** 2 for v in values) / (n_ok - 1)
    return mean, math.sqrt(var / n_ok)


def _aggregate_mse(k, delta, n_paths, outcomes):
    n_failures = sum(1 for o in outcomes if o is None)
    if n_failures * 100 >= n_paths:
        raise EstimationError(
            f"{n_failures} of {n_paths} paths exploded at level k={k}; "
            "the estimate would not be trustworthy")
    ok = [o for o in outcomes if o is not None]
    n_ok = len(ok)
    mse, std_error = _mean_and_stderr([o[0] for o in ok], n_ok)
    mean_fine = math.fsum(o[1] for o in ok) / n_ok
    mean_coarse = math.fsum(o[2] for o in ok) / n_ok
    log2_mse = math.log2(mse) if mse > 0.0 else float("-inf")
    return MseRow(k=k, delta=delta, n_paths=n_paths, mse=mse,
                  log2_mse=log2_mse, std_error=std_error,
                  mean_fine_steps=mean_fine, mean_coarse_steps=mean_coarse,
                  n_failures=n_failures)


def estimate_mse(model, h0, l0, k, n_paths, t_end, base_seed, n_jobs=1,
                 max_steps=DEFAULT_MAX_STEPS):
    """Strong-error row at level k for the adaptive scheme.

    Couples base steps 2**-(k+1) and 2**-k on one Brownian path per
    sample, using seeds base_seed..base_seed+n_paths-1.
    """
    _check_counts(n_paths, base_seed)
    outcomes = _collect(
        _run_pairs,
        lambda seeds: ("tam", model, h0, l0, k, t_end, seeds, max_steps),
        n_paths, base_seed, n_jobs)
    return _aggregate_mse(k, 2.0 ** (-k), n_paths, outcomes)


def estimate_tm_mse(model, k, n_paths, t_end, base_seed, n_jobs=1,
                    max_steps=DEFAULT_MAX_STEPS):
    """Strong-error row at level k for the fixed-step baseline."""
    _check_counts(n_paths, base_seed)
    outcomes = _collect(
        _run_pairs,
        lambda seeds: ("tm", model, 1.0, 2.0, k, t_end, seeds, max_steps),
        n_paths, base_seed, n_jobs)
    return _aggregate_mse(k, 2.0 ** (-k), n_paths, outcomes)


def estimate_moment(model, config, p, n_paths, base_seed, n_jobs=1):
    """Monte Carlo estimate of E|X_{t_end}|**p under the adaptive scheme."""
    if not p > 0.0:
        raise InputError(f"moment order p must be > 0, got {p}")
    _check_counts(n_paths, base_seed)
    outcomes = _collect(
        _run_paths, lambda seeds: (model, config, p, seeds),
        n_paths, base_seed, n_jobs)
    n_failures = sum(1 for o in outcomes if o is None)
    if n_failures * 100 >= n_paths:
        raise EstimationError(
            f"{n_failures} of {n_paths} paths exploded; the moment "
            "estimate would not be trustworthy")
    vals = [o[0] for o in outcomes if o is not None]
    mean, std_error = _mean_and_stderr(vals, len(vals))
    return MomentEstimate(mean_abs_p=mean, std_error=std_error,
                          n_failures=n_failures)


def mean_step_count(model, config, n_paths, base_seed, n_jobs=1):
    """Monte Carlo mean of the adaptive scheme's step count on [0, t_end]."""
    _check_counts(n_paths, base_seed)
    outcomes = _collect(
        _run_paths, lambda seeds: (model, config, 1.0, seeds),
        n_paths, base_seed, n_jobs)
    n_failures = sum(1 for o in outcomes if o is None)
    if n_failures * 100 >= n_paths:
        raise EstimationError(
            f"{n_failures} of {n_paths} paths exploded; the step-count "
            "mean would not be trustworthy")
    counts = [o[1] for o in outcomes if o is not None]
    return math.fsum(counts) / len(counts)


def tm_step_count(t_end, delta):
    """Deterministic step count t_end/delta of the fixed-step baseline."""
    if not t_end > 0.0:
        raise InputError(f"t_end must be > 0, got {t_end}")
    if not 0.0 < delta < 1.0:
        raise InputError(f"delta must lie in (0, 1), got {delta}")
    return t_end / delta
