"""Tamed-adaptive Milstein stepping and the fixed-step tamed baseline.

One step of the adaptive scheme from state x over a duration dt with
Brownian increment dW is

    x + mu(x) dt + sigma(x) dW + q(x) (dW**2 - dt) / 2,

where q tames the Milstein coefficient sigma*sigma',

    q(x) = sigma(x) sigma'(x) / (1 + delta**(1/2) |sigma(x) sigma'(x)|),

so that |q| <= delta**(-1/2) and |q| <= |sigma sigma'| always hold.  The
duration of the step is state-dependent,

    dt = h(x) * delta,
    h(x) = h0 / (1 + |mu|**2 + |mu'| + |sigma|**4 + |sigma'|**4
                   + |q| + |x|**l0)**2,

which shrinks the step wherever the coefficients or the state are large;
delta plays the role the uniform step plays for a fixed grid, and halving
it should roughly double the number of steps on [0, t_end].

The fixed-step baseline (tm_step) advances on the uniform grid k*delta and
divides the whole Milstein increment, with untamed sigma*sigma', by
1 + delta*|x|**2.
"""

import math
import sys
from dataclasses import dataclass

import numpy as np

from .errors import InputError, PathExplosion
from .model import _rpow, minimum_step_exponent

__all__ = [
    "SchemeConfig",
    "Trajectory",
    "tamed_correction",
    "adaptive_step",
    "tam_step",
    "tm_step",
    "interpolate",
    "simulate_path",
]

# saturation value used when the step-size denominator overflows: the
# smallest positive normal double, so the step stays positive
_TINY_STEP = sys.float_info.min

DEFAULT_MAX_STEPS = 100_000_000


@dataclass(frozen=True)
class SchemeConfig:
    """Knobs of one scheme run.

    delta      base step parameter, in (0, 1); experiments use 2**-k.
    h0         cap of the state-dependent step factor h(x), > 0.
    l0         exponent of the |x|**l0 state penalty in h(x), >= 2; the
               convergence theory additionally wants
               l0 >= 4*l / (3*(1+alpha)) for the model it is paired with,
               which simulate_path enforces.
    t_end      time horizon, > 0.
    max_steps  step budget per path before the run is declared exploded.
    """

    delta: float
    t_end: float
    h0: float = 1.0
    l0: float = 2.0
    max_steps: int = DEFAULT_MAX_STEPS

    def __post_init__(self):
        if not 0.0 < self.delta < 1.0:
            raise InputError(f"delta must lie in (0, 1), got {self.delta}")
        if not self.t_end > 0.0:
            raise InputError(f"t_end must be > 0, got {self.t_end}")
        if not self.h0 > 0.0:
            raise InputError(f"h0 must be > 0, got {self.h0}")
        if not self.l0 >= 2.0:
            raise InputError(f"l0 must be >= 2, got {self.l0}")
        if self.max_steps < 1:
            raise InputError(f"max_steps must be >= 1, got {self.max_steps}")


@dataclass(frozen=True, eq=False)
class Trajectory:
    """An adaptive grid with states and the Brownian increments that drove it.

    times, values have length step_count + 1; increments has length
    step_count.  times[0] == 0, times[-1] == t_end.
    """

    times: np.ndarray
    values: np.ndarray
    increments: np.ndarray
    step_count: int


def _correction(g, sqrt_delta):
    # g = sigma(x) * sigma'(x), possibly +-inf; the tamed value approaches
    # +-1/sqrt(delta) as |g| grows
    if math.isinf(g):
        return math.copysign(1.0 / sqrt_delta, g)
    return g / (1.0 + sqrt_delta * abs(g))


def _product(s, sp):
    # treat an exact zero factor as an exactly zero product so that an
    # infinite other factor cannot produce a NaN
    return 0.0 if (s == 0.0 or sp == 0.0) else s * sp


def _check_delta(delta):
    if not 0.0 < delta < 1.0:
        raise InputError(f"delta must lie in (0, 1), got {delta}")


def tamed_correction(model, x, delta):
    """Tamed Milstein coefficient q(x) at base step delta."""
    _check_delta(delta)
    s = model.diffusion(x)
    sp = model.diffusion_prime(x)
    return _correction(_product(s, sp), math.sqrt(delta))


def adaptive_step(model, config, x):
    """State-dependent step duration h(x) * delta.

    Always positive: if the denominator overflows, the smallest positive
    normal double is returned instead of zero.
    """
    m = model.drift(x)
    s = model.diffusion(x)
    mp = model.drift_prime(x)
    sp = model.diffusion_prime(x)
    sqd = math.sqrt(config.delta)
    q = _correction(_product(s, sp), sqd)
    l0 = config.l0
    s2 = s * s
    sp2 = sp * sp
    xl = x * x if l0 == 2.0 else _rpow(abs(x), l0)
    base = 1.0 + m * m + abs(mp) + s2 * s2 + sp2 * sp2 + abs(q) + xl
    step = (config.h0 / (base * base)) * config.delta
    if step <= 0.0 or step != step:
        return _TINY_STEP
    return step


def _tam_increment(model, x, delta, dt, dW):
    m = model.drift(x)
    s = model.diffusion(x)
    sp = model.diffusion_prime(x)
    q = _correction(_product(s, sp), math.sqrt(delta))
    return x + m * dt + s * dW + 0.5 * q * (dW * dW - dt)


def tam_step(model, x, delta, dt, dW):
    """One tamed-adaptive Milstein step of duration dt from state x."""
    _check_delta(delta)
    if not dt > 0.0:
        raise InputError(f"dt must be > 0, got {dt}")
    return _tam_increment(model, x, delta, dt, dW)


def tm_step(model, x, delta, dW):
    """One fixed-step tamed Milstein step (duration delta) from state x."""
    _check_delta(delta)
    m = model.drift(x)
    s = model.diffusion(x)
    sp = model.diffusion_prime(x)
    g = _product(s, sp)
    return x + (m * delta + s * dW + 0.5 * g * (dW * dW - delta)) / (1.0 + delta * (x * x))


def interpolate(model, x_grid, t_grid, t, delta, dW):
    """Continuous-time extension from the last grid point.

    Applies the scheme's one-step map from (t_grid, x_grid) over the
    duration t - t_grid with Brownian increment dW; at t == t_grid with
    dW == 0 this returns x_grid.  Evaluating at the next grid time with
    the realized increment reproduces the next grid value exactly.
    """
    _check_delta(delta)
    if t < t_grid:
        raise InputError(f"interpolation time {t} precedes grid time {t_grid}")
    return _tam_increment(model, x_grid, delta, t - t_grid, dW)


def _require_l0(model, config):
    need = minimum_step_exponent(model.regularity)
    if config.l0 < need - 1e-12:
        raise InputError(
            f"l0={config.l0} is below the admissible minimum {need} for "
            f"model {model.name!r} (alpha={model.regularity.alpha}, "
            f"l={model.regularity.l})")


def simulate_path(model, config, noise):
    """Simulate one adaptive path on [0, t_end].

    Repeatedly takes the adaptive step (clamped so the last step lands
    exactly on t_end), drawing each increment from ``noise`` with variance
    equal to the step's duration.

    Raises PathExplosion if the path exceeds config.max_steps, its state
    stops being finite, or the step collapses below time resolution.
    """
    _require_l0(model, config)
    mu = model.drift
    sig = model.diffusion
    mup = model.drift_prime
    sigp = model.diffusion_prime
    delta = config.delta
    h0 = config.h0
    l0 = config.l0
    t_end = config.t_end
    max_steps = config.max_steps
    sqd = math.sqrt(delta)
    square_penalty = l0 == 2.0

    x = model.x0
    t = 0.0
    steps = 0
    times = [0.0]
    values = [x]
    incs = []
    while t < t_end:
        if not math.isfinite(x):
            raise PathExplosion(
                f"state became non-finite at t={t} after {steps} steps",
                time=t, state=x, steps=steps)
        if steps >= max_steps:
            raise PathExplosion(
                f"exceeded max_steps={max_steps} at t={t} (state {x})",
                time=t, state=x, steps=steps)
        m = mu(x)
        s = sig(x)
        mp = mup(x)
        sp = sigp(x)
        q = _correction(_product(s, sp), sqd)
        s2 = s * s
        sp2 = sp * sp
        xl = x * x if square_penalty else _rpow(abs(x), l0)
        base = 1.0 + m * m + abs(mp) + s2 * s2 + sp2 * sp2 + abs(q) + xl
        step = (h0 / (base * base)) * delta
        if step <= 0.0 or step != step:
            step = _TINY_STEP
        if step >= t_end - t:
            t_next = t_end
        else:
            t_next = t + step
            if t_next >= t_end:
                # the sum can round past the horizon even when
                # step < t_end - t; land on it instead
                t_next = t_end
            elif t_next <= t:
                raise PathExplosion(
                    f"step size collapsed below time resolution at t={t} "
                    f"(state {x})", time=t, state=x, steps=steps)
        dt = t_next - t
        dW = noise.gaussian_increment(dt)
        x = x + m * dt + s * dW + 0.5 * q * (dW * dW - dt)
        t = t_next
        steps += 1
        times.append(t)
        values.append(x)
        incs.append(dW)
    return Trajectory(times=np.asarray(times), values=np.asarray(values),
                      increments=np.asarray(incs), step_count=steps)
