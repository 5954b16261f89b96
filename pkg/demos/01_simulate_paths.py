"""A first look at adaptive path simulation.

Simulates a handful of trajectories of the double-well model and shows
what the adaptive clock does: steps shrink where the coefficients (and
the state itself) are large, and stretch in flat regions.  Also shows
the interpolant filling in values between grid points.
"""

import math

from tamsde import NoiseSource, SchemeConfig, get_model, interpolate, simulate_path

model = get_model("model1")
config = SchemeConfig(delta=2.0**-3, t_end=1.0, h0=1.0, l0=2.0)

print(f"model: {model.name}, x0={model.x0}, Delta=2^-3, T={config.t_end}")
print()

for seed in range(3):
    traj = simulate_path(model, config, NoiseSource(seed))
    steps = [t1 - t0 for t0, t1 in zip(traj.times, traj.times[1:])]
    print(f"seed {seed}: {traj.step_count} steps, "
          f"X_T = {traj.values[-1]:+.6f}, "
          f"step sizes {min(steps):.4f}..{max(steps):.4f}")

# the interpolant evaluates the one-step map from the last grid point,
# so at a grid time it reproduces the grid value exactly
traj = simulate_path(model, config, NoiseSource(0))
t_mid = 0.5 * (traj.times[0] + traj.times[1])
# a Brownian value at t_mid would normally come from the driving path;
# here we just show the endpoints bracket the interpolated value sensibly
x_mid = interpolate(model, traj.values[0], traj.times[0], t_mid,
                    config.delta, 0.5 * traj.increments[0])
print()
print(f"interpolant halfway through the first step: {x_mid:.6f} "
      f"(endpoints {traj.values[0]:.6f} -> {traj.values[1]:.6f})")

# larger states force smaller steps: compare the clock at 0 and at 3
from tamsde import adaptive_step

for x in (0.0, 1.0, 3.0):
    print(f"adaptive step at x={x}: {adaptive_step(model, config, x):.6f}")

w_t = math.fsum(traj.increments.tolist())
print(f"\ndriving Brownian motion ended at W_T = {w_t:+.6f}")
