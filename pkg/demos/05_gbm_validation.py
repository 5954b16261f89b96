"""Validation against an exactly solvable equation.

Geometric Brownian motion has a closed-form terminal value, so the
discretization error of a simulated path is observable directly: drive
the scheme with a Brownian path, sum the increments to get W_T, and
evaluate the exact solution on the same W_T.  Halving the step size
should cut the strong L2 error by half (order 1 for smooth coefficients).
"""

import math

from tamsde import NoiseSource, SchemeConfig, exact_gbm_terminal, get_model, simulate_path
from tamsde.analysis import SEED_STRIDE_K

A, B, X0, T = 0.05, 0.2, 1.0, 1.0
model = get_model("gbm")
print(f"dX = {A} X dt + {B} X dW,  X_0 = {X0},  T = {T},  500 paths per level\n")
print("  k   Delta    rms error      observed order")

prev_rmse = None
for k in range(2, 7):
    config = SchemeConfig(delta=2.0**-k, t_end=T, h0=1.0, l0=2.0)
    squares = []
    for m in range(500):
        traj = simulate_path(model, config, NoiseSource(9 + k * SEED_STRIDE_K + m))
        w_t = math.fsum(traj.increments.tolist())
        diff = traj.values[-1] - exact_gbm_terminal(A, B, X0, T, w_t)
        squares.append(diff * diff)
    rmse = math.sqrt(math.fsum(squares) / len(squares))
    order = "" if prev_rmse is None else f"{math.log2(prev_rmse / rmse):14.3f}"
    print(f"  {k}   2^-{k}    {rmse:.6e}{order}")
    prev_rmse = rmse

print("\norder near 1.0 confirms the correction term is doing its job;")
print("dropping it (plain tamed Euler) would give order 1/2 here")
