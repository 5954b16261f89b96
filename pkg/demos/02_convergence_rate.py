"""Strong convergence study at desk scale.

Estimates the L2 error between coupled coarse/fine path pairs of the
double-well model over a range of step-size levels, then fits the
convergence rate by least squares on the log-log table.  A full-scale
study is the same protocol with more levels and more paths; see the rate
subcommand of the CLI.
"""

from tamsde import estimate_mse, fit_convergence_rate, get_model
from tamsde.analysis import SEED_STRIDE_K

model = get_model("model1")
alpha = model.regularity.alpha

print(f"model: {model.name} (alpha={alpha}), T=1, 2000 path pairs per level")
print()
print("  k   Delta      log2(mse)   mean fine steps")

rows = []
for k in range(1, 5):
    row = estimate_mse(model, h0=1.0, l0=2.0, k=k, n_paths=2000, t_end=1.0,
                       base_seed=1 + k * SEED_STRIDE_K)
    rows.append(row)
    print(f"  {row.k}   2^-{k}      {row.log2_mse:8.4f}    {row.mean_fine_steps:7.2f}")

fit = fit_convergence_rate(rows)
print()
print(f"fitted slope      : {fit.slope:.4f}  (log2 mse per level)")
print(f"empirical rate    : {fit.empirical_rate:.4f}")
print(f"theoretical rate  : {(1 + alpha) / 2}")
print(f"r squared         : {fit.r_squared:.6f}")
