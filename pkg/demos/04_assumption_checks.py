"""Numerically auditing the structural assumptions.

The convergence theory needs two inequalities: a dissipativity bound
(controls moments) and a one-sided Lipschitz bound on the pair
drift + diffusion (controls error propagation).  Both are checked here
on sampled grids for the built-in models, reporting the worst margin
seen.  A margin is the slack in the inequality; negative means violated
at that point.
"""

import random

from tamsde import check_dissipativity, check_one_sided_lipschitz, get_model

GRID = [x / 100.0 for x in range(-5000, 5001)]  # [-50, 50] step 0.01

rng = random.Random(0)
PAIRS = [(rng.uniform(-50, 50), rng.uniform(-50, 50)) for _ in range(20000)]

for name in ("model1", "model2"):
    model = get_model(name)
    r = model.regularity
    print(f"{name}: gamma={r.gamma}, eta={r.eta}, lambda={r.lambda_os}, "
          f"p0={r.p0}")

    diss = check_dissipativity(model, GRID)
    print(f"  dissipativity        holds={diss.holds}  "
          f"worst margin {diss.worst_margin:.6g} at x={diss.worst_x:.4g}")

    osl = check_one_sided_lipschitz(model, PAIRS)
    x, y = osl.worst_pair
    print(f"  one-sided Lipschitz  holds={osl.holds}  "
          f"worst margin {osl.worst_margin:.6g} at ({x:.4g}, {y:.4g})")
    print()

print("the CLI wraps the same sweep:")
print("  tamsde verify-assumptions --model model2 --grid -50:50:10000")
