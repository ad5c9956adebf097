"""
Three regimes of the largest CA-component
=========================================

The intensities decide whether the largest CA-component is linear in n,
logarithmic, or bounded by the number of colors k.
"""

import math

from caperc import ModelParams
from caperc.theory import classify_regime
from caperc.experiments import exp_regime_scaling

cases = {
    "supercritical": (1.5, 1.5),
    "intermediate": (1.3, 0.4),
    "subcritical": (0.4, 0.4),
}
grid = (2000, 8000, 32000)

for name, lambdas in cases.items():
    label = classify_regime(ModelParams(grid[0], 2, lambdas))
    rep = exp_regime_scaling(lambdas, grid, trials=10, master_seed=7)
    means = rep.column("max_ca")
    print(f"\n{name:>14}  lambda*={label.lambda_star_1:.2f}..{label.lambda_star_k:.2f}")
    for n, m in means.items():
        print(f"   n={n:>6}  mean max_ca={m:9.2f}  /n={m / n:.4f}  /log n={m / math.log(n):.3f}")
    for v in rep.verdicts:
        print("  ", "ok  " if v.passed else "FAIL", v.check, v.observed)

# at these small n the log-normalised intermediate means still drift; the
# acceptance run goes to n = 1e5 where they settle

# write the last run out the same way `caperc run` does
rep.write("out/regimes-subcritical")
