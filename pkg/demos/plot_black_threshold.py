"""
Black vertices in subcritical components
========================================

Color each vertex black with probability q.  The most black vertices any
single component holds grows like log n / log(1/q).
"""

from caperc import ModelParams, black_coloring, black_threshold, components
from caperc.model import sample_layer
from caperc.experiments import exp_black_threshold
from caperc.theory import black_threshold_prediction, m0_threshold

# one graph by hand
params = ModelParams(100000, 2, (0.5, 0.5))
edges = sample_layer(params, 1, seed=11)
lab = components(params.n, edges)
blacks = black_coloring(params.n, 0.05, seed=11)
max_s, z = black_threshold(lab, blacks)
print("max black count in one component:", max_s)
print("components by black count:", dict(sorted(z.items())))
print("prediction:", round(black_threshold_prediction(params.n, 0.05), 3),
      " m0:", round(m0_threshold(params.n, 0.05), 3))

# and averaged over trials along a grid
rep = exp_black_threshold(0.5, 0.05, (10**4, 10**5), trials=10, master_seed=11)
for n, ratio in rep.column("max_black", "ratio").items():
    print(f"n={n:>6}  mean/prediction = {ratio:.3f}")
