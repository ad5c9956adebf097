"""
Tree counts below the threshold
===============================

In G(n, lambda/n) with lambda < 1 nearly every component is a tree.  The
mean number of size-s trees follows a closed form; its large-s version
decays like exp(-I(lambda) s) s^(-5/2).
"""

from caperc import theory
from caperc.experiments import exp_tree_census

lam, n = 0.5, 20000
rep = exp_tree_census(lam, n, trials=20, master_seed=3)

print(" s    observed      exact   asymptotic")
for row in rep.rows:
    if row["metric"].startswith("tree_count[s="):
        s = int(row["metric"][13:-1])
        if s > 8:
            break
        print(f"{s:2d}  {row['mean']:10.2f} {row['predicted']:10.2f} {theory.asymptotic_tree_count(n, lam, s):12.2f}")

# beyond the cutoff no trees are expected at all
print("cutoff ell =", round(theory.ell_cutoff(n, lam), 2))
print("largest component seen:", rep.column("max_component", "max")[n])
