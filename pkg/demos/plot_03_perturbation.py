"""
Scalar perturbations and their predicted bounds
===============================================

Adding a_w L K* to every operator of a K-frame keeps it a K-frame as long
as R = |L|^2 sum w |a_w|^2 stays below the lower bound A.  Here we sweep
the size of a and compare the predicted interval with the optimal one.
"""

# %%
import numpy as np

from mframes import ScalarFamily
from mframes import transforms as tr
from mframes.harness import paper_example

sc = paper_example(extras=False)
family, K = sc.family, sc.k

# %%
# With a = 0.1 everywhere and L = K the optimal lower bound is the
# integral of (w + 0.1)^2, while the predicted one is (sqrt(1/3) - 0.1)^2.
v = tr.perturb_scalar(family, K, K, ScalarFamily.constant(family.disc, 0.1)).verdict
print(f"R = {v.info['R']:.4f}  predicted lower {v.predicted.lower:.6f}  optimal lower {v.optimal.lower_opt:.6f}")

# %%
# Sweep a.  The prediction degrades monotonically and the gate closes
# once R reaches A = 1/3.
print(f"{'a':>6} {'R':>8} {'pred lo':>9} {'opt lo':>9} {'pred hi':>9} {'opt hi':>9}  gate")
for a in np.linspace(0.0, 0.6, 7):
    v = tr.perturb_scalar(family, K, K, ScalarFamily.constant(family.disc, a)).verdict
    lo = "-" if v.predicted.lower is None else f"{v.predicted.lower:9.5f}"
    hi = "-" if v.predicted.upper is None else f"{v.predicted.upper:9.5f}"
    print(f"{a:6.2f} {v.info['R']:8.4f} {lo:>9} {v.optimal.lower_opt:9.5f} {hi:>9} {v.optimal.upper_opt:9.5f}  "
          f"{v.hypotheses['R_below_A'].ok}")
