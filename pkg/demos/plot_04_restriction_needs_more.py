"""
When commuting with the family is not enough
============================================

Composing a K-frame on the left with T gives a K-frame on the range of
T with lower bound A |T^+|^-2, provided T^+ T acts as the identity on
that range.  Commutation alone does not give this.  A nilpotent T on
the rank-two module over C commutes with the identity family and with
K = I, yet the composed family vanishes on R(T).
"""

# %%
import numpy as np

from mframes import ModuleOperator, OperatorFamily, discrete
from mframes import transforms as tr

eye = ModuleOperator.identity((1,), 2)
T = ModuleOperator((1,), 2, [np.array([[0, 1], [0, 0]])])
family = OperatorFamily(discrete([1.0]), [eye])

lc = tr.left_compose(family, T, eye)
v = lc.restriction
for name, h in v.hypotheses.items():
    print(f"{name:<26} ok={h.ok!s:<5} margin={h.margin:.3g}")
print("predicted:", v.predicted, " optimal on R(T):", v.optimal.lower_opt, v.optimal.upper_opt)
print("witness:", v.witness)

# %%
# A normal T with a kernel satisfies the extra hypothesis and the bound
# holds with equality.
N = ModuleOperator((1,), 2, [np.diag([2.0, 0.0])])
v = tr.left_compose(family, N, eye).restriction
print("normal T:", v.hypotheses_ok, v.valid, v.predicted, v.optimal.lower_opt)
