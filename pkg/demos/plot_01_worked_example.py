"""
A tight K-frame that is not an operator frame
=============================================

The algebra is C + C (pairs of complex numbers, multiplied entrywise) and
the module is the algebra itself.  Each operator in the family multiplies
on the right by diag(w, 0) for w in [0, 1], and K keeps only the first
coordinate.
"""

# %%
# Build the family on two Gauss nodes.  The integrand is quadratic in w,
# so two nodes already integrate it exactly.
from mframes import (AlgebraElement, ModuleOperator, ModuleVector, classify, frame_integral,
                     frame_operator, optimal_bounds)
from mframes.harness import paper_example

sc = paper_example(extras=False)
family, K = sc.family, sc.k
print("nodes  :", family.disc.nodes)
print("weights:", family.disc.weights)

# %%
# The frame operator is right multiplication by diag(1/3, 0).
S = frame_operator(family)
print("S cells:", S.cells)

# %%
# Pointwise, the frame integral of x = diag(a, b) is diag(|a|^2 / 3, 0).
x = ModuleVector.from_coords([AlgebraElement.scalars(2 - 1j, 7)])
print("integral at x:", frame_integral(family, x))

# %%
# Relative to K the optimal bounds coincide, so the family is a tight
# K-frame with constant 1/3.  The claimed lower bound 1/4 holds but is
# not optimal.
bounds = optimal_bounds(family, K, claimed=(0.25, 1 / 3))
print("optimal:", bounds.lower_opt, bounds.upper_opt)
print("claimed bounds hold:", bounds.claims_hold, bounds.psd_margins)
print("class vs K:", classify(family, K))

# %%
# Relative to the identity no positive lower bound exists: the second
# coordinate is never seen by the family.
eye = ModuleOperator.identity(K.shape, 1)
print("lower bound vs I:", optimal_bounds(family, eye).lower_opt)
print("class vs I:", classify(family, eye))
