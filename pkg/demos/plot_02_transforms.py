"""
How bounds move under operator transforms
=========================================

Starting from a random K-frame, compose on the right with Q, rescale by
an invertible Q, and transfer to another operator T whose range sits
inside the range of K.  Each step prints the predicted bounds next to
the optimal ones.
"""

# %%
from mframes import transforms as tr
from mframes.harness import random_instance

sc = random_instance(7, profile="guaranteed_k_frame")
print(sc.name, "shape", sc.shape.block_sizes, "rank", sc.rank, "atoms", len(sc.family))


def show(v):
    p, o = v.predicted, v.optimal
    print(f"{v.theorem:<20} hypotheses={v.hypotheses_ok!s:<5} valid={v.valid!s:<5} "
          f"predicted=({p.lower}, {p.upper}) optimal=({o.lower_opt}, {o.upper_opt})")


# %%
# Right composition: {T_w Q} is a (Q* K)-frame.
show(tr.compose_right(sc.family, sc.k, sc.q).verdict)

# %%
# Range transfer: R(T) inside R(K) gives a T-frame with bound A / lambda.
show(tr.k_transfer(sc.family, sc.k, sc.t))

# %%
# Invertible rescaling needs Q^-1 to commute with K*.  A random Q does
# not, which the verdict reports as a hypothesis failure rather than a
# counterexample.
show(tr.invertible_rescale_check(sc.family, sc.k, sc.q))

# %%
# In a commuting scenario the same check goes through.
diag = random_instance(3, profile="commuting_diag")
v = tr.invertible_rescale_check(diag.family, diag.k, diag.q)
show(v)
print({k: v.info[k] for k in ("lower_left", "lower_right", "upper_left", "upper_right")})
