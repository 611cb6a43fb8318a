"""Random draws shared by the test modules."""

import numpy as np
from hypothesis import strategies as st

from mframes import AlgebraElement, AlgebraShape, ModuleOperator, ModuleVector

SHAPES = [(1,), (2,), (1, 1), (1, 2), (3,), (2, 1, 1)]

shapes = st.sampled_from(SHAPES)
ranks = st.integers(1, 2)
seeds = st.integers(0, 2**32 - 1)


def cmat(rng, r, c=None):
    c = r if c is None else c
    return rng.standard_normal((r, c)) + 1j * rng.standard_normal((r, c))


def rand_elem(rng, shape):
    shape = AlgebraShape(tuple(shape))
    return AlgebraElement(shape, [cmat(rng, n) for n in shape])


def rand_psd_elem(rng, shape):
    a = rand_elem(rng, shape)
    return a.H @ a


def rand_vec(rng, shape, m):
    return ModuleVector.from_coords([rand_elem(rng, shape) for _ in range(m)])


def rand_op(rng, shape, m, rank_drop=0):
    shape = AlgebraShape(tuple(shape))
    mats = []
    for n in shape:
        d = m * n
        g = cmat(rng, d)
        if rank_drop:
            r = max(1, d - rank_drop)
            g = cmat(rng, d, r) @ cmat(rng, r, d)
        mats.append(g)
    return ModuleOperator(shape, m, mats)


def rel(a, b):
    return float(np.linalg.norm(a - b)) / max(float(np.linalg.norm(b)), 1e-300)
