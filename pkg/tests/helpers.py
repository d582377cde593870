import numpy as np
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from cpdist.distmat import DistanceMatrix

SQUARE_L1 = DistanceMatrix(
    [[0, 1, 1, 2], [1, 0, 2, 1], [1, 2, 0, 1], [2, 1, 1, 0]]
)
COLLINEAR = DistanceMatrix([[0, 1, 3], [1, 0, 2], [3, 2, 0]])


def rand_complex(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def rand_state(rng, n):
    v = rand_complex(rng, n)
    return v / np.linalg.norm(v)


def rand_psd(rng, m, rank=None):
    A = rand_complex(rng, m, rank or m)
    return A @ A.conj().T


def n3_labels(d12, d13, d23):
    return DistanceMatrix.from_upper(3, [d12, d13, d23])


finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def complex_vectors(n):
    return arrays(np.float64, (2, n), elements=finite).map(lambda a: a[0] + 1j * a[1])


seeds = st.integers(0, 2**32 - 1)
