"""Linear algebra on C^n and its second exterior power.

Bivectors are flat complex arrays of length ``m = n(n-1)/2`` indexed by the
pairs ``(i, j)``, ``i < j``, in lexicographic order. The coordinate of
``wedge(x, y)`` at ``(i, j)`` is ``x_i y_j - x_j y_i`` so that the basis
``e_i ^ e_j`` is orthonormal and ``|x ^ y|^2 = |x|^2 |y|^2 - |<x, y>|^2``.
For ``n = 3`` the wedge agrees (up to ordering and sign) with the cross
product; no separate cross-product helper is exposed.

Inner products are conjugate-linear in the first slot: ``<x, y> = x^* y``.
"""
from functools import lru_cache

import numpy as np

IDENTITY_TOL = 1e-12
STRUCT_TOL = 1e-10


class DimensionError(ValueError):
    pass


class RankDeficiencyError(ValueError):
    """Raised by :func:`gram_schmidt` when an input vector is (numerically)
    in the span of the ones before it. ``index`` is its position."""

    def __init__(self, index, residual):
        super().__init__(
            f"vector {index} is linearly dependent on its predecessors "
            f"(residual norm {residual:.3e})"
        )
        self.index = index
        self.residual = residual


def inner(x, y):
    return np.vdot(x, y)


def n_pairs(n):
    return n * (n - 1) // 2


class PairIndexMap:
    """Bijection between pairs ``(i, j)`` with ``i < j`` and flat indices."""

    def __init__(self, n):
        if n < 2:
            raise DimensionError(f"need n >= 2, got {n}")
        self.n = n
        self.m = n_pairs(n)
        I, J = np.triu_indices(n, 1)
        self.rows = I.astype(np.int64)
        self.cols = J.astype(np.int64)
        self._index = {(int(i), int(j)): p for p, (i, j) in enumerate(zip(I, J))}

    def index(self, i, j):
        if i == j:
            raise KeyError(f"diagonal pair ({i}, {j}) has no wedge coordinate")
        if i > j:
            i, j = j, i
        return self._index[(i, j)]

    def pair(self, p):
        return int(self.rows[p]), int(self.cols[p])

    def pairs(self):
        return list(zip(self.rows.tolist(), self.cols.tolist()))

    def __len__(self):
        return self.m

    def __repr__(self):
        return f"PairIndexMap(n={self.n})"


@lru_cache(maxsize=64)
def pair_map(n):
    return PairIndexMap(n)


def _vec(x):
    x = np.asarray(x, dtype=np.complex128)
    if x.ndim != 1:
        raise DimensionError(f"expected a 1-d vector, got shape {x.shape}")
    return x


def _same_length(*vs):
    n = vs[0].shape[0]
    if any(v.shape[0] != n for v in vs):
        raise DimensionError(f"length mismatch: {[v.shape[0] for v in vs]}")
    if n < 2:
        raise DimensionError(f"need n >= 2, got {n}")
    return n


def wedge(x, y):
    """Bivector ``x ^ y`` in the lexicographic pair basis."""
    x, y = _vec(x), _vec(y)
    n = _same_length(x, y)
    pm = pair_map(n)
    I, J = pm.rows, pm.cols
    # real arithmetic keeps wedge(x, y) == -wedge(y, x) bit for bit; fused
    # complex multiplies are not commutative after rounding
    xr, xi, yr, yi = x.real, x.imag, y.real, y.imag
    re = (xr[I] * yr[J] - xi[I] * yi[J]) - (xr[J] * yr[I] - xi[J] * yi[I])
    im = (xr[I] * yi[J] + xi[I] * yr[J]) - (xr[J] * yi[I] + xi[J] * yr[I])
    return re + 1j * im


def bivector_to_skew(C, n):
    """Skew-symmetric ``n x n`` matrix with ``S[i, j] = C[(i, j)]`` for ``i < j``."""
    C = np.asarray(C, dtype=np.complex128)
    pm = pair_map(n)
    if C.shape != (pm.m,):
        raise DimensionError(f"bivector of length {C.shape} does not match n={n}")
    S = np.zeros((n, n), dtype=np.complex128)
    S[pm.rows, pm.cols] = C
    S[pm.cols, pm.rows] = -C
    return S


def dim_from_pairs(m):
    n = int(round((1 + np.sqrt(1 + 8 * m)) / 2))
    if n_pairs(n) != m:
        raise DimensionError(f"{m} is not of the form n(n-1)/2")
    return n


def vee_apply(a, b, y):
    """``(a ^ b)^vee (y) = <y, b> a - <y, a> b``; anti-linear in ``y``."""
    a, b, y = _vec(a), _vec(b), _vec(y)
    _same_length(a, b, y)
    return inner(y, b) * a - inner(y, a) * b


def bivector_vee(C, y):
    """Linear extension of :func:`vee_apply` to an arbitrary bivector.

    Characterised by ``<bivector_vee(C, y), x> = <C, x ^ y>`` for all ``x``.
    """
    y = _vec(y)
    n = y.shape[0]
    return bivector_to_skew(C, n) @ y.conj()


def compound2(A):
    """Second compound matrix: entry ``((i,j),(p,q))`` is the 2x2 minor of
    rows ``i, j`` and columns ``p, q``. Represents ``A ^ A`` on bivectors."""
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError(f"compound2 needs a square matrix, got {A.shape}")
    n = A.shape[0]
    if n < 2:
        raise DimensionError(f"need n >= 2, got {n}")
    pm = pair_map(n)
    I, J = pm.rows, pm.cols
    return (
        A[np.ix_(I, I)] * A[np.ix_(J, J)] - A[np.ix_(I, J)] * A[np.ix_(J, I)]
    )


def gram_schmidt(vectors, tol=STRUCT_TOL):
    """Orthonormalise ``vectors`` with classical Gram-Schmidt, two passes.

    Raises :class:`RankDeficiencyError` naming the first vector whose
    residual after projection falls below ``tol`` times its own norm.
    """
    V = np.array([_vec(v) for v in vectors], dtype=np.complex128)
    if V.ndim != 2 or V.shape[0] == 0:
        raise DimensionError("need a non-empty list of vectors")
    k, n = V.shape
    if k > n:
        raise RankDeficiencyError(n, 0.0)
    out = np.empty_like(V)
    for i in range(k):
        v = V[i].copy()
        scale = np.linalg.norm(v)
        for _ in range(2):
            if i:
                v -= out[:i].T @ (out[:i].conj() @ v)
        r = np.linalg.norm(v)
        if scale == 0.0 or r <= tol * scale:
            raise RankDeficiencyError(i, r)
        out[i] = v / r
    return list(out)


def orthonormal_triples(k, n, rng):
    """``k`` Haar-distributed orthonormal triples as three ``(k, n)`` arrays.

    Batched form of drawing three Haar vectors and running two-pass
    Gram-Schmidt on each triple.
    """
    X, Y, Z = (haar_random_states(k, n, rng) for _ in range(3))

    def proj_out(v, *us):
        for _ in range(2):
            for u in us:
                v = v - u * np.einsum("ki,ki->k", u.conj(), v)[:, None]
        return v / np.linalg.norm(v, axis=1, keepdims=True)

    Y = proj_out(Y, X)
    Z = proj_out(Z, X, Y)
    return X, Y, Z


def haar_random_state(n, rng):
    """Unit vector uniformly distributed on the complex sphere in C^n."""
    if n < 2:
        raise DimensionError(f"need n >= 2, got {n}")
    g = rng.standard_normal(2 * n)
    z = g[:n] + 1j * g[n:]
    return z / np.linalg.norm(z)


def haar_random_states(k, n, rng):
    g = rng.standard_normal((k, 2 * n))
    z = g[:, :n] + 1j * g[:, n:]
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def haar_unitary(n, rng):
    """Haar-random unitary via QR of a complex Ginibre matrix with phase fix."""
    g = rng.standard_normal((n, 2 * n))
    Zm = (g[:, :n] + 1j * g[:, n:]) / np.sqrt(2)
    q, r = np.linalg.qr(Zm)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def same_state(x, y, tol=IDENTITY_TOL):
    """Projective equality: ``|<x, y>| = 1`` within ``tol`` for unit vectors."""
    return abs(1.0 - abs(inner(_vec(x), _vec(y)))) <= tol


def normalize(x):
    x = _vec(x)
    r = np.linalg.norm(x)
    if r == 0:
        raise ValueError("cannot normalise the zero vector")
    return x / r


def hermitian_part(A):
    A = np.asarray(A, dtype=np.complex128)
    return 0.5 * (A + A.conj().T)


def is_hermitian(A, tol=STRUCT_TOL):
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        return False
    return bool(np.max(np.abs(A - A.conj().T), initial=0.0)
                <= tol * (1.0 + np.max(np.abs(A), initial=0.0)))


def is_psd(A, tol=STRUCT_TOL):
    if not is_hermitian(A, tol):
        return False
    w = np.linalg.eigvalsh(hermitian_part(A))
    return bool(w[0] >= -tol * (max(w[-1], 0.0) + 1.0))


def is_unitary(U, tol=STRUCT_TOL):
    U = np.asarray(U)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        return False
    return bool(np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0]))) <= tol)
