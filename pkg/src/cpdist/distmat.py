"""Distance matrices: validation, l_p induction, snowflake powers and
Schoenberg's Euclidean-embedding test."""
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Tuple

import numpy as np

TRIANGLE_SLACK = 1e-12
PSD_TOL = 1e-10
RANK_TOL = 1e-8


class StructureError(ValueError):
    """Matrix is not symmetric, has a negative entry or a nonzero diagonal."""


@dataclass(frozen=True)
class Validity:
    ok: bool
    witness: Optional[Tuple[int, int, int]] = None
    margin: float = 0.0

    def __bool__(self):
        return self.ok


def _check_structure(d, tol=0.0):
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise StructureError(f"distance matrix must be square, got {d.shape}")
    if d.shape[0] < 1:
        raise StructureError("empty distance matrix")
    if not np.all(np.isfinite(d)):
        raise StructureError("non-finite entry")
    if np.max(np.abs(d - d.T), initial=0.0) > tol:
        raise StructureError("matrix is not symmetric")
    if np.min(d) < 0:
        i, j = np.unravel_index(np.argmin(d), d.shape)
        raise StructureError(f"negative entry d[{i},{j}] = {d[i, j]}")
    if np.any(np.diagonal(d) != 0):
        raise StructureError("nonzero diagonal")


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    """Symmetric, nonnegative, zero-diagonal real matrix.

    Structure is enforced at construction; the triangle inequalities are
    checked lazily through :attr:`validity`. Zero off-diagonal entries are
    allowed (see :attr:`is_positive`).
    """

    d: np.ndarray = field(repr=False)

    def __post_init__(self):
        d = np.array(self.d, dtype=float)
        _check_structure(d)
        d.setflags(write=False)
        object.__setattr__(self, "d", d)

    @classmethod
    def from_upper(cls, n, values):
        values = np.asarray(values, dtype=float)
        I, J = np.triu_indices(n, 1)
        if values.shape != I.shape:
            raise StructureError(
                f"n={n} needs {I.size} upper-triangle entries, got {values.size}"
            )
        d = np.zeros((n, n))
        d[I, J] = values
        d[J, I] = values
        return cls(d)

    @property
    def n(self):
        return self.d.shape[0]

    def upper(self):
        return self.d[np.triu_indices(self.n, 1)].copy()

    @cached_property
    def validity(self):
        return validate(self)

    @property
    def is_valid(self):
        return self.validity.ok

    @property
    def is_positive(self):
        off = ~np.eye(self.n, dtype=bool)
        return bool(np.all(self.d[off] > 0))

    def __eq__(self, other):
        return isinstance(other, DistanceMatrix) and np.array_equal(self.d, other.d)

    def __repr__(self):
        return f"DistanceMatrix(n={self.n}, upper={self.upper().tolist()})"

    def to_json(self):
        return {"n": self.n, "d": self.upper().tolist()}

    @classmethod
    def from_json(cls, obj):
        return cls.from_upper(int(obj["n"]), obj["d"])


def as_dmat(D):
    return D if isinstance(D, DistanceMatrix) else DistanceMatrix(D)


def validate(D, slack=TRIANGLE_SLACK):
    """Check every triangle ``d_ij <= d_ik + d_kj``.

    Returns a :class:`Validity`; on failure ``witness`` is the
    lexicographically first violating ``(i, j, k)`` (0-based) and ``margin``
    is ``d_ij - d_ik - d_kj``. The slack is scaled by ``max(1, max d)``.
    Structural defects raise :class:`StructureError` instead.
    """
    d = as_dmat(D).d
    scale = max(1.0, float(d.max(initial=0.0)))
    # margin[i, j, k] = d[i, j] - d[i, k] - d[k, j]
    margin = d[:, :, None] - d[:, None, :] - d.T[None, :, :]
    bad = np.argwhere(margin > slack * scale)
    if bad.size == 0:
        return Validity(True)
    i, j, k = (int(v) for v in bad[0])
    return Validity(False, (i, j, k), float(margin[i, j, k]))


@dataclass(frozen=True, eq=False)
class PointCloud:
    points: np.ndarray
    p: float = 2.0

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] < 2:
            raise ValueError(f"need at least 2 points in a 2-d array, got {pts.shape}")
        p = float(self.p)
        if not p >= 1:
            raise ValueError(f"norm exponent must be in [1, inf], got {p}")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "p", p)

    @property
    def n(self):
        return self.points.shape[0]


def from_points(cloud, p=None):
    """Distance matrix of pairwise l_p distances (``p = inf`` allowed)."""
    if not isinstance(cloud, PointCloud):
        cloud = PointCloud(cloud, 2.0 if p is None else p)
    elif p is not None:
        cloud = PointCloud(cloud.points, p)
    diff = np.abs(cloud.points[:, None, :] - cloud.points[None, :, :])
    if np.isinf(cloud.p):
        d = diff.max(axis=2)
    else:
        d = np.linalg.norm(diff, ord=cloud.p, axis=2)
    d = 0.5 * (d + d.T)
    np.fill_diagonal(d, 0.0)
    return DistanceMatrix(d)


def hadamard_power(D, p):
    """Entrywise power ``d_ij ** p``."""
    if not p > 0:
        raise ValueError(f"exponent must be positive, got {p}")
    return DistanceMatrix(as_dmat(D).d ** p)


@dataclass(frozen=True)
class SchoenbergResult:
    gram: np.ndarray
    psd: bool
    rank: int
    eigenvalues: np.ndarray

    @property
    def det(self):
        return float(np.linalg.det(self.gram)) if self.gram.size else 1.0


def schoenberg_gram(D):
    """Gram matrix ``a_ij = (d_1,i+1^2 + d_1,j+1^2 - d_i+1,j+1^2) / 2``
    with its PSD flag and numerical rank.

    ``D`` is l_2-embeddable iff the Gram matrix is PSD; the rank is then the
    minimal embedding dimension.
    """
    d2 = as_dmat(D).d ** 2
    r = d2[0, 1:]
    A = 0.5 * (r[:, None] + r[None, :] - d2[1:, 1:])
    if A.size == 0:
        return SchoenbergResult(A, True, 0, np.zeros(0))
    w = np.linalg.eigvalsh(A)
    top = max(w[-1], 0.0)
    psd = bool(w[0] >= -PSD_TOL * (1.0 + top))
    rank = int(np.sum(w > RANK_TOL * top)) if top > 0 else 0
    return SchoenbergResult(A, psd, rank, w)


@dataclass(frozen=True)
class NotEmbeddable:
    min_eigenvalue: float

    def __bool__(self):
        return False


def embed_points(D):
    """Euclidean points realising ``D``, or :class:`NotEmbeddable`.

    The first point sits at the origin; the rest are rows of a rank-truncated
    symmetric factor of the Schoenberg Gram matrix.
    """
    D = as_dmat(D)
    res = schoenberg_gram(D)
    if not res.psd:
        return NotEmbeddable(float(res.eigenvalues[0]))
    if res.rank == 0:
        return PointCloud(np.zeros((D.n, 1)), 2.0)
    w, V = np.linalg.eigh(res.gram)
    keep = w > RANK_TOL * w[-1]
    L = V[:, keep] * np.sqrt(w[keep])
    # largest directions first
    L = L[:, ::-1]
    pts = np.vstack([np.zeros((1, L.shape[1])), L])
    return PointCloud(pts, 2.0)


def delta_product(x):
    """``xx^T - diag(x^2)``: off-diagonal products ``x_i x_j``."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise StructureError("delta_product needs nonnegative entries")
    d = np.outer(x, x)
    np.fill_diagonal(d, 0.0)
    return DistanceMatrix(d)
