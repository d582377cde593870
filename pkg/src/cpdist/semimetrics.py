"""Semi-distances on projective space induced by PSD operators on bivectors."""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .distmat import DistanceMatrix, as_dmat
from .wedge import (
    STRUCT_TOL,
    DimensionError,
    _same_length,
    _vec,
    compound2,
    dim_from_pairs,
    hermitian_part,
    inner,
    is_unitary,
    n_pairs,
    pair_map,
    wedge,
)


class NotPSDError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class WedgeOperatorQ:
    """PSD operator ``Q = E**2`` on the pair basis of the second exterior power.

    ``basis`` and ``dmat`` are set together for operators that are diagonal
    in a wedge basis ``u_i ^ u_j`` with eigenvalue ``dmat[i, j]**2``.
    """

    Q: np.ndarray = field(repr=False)
    basis: Optional[np.ndarray] = field(default=None, repr=False)
    dmat: Optional[DistanceMatrix] = None

    def __post_init__(self):
        Q = np.array(self.Q, dtype=np.complex128)
        if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
            raise DimensionError(f"Q must be square, got {Q.shape}")
        n = dim_from_pairs(Q.shape[0])
        scale = 1.0 + np.max(np.abs(Q), initial=0.0)
        if np.max(np.abs(Q - Q.conj().T), initial=0.0) > STRUCT_TOL * scale:
            raise NotPSDError("Q is not Hermitian")
        Q = hermitian_part(Q)
        w = np.linalg.eigvalsh(Q) if Q.size else np.zeros(0)
        if w.size and w[0] < -STRUCT_TOL * (1.0 + max(w[-1], 0.0)):
            raise NotPSDError(f"Q has negative eigenvalue {w[0]:.3e}")
        if (self.basis is None) != (self.dmat is None):
            raise ValueError("basis and dmat must be given together")
        if self.basis is not None:
            U = np.array(self.basis, dtype=np.complex128)
            if U.shape != (n, n) or not is_unitary(U):
                raise ValueError("basis must be an n x n unitary")
            U.setflags(write=False)
            object.__setattr__(self, "basis", U)
            object.__setattr__(self, "dmat", as_dmat(self.dmat))
            if self.dmat.n != n:
                raise DimensionError("dmat size does not match Q")
        Q.setflags(write=False)
        object.__setattr__(self, "Q", Q)

    @property
    def m(self):
        return self.Q.shape[0]

    @property
    def n(self):
        return dim_from_pairs(self.m)

    @property
    def is_diagonal_form(self):
        return self.dmat is not None

    @property
    def in_standard_basis(self):
        return self.is_diagonal_form and np.array_equal(self.basis, np.eye(self.n))

    def label_squares(self):
        """``(n, n)`` array of ``d_ij**2`` (diagonal form only)."""
        if not self.is_diagonal_form:
            raise ValueError("operator has no diagonal form")
        return self.dmat.d ** 2

    @classmethod
    def from_dmat(cls, D, basis=None):
        D = as_dmat(D)
        n = D.n
        U = np.eye(n, dtype=np.complex128) if basis is None else np.asarray(basis, np.complex128)
        if U.shape != (n, n):
            raise DimensionError("basis shape does not match dmat")
        pm = pair_map(n)
        lam = D.d[pm.rows, pm.cols] ** 2
        if basis is None:
            Q = np.diag(lam).astype(np.complex128)
        else:
            C = compound2(U)
            Q = (C * lam) @ C.conj().T
        return cls(Q, U, D)

    @classmethod
    def from_E(cls, E):
        """Build from ``E`` itself; only its Hermitian square is kept."""
        E = np.asarray(E, dtype=np.complex128)
        return cls(E.conj().T @ E)

    @classmethod
    def identity(cls, n):
        m = n_pairs(n)
        return cls(np.eye(m, dtype=np.complex128))

    @classmethod
    def zeros(cls, n):
        m = n_pairs(n)
        return cls(np.zeros((m, m), dtype=np.complex128))

    def E(self):
        """PSD square root of ``Q``."""
        w, V = np.linalg.eigh(self.Q)
        return (V * np.sqrt(np.clip(w, 0.0, None))) @ V.conj().T

    def eigenvalues(self):
        return np.linalg.eigvalsh(self.Q)

    def diagonal_residual(self):
        """Max over pairs of ``|Q w_ij - d_ij**2 w_ij|`` for the stored basis."""
        if not self.is_diagonal_form:
            raise ValueError("operator has no diagonal form")
        C = compound2(self.basis)
        pm = pair_map(self.n)
        lam = self.dmat.d[pm.rows, pm.cols] ** 2
        return float(np.max(np.abs(self.Q @ C - C * lam), initial=0.0))

    def to_json(self):
        from .io import complex_to_json

        out = {"n": self.n, "form": "diagonal" if self.is_diagonal_form else "dense"}
        out["q"] = complex_to_json(self.Q)
        if self.is_diagonal_form:
            out["basis"] = complex_to_json(self.basis)
            out["dmat"] = self.dmat.to_json()
        return out

    @classmethod
    def from_json(cls, obj):
        from .io import complex_from_json

        n = int(obj["n"])
        form = obj.get("form", "dense")
        if form == "diagonal":
            D = DistanceMatrix.from_json(obj["dmat"])
            basis = complex_from_json(obj["basis"]) if obj.get("basis") is not None else None
            op = cls.from_dmat(D, basis)
        elif form == "dense":
            op = cls(complex_from_json(obj["q"]))
        else:
            raise ValueError(f"unknown operator form {form!r}")
        if op.n != n:
            raise DimensionError(f"declared n={n} but operator has n={op.n}")
        return op


def hs_distance(x, y):
    """Hilbert-Schmidt distance ``sqrt(1 - |<x, y>|**2)`` of unit vectors."""
    x, y = _vec(x), _vec(y)
    _same_length(x, y)
    return float(np.sqrt(min(1.0, max(0.0, 1.0 - abs(inner(x, y)) ** 2))))


def semidistance(op, x, y):
    """``sqrt(<Q w, w>)`` with ``w = x ^ y``."""
    x, y = _vec(x), _vec(y)
    if x.shape[0] != op.n:
        raise DimensionError(f"vectors of length {x.shape[0]} for n={op.n}")
    w = wedge(x, y)
    if op.in_standard_basis:
        pm = pair_map(op.n)
        v = float(np.sum(op.dmat.d[pm.rows, pm.cols] ** 2 * np.abs(w) ** 2))
    else:
        v = float(np.vdot(w, op.Q @ w).real)
    return float(np.sqrt(max(v, 0.0)))


def _pair_projector_basis(U):
    """Columns are ``(u_i (x) u_j - u_j (x) u_i) / sqrt(2)`` for ``i < j``."""
    U = np.asarray(U, dtype=np.complex128)
    n = U.shape[0]
    pm = pair_map(n)
    A = np.einsum("ap,bq->abpq", U, U).reshape(n * n, n, n)
    return (A[:, pm.rows, pm.cols] - A[:, pm.cols, pm.rows]) / np.sqrt(2.0)


def cost_matrix(D, U=None):
    """``sum_{i<j} d_ij P_ij`` on ``C^n (x) C^n``, with ``P_ij`` the projector onto
    the normalised antisymmetric vector of ``u_i, u_j``.

    Nonzero eigenvalues are exactly the ``d_ij``; the trace is their sum.
    """
    D = as_dmat(D)
    n = D.n
    U = np.eye(n, dtype=np.complex128) if U is None else np.asarray(U, np.complex128)
    if U.shape != (n, n):
        raise DimensionError("basis shape does not match dmat")
    if not is_unitary(U):
        raise ValueError("basis must be unitary")
    B = _pair_projector_basis(U)
    pm = pair_map(n)
    lam = D.d[pm.rows, pm.cols]
    return (B * lam) @ B.conj().T


def pure_state_cost(C, x, y):
    """``tr[(x x^* (x) y y^*) C**2]`` for unit ``x``, ``y``.

    With ``C = cost_matrix(D, U)`` this equals half of
    ``semidistance(from_dmat(D, U), x, y)**2``, the factor coming from the
    normalised antisymmetric vectors.
    """
    x, y = _vec(x), _vec(y)
    v = np.kron(x, y)
    Cv = C @ v
    return float(np.vdot(Cv, Cv).real)
