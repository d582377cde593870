"""Triangle inequality for operator-induced semi-distances.

The central quantity is the deficit
``f(x, y, z) = d(x, z) + d(y, z) - d(x, y)``; an operator is triangular iff
``f >= 0`` on every triple of states.
"""
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
from typing import Optional

import numpy as np
from scipy.optimize import minimize

from . import kernels
from .distmat import DistanceMatrix
from .io import complex_to_json, complex_from_json
from .semimetrics import WedgeOperatorQ, semidistance
from .wedge import (
    STRUCT_TOL,
    DimensionError,
    _vec,
    bivector_vee,
    compound2,
    gram_schmidt,
    haar_random_states,
    hermitian_part,
    inner,
    is_psd,
    is_unitary,
    orthonormal_triples,
    pair_map,
    wedge,
)

DEFAULT_RESTARTS = 20
DEFAULT_STEPS = 500
DEFAULT_GTOL = 1e-9
CERT_TOL = 1e-12
SAMPLE_BATCH = 8192
# descent endpoints handed to the quasi-Newton polish
POLISH_CANDIDATES = 3


class SingularConfigurationError(ValueError):
    """Two of the three states are (numerically) colinear."""


class Verdict(str, Enum):
    TRIANGULAR = "certified-triangular"
    NOT_TRIANGULAR = "certified-not"
    INCONCLUSIVE = "inconclusive"


class Method(str, Enum):
    SPECTRAL = "sufficient-spectral"
    SUBSPACE = "subspace-sampling"
    TRIPLES = "triple-sampling"
    CLOSED_FORM = "closed-form-n3"
    MINIMIZER = "minimizer"


@dataclass(frozen=True)
class DeficitRecord:
    x: np.ndarray = field(repr=False)
    y: np.ndarray = field(repr=False)
    z: np.ndarray = field(repr=False)
    deficit: float
    residual: float = float("nan")
    iterations: int = 0

    def recompute(self, op):
        return deficit(op, self.x, self.y, self.z)

    def to_json(self):
        return {
            "x": complex_to_json(self.x),
            "y": complex_to_json(self.y),
            "z": complex_to_json(self.z),
            "deficit": self.deficit,
            "residual": None if np.isnan(self.residual) else self.residual,
            "iterations": int(self.iterations),
        }

    @classmethod
    def from_json(cls, obj):
        res = obj.get("residual")
        return cls(
            complex_from_json(obj["x"]),
            complex_from_json(obj["y"]),
            complex_from_json(obj["z"]),
            float(obj["deficit"]),
            float("nan") if res is None else float(res),
            int(obj.get("iterations", 0)),
        )


@dataclass(frozen=True)
class CriterionReport:
    method: Method
    verdict: Verdict
    worst: Optional[DeficitRecord] = None
    samples: int = 0
    tolerance: float = CERT_TOL

    def __post_init__(self):
        if self.verdict is Verdict.NOT_TRIANGULAR:
            if self.worst is None or not self.worst.deficit < -self.tolerance:
                raise ValueError("a violation verdict needs a witness below -tolerance")

    def to_json(self):
        return {
            "method": self.method.value,
            "verdict": self.verdict.value,
            "worst": None if self.worst is None else self.worst.to_json(),
            "samples": int(self.samples),
            "tolerance": self.tolerance,
        }


# ---------------------------------------------------------------------------
# deficit and its gradient
# ---------------------------------------------------------------------------


def _check_dims(op, *vs):
    vs = [_vec(v) for v in vs]
    for v in vs:
        if v.shape[0] != op.n:
            raise DimensionError(f"vector of length {v.shape[0]} for n={op.n}")
    return vs


def deficit(op, x, y, z):
    """``d(x, z) + d(y, z) - d(x, y)``; negative exactly when the triple
    violates the triangle inequality."""
    x, y, z = _check_dims(op, x, y, z)
    return semidistance(op, x, z) + semidistance(op, y, z) - semidistance(op, x, y)


def _parts(op, x, y, z):
    wxz, wyz, wxy = wedge(x, z), wedge(y, z), wedge(x, y)
    for name, w in (("x^z", wxz), ("y^z", wyz), ("x^y", wxy)):
        if np.linalg.norm(w) <= kernels.SINGULAR:
            raise SingularConfigurationError(f"{name} vanishes")
    cxz, cyz, cxy = op.Q @ wxz, op.Q @ wyz, op.Q @ wxy
    a = np.sqrt(max(np.vdot(wxz, cxz).real, 0.0))
    b = np.sqrt(max(np.vdot(wyz, cyz).real, 0.0))
    c = np.sqrt(max(np.vdot(wxy, cxy).real, 0.0))
    if min(a, b, c) <= kernels.SINGULAR:
        raise SingularConfigurationError("a semidistance vanishes; deficit not differentiable")
    return a, b, c, cxz, cyz, cxy


def deficit_gradient(op, x, y, z):
    """Euclidean gradients ``(g_x, g_y, g_z)`` of the deficit.

    Convention: for a perturbation ``x -> x + h`` the first-order change is
    ``Re <g_x, h>``. The states need not be normalised.
    """
    x, y, z = _check_dims(op, x, y, z)
    a, b, c, cxz, cyz, cxy = _parts(op, x, y, z)
    gx = bivector_vee(cxz, z) / a - bivector_vee(cxy, y) / c
    gy = bivector_vee(cyz, z) / b + bivector_vee(cxy, x) / c
    gz = -bivector_vee(cxz, x) / a - bivector_vee(cyz, y) / b
    return gx, gy, gz


def stationarity_residual(op, x, y, z):
    """Norm of the Lagrange residual on the product of unit spheres.

    The multipliers are ``d(x,z) - d(x,y)``, ``d(y,z) - d(x,y)`` and
    ``d(x,z) + d(y,z)``. For unit states each equals ``Re <u, g_u>`` by
    homogeneity, so the residual is the norm of the tangential gradient.
    ``nan`` on the singular locus.
    """
    x, y, z = _check_dims(op, x, y, z)
    try:
        a, b, c, *_ = _parts(op, x, y, z)
        gx, gy, gz = deficit_gradient(op, x, y, z)
    except SingularConfigurationError:
        return float("nan")
    lam, mu, nu = a - c, b - c, a + b
    r = (
        np.linalg.norm(gx - lam * x) ** 2
        + np.linalg.norm(gy - mu * y) ** 2
        + np.linalg.norm(gz - nu * z) ** 2
    )
    return float(np.sqrt(r))


# ---------------------------------------------------------------------------
# minimisation
# ---------------------------------------------------------------------------


def _basis_triples(op):
    U = op.basis
    n = op.n
    xs, ys, zs = [], [], []
    for i, j, k in combinations(range(n), 3):
        for p, q, r in ((i, j, k), (i, k, j), (j, k, i)):
            xs.append(U[:, p])
            ys.append(U[:, q])
            zs.append(U[:, r])
    return np.array(xs), np.array(ys), np.array(zs)


def descend_batch(op, X, Y, Z, max_steps=DEFAULT_STEPS, gtol=DEFAULT_GTOL):
    """Run projected-gradient descent from every row of ``(X, Y, Z)``."""
    I, J = kernels.pair_indices(op.n)
    Q = np.ascontiguousarray(op.Q)
    return kernels.descend(
        Q, I, J,
        np.ascontiguousarray(X, dtype=np.complex128),
        np.ascontiguousarray(Y, dtype=np.complex128),
        np.ascontiguousarray(Z, dtype=np.complex128),
        int(max_steps), float(gtol),
    )


def _polish(op, x, y, z, gtol):
    """L-BFGS on ``f(x/|x|, y/|y|, z/|z|)`` over unconstrained ``C^{3n}``.

    Projected gradient stalls on badly conditioned minima; this recovers
    the last digits. Returns the normalised triple, or ``None`` if the run
    touched the singular locus.
    """
    n = op.n

    def split(v):
        c = v[: 3 * n] + 1j * v[3 * n:]
        return c[:n], c[n: 2 * n], c[2 * n:]

    def fun(v):
        us = split(v)
        norms = [np.linalg.norm(u) for u in us]
        units = [u / r for u, r in zip(us, norms)]
        a, b, c, *_ = _parts(op, *units)
        gs = deficit_gradient(op, *units)
        # chain rule through u -> u/|u|
        g = np.concatenate([(gu - u * np.vdot(u, gu).real) / r
                            for gu, u, r in zip(gs, units, norms)])
        return a + b - c, np.concatenate([g.real, g.imag])

    c0 = np.concatenate([x, y, z])
    v0 = np.concatenate([c0.real, c0.imag])
    try:
        res = minimize(fun, v0, jac=True, method="L-BFGS-B",
                       options={"gtol": gtol, "ftol": 0.0, "maxiter": 1000})
    except SingularConfigurationError:
        return None
    return tuple(u / np.linalg.norm(u) for u in split(res.x))


def minimize_deficit(op, restarts=DEFAULT_RESTARTS, max_steps=DEFAULT_STEPS,
                     rng=None, tol=DEFAULT_GTOL):
    """Smallest deficit found by multi-start projected gradient descent.

    Starts are ``restarts`` Haar orthonormal triples, plus every basis
    triple when ``op`` carries a diagonal form. The degenerate triple
    ``(x, y, y)`` with deficit 0 is always a candidate, so the result is
    never positive. ``tol`` is the projected-gradient stopping threshold.
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    rng = np.random.default_rng(rng)
    n = op.n
    X, Y, Z = orthonormal_triples(restarts, n, rng)
    if op.is_diagonal_form and n >= 3:
        bx, by, bz = _basis_triples(op)
        X, Y, Z = np.vstack([X, bx]), np.vstack([Y, by]), np.vstack([Z, bz])
    X, Y, Z, f, gnorm, iters = descend_batch(op, X, Y, Z, max_steps, tol)
    best = int(np.argmin(f))
    if f[best] < 0.0:
        x, y, z = X[best], Y[best], Z[best]
        value = f[best]
        for k in np.argsort(f)[:POLISH_CANDIDATES]:
            if not f[k] < 0.0:
                break
            out = _polish(op, X[k], Y[k], Z[k], tol * 1e-3)
            if out is not None and deficit(op, *out) < value:
                (x, y, z), value = out, deficit(op, *out)
        return DeficitRecord(
            x, y, z, deficit(op, x, y, z),
            stationarity_residual(op, x, y, z), int(iters[best]),
        )
    x, y = X[0], Y[0]
    return DeficitRecord(x, y, y.copy(), deficit(op, x, y, y), float("nan"), 0)


# ---------------------------------------------------------------------------
# three-dimensional subspaces
# ---------------------------------------------------------------------------


def _orthonormal_rows(ws, tol=STRUCT_TOL):
    W = np.array([_vec(w) for w in ws])
    G = W.conj() @ W.T
    if np.max(np.abs(G - np.eye(len(ws)))) > tol:
        raise ValueError("vectors are not orthonormal")
    return W


def restriction(op, w1, w2, w3):
    """Compression of ``Q`` to bivectors of ``span(w1, w2, w3)``.

    Rows and columns are ordered ``w1^w2, w1^w3, w2^w3``.
    """
    W = _orthonormal_rows(_check_dims(op, w1, w2, w3))
    B = np.stack([wedge(W[0], W[1]), wedge(W[0], W[2]), wedge(W[1], W[2])], axis=1)
    return hermitian_part(B.conj().T @ op.Q @ B)


@dataclass(frozen=True)
class ThreeDCheck:
    ok: bool
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray = field(repr=False)

    def __bool__(self):
        return self.ok

    @property
    def margin(self):
        s = np.sqrt(np.clip(self.eigenvalues, 0.0, None))
        return float(s[1] + s[2] - s[0])


def check_3d_criterion(F, tol=CERT_TOL):
    """Triangle test on a 3x3 compression: ``sqrt(l2) + sqrt(l3) >= sqrt(l1)``
    for eigenvalues ``l1 >= l2 >= l3``."""
    F = np.asarray(F, dtype=np.complex128)
    if F.shape != (3, 3):
        raise DimensionError(f"expected a 3x3 matrix, got {F.shape}")
    if not is_psd(F):
        raise ValueError("restricted matrix is not PSD")
    w, V = np.linalg.eigh(hermitian_part(F))
    w, V = w[::-1], V[:, ::-1]
    s = np.sqrt(np.clip(w, 0.0, None))
    return ThreeDCheck(bool(s[1] + s[2] >= s[0] - tol), w, V)


def _complement(coeffs):
    """Unit normal (in subspace coordinates) of the plane carrying the
    decomposable bivector ``a w1^w2 + b w1^w3 + c w2^w3``."""
    a, b, c = coeffs
    k = np.conj(np.array([c, -b, a]))
    return k / np.linalg.norm(k)


def criterion_witness(check, w1, w2, w3):
    """Triple inside ``span(w1, w2, w3)`` whose deficit is
    ``sqrt(l2) + sqrt(l3) - sqrt(l1)`` for the restriction's eigenvalues."""
    W = np.array([_vec(w) for w in (w1, w2, w3)])
    V = check.eigenvectors
    z = _complement(V[:, 0]) @ W
    x = _complement(V[:, 1]) @ W
    y = _complement(V[:, 2]) @ W
    return x, y, z


def certify_sufficient(op, tol=CERT_TOL):
    """Spectral sufficient condition: with ``s`` the singular values of ``E``
    in descending order, ``s[-2] + s[-1] >= s[0]`` certifies triangularity.
    ``False`` is inconclusive."""
    s = np.sqrt(np.clip(np.linalg.eigvalsh(hermitian_part(op.Q)), 0.0, None))[::-1]
    if s.size < 2:
        # one pair only: d is a multiple of the Hilbert-Schmidt metric
        return True
    return bool(s[-2] + s[-1] >= s[0] - tol * max(1.0, s[0]))


def sample_triples(op, count, rng, vector_mode="orthonormal", batch=SAMPLE_BATCH):
    """Minimum deficit over ``count`` random triples and the argmin triple.

    ``vector_mode`` is ``"orthonormal"`` (Haar triples orthonormalised) or
    ``"haar"`` (three independent Haar states).
    """
    n = op.n
    I, J = kernels.pair_indices(n)
    Q = np.ascontiguousarray(op.Q)
    best = (np.inf, None)
    done = 0
    while done < count:
        k = min(batch, count - done)
        if vector_mode == "orthonormal":
            X, Y, Z = orthonormal_triples(k, n, rng)
        elif vector_mode == "haar":
            X, Y, Z = (haar_random_states(k, n, rng) for _ in range(3))
        else:
            raise ValueError(f"unknown vector mode {vector_mode!r}")
        f = kernels.dense_deficits(Q, I, J, X, Y, Z)
        t = int(np.argmin(f))
        if f[t] < best[0]:
            best = (float(f[t]), (X[t].copy(), Y[t].copy(), Z[t].copy()))
        done += k
    return best


def sample_triples_test(op, count, rng=None, tol=CERT_TOL, vector_mode="orthonormal"):
    """Search random triples for a violation.

    Returns ``certified-not`` with a re-verified witness, or ``inconclusive``
    with the worst triple seen.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = np.random.default_rng(rng)
    _, (x, y, z) = sample_triples(op, count, rng, vector_mode)
    rec = DeficitRecord(x, y, z, deficit(op, x, y, z))
    verdict = Verdict.NOT_TRIANGULAR if rec.deficit < -tol else Verdict.INCONCLUSIVE
    return CriterionReport(Method.TRIPLES, verdict, rec, count, tol)


def subspace_sampling_test(op, count, rng=None, tol=CERT_TOL):
    """Apply :func:`check_3d_criterion` to ``count`` random 3-dim subspaces."""
    rng = np.random.default_rng(rng)
    worst = None
    for _ in range(count):
        W = orthonormal_triples(1, op.n, rng)
        ws = [v[0] for v in W]
        chk = check_3d_criterion(restriction(op, *ws), tol)
        if worst is None or chk.margin < worst[0].margin:
            worst = (chk, ws)
    chk, ws = worst
    x, y, z = criterion_witness(chk, *ws)
    rec = DeficitRecord(x, y, z, deficit(op, x, y, z))
    verdict = Verdict.NOT_TRIANGULAR if rec.deficit < -tol else Verdict.INCONCLUSIVE
    return CriterionReport(Method.SUBSPACE, verdict, rec, count, tol)


# ---------------------------------------------------------------------------
# n = 3 closed forms
# ---------------------------------------------------------------------------


def _sorted_labels(d12, d13, d23):
    v = np.array([d12, d13, d23], dtype=float)
    if np.any(v < 0) or not np.all(np.isfinite(v)):
        raise ValueError("labels must be finite and nonnegative")
    return np.sort(v)


def mu_closed_form_n3(d12, d13, d23):
    """Minimum deficit for ``n = 3``: ``min(0, s1 + s2 - s3)`` with the labels
    sorted ascending."""
    s = _sorted_labels(d12, d13, d23)
    return float(min(0.0, s[0] + s[1] - s[2]))


def extreme_ray_n3(d12, d13, d23, tol=CERT_TOL):
    """True iff the largest label equals the sum of the other two and is positive."""
    s = _sorted_labels(d12, d13, d23)
    return bool(s[2] > 0 and abs(s[2] - s[0] - s[1]) <= tol * max(1.0, s[2]))


# ---------------------------------------------------------------------------
# cone operations and symmetries
# ---------------------------------------------------------------------------


def cone_combine(op1, op2):
    """Operator with ``Q = Q1 + Q2``. Keeps a diagonal form when both inputs
    share the same basis."""
    if op1.n != op2.n:
        raise DimensionError(f"n={op1.n} vs n={op2.n}")
    Q = op1.Q + op2.Q
    if (
        op1.is_diagonal_form and op2.is_diagonal_form
        and np.allclose(op1.basis, op2.basis, atol=1e-14)
    ):
        D = DistanceMatrix(np.sqrt(op1.dmat.d ** 2 + op2.dmat.d ** 2))
        return WedgeOperatorQ(Q, op1.basis, D)
    return WedgeOperatorQ(Q)


def conjugate_local(op, U):
    """``C2(U)^* Q C2(U)``, so that the new operator evaluated at ``x``
    equals the old one evaluated at ``U x``."""
    U = np.asarray(U, dtype=np.complex128)
    if U.shape != (op.n, op.n):
        raise DimensionError(f"U must be {op.n}x{op.n}")
    if not is_unitary(U):
        raise ValueError("U is not unitary")
    C = compound2(U)
    Q = C.conj().T @ op.Q @ C
    if op.is_diagonal_form:
        return WedgeOperatorQ(Q, U.conj().T @ op.basis, op.dmat)
    return WedgeOperatorQ(Q)


def permute_wedge_basis(op, swap):
    """Exchange two eigenvectors ``u_i^u_j`` and ``u_k^u_l`` of a diagonal-form
    operator, i.e. conjugate ``Q`` by the corresponding permutation of the
    wedge basis. ``swap = ((i, j), (k, l))``, 0-based. Labels follow the swap.
    """
    if not op.is_diagonal_form:
        raise ValueError("operator has no diagonal form")
    n = op.n
    pm = pair_map(n)
    try:
        (i, j), (k, l) = swap
        p, q = pm.index(int(i), int(j)), pm.index(int(k), int(l))
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"invalid pair swap {swap!r}") from exc
    perm = np.arange(pm.m)
    perm[p], perm[q] = q, p
    C = compound2(op.basis)
    V = C[:, perm] @ C.conj().T
    Q = V @ op.Q @ V.conj().T
    d = op.dmat.d.copy()
    (a, b), (c, e) = pm.pair(p), pm.pair(q)
    d[a, b], d[c, e] = op.dmat.d[c, e], op.dmat.d[a, b]
    d[b, a], d[e, c] = d[a, b], d[c, e]
    return WedgeOperatorQ(Q, op.basis, DistanceMatrix(d))


def triple_from_vectors(vectors):
    """Orthonormalise three vectors (used by the CLI)."""
    return gram_schmidt(vectors)


__all__ = [
    "CriterionReport", "DeficitRecord", "Method", "SingularConfigurationError",
    "ThreeDCheck", "Verdict", "certify_sufficient", "check_3d_criterion",
    "cone_combine", "conjugate_local", "criterion_witness", "deficit",
    "deficit_gradient", "extreme_ray_n3", "minimize_deficit",
    "mu_closed_form_n3", "permute_wedge_basis", "restriction",
    "sample_triples", "sample_triples_test", "stationarity_residual",
    "subspace_sampling_test",
]
