"""Hot numeric kernels, each in a numba flavour and a pure-numpy flavour.

The public names (``diag_deficits``, ``dense_deficits``, ``descend``) dispatch
to numba unless ``CPDIST_DISABLE_NUMBA`` is set. Both flavours are importable
explicitly (``*_nb`` / ``*_np``) so they can be cross-checked and benchmarked.

Conventions shared by every kernel:

* batches of vectors are ``(k, n)`` complex128 arrays, one row per sample;
* bivectors use the lexicographic pair order given by ``I, J = triu_indices``;
* ``Q`` is the ``m x m`` Hermitian PSD matrix representing ``E**2``.
"""
import numpy as np

from ._accel import USE_NUMBA, njit

# A pair with wedge norm (or semidistance) at or below this is treated as
# colinear: the deficit is not differentiable there.
SINGULAR = 1e-10
ARMIJO = 1e-4
T_MIN = 1e-16
T_MAX = 1e3


def pair_indices(n):
    I, J = np.triu_indices(n, 1)
    return I.astype(np.int64), J.astype(np.int64)


# ---------------------------------------------------------------------------
# deficits for operators diagonal in the standard basis
# ---------------------------------------------------------------------------


@njit
def diag_deficits_nb(d2, X, Y, Z):
    k, n = X.shape
    out = np.empty(k)
    for t in range(k):
        sxz = 0.0
        syz = 0.0
        sxy = 0.0
        for i in range(n):
            for j in range(i + 1, n):
                w = d2[i, j]
                if w == 0.0:
                    continue
                c = X[t, i] * Z[t, j] - X[t, j] * Z[t, i]
                sxz += w * (c.real * c.real + c.imag * c.imag)
                c = Y[t, i] * Z[t, j] - Y[t, j] * Z[t, i]
                syz += w * (c.real * c.real + c.imag * c.imag)
                c = X[t, i] * Y[t, j] - X[t, j] * Y[t, i]
                sxy += w * (c.real * c.real + c.imag * c.imag)
        out[t] = np.sqrt(sxz) + np.sqrt(syz) - np.sqrt(sxy)
    return out


def diag_deficits_np(d2, X, Y, Z):
    I, J = pair_indices(X.shape[1])
    w = d2[I, J]

    def dist(A, B):
        c = A[:, I] * B[:, J] - A[:, J] * B[:, I]
        return np.sqrt((c.real**2 + c.imag**2) @ w)

    return dist(X, Z) + dist(Y, Z) - dist(X, Y)


# ---------------------------------------------------------------------------
# deficits for a dense Q
# ---------------------------------------------------------------------------


@njit
def _wedge1(x, y, I, J):
    m = I.shape[0]
    w = np.empty(m, dtype=np.complex128)
    for p in range(m):
        w[p] = x[I[p]] * y[J[p]] - x[J[p]] * y[I[p]]
    return w


@njit
def _qform1(Q, w):
    m = w.shape[0]
    s = 0.0
    for a in range(m):
        acc = 0j
        for b in range(m):
            acc += Q[a, b] * w[b]
        s += (np.conj(w[a]) * acc).real
    return s


@njit
def dense_deficits_nb(Q, I, J, X, Y, Z):
    k = X.shape[0]
    out = np.empty(k)
    for t in range(k):
        a = _qform1(Q, _wedge1(X[t], Z[t], I, J))
        b = _qform1(Q, _wedge1(Y[t], Z[t], I, J))
        c = _qform1(Q, _wedge1(X[t], Y[t], I, J))
        out[t] = np.sqrt(max(a, 0.0)) + np.sqrt(max(b, 0.0)) - np.sqrt(max(c, 0.0))
    return out


def _wedge_batch(A, B, I, J):
    return A[:, I] * B[:, J] - A[:, J] * B[:, I]


def _qform_batch(Q, W):
    return np.einsum("ka,ka->k", W.conj(), W @ Q.T).real


def dense_deficits_np(Q, I, J, X, Y, Z):
    a = _qform_batch(Q, _wedge_batch(X, Z, I, J))
    b = _qform_batch(Q, _wedge_batch(Y, Z, I, J))
    c = _qform_batch(Q, _wedge_batch(X, Y, I, J))
    return (
        np.sqrt(np.maximum(a, 0.0))
        + np.sqrt(np.maximum(b, 0.0))
        - np.sqrt(np.maximum(c, 0.0))
    )


# ---------------------------------------------------------------------------
# value + Euclidean gradient of the deficit
# ---------------------------------------------------------------------------


@njit
def _vee1(C, v, I, J, n):
    out = np.zeros(n, dtype=np.complex128)
    for p in range(I.shape[0]):
        out[I[p]] += C[p] * np.conj(v[J[p]])
        out[J[p]] -= C[p] * np.conj(v[I[p]])
    return out


@njit
def _eval1(Q, I, J, x, y, z):
    n = x.shape[0]
    wxz = _wedge1(x, z, I, J)
    wyz = _wedge1(y, z, I, J)
    wxy = _wedge1(x, y, I, J)
    cxz = Q @ wxz
    cyz = Q @ wyz
    cxy = Q @ wxy
    a2 = 0.0
    b2 = 0.0
    c2 = 0.0
    nxz = 0.0
    nyz = 0.0
    nxy = 0.0
    for p in range(wxz.shape[0]):
        a2 += (np.conj(wxz[p]) * cxz[p]).real
        b2 += (np.conj(wyz[p]) * cyz[p]).real
        c2 += (np.conj(wxy[p]) * cxy[p]).real
        nxz += abs(wxz[p]) ** 2
        nyz += abs(wyz[p]) ** 2
        nxy += abs(wxy[p]) ** 2
    a = np.sqrt(max(a2, 0.0))
    b = np.sqrt(max(b2, 0.0))
    c = np.sqrt(max(c2, 0.0))
    f = a + b - c
    s2 = SINGULAR * SINGULAR
    ok = (
        nxz > s2 and nyz > s2 and nxy > s2
        and a > SINGULAR and b > SINGULAR and c > SINGULAR
    )
    gx = np.zeros(n, dtype=np.complex128)
    gy = np.zeros(n, dtype=np.complex128)
    gz = np.zeros(n, dtype=np.complex128)
    if ok:
        gx = _vee1(cxz, z, I, J, n) / a - _vee1(cxy, y, I, J, n) / c
        gy = _vee1(cyz, z, I, J, n) / b + _vee1(cxy, x, I, J, n) / c
        gz = -_vee1(cxz, x, I, J, n) / a - _vee1(cyz, y, I, J, n) / b
    return f, ok, gx, gy, gz


@njit
def _tangent(u, g):
    s = 0.0
    for i in range(u.shape[0]):
        s += (np.conj(u[i]) * g[i]).real
    return g - s * u


@njit
def _unit(u):
    s = 0.0
    for i in range(u.shape[0]):
        s += abs(u[i]) ** 2
    return u / np.sqrt(s)


@njit
def descend_nb(Q, I, J, X0, Y0, Z0, max_steps, gtol):
    k, n = X0.shape
    X = X0.copy()
    Y = Y0.copy()
    Z = Z0.copy()
    fval = np.empty(k)
    gnorm = np.empty(k)
    iters = np.zeros(k, dtype=np.int64)
    for r in range(k):
        x = X[r].copy()
        y = Y[r].copy()
        z = Z[r].copy()
        f, ok, gx, gy, gz = _eval1(Q, I, J, x, y, z)
        if not ok:
            fval[r] = f
            gnorm[r] = np.nan
            continue
        px = _tangent(x, gx)
        py = _tangent(y, gy)
        pz = _tangent(z, gz)
        gn2 = 0.0
        for i in range(n):
            gn2 += abs(px[i]) ** 2 + abs(py[i]) ** 2 + abs(pz[i]) ** 2
        t = 1.0
        it = 0
        while it < max_steps:
            if np.sqrt(gn2) < gtol:
                break
            accepted = False
            while t >= T_MIN:
                xn = _unit(x - t * px)
                yn = _unit(y - t * py)
                zn = _unit(z - t * pz)
                fn, okn, gxn, gyn, gzn = _eval1(Q, I, J, xn, yn, zn)
                if okn and fn < f and fn <= f - ARMIJO * t * gn2:
                    accepted = True
                    break
                t *= 0.5
            if not accepted:
                break
            x = xn
            y = yn
            z = zn
            f = fn
            px = _tangent(x, gxn)
            py = _tangent(y, gyn)
            pz = _tangent(z, gzn)
            gn2 = 0.0
            for i in range(n):
                gn2 += abs(px[i]) ** 2 + abs(py[i]) ** 2 + abs(pz[i]) ** 2
            it += 1
            t = min(2.0 * t, T_MAX)
        X[r] = x
        Y[r] = y
        Z[r] = z
        fval[r] = f
        gnorm[r] = np.sqrt(gn2)
        iters[r] = it
    return X, Y, Z, fval, gnorm, iters


def _vee_batch(C, V, I, J):
    k, n = V.shape
    S = np.zeros((k, n, n), dtype=np.complex128)
    S[:, I, J] = C
    S[:, J, I] = -C
    return np.einsum("kij,kj->ki", S, V.conj())


def eval_batch_np(Q, I, J, X, Y, Z):
    """Deficits, nonsingular mask and Euclidean gradients for a batch of triples."""
    wxz = _wedge_batch(X, Z, I, J)
    wyz = _wedge_batch(Y, Z, I, J)
    wxy = _wedge_batch(X, Y, I, J)
    cxz = wxz @ Q.T
    cyz = wyz @ Q.T
    cxy = wxy @ Q.T
    a = np.sqrt(np.maximum(np.einsum("ka,ka->k", wxz.conj(), cxz).real, 0.0))
    b = np.sqrt(np.maximum(np.einsum("ka,ka->k", wyz.conj(), cyz).real, 0.0))
    c = np.sqrt(np.maximum(np.einsum("ka,ka->k", wxy.conj(), cxy).real, 0.0))
    f = a + b - c
    s2 = SINGULAR * SINGULAR
    nrm = lambda w: (w.real**2 + w.imag**2).sum(axis=1)  # noqa: E731
    ok = (
        (nrm(wxz) > s2) & (nrm(wyz) > s2) & (nrm(wxy) > s2)
        & (a > SINGULAR) & (b > SINGULAR) & (c > SINGULAR)
    )
    sa = np.where(ok, a, 1.0)[:, None]
    sb = np.where(ok, b, 1.0)[:, None]
    sc = np.where(ok, c, 1.0)[:, None]
    gx = _vee_batch(cxz, Z, I, J) / sa - _vee_batch(cxy, Y, I, J) / sc
    gy = _vee_batch(cyz, Z, I, J) / sb + _vee_batch(cxy, X, I, J) / sc
    gz = -_vee_batch(cxz, X, I, J) / sa - _vee_batch(cyz, Y, I, J) / sb
    gx[~ok] = 0
    gy[~ok] = 0
    gz[~ok] = 0
    return f, ok, gx, gy, gz


def _tangent_batch(U, G):
    s = np.einsum("ki,ki->k", U.conj(), G).real
    return G - s[:, None] * U


def _unit_batch(U):
    return U / np.linalg.norm(U, axis=1, keepdims=True)


def descend_np(Q, I, J, X0, Y0, Z0, max_steps, gtol):
    X = np.array(X0, dtype=np.complex128)
    Y = np.array(Y0, dtype=np.complex128)
    Z = np.array(Z0, dtype=np.complex128)
    k = X.shape[0]
    f, ok, gx, gy, gz = eval_batch_np(Q, I, J, X, Y, Z)
    PX, PY, PZ = _tangent_batch(X, gx), _tangent_batch(Y, gy), _tangent_batch(Z, gz)

    def sqnorm(P):
        return (P.real**2 + P.imag**2).sum(axis=1)

    gn2 = sqnorm(PX) + sqnorm(PY) + sqnorm(PZ)
    t = np.ones(k)
    iters = np.zeros(k, dtype=np.int64)
    done = ~ok
    for _ in range(max_steps):
        done |= np.sqrt(gn2) < gtol
        act = np.flatnonzero(~done)
        if act.size == 0:
            break
        tt = t[act].copy()
        accepted = np.zeros(act.size, dtype=bool)
        while True:
            sel = np.flatnonzero(~accepted & (tt >= T_MIN))
            if sel.size == 0:
                break
            idx = act[sel]
            ts = tt[sel][:, None]
            xn = _unit_batch(X[idx] - ts * PX[idx])
            yn = _unit_batch(Y[idx] - ts * PY[idx])
            zn = _unit_batch(Z[idx] - ts * PZ[idx])
            fn, okn, gxn, gyn, gzn = eval_batch_np(Q, I, J, xn, yn, zn)
            good = okn & (fn < f[idx]) & (fn <= f[idx] - ARMIJO * tt[sel] * gn2[idx])
            gi = idx[good]
            X[gi], Y[gi], Z[gi], f[gi] = xn[good], yn[good], zn[good], fn[good]
            PX[gi] = _tangent_batch(xn[good], gxn[good])
            PY[gi] = _tangent_batch(yn[good], gyn[good])
            PZ[gi] = _tangent_batch(zn[good], gzn[good])
            gn2[gi] = sqnorm(PX[gi]) + sqnorm(PY[gi]) + sqnorm(PZ[gi])
            accepted[sel[good]] = True
            tt[sel[~good]] *= 0.5
        done[act[~accepted]] = True
        won = act[accepted]
        iters[won] += 1
        t[won] = np.minimum(2.0 * tt[accepted], T_MAX)
    gnorm = np.where(ok, np.sqrt(gn2), np.nan)
    return X, Y, Z, f, gnorm, iters


if USE_NUMBA:
    diag_deficits = diag_deficits_nb
    dense_deficits = dense_deficits_nb
    descend = descend_nb
else:
    diag_deficits = diag_deficits_np
    dense_deficits = dense_deficits_np
    descend = descend_np
