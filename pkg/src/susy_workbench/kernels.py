"""Hot loops of the tridiagonal eigensolver.

Two interchangeable implementations live here: numba-compiled kernels and a
pure numpy/scipy path. ``WORKBENCH_BACKEND=numpy`` forces the latter; the
numba path is the default whenever numba imports.
"""
import os

import numpy as np
import scipy.linalg

try:
    from numba import njit
    HAS_NUMBA = True
except ImportError:  # pragma: no cover
    HAS_NUMBA = False

SAFMIN = np.finfo(np.float64).tiny
EPS = np.finfo(np.float64).eps


def _pivmin(e):
    if e.size == 0:
        return SAFMIN
    return SAFMIN * max(1.0, float(np.max(e * e)))


def gershgorin(d, e):
    """Interval containing every eigenvalue of the tridiagonal (d, e)."""
    ae = np.abs(e)
    r = np.zeros_like(d)
    r[:-1] += ae
    r[1:] += ae
    return float(np.min(d - r)), float(np.max(d + r))


# ---------------------------------------------------------------- numpy path

def sturm_count_numpy(d, e, shifts):
    """Eigenvalues strictly below each shift, vectorized over ``shifts``."""
    shifts = np.atleast_1d(np.asarray(shifts, dtype=np.float64))
    e2 = e * e
    pivmin = _pivmin(e)
    q = d[0] - shifts
    q = np.where(np.abs(q) < pivmin, -pivmin, q)
    count = (q < 0).astype(np.int64)
    for i in range(1, d.size):
        q = d[i] - shifts - e2[i - 1] / q
        q = np.where(np.abs(q) < pivmin, -pivmin, q)
        count += q < 0
    return count


def bisect_lowest_numpy(d, e, m, tol, max_iter):
    lo_g, hi_g = gershgorin(d, e)
    pad = 2.0 * EPS * max(abs(lo_g), abs(hi_g)) + 2.0 * SAFMIN
    lo = np.full(m, lo_g - pad)
    hi = np.full(m, hi_g + pad)
    target = np.arange(1, m + 1)
    done = np.zeros(m, dtype=bool)
    iters = 0
    while iters < max_iter:
        thresh = tol + 2.0 * EPS * np.maximum(np.abs(lo), np.abs(hi))
        mid = 0.5 * (lo + hi)
        done |= (hi - lo <= thresh) | (mid <= lo) | (mid >= hi)
        if done.all():
            break
        c = sturm_count_numpy(d, e, mid)
        up = ~done & (c >= target)
        down = ~done & (c < target)
        hi = np.where(up, mid, hi)
        lo = np.where(down, mid, lo)
        iters += 1
    return 0.5 * (lo + hi), iters, done


def _shifted_solve_numpy(d, e, sigma, b):
    n = d.size
    ab = np.zeros((3, n))
    ab[0, 1:] = e
    ab[1] = d - sigma
    ab[2, :-1] = e
    try:
        return scipy.linalg.solve_banded((1, 1), ab, b, check_finite=False)
    except np.linalg.LinAlgError:
        scale = max(1.0, float(np.max(np.abs(d))) + 2.0 * float(np.max(np.abs(e), initial=0.0)))
        ab[1] -= 10.0 * EPS * scale
        return scipy.linalg.solve_banded((1, 1), ab, b, check_finite=False)


def inverse_iteration_numpy(d, e, eigs, start, rtol, max_iter, cluster_tol):
    n, m = d.size, eigs.size
    vecs = np.zeros((n, m))
    res = np.zeros(m)
    its = np.zeros(m, dtype=np.int64)
    for k in range(m):
        lam = eigs[k]
        x = start[:, k] / np.linalg.norm(start[:, k])
        for it in range(1, max_iter + 1):
            y = _shifted_solve_numpy(d, e, lam, x)
            for j in range(k):
                if abs(eigs[j] - lam) < cluster_tol:
                    y -= np.dot(vecs[:, j], y) * vecs[:, j]
            x = y / np.linalg.norm(y)
            r = tridiag_matvec_numpy(d, e, x) - lam * x
            res[k] = np.linalg.norm(r)
            its[k] = it
            if res[k] <= rtol and it >= 2:
                break
        vecs[:, k] = x
    return vecs, res, its


def tridiag_matvec_numpy(d, e, x):
    y = d * x
    y[:-1] += e * x[1:]
    y[1:] += e * x[:-1]
    return y


# ---------------------------------------------------------------- numba path

if HAS_NUMBA:

    @njit(cache=True, nogil=True)
    def _sturm_count_nb(d, e2, pivmin, shift):
        q = d[0] - shift
        if abs(q) < pivmin:
            q = -pivmin
        count = 1 if q < 0 else 0
        for i in range(1, d.size):
            q = d[i] - shift - e2[i - 1] / q
            if abs(q) < pivmin:
                q = -pivmin
            if q < 0:
                count += 1
        return count

    @njit(cache=True, nogil=True)
    def _bisect_lowest_nb(d, e, m, lo_g, hi_g, tol, max_iter, pivmin):
        e2 = e * e
        eigs = np.empty(m)
        conv = np.zeros(m, dtype=np.bool_)
        total = 0
        for k in range(m):
            lo = lo_g if k == 0 else eigs[k - 1] - tol
            hi = hi_g
            it = 0
            while it < max_iter:
                thresh = tol + 2.0 * 2.220446049250313e-16 * max(abs(lo), abs(hi))
                if hi - lo <= thresh:
                    conv[k] = True
                    break
                mid = 0.5 * (lo + hi)
                if mid <= lo or mid >= hi:
                    conv[k] = True
                    break
                if _sturm_count_nb(d, e2, pivmin, mid) >= k + 1:
                    hi = mid
                else:
                    lo = mid
                it += 1
            total = max(total, it)
            eigs[k] = 0.5 * (lo + hi)
        return eigs, total, conv

    @njit(cache=True, nogil=True)
    def _matvec_nb(d, e, x):
        n = d.size
        y = np.empty(n)
        for i in range(n):
            s = d[i] * x[i]
            if i > 0:
                s += e[i - 1] * x[i - 1]
            if i < n - 1:
                s += e[i] * x[i + 1]
            y[i] = s
        return y

    @njit(cache=True, nogil=True)
    def _gtsv_nb(dl, dd, du, b, tiny):
        # Gaussian elimination with partial pivoting; inputs are overwritten.
        n = dd.size
        du2 = np.zeros(n)
        for i in range(n - 1):
            if abs(dd[i]) >= abs(dl[i]):
                if dd[i] == 0.0:
                    dd[i] = tiny
                f = dl[i] / dd[i]
                dd[i + 1] -= f * du[i]
                b[i + 1] -= f * b[i]
                dl[i] = 0.0
            else:
                f = dd[i] / dl[i]
                dd[i] = dl[i]
                t = dd[i + 1]
                dd[i + 1] = du[i] - f * t
                if i < n - 2:
                    du2[i] = du[i + 1]
                    du[i + 1] = -f * du2[i]
                du[i] = t
                t = b[i]
                b[i] = b[i + 1]
                b[i + 1] = t - f * b[i + 1]
        if dd[n - 1] == 0.0:
            dd[n - 1] = tiny
        x = b
        x[n - 1] = b[n - 1] / dd[n - 1]
        if n > 1:
            x[n - 2] = (b[n - 2] - du[n - 2] * x[n - 1]) / dd[n - 2]
        for i in range(n - 3, -1, -1):
            x[i] = (b[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / dd[i]
        return x

    @njit(cache=True, nogil=True)
    def _inverse_iteration_nb(d, e, eigs, start, rtol, max_iter, cluster_tol, tiny):
        n = d.size
        m = eigs.size
        vecs = np.zeros((n, m))
        res = np.zeros(m)
        its = np.zeros(m, dtype=np.int64)
        for k in range(m):
            lam = eigs[k]
            x = start[:, k].copy()
            x /= np.sqrt(np.sum(x * x))
            for it in range(1, max_iter + 1):
                y = _gtsv_nb(e.copy(), d - lam, e.copy(), x.copy(), tiny)
                for j in range(k):
                    if abs(eigs[j] - lam) < cluster_tol:
                        y -= np.sum(vecs[:, j] * y) * vecs[:, j]
                x = y / np.sqrt(np.sum(y * y))
                r = _matvec_nb(d, e, x) - lam * x
                res[k] = np.sqrt(np.sum(r * r))
                its[k] = it
                if res[k] <= rtol and it >= 2:
                    break
            vecs[:, k] = x
        return vecs, res, its


def sturm_count_numba(d, e, shift):
    return int(_sturm_count_nb(d, e * e, _pivmin(e), float(shift)))


def bisect_lowest_numba(d, e, m, tol, max_iter):
    lo_g, hi_g = gershgorin(d, e)
    pad = 2.0 * EPS * max(abs(lo_g), abs(hi_g)) + 2.0 * SAFMIN
    return _bisect_lowest_nb(d, e, m, lo_g - pad, hi_g + pad, tol, max_iter, _pivmin(e))


def inverse_iteration_numba(d, e, eigs, start, rtol, max_iter, cluster_tol):
    scale = max(1.0, float(np.max(np.abs(d))) + 2.0 * float(np.max(np.abs(e), initial=0.0)))
    return _inverse_iteration_nb(d, e, eigs, np.ascontiguousarray(start), rtol, max_iter,
                                 cluster_tol, 10.0 * EPS * scale)


def _select_backend():
    wanted = os.environ.get("WORKBENCH_BACKEND", "numba").strip().lower()
    if wanted not in ("numba", "numpy"):
        raise ValueError(f"WORKBENCH_BACKEND must be 'numba' or 'numpy', got {wanted!r}")
    if wanted == "numba" and not HAS_NUMBA:
        return "numpy"
    return wanted


BACKEND = _select_backend()

if BACKEND == "numba":
    bisect_lowest = bisect_lowest_numba
    inverse_iteration = inverse_iteration_numba
else:
    bisect_lowest = bisect_lowest_numpy
    inverse_iteration = inverse_iteration_numpy
