# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled univariate hot kernels.

Same contracts as ``_univar_py``; see that module for documentation.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport isfinite

cnp.import_array()

BACKEND = "cython"

ctypedef double complex cplx


cdef inline bint _finite(cplx z) nogil:
    return isfinite(z.real) and isfinite(z.imag)


def horner_many(coeffs, xs):
    cdef cnp.ndarray[cplx, ndim=1] c = np.ascontiguousarray(coeffs, dtype=np.complex128)
    cdef cnp.ndarray[cplx, ndim=1] x = np.ascontiguousarray(xs, dtype=np.complex128)
    cdef cnp.ndarray[cplx, ndim=1] out = np.empty(x.shape[0], dtype=np.complex128)
    cdef Py_ssize_t nc = c.shape[0], nx = x.shape[0], i, j
    cdef cplx acc, xv
    for j in range(nx):
        xv = x[j]
        acc = c[nc - 1]
        for i in range(nc - 2, -1, -1):
            acc = acc * xv + c[i]
        out[j] = acc
    return out


def horner_pair_many(coeffs, xs):
    cdef cnp.ndarray[cplx, ndim=1] c = np.ascontiguousarray(coeffs, dtype=np.complex128)
    cdef cnp.ndarray[cplx, ndim=1] x = np.ascontiguousarray(xs, dtype=np.complex128)
    cdef cnp.ndarray[cplx, ndim=1] p = np.empty(x.shape[0], dtype=np.complex128)
    cdef cnp.ndarray[cplx, ndim=1] dp = np.empty(x.shape[0], dtype=np.complex128)
    cdef Py_ssize_t nc = c.shape[0], nx = x.shape[0], i, j
    cdef cplx pv, dv, xv
    for j in range(nx):
        xv = x[j]
        pv = c[nc - 1]
        dv = 0
        for i in range(nc - 2, -1, -1):
            dv = dv * xv + pv
            pv = pv * xv + c[i]
        p[j] = pv
        dp[j] = dv
    return p, dp


def iterate_pair_many(coeffs, k, xs):
    cdef cnp.ndarray[cplx, ndim=1] c = np.ascontiguousarray(coeffs, dtype=np.complex128)
    cdef cnp.ndarray[cplx, ndim=1] x = np.ascontiguousarray(xs, dtype=np.complex128)
    cdef cnp.ndarray[cplx, ndim=1] f = np.empty(x.shape[0], dtype=np.complex128)
    cdef cnp.ndarray[cplx, ndim=1] df = np.empty(x.shape[0], dtype=np.complex128)
    cdef Py_ssize_t nc = c.shape[0], nx = x.shape[0], kk = k, i, j, s
    cdef cplx fv, dv, pv, qv
    for j in range(nx):
        fv = x[j]
        dv = 1
        for s in range(kk):
            pv = c[nc - 1]
            qv = 0
            for i in range(nc - 2, -1, -1):
                qv = qv * fv + pv
                pv = pv * fv + c[i]
            fv = pv
            dv = dv * qv
        f[j] = fv
        df[j] = dv
    return f, df


def compose_self(coeffs, k):
    cdef cnp.ndarray[cplx, ndim=1] c = np.ascontiguousarray(coeffs, dtype=np.complex128)
    cdef cnp.ndarray[cplx, ndim=1] result = np.array([0.0, 1.0], dtype=np.complex128)
    cdef cnp.ndarray[cplx, ndim=1] acc, nxt
    cdef Py_ssize_t nc = c.shape[0], i, a, b, s
    for s in range(k):
        acc = np.array([c[nc - 1]], dtype=np.complex128)
        for i in range(nc - 2, -1, -1):
            # acc = acc * result (full convolution), then += c[i]
            nxt = np.zeros(acc.shape[0] + result.shape[0] - 1, dtype=np.complex128)
            for a in range(acc.shape[0]):
                for b in range(result.shape[0]):
                    nxt[a + b] = nxt[a + b] + acc[a] * result[b]
            nxt[0] = nxt[0] + c[i]
            acc = nxt
        result = acc
    return result


def polish_periodic(coeffs, k, xs, double tol, int max_iter, double escape):
    cdef cnp.ndarray[cplx, ndim=1] c = np.ascontiguousarray(coeffs, dtype=np.complex128)
    cdef cnp.ndarray[cplx, ndim=1] x = np.array(xs, dtype=np.complex128)
    cdef cnp.ndarray[cplx, ndim=1] lam = np.empty(x.shape[0], dtype=np.complex128)
    cdef cnp.ndarray[double, ndim=1] residual = np.empty(x.shape[0], dtype=np.float64)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] converged = np.zeros(x.shape[0], dtype=np.uint8)
    cdef Py_ssize_t nc = c.shape[0], nx = x.shape[0], kk = k, i, j, s, it
    cdef cplx xv, fv, dv, pv, qv, fval, dval
    cdef double res
    for j in range(nx):
        xv = x[j]
        for it in range(max_iter):
            fv = xv
            dv = 1
            for s in range(kk):
                pv = c[nc - 1]
                qv = 0
                for i in range(nc - 2, -1, -1):
                    qv = qv * fv + pv
                    pv = pv * fv + c[i]
                fv = pv
                dv = dv * qv
            if not (_finite(fv) and _finite(dv)):
                break
            if escape > 0.0 and abs(xv) > escape:
                break
            fval = fv - xv
            dval = dv - 1
            if abs(fval) <= tol:
                break
            if dval == 0:
                break
            xv = xv - fval / dval
        # final evaluation at the settled point
        fv = xv
        dv = 1
        for s in range(kk):
            pv = c[nc - 1]
            qv = 0
            for i in range(nc - 2, -1, -1):
                qv = qv * fv + pv
                pv = pv * fv + c[i]
            fv = pv
            dv = dv * qv
        res = abs(fv - xv)
        if not isfinite(res):
            res = float("inf")
        x[j] = xv
        lam[j] = dv
        residual[j] = res
        converged[j] = res <= tol
    return x, residual, lam, converged.view(np.bool_)
