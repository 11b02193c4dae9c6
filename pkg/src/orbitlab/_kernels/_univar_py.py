"""Pure-numpy implementations of the univariate hot kernels.

Mirror images of ``_univar_cy``; the compiled module is preferred at import
time when available.  All coefficient arrays are complex128 in ascending
power order and are never mutated.
"""

import numpy as np

BACKEND = "python"


def horner_many(coeffs, xs):
    """Evaluate a polynomial at every point of ``xs``."""
    c = np.asarray(coeffs, dtype=np.complex128)
    x = np.asarray(xs, dtype=np.complex128)
    out = np.full_like(x, c[-1])
    for i in range(len(c) - 2, -1, -1):
        out = out * x + c[i]
    return out


def horner_pair_many(coeffs, xs):
    """Evaluate a polynomial and its derivative at every point of ``xs``."""
    c = np.asarray(coeffs, dtype=np.complex128)
    x = np.asarray(xs, dtype=np.complex128)
    p = np.full_like(x, c[-1])
    dp = np.zeros_like(x)
    for i in range(len(c) - 2, -1, -1):
        dp = dp * x + p
        p = p * x + c[i]
    return p, dp


def iterate_pair_many(coeffs, k, xs):
    """Evaluate the k-fold composition and its derivative (chain rule)."""
    x = np.asarray(xs, dtype=np.complex128)
    f = x.copy()
    df = np.ones_like(x)
    for _ in range(k):
        f, step = horner_pair_many(coeffs, f)
        df = df * step
    return f, df


def compose_self(coeffs, k):
    """Coefficients of the k-fold self-composition, ascending order."""
    c = np.asarray(coeffs, dtype=np.complex128)
    result = np.array([0.0, 1.0], dtype=np.complex128)  # identity map
    for _ in range(k):
        acc = np.array([c[-1]], dtype=np.complex128)
        for i in range(len(c) - 2, -1, -1):
            acc = np.convolve(acc, result)
            acc[0] += c[i]
        result = acc
    return result


def polish_periodic(coeffs, k, xs, tol, max_iter, escape):
    """Newton-polish candidate period-k points of the map with ``coeffs``.

    Works on F(x) = P^k(x) - x with P^k evaluated compositionally (k Horner
    passes per step), which stays well-conditioned where the expanded
    iterate coefficients do not.  ``escape`` > 0 aborts points that leave
    the disk |x| <= escape.  Returns (points, residuals, iterate
    derivatives, converged flags).
    """
    x = np.array(xs, dtype=np.complex128)
    n = len(x)
    alive = np.ones(n, dtype=bool)
    with np.errstate(all="ignore"):
        for _ in range(max_iter):
            if not alive.any():
                break
            f, df = iterate_pair_many(coeffs, k, x[alive])
            big = ~(np.isfinite(f.real) & np.isfinite(f.imag)
                    & np.isfinite(df.real) & np.isfinite(df.imag))
            if escape > 0.0:
                big |= np.abs(x[alive]) > escape
            fval = f - x[alive]
            dval = df - 1.0
            done = (np.abs(fval) <= tol) | (dval == 0.0) | big
            step = np.where(done, 0.0, fval / np.where(dval == 0.0, 1.0, dval))
            idx = np.flatnonzero(alive)
            x[idx] = x[idx] - step
            alive[idx[done]] = False
        f, df = iterate_pair_many(coeffs, k, x)
        residual = np.abs(f - x)
    residual[~np.isfinite(residual)] = np.inf
    converged = residual <= tol
    return x, residual, df, converged
