"""Bracketed scalar/vector root finding.

Everything here is derivative-free on purpose: the algebraic systems we feed
in are only guaranteed to have sign changes, not smooth derivatives.
"""

import numpy as np

from .errors import SearchError

MAX_BISECT = 200


def bisect(f, lo, hi, rtol=1e-14, atol=0.0, maxiter=MAX_BISECT):
    """Plain bisection on a sign change. Returns the midpoint estimate."""
    if lo > hi:
        lo, hi = hi, lo
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0:
        raise SearchError("no sign change for bisection", (lo, hi))
    for _ in range(maxiter):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if flo * fm < 0:
            hi, fhi = mid, fm
        else:
            lo, flo = mid, fm
        if hi - lo <= atol + rtol * abs(mid):
            break
    return 0.5 * (lo + hi)


def bisect_vec(f, lo, hi, rtol=1e-14, maxiter=MAX_BISECT):
    """Vectorized bisection: f maps arrays to arrays, lo/hi are arrays.

    Elements without a sign change come back as nan.
    """
    lo = np.asarray(lo, float).copy()
    hi = np.asarray(hi, float).copy()
    lo, hi = np.minimum(lo, hi), np.maximum(lo, hi)
    flo = f(lo)
    fhi = f(hi)
    ok = flo * fhi <= 0
    for _ in range(maxiter):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        down = flo * fm <= 0
        hi = np.where(down, mid, hi)
        lo = np.where(down, lo, mid)
        flo = np.where(down, flo, fm)
        if np.all(hi - lo <= rtol * np.maximum(np.abs(lo), np.abs(hi))):
            break
    out = 0.5 * (lo + hi)
    return np.where(ok, out, np.nan)


def expand_bracket(f, lo, hi, factor=2.0, hi_max=np.inf):
    """Grow hi geometrically until f changes sign on [lo, hi]."""
    flo = f(lo)
    while f(hi) * flo > 0:
        hi *= factor
        if hi > hi_max:
            raise SearchError("bracket expansion exceeded bound", (lo, hi_max))
    return lo, hi


def golden_min(f, lo, hi, xtol=1e-13, maxiter=300):
    """Golden-section minimization of a unimodal-ish scalar function."""
    invphi = (np.sqrt(5.0) - 1) / 2
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(maxiter):
        if b - a <= xtol:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)
