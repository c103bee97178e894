"""Scalar search helpers with absolute tolerances."""
import math

INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_max(f, lo, hi, tol, x0=None, f0=None):
    """Maximize ``f`` on ``[lo, hi]`` by golden-section search.

    Stops once the bracket is narrower than ``tol``.  ``(x0, f0)`` is a known
    sample (e.g. the grid maximum); the best point seen is returned, so the
    result never falls below it.

    Returns
    -------
    (x, fx)
    """
    best_x, best_f = (x0, f0) if x0 is not None else (lo, f(lo))
    a, b = lo, hi
    c = b - INVPHI * (b - a)
    d = a + INVPHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INVPHI * (b - a)
            fd = f(d)
    for x, fx in ((c, fc), (d, fd)):
        if fx > best_f:
            best_x, best_f = x, fx
    return best_x, best_f


def bisect_root(g, lo, hi, tol=1e-15, max_iter=200):
    """Root of ``g`` on ``[lo, hi]`` where ``g(lo)`` and ``g(hi)`` differ in sign."""
    glo = g(lo)
    if glo == 0.0:
        return lo
    if (glo > 0) == (g(hi) > 0):
        raise ValueError("root is not bracketed")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        if gm == 0.0 or hi - lo <= tol:
            return mid
        if (gm > 0) == (glo > 0):
            lo, glo = mid, gm
        else:
            hi = mid
    return 0.5 * (lo + hi)
