"""Pure-Python/NumPy kernels.

Same signatures and semantics as the compiled ``_ckernels`` module; used when
the extension is not built or ``QBATTERY_PURE=1`` is set.
"""
import math

import numpy as np

EPS = np.finfo(np.float64).eps


def tridiagonal_eigh(diag, offdiag, max_iter=50):
    """Implicit-shift QL on a symmetric tridiagonal matrix.

    Parameters
    ----------
    diag : array_like, shape (n,)
    offdiag : array_like, shape (n - 1,)
        ``offdiag[i]`` couples rows ``i`` and ``i + 1``.
    max_iter : int
        Iteration cap per eigenvalue.

    Returns
    -------
    w : ndarray, shape (n,)
        Eigenvalues, ascending.
    z : ndarray, shape (n, n)
        Orthonormal eigenvectors as columns.
    info : int
        -1 on success, otherwise the index of the eigenvalue that failed.
    iters : int
        Iterations spent on the failing eigenvalue (0 on success).
    """
    d = [float(x) for x in diag]
    n = len(d)
    e = [float(x) for x in offdiag] + [0.0]
    z = np.eye(n)
    if n == 0:
        return np.empty(0), z, -1, 0

    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                if abs(e[m]) <= EPS * (abs(d[m]) + abs(d[m + 1])):
                    break
                m += 1
            if m == l:
                break
            if it == max_iter:
                return np.array(d), z, l, it
            it += 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            i = m - 1
            deflated = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    # underflow: split and restart this eigenvalue
                    d[i + 1] -= p
                    e[m] = 0.0
                    deflated = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                zi = z[:, i].copy()
                zj = z[:, i + 1]
                z[:, i] = c * zi - s * zj
                z[:, i + 1] = s * zi + c * zj
                i -= 1
            if deflated:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0

    w = np.array(d)
    order = np.argsort(w, kind="stable")
    return w[order], z[:, order], -1, 0


def sector_expectations(w, v, a_re, a_im, times, weights, offdiag, chunk=2048):
    """Expectation values of a tridiagonal observable along ``psi(t)``.

    ``psi(t) = V exp(-i w t) a`` with ``a = a_re + i a_im`` the initial state
    in the eigenbasis.

    Returns
    -------
    ndarray, shape (len(times), k + 2)
        Columns ``0..k-1``: ``sum_i |psi_i|^2 weights[i, j]``;
        column ``k``: ``2 Re sum_i conj(psi_i) offdiag[i] psi_{i+1}``;
        column ``k + 1``: ``sum_i |psi_i|^2``.
    """
    w = np.asarray(w, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    a = np.asarray(a_re, dtype=np.float64) + 1j * np.asarray(a_im, dtype=np.float64)
    times = np.asarray(times, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)
    offdiag = np.asarray(offdiag, dtype=np.float64)
    k = weights.shape[1]
    out = np.empty((times.size, k + 2))
    for start in range(0, times.size, chunk):
        ts = times[start:start + chunk]
        psi = (np.exp(-1j * np.outer(ts, w)) * a) @ v.T
        pop = psi.real ** 2 + psi.imag ** 2
        sl = slice(start, start + ts.size)
        out[sl, :k] = pop @ weights
        out[sl, k] = 2.0 * np.sum(
            (np.conj(psi[:, :-1]) * psi[:, 1:]).real * offdiag, axis=1
        )
        out[sl, k + 1] = pop.sum(axis=1)
    return out
