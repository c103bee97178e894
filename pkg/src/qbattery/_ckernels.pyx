# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; see ``_kernels_py`` for the reference semantics."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, hypot, copysign, cos, sin

cnp.import_array()

cdef double EPS = np.finfo(np.float64).eps


def tridiagonal_eigh(diag, offdiag, int max_iter=50):
    cdef Py_ssize_t n = len(diag)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] d_arr = np.array(diag, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] e_arr = np.zeros(max(n, 1), dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] z_arr = np.eye(n, dtype=np.float64)
    if n == 0:
        return np.empty(0), z_arr, -1, 0
    e_arr[:n - 1] = np.asarray(offdiag, dtype=np.float64)

    cdef double[::1] d = d_arr
    cdef double[::1] e = e_arr
    cdef double[:, ::1] z = z_arr
    cdef Py_ssize_t l, m, i, k
    cdef int it
    cdef double g, r, s, c, p, f, b, zk
    cdef bint deflated

    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                if fabs(e[m]) <= EPS * (fabs(d[m]) + fabs(d[m + 1])):
                    break
                m += 1
            if m == l:
                break
            if it == max_iter:
                return d_arr, z_arr, l, it
            it += 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + copysign(r, g))
            s = 1.0
            c = 1.0
            p = 0.0
            i = m - 1
            deflated = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
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
                for k in range(n):
                    zk = z[k, i + 1]
                    z[k, i + 1] = s * z[k, i] + c * zk
                    z[k, i] = c * z[k, i] - s * zk
                i -= 1
            if deflated:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0

    order = np.argsort(d_arr, kind="stable")
    return d_arr[order], z_arr[:, order], -1, 0


def sector_expectations(w, v, a_re, a_im, times, weights, offdiag, chunk=None):
    cdef const double[::1] w_ = np.ascontiguousarray(w, dtype=np.float64)
    cdef const double[:, ::1] v_ = np.ascontiguousarray(v, dtype=np.float64)
    cdef const double[::1] ar = np.ascontiguousarray(a_re, dtype=np.float64)
    cdef const double[::1] ai = np.ascontiguousarray(a_im, dtype=np.float64)
    cdef const double[::1] ts = np.ascontiguousarray(times, dtype=np.float64)
    cdef const double[:, ::1] wt = np.ascontiguousarray(weights, dtype=np.float64)
    cdef const double[::1] off = np.ascontiguousarray(offdiag, dtype=np.float64)
    cdef Py_ssize_t dim = w_.shape[0]
    cdef Py_ssize_t nk = wt.shape[1]
    cdef Py_ssize_t nt = ts.shape[0]
    out_arr = np.zeros((nt, nk + 2), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef double[::1] cr = np.empty(dim, dtype=np.float64)
    cdef double[::1] ci = np.empty(dim, dtype=np.float64)
    cdef double[::1] pr = np.empty(dim, dtype=np.float64)
    cdef double[::1] pi = np.empty(dim, dtype=np.float64)
    cdef Py_ssize_t it, i, j
    cdef double t, cs, sn, sr, si, pop, acc

    for it in range(nt):
        t = ts[it]
        # eigenbasis coefficients at time t: a_j exp(-i w_j t)
        for j in range(dim):
            cs = cos(w_[j] * t)
            sn = sin(w_[j] * t)
            cr[j] = ar[j] * cs + ai[j] * sn
            ci[j] = ai[j] * cs - ar[j] * sn
        for i in range(dim):
            sr = 0.0
            si = 0.0
            for j in range(dim):
                sr += v_[i, j] * cr[j]
                si += v_[i, j] * ci[j]
            pr[i] = sr
            pi[i] = si
        acc = 0.0
        for i in range(dim):
            pop = pr[i] * pr[i] + pi[i] * pi[i]
            for j in range(nk):
                out[it, j] += pop * wt[i, j]
            acc += pop
        out[it, nk + 1] = acc
        acc = 0.0
        for i in range(dim - 1):
            acc += off[i] * (pr[i] * pr[i + 1] + pi[i] * pi[i + 1])
        out[it, nk] = 2.0 * acc
    return out_arr
