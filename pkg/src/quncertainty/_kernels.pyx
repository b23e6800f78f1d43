# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled numerical kernels.

Same algorithms and return conventions as ``_pykernels``; see there.
"""

import numpy as np

from libc.math cimport sqrt, fabs, copysign, log


cdef inline double _abs2(double complex z) nogil:
    return z.real * z.real + z.imag * z.imag


def jacobi_eigh(m, double tol=1e-12, int max_sweeps=64):
    cdef Py_ssize_t n = m.shape[0]
    a_arr = np.array(m, dtype=np.complex128, order="C", copy=True)
    v_arr = np.zeros((n, n), dtype=np.complex128)
    cdef double complex[:, ::1] a = a_arr
    cdef double complex[:, ::1] v = v_arr
    cdef Py_ssize_t p, q, k
    for k in range(n):
        v[k, k] = 1
    cdef int sweeps = 0
    cdef double off, absb, app, aqq, theta, t, c, s
    cdef double complex b, ph, upp, upq, uqp, uqq, cqp, cqq
    cdef double complex akp, akq, apk, aqk
    with nogil:
        while True:
            off = 0.0
            for p in range(n):
                for q in range(n):
                    if p != q:
                        off += _abs2(a[p, q])
            if sqrt(off) < tol or sweeps == max_sweeps:
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    b = a[p, q]
                    absb = sqrt(_abs2(b))
                    if absb < 1e-300:
                        continue
                    ph = (b / absb).conjugate()
                    app = a[p, p].real
                    aqq = a[q, q].real
                    theta = (aqq - app) / (2.0 * absb)
                    if theta == 0.0:
                        t = 1.0
                    else:
                        t = copysign(1.0, theta) / (fabs(theta) + sqrt(theta * theta + 1.0))
                    c = 1.0 / sqrt(1.0 + t * t)
                    s = t * c
                    upp = c
                    upq = s
                    uqp = -s * ph
                    uqq = c * ph
                    for k in range(n):
                        akp = a[k, p]
                        akq = a[k, q]
                        a[k, p] = akp * upp + akq * uqp
                        a[k, q] = akp * upq + akq * uqq
                        akp = v[k, p]
                        akq = v[k, q]
                        v[k, p] = akp * upp + akq * uqp
                        v[k, q] = akp * upq + akq * uqq
                    cqp = uqp.conjugate()
                    cqq = uqq.conjugate()
                    for k in range(n):
                        apk = a[p, k]
                        aqk = a[q, k]
                        a[p, k] = upp * apk + cqp * aqk
                        a[q, k] = upq * apk + cqq * aqk
                    a[p, q] = 0
                    a[q, p] = 0
                    a[p, p] = a[p, p].real
                    a[q, q] = a[q, q].real
            sweeps += 1
    w_arr = np.empty(n)
    cdef double[::1] w = w_arr
    for k in range(n):
        w[k] = a[k, k].real
    return w_arr, v_arr, sweeps


cdef void _probs(const double complex[:, :, ::1] P, const double complex[:, ::1] rho,
                 double[::1] out) noexcept nogil:
    cdef Py_ssize_t j, x, y
    cdef Py_ssize_t m = P.shape[0], d = P.shape[1]
    cdef double acc
    for j in range(m):
        acc = 0.0
        for x in range(d):
            for y in range(d):
                acc += (P[j, x, y] * rho[y, x]).real
        out[j] = acc


cdef double _loglik(const double[::1] f, const double[::1] p, double floor) noexcept nogil:
    cdef Py_ssize_t j
    cdef double acc = 0.0, pj
    for j in range(f.shape[0]):
        if f[j] > 0:
            pj = p[j]
            if pj < floor:
                pj = floor
            acc += f[j] * log(pj)
    return acc


cdef void _sandwich(const double complex[:, ::1] r, const double complex[:, ::1] rho,
                    double complex[:, ::1] tmp, double complex[:, ::1] out) noexcept nogil:
    # out = r rho r, hermitised and trace-normalised
    cdef Py_ssize_t d = r.shape[0], x, y, z
    cdef double complex acc
    cdef double tr = 0.0
    for x in range(d):
        for y in range(d):
            acc = 0
            for z in range(d):
                acc = acc + r[x, z] * rho[z, y]
            tmp[x, y] = acc
    for x in range(d):
        for y in range(d):
            acc = 0
            for z in range(d):
                acc = acc + tmp[x, z] * r[z, y]
            out[x, y] = acc
    for x in range(d):
        for y in range(x + 1, d):
            acc = 0.5 * (out[x, y] + out[y, x].conjugate())
            out[x, y] = acc
            out[y, x] = acc.conjugate()
        out[x, x] = out[x, x].real
        tr += out[x, x].real
    for x in range(d):
        for y in range(d):
            out[x, y] = out[x, y] / tr


def mle_iterate(projectors, freqs, rho0, int max_iter=2000, double tol=1e-10,
                double floor=1e-12, double min_weight=1e-9):
    P_arr = np.ascontiguousarray(projectors, dtype=np.complex128)
    f_arr = np.ascontiguousarray(freqs, dtype=np.float64)
    cdef Py_ssize_t m = P_arr.shape[0], d = P_arr.shape[1]
    rho_arr = np.array(rho0, dtype=np.complex128, order="C", copy=True)
    new_arr = np.empty((d, d), dtype=np.complex128)
    cdef const double complex[:, :, ::1] P = P_arr
    cdef const double[::1] f = f_arr
    cdef double complex[:, ::1] rho = rho_arr
    cdef double complex[:, ::1] new = new_arr
    cdef double complex[:, ::1] R = np.empty((d, d), dtype=np.complex128)
    cdef double complex[:, ::1] Rw = np.empty((d, d), dtype=np.complex128)
    cdef double complex[:, ::1] tmp = np.empty((d, d), dtype=np.complex128)
    cdef double[::1] p = np.empty(m)
    cdef double[::1] p_new = np.empty(m)
    hist_arr = np.empty(max_iter + 1)
    cdef double[::1] hist = hist_arr
    cdef Py_ssize_t j, x, y
    cdef int it = 0
    cdef bint converged = False, floored = False
    cdef double L, L_new = 0.0, w, pj, gain

    _probs(P, rho, p)
    for j in range(m):
        if f[j] > 0 and p[j] < floor:
            floored = True
    L = _loglik(f, p, floor)
    hist[0] = L
    with nogil:
        while it < max_iter:
            for x in range(d):
                for y in range(d):
                    R[x, y] = 0
            for j in range(m):
                if f[j] > 0:
                    pj = p[j]
                    if pj < floor:
                        pj = floor
                        floored = True
                    for x in range(d):
                        for y in range(d):
                            R[x, y] = R[x, y] + (f[j] / pj) * P[j, x, y]
            w = 1.0
            while True:
                for x in range(d):
                    for y in range(d):
                        Rw[x, y] = w * R[x, y]
                    Rw[x, x] = Rw[x, x] + (1.0 - w)
                _sandwich(Rw, rho, tmp, new)
                _probs(P, new, p_new)
                L_new = _loglik(f, p_new, floor)
                if L_new >= L - 1e-14 or w < min_weight:
                    break
                w *= 0.5
            it += 1
            gain = L_new - L
            for x in range(d):
                for y in range(d):
                    rho[x, y] = new[x, y]
            for j in range(m):
                p[j] = p_new[j]
            L = L_new
            hist[it] = L
            if gain < tol:
                converged = True
                break
    return rho_arr, it, L, bool(converged), bool(floored), hist_arr[:it + 1].copy()
