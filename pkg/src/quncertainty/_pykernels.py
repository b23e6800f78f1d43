"""Pure-Python implementations of the numerical kernels.

Used when the compiled ``_kernels`` extension is unavailable, or when
``QUNCERTAINTY_PURE_PYTHON`` is set. Algorithms are identical to the
Cython versions; only speed differs.
"""

import math

import numpy as np


def jacobi_eigh(m, tol=1e-12, max_sweeps=64):
    """Cyclic complex Jacobi diagonalisation of a small Hermitian matrix.

    Returns ``(eigenvalues, eigenvectors, sweeps)`` with eigenvalues
    unsorted and eigenvectors as columns.
    """
    n = m.shape[0]
    a = [[complex(x) for x in row] for row in np.asarray(m).tolist()]
    v = [[1.0 + 0j if i == j else 0j for j in range(n)] for i in range(n)]
    sweeps = 0
    for sweeps in range(max_sweeps + 1):
        off = 0.0
        for p in range(n):
            for q in range(n):
                if p != q:
                    z = a[p][q]
                    off += z.real * z.real + z.imag * z.imag
        if math.sqrt(off) < tol or sweeps == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                b = a[p][q]
                absb = abs(b)
                if absb < 1e-300:
                    continue
                ph = (b / absb).conjugate()
                app = a[p][p].real
                aqq = a[q][q].real
                theta = (aqq - app) / (2.0 * absb)
                if theta == 0.0:
                    t = 1.0
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                upp, upq, uqp, uqq = c, s, -s * ph, c * ph
                for k in range(n):
                    akp, akq = a[k][p], a[k][q]
                    a[k][p] = akp * upp + akq * uqp
                    a[k][q] = akp * upq + akq * uqq
                    vkp, vkq = v[k][p], v[k][q]
                    v[k][p] = vkp * upp + vkq * uqp
                    v[k][q] = vkp * upq + vkq * uqq
                cpp, cpq, cqp, cqq = upp, upq, uqp.conjugate(), uqq.conjugate()
                for k in range(n):
                    apk, aqk = a[p][k], a[q][k]
                    a[p][k] = cpp * apk + cqp * aqk
                    a[q][k] = cpq * apk + cqq * aqk
                a[p][q] = 0j
                a[q][p] = 0j
                a[p][p] = complex(a[p][p].real, 0.0)
                a[q][q] = complex(a[q][q].real, 0.0)
    w = np.array([a[i][i].real for i in range(n)])
    return w, np.array(v, dtype=complex), sweeps


def _probs(projectors, rho):
    return np.einsum("jab,ba->j", projectors, rho).real


def _loglik(freqs, p, floor):
    mask = freqs > 0
    return float(np.dot(freqs[mask], np.log(np.maximum(p[mask], floor))))


def mle_iterate(projectors, freqs, rho0, max_iter=2000, tol=1e-10, floor=1e-12,
                min_weight=1e-9):
    """Iterative R-rho-R maximum-likelihood reconstruction.

    Returns ``(rho, iterations, loglik, converged, floored, history)`` where
    ``history`` holds the log-likelihood before the first update and after
    every accepted update.
    """
    projectors = np.ascontiguousarray(projectors, dtype=complex)
    freqs = np.ascontiguousarray(freqs, dtype=float)
    d = projectors.shape[1]
    eye = np.eye(d, dtype=complex)
    rho = np.array(rho0, dtype=complex)
    mask = freqs > 0
    active = projectors[mask]
    fa = freqs[mask]

    p = _probs(projectors, rho)
    floored = bool(np.any(p[mask] < floor))
    L = _loglik(freqs, p, floor)
    history = [L]
    converged = False
    it = 0
    while it < max_iter:
        pa = np.maximum(p[mask], floor)
        if np.any(p[mask] < floor):
            floored = True
        R = np.tensordot(fa / pa, active, axes=1)
        w = 1.0
        while True:
            Rw = R if w == 1.0 else (1.0 - w) * eye + w * R
            new = Rw @ rho @ Rw
            new = 0.5 * (new + new.conj().T)
            new /= np.trace(new).real
            p_new = _probs(projectors, new)
            L_new = _loglik(freqs, p_new, floor)
            if L_new >= L - 1e-14 or w < min_weight:
                break
            w *= 0.5
        it += 1
        gain = L_new - L
        rho, p, L = new, p_new, L_new
        history.append(L)
        if gain < tol:
            converged = True
            break
    return rho, it, L, converged, floored, np.array(history)
