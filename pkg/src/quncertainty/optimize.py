"""Closed-form entropies of pure Schmidt states and the state/measurement searches.

Alice measures ``S = Z`` and ``R`` = linear polarisation at angle ``omega``.
"""

import math
from dataclasses import dataclass

import numpy as np

from .entropy import h_r_given_rb, joint_distribution
from .states import SchmidtParams, bloch_basis

THETA_SEEDS = 721
POLAR_POINTS = 37
AZIMUTH_POINTS = 72
THETA_TOL = 1e-10
ENTROPY_TOL = 1e-8
TIE_ATOL = 1e-12

INV_PHI = (math.sqrt(5) - 1) / 2
INV_PHI2 = (3 - math.sqrt(5)) / 2


def h2(p):
    """Vectorised binary entropy with ``0 log 0 = 0``."""
    p = np.clip(np.asarray(p, dtype=float), 0.0, 1.0)
    q = 1.0 - p
    with np.errstate(divide="ignore", invalid="ignore"):
        out = -np.where(p > 0, p * np.log2(p), 0.0) - np.where(q > 0, q * np.log2(q), 0.0)
    return out


@dataclass(frozen=True)
class ClosedFormTerms:
    h_a_given_b: float
    h_r_given_b: float
    h_s_given_b: float
    c: float

    @property
    def lhs(self):
        return self.h_r_given_b + self.h_s_given_b

    @property
    def rhs(self):
        return -math.log2(self.c) + self.h_a_given_b


def _terms(zeta, omega, theta, phi):
    cz = np.cos(2 * zeta)
    hab = h2(np.cos(zeta) ** 2)
    align_r = np.cos(2 * omega) * np.cos(2 * theta) + np.sin(2 * omega) * np.sin(2 * theta) * np.cos(phi)
    hr = h2(0.5 * (1 - cz * align_r)) - hab
    hs = h2(0.5 * (1 - cz * np.cos(2 * theta))) - hab
    return -hab, hr, hs


def closed_form_terms(params, omega):
    """Evaluate ``H(A|B)``, ``H(R|B)``, ``H(S|B)`` and ``c`` analytically."""
    hab, hr, hs = _terms(params.zeta, omega, params.theta, params.phi)
    c = max(math.cos(omega) ** 2, math.sin(omega) ** 2)
    return ClosedFormTerms(float(hab), float(hr), float(hs), c)


def closed_form_sum(zeta, omega, theta, phi=0.0):
    """``H(R|B) + H(S|B)``; vectorised over ``theta`` and ``phi``."""
    _, hr, hs = _terms(zeta, omega, theta, phi)
    return hr + hs


def golden_section(f, a, b, tol=THETA_TOL):
    """Minimise a unimodal ``f`` on ``[a, b]``; returns ``(x, f(x))``."""
    a, b = min(a, b), max(a, b)
    h = b - a
    if h <= tol:
        x = 0.5 * (a + b)
        return x, f(x)
    n = int(math.ceil(math.log(tol / h) / math.log(INV_PHI)))
    c = a + INV_PHI2 * h
    d = a + INV_PHI * h
    yc, yd = f(c), f(d)
    for _ in range(n - 1):
        if yc < yd:
            b, d, yd = d, c, yc
            h *= INV_PHI
            c = a + INV_PHI2 * h
            yc = f(c)
        else:
            a, c, yc = c, d, yd
            h *= INV_PHI
            d = a + INV_PHI * h
            yd = f(d)
    return (c, yc) if yc < yd else (d, yd)


def _first_min(values, atol=TIE_ATOL):
    values = np.asarray(values)
    return int(np.flatnonzero(values <= values.min() + atol)[0])


def minimize_state(zeta, omega, seeds=THETA_SEEDS):
    """Minimise ``H(R|B) + H(S|B)`` over the Schmidt basis ``(theta, phi)``.

    ``phi`` is restricted to ``{0, pi}``; ``theta`` is seeded on a uniform
    grid over ``[0, pi]`` and refined by golden-section search. Ties go to
    the lowest seed index (``phi = 0`` first, then increasing ``theta``).

    Returns
    -------
    theta_star, phi_star, min_sum : float
    """
    if not -1e-12 <= zeta <= math.pi / 2 + 1e-12:
        raise ValueError(f"zeta={zeta} outside [0, pi/2]")
    if not -1e-12 <= omega <= math.pi / 2 + 1e-12:
        raise ValueError(f"omega={omega} outside [0, pi/2]")
    thetas = np.linspace(0.0, math.pi, seeds)
    phis = (0.0, math.pi)
    grid = np.concatenate([closed_form_sum(zeta, omega, thetas, phi) for phi in phis])
    k = _first_min(grid)
    phi = phis[k // seeds]
    theta0 = float(thetas[k % seeds])
    best = float(grid[k])
    step = math.pi / (seeds - 1)

    def f(t):
        return float(closed_form_sum(zeta, omega, t, phi))

    t_ref, v_ref = golden_section(f, theta0 - step, theta0 + step)
    theta = theta0
    if v_ref < best - 1e-15:
        theta, best = t_ref, v_ref
    theta = math.fmod(theta, math.pi)
    if theta < 0:
        theta += math.pi
    if math.pi - theta < 1e-12:
        theta = 0.0
    return theta, phi, best


def best_state_for_conjugate(zeta):
    """Optimal state for ``R = X``, ``S = Z``: ``cos(zeta)|HH> + sin(zeta)|VV>``."""
    if not -1e-12 <= zeta <= math.pi / 4 + 1e-12:
        raise ValueError(f"zeta={zeta} outside [0, pi/4]")
    return SchmidtParams(zeta, 0.0, 0.0)


def optimal_state(zeta, omega):
    theta, phi, _ = minimize_state(zeta, omega)
    return SchmidtParams(zeta, theta, phi)


# Bob's basis -------------------------------------------------------------


def _bob_operators(rho_ab, alice_basis):
    # sigma_r = tr_A[(P_r x I) rho], so P(r, b) = <b|sigma_r|b>
    t = np.asarray(rho_ab, dtype=complex).reshape(2, 2, 2, 2)
    return np.array([np.einsum("ia,ajib->jb", P, t) for P in alice_basis.projectors])


def _bob_ket(polar, azimuth):
    return np.array([np.cos(polar / 2), np.exp(1j * azimuth) * np.sin(polar / 2)])


def _h_given_bob(sigma, kets):
    # kets: (..., 2) outcome-0 states; outcome 1 is the complement
    p0 = np.real(np.einsum("...i,rij,...j->...r", kets.conj(), sigma, kets))
    tot = np.real(np.trace(sigma, axis1=1, axis2=2))
    p1 = tot - p0
    joint = np.clip(np.stack([p0, p1], axis=-1), 0.0, None)  # (..., r, b)
    marg = joint.sum(axis=-2)
    with np.errstate(divide="ignore", invalid="ignore"):
        hj = -np.sum(np.where(joint > 0, joint * np.log2(joint), 0.0), axis=(-2, -1))
        hm = -np.sum(np.where(marg > 0, marg * np.log2(marg), 0.0), axis=-1)
    return hj - hm


def optimal_bob_basis(rho_ab, alice_basis, polar_points=POLAR_POINTS,
                      azimuth_points=AZIMUTH_POINTS, tol=ENTROPY_TOL):
    """Bob's basis minimising ``H(R|R_B)`` for Alice's ``alice_basis``.

    A polar x azimuth grid seeds coordinate descent with golden-section line
    searches; moves are accepted only on strict improvement, so a flat
    landscape returns the first grid point.

    Returns
    -------
    basis : MeasurementBasis
    h : float
        ``H(R|R_B)`` for the returned basis.
    """
    sigma = _bob_operators(rho_ab, alice_basis)
    polars = np.linspace(0.0, math.pi, polar_points)
    azimuths = np.linspace(0.0, 2 * math.pi, azimuth_points, endpoint=False)
    P, A = np.meshgrid(polars, azimuths, indexing="ij")
    kets = np.stack([np.cos(P / 2), np.exp(1j * A) * np.sin(P / 2)], axis=-1)
    grid = _h_given_bob(sigma, kets).ravel()
    k = _first_min(grid)
    x = [float(P.ravel()[k]), float(A.ravel()[k])]
    best = float(grid[k])
    steps = [polars[1] - polars[0], azimuths[1] - azimuths[0]]

    def h_at(pol, az):
        return float(_h_given_bob(sigma, _bob_ket(pol, az)))

    for _ in range(200):
        start = best
        for axis in (0, 1):
            def f(t, axis=axis):
                y = list(x)
                y[axis] = t
                return h_at(*y)

            t, v = golden_section(f, x[axis] - steps[axis], x[axis] + steps[axis], THETA_TOL)
            if v < best - 1e-12:
                x[axis], best = t, v
        if start - best < tol:
            break
    basis = bloch_basis(x[0], x[1])
    return basis, best


def same_basis_entropy(rho_ab, alice_basis):
    return h_r_given_rb(joint_distribution(rho_ab, alice_basis, alice_basis))
