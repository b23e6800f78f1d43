"""Entropies in bits: von Neumann, Shannon, conditional and post-measurement.

Three estimators of the uncertainty ``H(R|B)`` about a measurement ``R`` on
Alice's qubit given Bob's qubit are provided, in increasing order:

* ``h_r_given_b`` -- conditional von Neumann entropy of the cq-state,
* ``h_r_given_rb`` -- Shannon conditional entropy after Bob also measures,
* ``fano_bound`` -- binary entropy of the outcome mismatch probability.
"""

from dataclasses import dataclass, field

import numpy as np

from .qmath import clamp_eigenvalues, hermitian_eigvals, partial_trace

ZERO_BRANCH = 1e-12
PROB_ATOL = 1e-10


def shannon_entropy(probs):
    """Shannon entropy of a (flattened) probability table."""
    p = np.asarray(probs, dtype=float).ravel()
    if p.min() < -PROB_ATOL:
        raise ValueError("negative probability")
    p = p[p > 0]
    return float(-np.dot(p, np.log2(p)))


def binary_entropy(p):
    """``h2(p) = -p log2 p - (1-p) log2(1-p)``."""
    p = float(p)
    if not -PROB_ATOL <= p <= 1.0 + PROB_ATOL:
        raise ValueError(f"binary_entropy needs p in [0, 1], got {p}")
    p = min(max(p, 0.0), 1.0)
    return shannon_entropy([p, 1.0 - p])


def von_neumann_entropy(rho):
    w = clamp_eigenvalues(hermitian_eigvals(rho))
    return shannon_entropy(np.clip(w, 0.0, None))


def conditional_entropy(rho_ab):
    """``H(A|B) = H(AB) - H(B)``; negative only for entangled states."""
    return von_neumann_entropy(rho_ab) - von_neumann_entropy(partial_trace(rho_ab, "B"))


@dataclass
class Branch:
    outcome: int
    probability: float
    state: np.ndarray
    flagged: bool = False


@dataclass
class ConditionalEnsemble:
    """Bob's conditional states after Alice measures in ``basis``.

    ``flagged`` branches had (near-)zero probability; their ``state`` is a
    placeholder ``I/2`` and they contribute nothing to entropy sums.
    """

    branches: list = field(default_factory=list)
    basis: object = None

    @property
    def probabilities(self):
        return np.array([b.probability for b in self.branches])

    def average_state(self):
        return sum(b.probability * b.state for b in self.branches if not b.flagged)

    def validate(self):
        p = self.probabilities
        if np.any(p < 0) or abs(p.sum() - 1.0) > PROB_ATOL:
            raise ValueError(f"branch probabilities {p} do not form a distribution")


def _lift_a(op):
    return np.kron(op, np.eye(2))


def post_measurement_state(rho_ab, basis):
    """Measure Alice's qubit of ``rho_ab`` in ``basis``; return Bob's branches."""
    t = np.asarray(rho_ab, dtype=complex).reshape(2, 2, 2, 2)
    # unnormalised branch states <r|_A rho |r>_A
    subs = np.einsum("ri,ijkl,rk->rjl", basis.kets.conj(), t, basis.kets)
    branches = []
    for r, sub in enumerate(subs):
        p = float(np.trace(sub).real)
        if p < ZERO_BRANCH:
            branches.append(Branch(r, max(p, 0.0), np.eye(2, dtype=complex) / 2, True))
            continue
        rb = sub / p
        branches.append(Branch(r, p, 0.5 * (rb + rb.conj().T)))
    total = sum(b.probability for b in branches)
    for b in branches:
        b.probability /= total
    return ConditionalEnsemble(branches, basis)


def cq_state(rho_ab, basis):
    """Explicit post-measurement state ``sum_r (P_r x I) rho (P_r x I)``."""
    rho_ab = np.asarray(rho_ab, dtype=complex)
    out = np.zeros((4, 4), dtype=complex)
    for proj in basis.projectors:
        P = _lift_a(proj)
        out += P @ rho_ab @ P
    return out


def ensemble_entropy(ensemble):
    """``H({p_r}) + sum_r p_r H(rho_B^r) - H(sum_r p_r rho_B^r)``."""
    live = [b for b in ensemble.branches if not b.flagged]
    p = np.array([b.probability for b in live])
    p = p / p.sum()
    avg = sum(pi * b.state for pi, b in zip(p, live))
    h = shannon_entropy(p)
    h += sum(pi * von_neumann_entropy(b.state) for pi, b in zip(p, live))
    h -= von_neumann_entropy(avg)
    return float(h)


def h_r_given_b(rho_ab, basis):
    """Conditional von Neumann entropy of Alice's outcome given Bob's qubit."""
    return ensemble_entropy(post_measurement_state(rho_ab, basis))


def joint_distribution(rho_ab, basis_a, basis_b):
    """2x2 table ``P[r, r_B] = tr[(P_r x P_rB) rho]``."""
    rho_ab = np.asarray(rho_ab, dtype=complex)
    v = np.einsum("ri,sj->rsij", basis_a.kets, basis_b.kets).reshape(4, 4)
    table = np.einsum("ki,ij,kj->k", v.conj(), rho_ab, v).real.reshape(2, 2)
    table = np.clip(table, 0.0, None)
    return table / table.sum()


def validate_distribution(dist):
    d = np.asarray(dist, dtype=float)
    if d.shape != (2, 2):
        raise ValueError(f"joint distribution must be 2x2, got {d.shape}")
    if np.any(d < -PROB_ATOL) or abs(d.sum() - 1.0) > PROB_ATOL:
        raise ValueError("joint distribution entries must be >= 0 and sum to 1")
    return d


def h_r_given_rb(dist):
    """``H(R|R_B) = H({P(r, r_B)}) - H({P(r_B)})``."""
    d = validate_distribution(dist)
    return shannon_entropy(d) - shannon_entropy(d.sum(axis=0))


def mismatch_probability(dist):
    """Probability that Alice's and Bob's outcomes differ."""
    d = validate_distribution(dist)
    return float(np.clip(d[0, 1] + d[1, 0], 0.0, 1.0))


def fano_bound(q):
    """Fano upper bound ``h2(q)`` on ``H(R|R_B)`` for binary outcomes."""
    q = float(q)
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"mismatch probability {q} outside [0, 1]")
    return binary_entropy(q)
