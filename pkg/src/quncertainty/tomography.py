"""Coincidence-count simulation and maximum-likelihood state reconstruction."""

import itertools
from dataclasses import dataclass, field

import numpy as np

from ._backend import mle_iterate
from .entropy import Branch, ConditionalEnsemble
from .qmath import hermitian_eig
from .states import MeasurementBasis, X_BASIS, Y_BASIS, Z_BASIS

MAX_ITER = 2000
LOGLIK_TOL = 1e-10
PROB_FLOOR = 1e-12
WARM_START_MIX = 1e-8

_PAULI = {"X": X_BASIS, "Y": Y_BASIS, "Z": Z_BASIS}
EIGENSTATE_LABELS = ("X+", "X-", "Y+", "Y-", "Z+", "Z-")


def eigenstate_basis(label):
    """Basis whose outcome 0 is the Pauli eigenstate ``label`` (e.g. ``"Y-"``)."""
    base = _PAULI[label[0]]
    kets = base.kets if label[1] == "+" else base.kets[::-1]
    return MeasurementBasis(label, kets)


@dataclass(frozen=True)
class Setting:
    alice_basis: MeasurementBasis
    bob_basis: MeasurementBasis
    label: str

    def projectors(self):
        """The four joint projectors, outcome order ``(0,0), (0,1), (1,0), (1,1)``."""
        return np.array(
            [np.kron(pa, pb) for pa in self.alice_basis.projectors for pb in self.bob_basis.projectors]
        )


def overcomplete_settings():
    """All 36 ordered pairs of Pauli eigenstates, labelled e.g. ``"X+Y-"`` (Alice first)."""
    return [
        Setting(eigenstate_basis(a), eigenstate_basis(b), f"{a}{b}")
        for a, b in itertools.product(EIGENSTATE_LABELS, repeat=2)
    ]


def settings_by_label():
    return {s.label: s for s in overcomplete_settings()}


@dataclass
class CountsTable:
    """Coincidence counts per setting; ``counts[i]`` pairs with ``settings[i]``.

    In exact mode the counts are the real-valued expectations ``N p``.
    """

    settings: list
    counts: np.ndarray
    integration_time: float = 5.0
    exact: bool = False

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=float).reshape(len(self.settings), 4)
        if np.any(self.counts < 0):
            raise ValueError("counts must be non-negative")

    @property
    def total(self):
        return float(self.counts.sum())


@dataclass
class ReconstructionResult:
    rho_hat: np.ndarray
    iterations: int
    final_loglik: float
    converged: bool
    floored: bool = False
    loglik_history: np.ndarray = field(default=None, repr=False)


def outcome_probabilities(rho, setting):
    """Born-rule probabilities of the four joint outcomes."""
    rho = np.asarray(rho, dtype=complex)
    p = np.einsum("jab,ba->j", setting.projectors(), rho).real
    p = np.clip(p, 0.0, None)
    return p / p.sum()


def _sub_rng(seed, index):
    return np.random.default_rng(int(seed) ^ int(index))


def simulate_counts(rho, settings, shots_per_setting, seed=0, exact=False, poisson=False):
    """Draw ``shots_per_setting`` coincidences per setting.

    Each setting uses its own generator seeded with ``seed ^ index`` so the
    table does not depend on evaluation order. ``poisson=True`` draws
    independent Poisson counts with mean ``N p`` instead of a multinomial.
    """
    if shots_per_setting < 1:
        raise ValueError("shots_per_setting must be >= 1")
    rows = []
    for i, setting in enumerate(settings):
        p = outcome_probabilities(rho, setting)
        if exact:
            rows.append(shots_per_setting * p)
        elif poisson:
            rows.append(_sub_rng(seed, i).poisson(shots_per_setting * p))
        else:
            rows.append(_sub_rng(seed, i).multinomial(shots_per_setting, p))
    return CountsTable(list(settings), np.array(rows, dtype=float), exact=exact)


def linear_inversion(projectors, counts):
    """Least-squares estimate from frequencies, projected onto the state space."""
    projectors = np.asarray(projectors, dtype=complex)
    counts = np.asarray(counts, dtype=float).ravel()
    d = projectors.shape[1]
    # sum_j P_j = m I for m complete measurements, so p_j ~ m f_j
    m = np.trace(projectors.sum(axis=0)).real / d
    A = projectors.transpose(0, 2, 1).reshape(len(projectors), d * d)
    x, *_ = np.linalg.lstsq(A, m * counts / counts.sum(), rcond=None)
    r = x.reshape(d, d)
    spec = hermitian_eig(0.5 * (r + r.conj().T), atol=np.inf)
    w = np.clip(spec.eigenvalues, 0.0, None)
    if w.sum() <= 0:
        return np.eye(d, dtype=complex) / d
    v = spec.eigenvectors
    return (v * (w / w.sum())) @ v.conj().T


def initial_state(projectors, counts, start="linear", mix=WARM_START_MIX):
    """Starting point: ``"linear"`` (warm start) or ``"mixed"`` (``I/d``).

    The warm start is mixed with ``I/d`` at weight ``mix`` so every
    direction stays reachable by the multiplicative update.
    """
    d = np.asarray(projectors).shape[1]
    eye = np.eye(d, dtype=complex) / d
    if start == "mixed":
        return eye
    if start != "linear":
        raise ValueError(f"unknown start {start!r}")
    return (1.0 - mix) * linear_inversion(projectors, counts) + mix * eye


def mle_from_projectors(projectors, counts, rho0=None, start="linear", max_iter=MAX_ITER,
                        tol=LOGLIK_TOL, floor=PROB_FLOOR):
    """Iterative maximum-likelihood estimate from projector/count pairs.

    Iterates ``rho <- N[R rho R]`` with ``R = sum_j (f_j / p_j) P_j``; if a step
    lowers the likelihood it is diluted towards the identity map. Stops when
    the log-likelihood gain drops below ``tol`` or after ``max_iter`` steps.
    ``rho0`` overrides ``start``.
    """
    projectors = np.asarray(projectors, dtype=complex)
    counts = np.asarray(counts, dtype=float).ravel()
    if projectors.shape[0] != counts.size:
        raise ValueError("one count per projector required")
    total = counts.sum()
    if total <= 0:
        raise ValueError("no counts to reconstruct from")
    if rho0 is None:
        rho0 = initial_state(projectors, counts, start)
    rho0 = np.asarray(rho0, dtype=complex)
    rho, it, L, conv, floored, hist = mle_iterate(
        projectors, counts / total, rho0, max_iter, tol, floor
    )
    rho = 0.5 * (rho + rho.conj().T)
    rho /= np.trace(rho).real
    return ReconstructionResult(rho, int(it), float(L), bool(conv), bool(floored), hist)


def mle_reconstruct(table, **kwargs):
    """Reconstruct a two-qubit density matrix from a ``CountsTable``."""
    projectors = np.concatenate([s.projectors() for s in table.settings])
    return mle_from_projectors(projectors, table.counts.ravel(), **kwargs)


def _bob_settings():
    return [eigenstate_basis(lbl) for lbl in EIGENSTATE_LABELS]


def conditional_qubit_tomography(rho_ab, alice_basis, shots, seed=0, exact=False):
    """Tomography of Bob's qubit conditioned on each outcome of Alice's measurement.

    For each of Bob's six Pauli-eigenstate settings, ``shots`` coincidences
    are drawn over the joint (Alice outcome, Bob outcome) events. Branch
    probabilities come from Alice's marginal counts; each branch's Bob counts
    feed a single-qubit MLE. Branches without counts are flagged and carry
    ``I/2``.
    """
    rho_ab = np.asarray(rho_ab, dtype=complex)
    bob = _bob_settings()
    settings = [Setting(alice_basis, b, f"{alice_basis.label}{b.label}") for b in bob]
    table = simulate_counts(rho_ab, settings, shots, seed=seed, exact=exact)
    return ensemble_from_conditional_counts(table.counts, bob)


def ensemble_from_conditional_counts(counts, bob_bases):
    """Build the reconstructed ensemble from ``(setting, 4)`` coincidence counts."""
    counts = np.asarray(counts, dtype=float).reshape(len(bob_bases), 2, 2)
    alice_marg = counts.sum(axis=(0, 2))
    bob_proj = np.concatenate([b.projectors for b in bob_bases])
    branches = []
    for r in range(2):
        if alice_marg[r] <= 0:
            branches.append(Branch(r, 0.0, np.eye(2, dtype=complex) / 2, True))
            continue
        res = mle_from_projectors(bob_proj, counts[:, r, :].ravel())
        branches.append(Branch(r, float(alice_marg[r] / alice_marg.sum()), res.rho_hat))
    return ConditionalEnsemble(branches)
