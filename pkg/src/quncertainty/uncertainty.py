"""Uncertainty relations and the entropic entanglement witness."""

from dataclasses import asdict, dataclass

import numpy as np

from .entropy import (
    conditional_entropy,
    fano_bound,
    h_r_given_b,
    h_r_given_rb,
    joint_distribution,
    mismatch_probability,
    shannon_entropy,
)
from .qmath import hermiticity_defect, NonHermitianError, partial_trace

ENTANGLED = "entangled"
INCONCLUSIVE = "inconclusive"
# absorbs rounding so that saturating separable states never read as entangled
WITNESS_GUARD = 1e-12


def complementarity(r, s):
    """``c = max_{r,s} |<psi_r|upsilon_s>|^2`` for two qubit bases."""
    overlaps = np.abs(r.kets.conj() @ s.kets.T) ** 2
    return float(np.clip(overlaps.max(), 0.5, 1.0))


def log_inv_c(r, s):
    return float(-np.log2(complementarity(r, s)))


def outcome_distribution(rho, basis):
    rho = np.asarray(rho, dtype=complex)
    p = np.array([np.trace(P @ rho).real for P in basis.projectors])
    p = np.clip(p, 0.0, None)
    return p / p.sum()


def maassen_uffink_check(rho_a, r, s):
    """Return ``(H(R) + H(S), log2(1/c))`` for a single-qubit state."""
    lhs = shannon_entropy(outcome_distribution(rho_a, r)) + shannon_entropy(
        outcome_distribution(rho_a, s)
    )
    return lhs, log_inv_c(r, s)


@dataclass(frozen=True)
class RobertsonReport:
    delta_r: float
    delta_s: float
    commutator_bound: float

    @property
    def product(self):
        return self.delta_r * self.delta_s

    @property
    def slack(self):
        return self.product - self.commutator_bound


def _expect(op, rho):
    return np.trace(op @ rho)


def robertson_check(rho, r, s, atol=1e-10):
    """Standard deviations of ``r`` and ``s`` under ``rho`` and ``|<[r, s]>|/2``."""
    rho = np.asarray(rho, dtype=complex)
    r = np.asarray(r, dtype=complex)
    s = np.asarray(s, dtype=complex)
    for op in (r, s):
        defect = hermiticity_defect(op)
        if defect > atol:
            raise NonHermitianError(defect)

    def std(op):
        mean = _expect(op, rho).real
        var = _expect(op @ op, rho).real - mean**2
        return float(np.sqrt(max(var, 0.0)))

    comm = r @ s - s @ r
    return RobertsonReport(std(r), std(s), float(0.5 * abs(_expect(comm, rho))))


def witness(lhs_estimate, log_inv_c, tolerance=0.0):
    """``entangled`` iff the estimated uncertainty beats ``log2(1/c)`` by ``tolerance``."""
    if lhs_estimate < -1e-9:
        raise ValueError(f"uncertainty estimate {lhs_estimate} is negative")
    return ENTANGLED if lhs_estimate < log_inv_c - tolerance - WITNESS_GUARD else INCONCLUSIVE


@dataclass(frozen=True)
class UncertaintyReport:
    lhs_tomographic: float
    lhs_measurement: float
    lhs_fano: float
    log_inv_c: float
    h_a_given_b: float
    rhs_raw: float
    rhs_effective: float
    witness_verdict: str

    def to_dict(self, digits=9):
        out = {}
        for k, v in asdict(self).items():
            out[k] = round(v, digits) + 0.0 if isinstance(v, float) else v
        return out

    def ordering_ok(self, atol=1e-9):
        return (
            self.lhs_tomographic <= self.lhs_measurement + atol
            and self.lhs_measurement <= self.lhs_fano + atol
        )

    @property
    def berta_slack(self):
        return self.lhs_tomographic - self.rhs_raw


def make_report(lhs_tomographic, lhs_measurement, lhs_fano, log_inv_c, h_a_given_b,
                witness_lhs=None, witness_tolerance=0.0):
    """Assemble a report; the witness uses ``witness_lhs`` (default: tomographic)."""
    rhs_raw = log_inv_c + h_a_given_b
    lhs_w = lhs_tomographic if witness_lhs is None else witness_lhs
    return UncertaintyReport(
        lhs_tomographic=float(lhs_tomographic),
        lhs_measurement=float(lhs_measurement),
        lhs_fano=float(lhs_fano),
        log_inv_c=float(log_inv_c),
        h_a_given_b=float(h_a_given_b),
        rhs_raw=float(rhs_raw),
        rhs_effective=float(max(rhs_raw, 0.0)),
        witness_verdict=witness(max(lhs_w, 0.0), log_inv_c, witness_tolerance),
    )


def evaluate_berta(rho_ab, r, s, bob_r=None, bob_s=None, witness_tolerance=0.0):
    """Evaluate both sides of the quantum-memory uncertainty relation.

    Parameters
    ----------
    rho_ab : ndarray
        Two-qubit state; Alice holds the first qubit.
    r, s : MeasurementBasis
        Alice's two measurements.
    bob_r, bob_s : MeasurementBasis, optional
        Bob's measurements for the measurement and Fano estimators.
        Default to Alice's bases.
    witness_tolerance : float
        Margin below ``log2(1/c)`` the tomographic estimate must reach.
    """
    rho_ab = np.asarray(rho_ab, dtype=complex)
    bob_r = r if bob_r is None else bob_r
    bob_s = s if bob_s is None else bob_s
    tomo = h_r_given_b(rho_ab, r) + h_r_given_b(rho_ab, s)
    d_r = joint_distribution(rho_ab, r, bob_r)
    d_s = joint_distribution(rho_ab, s, bob_s)
    meas = h_r_given_rb(d_r) + h_r_given_rb(d_s)
    fano = fano_bound(mismatch_probability(d_r)) + fano_bound(mismatch_probability(d_s))
    return make_report(
        tomo, meas, fano, log_inv_c(r, s), conditional_entropy(rho_ab),
        witness_tolerance=witness_tolerance,
    )


def reduced_alice(rho_ab):
    return partial_trace(rho_ab, "A")
