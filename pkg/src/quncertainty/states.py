"""Two-qubit states, measurement bases and white noise.

Polarisation conventions: ``|H> = (1, 0)``, ``|V> = (0, 1)``; the first
tensor factor belongs to Alice.
"""

from dataclasses import dataclass

import numpy as np

from .qmath import hermitian_eig, partial_trace, psd_sqrt

DENSITY_ATOL = 1e-10

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_YY = np.kron(SIGMA_Y, SIGMA_Y)


class InvalidStateError(ValueError):
    pass


def validate_density(rho, atol=DENSITY_ATOL):
    """Check Hermiticity, unit trace and positivity; return ``rho`` as an array."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] not in (2, 4):
        raise InvalidStateError(f"density matrix must be 2x2 or 4x4, got {rho.shape}")
    herm = np.max(np.abs(rho - rho.conj().T))
    if herm > atol:
        raise InvalidStateError(f"not Hermitian (defect {herm:.3e})")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > atol:
        raise InvalidStateError(f"trace {tr!r} differs from 1")
    lam_min = hermitian_eig(rho).eigenvalues[-1]
    if lam_min < -atol:
        raise InvalidStateError(f"negative eigenvalue {lam_min:.3e}")
    return rho


def ket_to_density(psi):
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    psi = psi / np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


@dataclass(frozen=True)
class SchmidtParams:
    """Pure-state parameters ``cos(zeta)|t t> + sin(zeta)|t' t'>``.

    ``|t> = cos(theta)|H> + exp(i phi) sin(theta)|V>`` and ``|t'>`` is its
    orthogonal complement.
    """

    zeta: float
    theta: float = 0.0
    phi: float = 0.0

    def __post_init__(self):
        if not -1e-12 <= self.zeta <= np.pi / 2 + 1e-12:
            raise ValueError(f"zeta={self.zeta} outside [0, pi/2]")

    @property
    def tangle(self):
        return float(np.sin(2 * self.zeta) ** 2)

    @classmethod
    def from_tangle(cls, tangle, theta=0.0, phi=0.0):
        if not 0.0 <= tangle <= 1.0:
            raise ValueError(f"tangle={tangle} outside [0, 1]")
        return cls(zeta_for_tangle(tangle), theta, phi)


def zeta_for_tangle(tangle):
    """Schmidt angle in ``[0, pi/4]`` with ``sin^2(2 zeta) = tangle``."""
    return 0.5 * float(np.arcsin(np.sqrt(np.clip(tangle, 0.0, 1.0))))


def schmidt_vectors(theta, phi):
    t = np.array([np.cos(theta), np.exp(1j * phi) * np.sin(theta)])
    t_perp = np.array([-np.exp(-1j * phi) * np.sin(theta), np.cos(theta)])
    return t, t_perp


def schmidt_ket(params):
    t, tp = schmidt_vectors(params.theta, params.phi)
    return np.cos(params.zeta) * np.kron(t, t) + np.sin(params.zeta) * np.kron(tp, tp)


def schmidt_state(params):
    """Pure two-qubit density matrix for the given Schmidt parameters."""
    return ket_to_density(schmidt_ket(params))


def bell_state():
    """``(|HH> + |VV>)/sqrt(2)``."""
    return schmidt_state(SchmidtParams(np.pi / 4))


def maximally_mixed(dim=4):
    return np.eye(dim, dtype=complex) / dim


def _normalise_phase(ket):
    ket = np.asarray(ket, dtype=complex)
    ket = ket / np.linalg.norm(ket)
    for z in ket:
        if abs(z) > 1e-12:
            return ket * (abs(z) / z)
    return ket


@dataclass(frozen=True, eq=False)
class MeasurementBasis:
    """Orthonormal qubit basis; ``kets[r]`` is the state for outcome ``r``."""

    label: str
    kets: np.ndarray

    def __post_init__(self):
        kets = np.array([_normalise_phase(k) for k in self.kets])
        if kets.shape != (2, 2):
            raise ValueError("a qubit basis needs exactly two 2-vectors")
        gram = kets.conj() @ kets.T
        if np.max(np.abs(gram - np.eye(2))) > 1e-12:
            raise ValueError(f"basis {self.label!r} is not orthonormal")
        kets.setflags(write=False)
        object.__setattr__(self, "kets", kets)

    @property
    def projectors(self):
        return np.array([np.outer(k, k.conj()) for k in self.kets])

    @property
    def observable(self):
        """Dichotomic observable with eigenvalue +1 on outcome 0."""
        p = self.projectors
        return p[0] - p[1]

    def swapped(self):
        return MeasurementBasis(self.label, self.kets[::-1])

    def __repr__(self):
        return f"MeasurementBasis({self.label!r})"


def linear_basis(omega, label=None):
    """Linear-polarisation basis ``{|omega>, |omega_perp>}`` (``omega`` in radians)."""
    omega = float(np.mod(omega, np.pi))
    kets = [
        [np.cos(omega), np.sin(omega)],
        [-np.sin(omega), np.cos(omega)],
    ]
    return MeasurementBasis(label or f"L({omega:.12g})", np.array(kets, dtype=complex))


def bloch_basis(polar, azimuth, label=None):
    """Basis whose outcome-0 state has the given Bloch-sphere direction."""
    c, s = np.cos(polar / 2), np.sin(polar / 2)
    e = np.exp(1j * azimuth)
    kets = [[c, e * s], [-np.conj(e) * s, c]]
    return MeasurementBasis(
        label or f"B({polar:.12g},{azimuth:.12g})", np.array(kets, dtype=complex)
    )


Z_BASIS = linear_basis(0.0, "Z")
X_BASIS = linear_basis(np.pi / 4, "X")
Y_BASIS = bloch_basis(np.pi / 2, np.pi / 2, "Y")


@dataclass(frozen=True)
class NoiseModel:
    """White-noise mixture ``p rho + (1 - p) I/4``."""

    mixing: float

    def __post_init__(self):
        if not 0.0 <= self.mixing <= 1.0:
            raise ValueError(f"mixing p={self.mixing} outside [0, 1]")

    @property
    def fidelity(self):
        return self.mixing + (1.0 - self.mixing) / 4.0

    @classmethod
    def from_fidelity(cls, fidelity):
        if not 0.25 <= fidelity <= 1.0:
            raise ValueError(f"fidelity {fidelity} outside [1/4, 1]")
        return cls(min(1.0, (4.0 * fidelity - 1.0) / 3.0))


def apply_white_noise(rho, model):
    rho = np.asarray(rho, dtype=complex)
    d = rho.shape[0]
    return model.mixing * rho + (1.0 - model.mixing) * np.eye(d) / d


def purity(rho):
    rho = np.asarray(rho, dtype=complex)
    return float(np.real(np.trace(rho @ rho)))


def fidelity_with_pure(rho, target):
    """Overlap ``<psi|rho|psi>`` with a pure target given as a density matrix."""
    target = np.asarray(target, dtype=complex)
    if purity(target) < 1.0 - 1e-8:
        raise InvalidStateError("fidelity_with_pure needs a pure target state")
    psi = hermitian_eig(target).eigenvectors[:, 0]
    f = np.real(psi.conj() @ np.asarray(rho, dtype=complex) @ psi)
    return float(np.clip(f, 0.0, 1.0))


def uhlmann_fidelity(rho, sigma):
    """``(tr sqrt(sqrt(rho) sigma sqrt(rho)))^2`` for arbitrary states.

    Evaluated as the squared nuclear norm of ``sqrt(rho) sqrt(sigma)``, which
    stays accurate when either state is rank-deficient.
    """
    sv = np.linalg.svd(psd_sqrt(rho) @ psd_sqrt(sigma), compute_uv=False)
    return float(np.clip(np.sum(sv) ** 2, 0.0, 1.0))


def concurrence(rho):
    """Two-qubit concurrence via the spin-flipped state.

    The values entering the usual formula are the singular values of
    ``sqrt(rho) sqrt(rho~)``, and ``sqrt(rho~)`` is the spin flip of
    ``sqrt(rho)``.
    """
    s = psd_sqrt(np.asarray(rho, dtype=complex))
    lam = np.linalg.svd(s @ _YY @ s.conj() @ _YY, compute_uv=False)
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def tangle(rho):
    return concurrence(rho) ** 2


def reduced_state(rho, keep):
    return partial_trace(rho, keep)


# random ensembles ---------------------------------------------------------


def random_ket(rng, dim=4):
    """Haar-random pure state from a normalised complex Gaussian vector."""
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_pure_state(rng, dim=4):
    return ket_to_density(random_ket(rng, dim))


def random_mixed_state(rng, dim=4, env_dim=None):
    """Partial trace of a random pure state on ``dim x env_dim``."""
    env_dim = env_dim or dim
    psi = random_ket(rng, dim * env_dim).reshape(dim, env_dim)
    rho = psi @ psi.conj().T
    return 0.5 * (rho + rho.conj().T) / np.trace(rho).real


def random_basis(rng):
    """Basis with a uniformly random Bloch direction."""
    polar = float(np.arccos(rng.uniform(-1.0, 1.0)))
    azimuth = float(rng.uniform(0.0, 2 * np.pi))
    return bloch_basis(polar, azimuth)


def random_product_state(rng):
    return np.kron(random_mixed_state(rng, 2), random_mixed_state(rng, 2))


def random_separable_state(rng, terms=4):
    """Convex mixture of random product states."""
    w = rng.dirichlet(np.ones(terms))
    return sum(wi * random_product_state(rng) for wi in w)
