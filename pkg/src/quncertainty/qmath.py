"""Dense complex linear algebra at qubit and two-qubit dimension.

Matrices are plain ``numpy`` complex arrays. Subsystem ``0`` (or ``"A"``)
is Alice's qubit, the left tensor factor; ``1`` (or ``"B"``) is Bob's.
"""

from dataclasses import dataclass

import numpy as np

from ._backend import jacobi_eigh

HERMITIAN_ATOL = 1e-10
EIG_TOL = 1e-12
CLAMP_ATOL = 1e-10
# eigenvalues this small (relative) are rounding noise; their square roots are not
SQRT_FLOOR = 1e-14

_ALLOWED_DIMS = (1, 2, 4)


class NonHermitianError(ValueError):
    """Raised when a matrix expected to be Hermitian is not."""

    def __init__(self, deviation):
        self.deviation = float(deviation)
        super().__init__(f"matrix is not Hermitian: max|m - m^H| = {self.deviation:.3e}")


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues (descending) and orthonormal eigenvectors (columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self):
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def as_matrix(m):
    """Validate and convert ``m`` to a complex matrix."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {a.shape}")
    if a.shape[0] not in _ALLOWED_DIMS or a.shape[1] not in _ALLOWED_DIMS:
        raise ValueError(f"matrix dimensions must be in {_ALLOWED_DIMS}, got {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def tensor_product(a, b):
    """Kronecker product ``a (x) b``."""
    a = as_matrix(a)
    b = as_matrix(b)
    out = np.kron(a, b)
    if out.shape[0] > 4 or out.shape[1] > 4:
        raise ValueError(f"tensor product {a.shape} x {b.shape} exceeds two qubits")
    return out


def _subsystem(keep):
    if keep in (0, "A", "a"):
        return 0
    if keep in (1, "B", "b"):
        return 1
    raise ValueError(f"unknown subsystem {keep!r}; use 0/'A' or 1/'B'")


def partial_trace(rho, keep):
    """Reduce a two-qubit operator to the subsystem ``keep``."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError(f"partial_trace needs a 4x4 operator, got {rho.shape}")
    t = rho.reshape(2, 2, 2, 2)
    if _subsystem(keep) == 0:
        return np.einsum("ajbj->ab", t)
    return np.einsum("iaib->ab", t)


def hermiticity_defect(m):
    m = np.asarray(m)
    return float(np.max(np.abs(m - m.conj().T)))


def _fix_phase(v):
    # first non-negligible amplitude of each column made real and >= 0
    big = np.abs(v) > 1e-12
    lead = v[big.argmax(axis=0), np.arange(v.shape[1])]
    phase = np.where(big.any(axis=0), np.abs(lead) / np.where(lead == 0, 1, lead), 1.0)
    return v * phase


def hermitian_eig(m, atol=HERMITIAN_ATOL):
    """Eigendecomposition of a small Hermitian matrix by cyclic Jacobi rotations.

    Raises
    ------
    NonHermitianError
        If ``max|m - m^H|`` exceeds ``atol``.
    """
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"hermitian_eig needs a square matrix, got {m.shape}")
    defect = hermiticity_defect(m)
    if defect > atol:
        raise NonHermitianError(defect)
    m = 0.5 * (m + m.conj().T)
    w, v, _ = jacobi_eigh(m, EIG_TOL)
    order = np.argsort(-w, kind="stable")
    return Spectrum(w[order], _fix_phase(v[:, order]))


def hermitian_eigvals(m, atol=HERMITIAN_ATOL):
    """Eigenvalues only, descending; skips the eigenvector bookkeeping."""
    m = as_matrix(m)
    defect = hermiticity_defect(m)
    if defect > atol:
        raise NonHermitianError(defect)
    w, _, _ = jacobi_eigh(0.5 * (m + m.conj().T), EIG_TOL)
    return np.sort(w)[::-1]


def clamp_eigenvalues(w, atol=CLAMP_ATOL):
    """Zero out tiny negative eigenvalues produced by rounding."""
    w = np.array(w, dtype=float)
    w[(w < 0) & (w >= -atol)] = 0.0
    return w


def psd_sqrt(m):
    """Square root of a positive semidefinite Hermitian matrix.

    Eigenvalues below ``SQRT_FLOOR`` times the largest are treated as zero,
    so rank-deficient inputs do not pick up ``sqrt(eps)`` spurious weight.
    """
    spec = hermitian_eig(m)
    w = spec.eigenvalues
    w = np.where(w > SQRT_FLOOR * max(1.0, w[0]), w, 0.0)
    w = np.sqrt(w)
    v = spec.eigenvectors
    return (v * w) @ v.conj().T


def dagger(m):
    return np.asarray(m).conj().T
