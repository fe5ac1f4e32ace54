"""Dense complex linear algebra for 2x2 and 4x4 matrices.

Everything here works on plain ``numpy`` arrays of dtype ``complex128``.
Qubit ordering is fixed: in ``A (x) B`` the first factor is qubit 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from qcorr.errors import DimensionMismatch, NotHermitian, NotPSD

HERMITIAN_TOL = 1e-9
PSD_CLIP_TOL = 1e-9

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SX, SY, SZ)


@dataclass(frozen=True)
class EigenSystem:
    """Eigenvalues sorted descending, eigenvectors as orthonormal columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def as_square(a, dims=(2, 4)) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] not in dims:
        raise DimensionMismatch(f"expected square matrix of size {dims}, got shape {a.shape}")
    return a


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.asarray(a)).T


def hermiticity_deviation(a: np.ndarray) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a - a.conj().T)))


def hermitian_eigensystem(a) -> EigenSystem:
    """Eigen-decomposition of a Hermitian 2x2 or 4x4 matrix.

    Eigenvalues come back in descending order. Each eigenvector's phase is
    fixed so its first component with modulus above 1e-12 is real and
    positive, which makes the output reproducible across runs.
    """
    a = as_square(a)
    dev = hermiticity_deviation(a)
    if dev >= HERMITIAN_TOL:
        raise NotHermitian(f"||A - A^dagger||_inf = {dev:.3e}")
    h = 0.5 * (a + a.conj().T)
    w, v = np.linalg.eigh(h)
    order = np.argsort(-w, kind="stable")
    w = w[order]
    v = v[:, order]
    for k in range(v.shape[1]):
        col = v[:, k]
        idx = int(np.argmax(np.abs(col) > 1e-12))
        ph = col[idx] / abs(col[idx])
        v[:, k] = col / ph
    return EigenSystem(w, v)


def tensor_product(a, b) -> np.ndarray:
    a = as_square(a, dims=(2,))
    b = as_square(b, dims=(2,))
    return np.kron(a, b)


def partial_trace(rho, keep: int) -> np.ndarray:
    """Reduce a two-qubit operator to qubit ``keep`` (1 or 2)."""
    rho = as_square(rho, dims=(4,))
    r = rho.reshape(2, 2, 2, 2)
    if keep == 1:
        return np.einsum("ikjk->ij", r)
    if keep == 2:
        return np.einsum("kikj->ij", r)
    raise ValueError(f"keep must be 1 or 2, got {keep!r}")


def matrix_sqrt_psd(a) -> np.ndarray:
    """Principal square root of a Hermitian positive semidefinite matrix.

    Eigenvalues in [-1e-9, 0) are treated as zero; anything more negative
    raises :class:`NotPSD`.
    """
    es = hermitian_eigensystem(a)
    w = es.eigenvalues
    if w[-1] < -PSD_CLIP_TOL:
        raise NotPSD(f"minimum eigenvalue {w[-1]:.3e}")
    w = np.sqrt(np.clip(w, 0.0, None))
    v = es.eigenvectors
    s = (v * w) @ v.conj().T
    return 0.5 * (s + s.conj().T)
