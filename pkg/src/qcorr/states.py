"""Density matrices: validation, Fano form, entropies, fixtures and file I/O.

Basis convention for two qubits is {|00>, |01>, |10>, |11>} with
|0> the excited level |e> and |1> the ground level |g>, so sigma_z
has eigenvalue +1 on the excited state.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from qcorr.errors import InvalidState, NotPSD, OutOfRange, ParseError
from qcorr.linalg import (
    I2,
    PAULIS,
    as_square,
    hermiticity_deviation,
    partial_trace,
)

TRACE_TOL = 1e-9
HERM_TOL = 1e-9
POS_TOL = 1e-8

LOG_BASE = 2.0


@dataclass(frozen=True)
class ValidationReport:
    trace_deviation: float
    hermiticity_deviation: float
    min_eigenvalue: float
    pos_tol: float = POS_TOL

    @property
    def trace_ok(self) -> bool:
        return self.trace_deviation < TRACE_TOL

    @property
    def hermitian_ok(self) -> bool:
        return self.hermiticity_deviation < HERM_TOL

    @property
    def positive_ok(self) -> bool:
        return self.min_eigenvalue >= -self.pos_tol

    @property
    def passed(self) -> bool:
        return self.trace_ok and self.hermitian_ok and self.positive_ok

    def describe(self) -> str:
        problems = []
        if not self.trace_ok:
            problems.append(f"trace deviation {self.trace_deviation:.3e}")
        if not self.hermitian_ok:
            problems.append(f"hermiticity deviation {self.hermiticity_deviation:.3e}")
        if not self.positive_ok:
            problems.append(f"min eigenvalue {self.min_eigenvalue:.3e}")
        return "; ".join(problems) if problems else "ok"


@dataclass(frozen=True)
class FanoForm:
    """Local Bloch vectors ``r`` (qubit 1), ``s`` (qubit 2) and correlation matrix ``T``."""

    r: np.ndarray
    s: np.ndarray
    T: np.ndarray


def validate(rho, pos_tol: float = POS_TOL) -> ValidationReport:
    rho = as_square(rho)
    herm = hermiticity_deviation(rho)
    h = 0.5 * (rho + rho.conj().T)
    min_ev = float(np.linalg.eigvalsh(h)[0])
    return ValidationReport(
        trace_deviation=float(abs(np.trace(rho) - 1.0)),
        hermiticity_deviation=herm,
        min_eigenvalue=min_ev,
        pos_tol=pos_tol,
    )


def check_state(rho, pos_tol: float = POS_TOL) -> np.ndarray:
    """Return ``rho`` as an array, raising :class:`InvalidState` if it is not a density matrix."""
    try:
        rho = as_square(rho)
    except ValueError as exc:
        raise InvalidState(str(exc)) from exc
    rep = validate(rho, pos_tol)
    if not rep.passed:
        raise InvalidState(rep.describe())
    return rho


def _pauli_products():
    basis = (I2,) + PAULIS
    return np.array([[np.kron(a, b) for b in basis] for a in basis])


# _PP[i, j] = sigma_i (x) sigma_j with sigma_0 = identity
_PP = _pauli_products()


def fano_decompose(rho) -> FanoForm:
    rho = check_state(rho)
    if rho.shape != (4, 4):
        raise InvalidState("Fano form needs a two-qubit state")
    coeffs = np.einsum("ijab,ba->ij", _PP, rho)
    c = coeffs.real
    return FanoForm(r=c[1:, 0].copy(), s=c[0, 1:].copy(), T=c[1:, 1:].copy())


def fano_compose(f: FanoForm, pos_tol: float = POS_TOL) -> np.ndarray:
    c = np.zeros((4, 4))
    c[0, 0] = 1.0
    c[1:, 0] = f.r
    c[0, 1:] = f.s
    c[1:, 1:] = f.T
    rho = 0.25 * np.einsum("ij,ijab->ab", c, _PP)
    rep = validate(rho, pos_tol)
    if not rep.positive_ok:
        raise NotPSD(f"composed matrix has min eigenvalue {rep.min_eigenvalue:.3e}")
    return rho


def bloch_vector(rho2) -> np.ndarray:
    rho2 = as_square(rho2, dims=(2,))
    return np.array([np.trace(rho2 @ p).real for p in PAULIS])


def qubit_state(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.shape != (3,):
        raise OutOfRange("Bloch vector must have 3 components")
    if np.linalg.norm(a) > 1 + 1e-12:
        raise OutOfRange(f"Bloch vector length {np.linalg.norm(a):.6f} exceeds 1")
    return 0.5 * (I2 + sum(x * p for x, p in zip(a, PAULIS)))


def entropy_of_spectrum(w) -> float:
    w = np.clip(np.asarray(w, dtype=float), 0.0, None)
    w = w[w > 0]
    return float(-np.sum(w * np.log(w)) / np.log(LOG_BASE))


def von_neumann_entropy(rho) -> float:
    """Entropy in bits, with 0 log 0 taken as 0."""
    rho = check_state(rho)
    w = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    return min(max(entropy_of_spectrum(w), 0.0), float(np.log2(rho.shape[0])))


def binary_entropy(p) -> np.ndarray:
    p = np.clip(np.asarray(p, dtype=float), 0.0, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -p * np.log2(p) - (1 - p) * np.log2(1 - p)
    return np.nan_to_num(h, nan=0.0)


def purity(rho) -> float:
    rho = np.asarray(rho)
    return float(np.real(np.trace(rho @ rho)))


def marginals(rho):
    return partial_trace(rho, 1), partial_trace(rho, 2)


# --- fixtures -------------------------------------------------------------

_S2 = 1 / np.sqrt(2)
_BELL_KETS = {
    1: np.array([_S2, 0, 0, _S2]),  # phi+
    2: np.array([_S2, 0, 0, -_S2]),  # phi-
    3: np.array([0, _S2, _S2, 0]),  # psi+
    4: np.array([0, _S2, -_S2, 0]),  # psi-
}


def ket_to_dm(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def bell(k: int) -> np.ndarray:
    """Bell projector: 1 = phi+, 2 = phi-, 3 = psi+, 4 = psi-."""
    if k not in _BELL_KETS:
        raise OutOfRange(f"bell index must be 1..4, got {k!r}")
    return ket_to_dm(_BELL_KETS[k])


def werner(p: float) -> np.ndarray:
    if not 0.0 <= p <= 1.0:
        raise OutOfRange(f"Werner weight must lie in [0, 1], got {p}")
    return p * bell(4) + (1 - p) * np.eye(4, dtype=complex) / 4


def product(a, b) -> np.ndarray:
    return np.kron(qubit_state(a), qubit_state(b))


NAMED_BLOCH = {
    "e": (0.0, 0.0, 1.0),
    "g": (0.0, 0.0, -1.0),
    "+": (1.0, 0.0, 0.0),
    "-": (-1.0, 0.0, 0.0),
    "+i": (0.0, 1.0, 0.0),
    "-i": (0.0, -1.0, 0.0),
    "mixed": (0.0, 0.0, 0.0),
}


def named_state(name: str) -> np.ndarray:
    """Build a state from a short name.

    Accepts ``bell1``..``bell4``, ``werner:<p>``, ``maximally_mixed`` and
    products written as ``<a>,<b>`` of the single-qubit names in
    :data:`NAMED_BLOCH` (``e,g`` is |e>|g>, ``+,+`` is |+>|+>).
    """
    name = name.strip()
    if name.startswith("bell"):
        return bell(int(name[4:]))
    if name.startswith("werner:"):
        return werner(float(name.split(":", 1)[1]))
    if name == "maximally_mixed":
        return np.eye(4, dtype=complex) / 4
    parts = [p.strip() for p in name.split(",")]
    if len(parts) == 2 and all(p in NAMED_BLOCH for p in parts):
        return product(NAMED_BLOCH[parts[0]], NAMED_BLOCH[parts[1]])
    raise OutOfRange(f"unknown state name {name!r}")


def random_state(rng: np.random.Generator, dim: int = 4) -> np.ndarray:
    """Full-rank random density matrix from a normalized Ginibre matrix."""
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_unitary(rng: np.random.Generator, dim: int = 2) -> np.ndarray:
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


# --- state files ------------------------------------------------------------


def write_state(path, rho) -> None:
    rho = as_square(rho)
    lines = [str(rho.shape[0])]
    lines += [f"{z.real:.17g} {z.imag:.17g}" for z in rho.ravel()]
    Path(path).write_text("\n".join(lines) + "\n")


def read_state(path) -> np.ndarray:
    """Parse a state file: dimension on line 1, then dim^2 ``re im`` lines."""
    text = Path(path).read_text()
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ParseError(f"{path}: empty state file")
    try:
        dim = int(lines[0])
    except ValueError as exc:
        raise ParseError(f"{path}: bad dimension line {lines[0]!r}") from exc
    if dim not in (2, 4):
        raise ParseError(f"{path}: dimension must be 2 or 4, got {dim}")
    body = lines[1:]
    if len(body) != dim * dim:
        raise ParseError(f"{path}: expected {dim * dim} entries, found {len(body)}")
    vals = []
    for n, ln in enumerate(body, start=2):
        parts = ln.split()
        if len(parts) != 2:
            raise ParseError(f"{path}:{n}: expected 're im', got {ln!r}")
        try:
            vals.append(complex(float(parts[0]), float(parts[1])))
        except ValueError as exc:
            raise ParseError(f"{path}:{n}: {exc}") from exc
    return np.array(vals, dtype=complex).reshape(dim, dim)
