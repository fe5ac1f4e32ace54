"""Correlation measures for two-qubit states.

Concurrence and entanglement of formation, the Horodecki Bell-CHSH
quantity M(rho) with a brute-force CHSH cross-check, the optimal
teleportation fidelity, projective-measurement discord, classical
correlation, mutual information and the three-way state classifier.

All entropies are in bits. Discord measures qubit 2 unless ``measured=1``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from enum import Enum

import numpy as np
from scipy.optimize import minimize

from qcorr.errors import OutOfRange
from qcorr.linalg import SY, hermitian_eigensystem, matrix_sqrt_psd, partial_trace
from qcorr.states import (
    binary_entropy,
    check_state,
    entropy_of_spectrum,
    fano_decompose,
    von_neumann_entropy,
)

EPS_C = 1e-6
EPS_D = 1e-4
CLASSICAL_FIDELITY = 2.0 / 3.0

GRID_POINTS = 64
SIMPLEX_FTOL = 1e-6
SIMPLEX_MAXFEV = 500

_YY = np.kron(SY, SY)


class Label(str, Enum):
    ENTANGLED = "Entangled"
    NONCLASSICAL_SEPARABLE = "NonclassicalSeparable"
    CLASSICAL = "Classical"


class DiscordMode(str, Enum):
    FIXED = "fixed-basis"
    OPTIMIZED = "optimized"


def _mode(mode) -> DiscordMode:
    try:
        return DiscordMode(mode)
    except ValueError as exc:
        raise ValueError(f"unknown discord mode {mode!r}") from exc


# --- entanglement ---------------------------------------------------------


def concurrence(rho) -> float:
    """Wootters concurrence via the Hermitian form sqrt(rho) rho~ sqrt(rho)."""
    rho = check_state(rho)
    sq = matrix_sqrt_psd(rho)
    r = sq @ _YY @ rho.conj() @ _YY @ sq
    r = 0.5 * (r + r.conj().T)
    lam = np.sqrt(np.clip(hermitian_eigensystem(r).eigenvalues, 0.0, None))
    c = lam[0] - lam[1] - lam[2] - lam[3]
    return float(min(max(c, 0.0), 1.0))


def eof(c: float) -> float:
    if not -1e-12 <= c <= 1 + 1e-12:
        raise OutOfRange(f"concurrence must lie in [0, 1], got {c}")
    c = min(max(c, 0.0), 1.0)
    return float(binary_entropy(0.5 * (1 + np.sqrt(1 - c * c))))


# --- Bell-CHSH and teleportation ------------------------------------------


def correlation_spectrum(rho) -> np.ndarray:
    """Eigenvalues of T^T T, descending and clipped at zero."""
    t = fano_decompose(rho).T
    u = np.linalg.eigvalsh(t.T @ t)[::-1]
    return np.clip(u, 0.0, None)


def bell_M(rho) -> float:
    u = correlation_spectrum(rho)
    return float(u[0] + u[1])


def chsh_bruteforce(rho, resolution: int = 96) -> float:
    """Largest CHSH value found by direct search over measurement directions.

    The correlation for directions ``a`` (qubit 1) and ``b`` (qubit 2) is
    ``a . T b``. For fixed Bob settings the best Alice settings are the
    unit vectors along ``T(b + b')`` and ``T(b - b')``. Writing
    ``b +/- b'`` as ``2 cos(al) c`` and ``2 sin(al) d`` with ``c``, ``d``
    orthonormal leaves ``2 (cos(al)|Tc| + sin(al)|Td|)``; ``al`` is then
    maximized in closed form and ``(c, d)`` is searched on a
    ``resolution^3`` grid (polar angle, azimuth, in-plane rotation).
    """
    if resolution < 24:
        raise OutOfRange("resolution must be at least 24")
    t = fano_decompose(rho).T
    th = np.linspace(0.0, np.pi, resolution)
    ph = np.linspace(0.0, 2 * np.pi, resolution, endpoint=False)
    ps = np.linspace(0.0, np.pi, resolution, endpoint=False)
    TH, PH = np.meshgrid(th, ph, indexing="ij")
    c = np.stack([np.sin(TH) * np.cos(PH), np.sin(TH) * np.sin(PH), np.cos(TH)], axis=-1)
    e1 = np.stack([np.cos(TH) * np.cos(PH), np.cos(TH) * np.sin(PH), -np.sin(TH)], axis=-1)
    e2 = np.stack([-np.sin(PH), np.cos(PH), np.zeros_like(PH)], axis=-1)
    c = c.reshape(-1, 3)
    e1 = e1.reshape(-1, 3)
    e2 = e2.reshape(-1, 3)
    tc2 = np.sum((c @ t.T) ** 2, axis=1)
    te1 = e1 @ t.T
    te2 = e2 @ t.T
    best = 0.0
    for p in ps:
        td = np.cos(p) * te1 + np.sin(p) * te2
        val = np.max(tc2 + np.sum(td * td, axis=1))
        best = max(best, float(val))
    return 2.0 * np.sqrt(best)


def teleport_fidelity(rho) -> tuple[float, float]:
    """Return ``(N, f_max)`` with ``f_max = (1 + N/3) / 2``."""
    u = correlation_spectrum(rho)
    n = float(np.sum(np.sqrt(u)))
    return n, 0.5 * (1 + n / 3)


# --- discord --------------------------------------------------------------


@dataclass(frozen=True)
class MeasurementBasis:
    """Projective qubit measurement onto cos(t)|0> + e^{ip} sin(t)|1> and its complement."""

    theta: float = 0.0
    phi: float = 0.0

    def vectors(self):
        c, s = np.cos(self.theta), np.sin(self.theta)
        v0 = np.array([c, np.exp(1j * self.phi) * s])
        v1 = np.array([np.exp(-1j * self.phi) * s, -c])
        return v0, v1

    def projectors(self):
        return tuple(np.outer(v, v.conj()) for v in self.vectors())

    def bloch_direction(self) -> np.ndarray:
        return _direction(self.theta, self.phi)


COMPUTATIONAL = MeasurementBasis(0.0, 0.0)


def _direction(theta, phi):
    theta = np.asarray(theta)
    phi = np.asarray(phi)
    return np.stack(
        [np.sin(2 * theta) * np.cos(phi), np.sin(2 * theta) * np.sin(phi), np.cos(2 * theta)],
        axis=-1,
    )


def conditional_entropy(rho, basis: MeasurementBasis = COMPUTATIONAL, measured: int = 2) -> float:
    """Average entropy of the unmeasured qubit after a projective measurement."""
    rho = check_state(rho)
    keep = 1 if measured == 2 else 2
    total = 0.0
    for proj in basis.projectors():
        op = np.kron(np.eye(2), proj) if measured == 2 else np.kron(proj, np.eye(2))
        post = op @ rho @ op
        p = float(np.trace(post).real)
        if p < 1e-12:
            continue
        cond = partial_trace(post, keep) / p
        total += p * entropy_of_spectrum(np.linalg.eigvalsh(0.5 * (cond + cond.conj().T)))
    return total


def _local_parts(rho, measured):
    f = fano_decompose(rho)
    if measured == 2:
        return f.r, f.s, f.T
    if measured == 1:
        return f.s, f.r, f.T.T
    raise ValueError(f"measured must be 1 or 2, got {measured!r}")


def _cond_entropy_bloch(kept, meas, t, theta, phi):
    """Vectorized conditional entropy from the Fano form.

    Outcome +/- along Bloch direction n has probability (1 +/- meas.n)/2 and
    leaves the other qubit with Bloch vector (kept +/- T n)/(1 +/- meas.n).
    """
    n = _direction(theta, phi)
    sn = n @ meas
    tn = n @ t.T
    out = np.zeros(np.shape(sn))
    for sign in (1.0, -1.0):
        q = 1 + sign * sn
        v = kept + sign * tn
        with np.errstate(divide="ignore", invalid="ignore"):
            length = np.linalg.norm(v, axis=-1) / q
        length = np.where(q > 2e-12, np.clip(length, 0.0, 1.0), 0.0)
        out = out + 0.5 * q * binary_entropy(0.5 * (1 + length))
    return out


def _min_conditional_entropy(rho, measured):
    kept, meas, t = _local_parts(rho, measured)
    th = np.linspace(0.0, np.pi / 2, GRID_POINTS)
    ph = np.linspace(0.0, np.pi, GRID_POINTS, endpoint=False)
    TH, PH = np.meshgrid(th, ph, indexing="ij")
    vals = _cond_entropy_bloch(kept, meas, t, TH, PH)
    i, j = np.unravel_index(np.argmin(vals), vals.shape)
    x0 = np.array([th[i], ph[j]])
    best = float(vals[i, j])

    def objective(x):
        return float(_cond_entropy_bloch(kept, meas, t, x[0], x[1]))

    step = np.array([th[1] - th[0], ph[1] - ph[0]])
    simplex = np.array([x0, x0 + [step[0], 0.0], x0 + [0.0, step[1]]])
    res = minimize(
        objective,
        x0,
        method="Nelder-Mead",
        options={
            "initial_simplex": simplex,
            "fatol": SIMPLEX_FTOL,
            "xatol": 1e-6,
            "maxfev": SIMPLEX_MAXFEV,
        },
    )
    if res.fun < best:
        return float(res.fun), MeasurementBasis(float(res.x[0]), float(res.x[1]))
    return best, MeasurementBasis(float(x0[0]), float(x0[1]))


def optimal_basis(rho, measured: int = 2) -> MeasurementBasis:
    rho = check_state(rho)
    return _min_conditional_entropy(rho, measured)[1]


def _clamp(d: float) -> float:
    return 0.0 if d < 0 else d


def discord(rho, mode="optimized", measured: int = 2) -> float:
    """Quantum discord H(Y) - H(X,Y) + H(X|{pi^Y}) in bits, Y being the measured qubit."""
    rho = check_state(rho)
    mode = _mode(mode)
    h_meas = von_neumann_entropy(partial_trace(rho, measured))
    h_joint = von_neumann_entropy(rho)
    if mode is DiscordMode.FIXED:
        h_cond = conditional_entropy(rho, COMPUTATIONAL, measured)
    else:
        h_cond = _min_conditional_entropy(rho, measured)[0]
    return _clamp(h_meas - h_joint + h_cond)


def discord_grid(rho, resolution: int = 512, measured: int = 2) -> float:
    """Discord minimized by brute force over a ``resolution^2`` basis grid.

    Conditional states are built from explicit projectors rather than the
    Fano form, so this is independent of the path used by :func:`discord`.
    """
    rho = check_state(rho)
    th = np.linspace(0.0, np.pi / 2, resolution)
    ph = np.linspace(0.0, np.pi, resolution, endpoint=False)
    TH, PH = np.meshgrid(th, ph, indexing="ij")
    c, s = np.cos(TH).ravel(), np.sin(TH).ravel()
    e = np.exp(1j * PH).ravel()
    kets = [np.stack([c, e * s], axis=-1), np.stack([np.conj(e) * s, -c], axis=-1)]
    r4 = rho.reshape(2, 2, 2, 2)
    h_cond = np.zeros(c.shape)
    for v in kets:
        # <v| on the measured qubit, |v> on the other side; keep the other qubit
        if measured == 2:
            cond = np.einsum("nk,ikjl,nl->nij", v.conj(), r4, v)
        else:
            cond = np.einsum("nk,kilj,nl->nij", v.conj(), r4, v)
        p = np.real(np.trace(cond, axis1=1, axis2=2))
        w = np.linalg.eigvalsh(cond)
        with np.errstate(divide="ignore", invalid="ignore"):
            w = np.clip(w / p[:, None], 0.0, 1.0)
            ent = -np.sum(np.where(w > 0, w * np.log2(w), 0.0), axis=1)
        h_cond += np.where(p > 1e-12, p * ent, 0.0)
    h_meas = von_neumann_entropy(partial_trace(rho, measured))
    h_joint = von_neumann_entropy(rho)
    return _clamp(h_meas - h_joint + float(np.min(h_cond)))


def mutual_information(rho) -> float:
    rho = check_state(rho)
    return (
        von_neumann_entropy(partial_trace(rho, 1))
        + von_neumann_entropy(partial_trace(rho, 2))
        - von_neumann_entropy(rho)
    )


def classical_correlation(rho, mode="optimized", measured: int = 2) -> float:
    return mutual_information(rho) - discord(rho, mode, measured)


# --- reports and classification -------------------------------------------


@dataclass(frozen=True)
class CorrelationReport:
    concurrence: float
    eof: float
    bell_M: float
    N: float
    f_max: float
    discord_fixed: float
    discord_opt: float
    classical_corr: float
    mutual_info: float
    label: Label

    @property
    def violates_bell(self) -> bool:
        return self.bell_M > 1.0

    @property
    def useful_for_teleportation(self) -> bool:
        return self.f_max > CLASSICAL_FIDELITY + 1e-9

    def as_dict(self) -> dict:
        d = asdict(self)
        d["label"] = self.label.value
        return d


def classify(report, eps_c: float = EPS_C, eps_d: float = EPS_D) -> Label:
    if report.concurrence > eps_c:
        return Label.ENTANGLED
    if report.discord_opt > eps_d:
        return Label.NONCLASSICAL_SEPARABLE
    return Label.CLASSICAL


def correlation_report(
    rho,
    mode="optimized",
    measured: int = 2,
    eps_c: float = EPS_C,
    eps_d: float = EPS_D,
    pos_tol: float = 1e-8,
) -> CorrelationReport:
    """Compute every measure of ``rho``.

    ``mode`` selects which discord the classical correlation is paired
    with; both discord variants are always reported.
    """
    rho = check_state(rho, pos_tol)
    if np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0] < 0:
        # trajectory states may carry integrator-level negativity
        w, v = np.linalg.eigh(0.5 * (rho + rho.conj().T))
        w = np.clip(w, 0.0, None)
        rho = (v * (w / w.sum())) @ v.conj().T
    c = concurrence(rho)
    n, f = teleport_fidelity(rho)
    d_fixed = discord(rho, DiscordMode.FIXED, measured)
    d_opt = min(discord(rho, DiscordMode.OPTIMIZED, measured), d_fixed)
    mi = mutual_information(rho)
    d_sel = d_opt if _mode(mode) is DiscordMode.OPTIMIZED else d_fixed
    partial = CorrelationReport(
        concurrence=c,
        eof=eof(c),
        bell_M=bell_M(rho),
        N=n,
        f_max=f,
        discord_fixed=d_fixed,
        discord_opt=d_opt,
        classical_corr=mi - d_sel,
        mutual_info=mi,
        label=Label.CLASSICAL,
    )
    return _replace_label(partial, classify(partial, eps_c, eps_d))


def _replace_label(report: CorrelationReport, label: Label) -> CorrelationReport:
    d = asdict(report)
    d["label"] = label
    return CorrelationReport(**d)
