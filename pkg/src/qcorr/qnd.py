"""QND (pure dephasing) two-qubit channel.

The system-bath coupling commutes with the system Hamiltonian, so
populations in the S^z product basis never change and every coherence
rho_ij is multiplied by a factor built from a decoherence exponent
``delta(t)`` and a phase ``phase(t)``.

The kernel is pluggable. :func:`default_kernel` is a Markovian stand-in,
``delta(t) = gamma0 (2 N~ + 1) t``; drop in other functions to model a
specific bath.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable

import numpy as np

from qcorr.dissipative import BathSpec, squeezed_bath_params
from qcorr.errors import OutOfRange
from qcorr.measures import correlation_report
from qcorr.states import check_state


class Regime(str, enum.Enum):
    COLLECTIVE = "collective"
    INDEPENDENT = "independent"


# per-qubit S^z eigenvalues in the basis |ee>, |eg>, |ge>, |gg>
_M1 = np.array([0.5, 0.5, -0.5, -0.5])
_M2 = np.array([0.5, -0.5, 0.5, -0.5])
_MTOT = _M1 + _M2


def _zero(t):
    return 0.0


@dataclass(frozen=True)
class QndKernel:
    delta: Callable[[float], float]
    phase: Callable[[float], float] = _zero
    regime: Regime = Regime.INDEPENDENT

    def check(self, times) -> bool:
        """True if delta(0) = phase(0) = 0 and delta is nonnegative and nondecreasing on ``times``."""
        d = np.array([self.delta(t) for t in times])
        ok = self.delta(0.0) == 0 and self.phase(0.0) == 0
        return bool(ok and np.all(d >= 0) and np.all(np.diff(d) >= 0))


def default_kernel(spec: BathSpec, gamma0: float = 1.0, regime=Regime.INDEPENDENT) -> QndKernel:
    if gamma0 <= 0:
        raise OutOfRange(f"gamma0 must be positive, got {gamma0}")
    n, _ = squeezed_bath_params(spec)
    rate = gamma0 * (2 * n + 1)
    return QndKernel(delta=lambda t: rate * t, phase=_zero, regime=Regime(regime))


def regime_for_separation(r12: float, wavelength: float = 1.0) -> Regime:
    """Independent when r12/wavelength >= 1, collective below."""
    if r12 < 0 or wavelength <= 0:
        raise OutOfRange("separation must be nonnegative and wavelength positive")
    return Regime.INDEPENDENT if r12 / wavelength >= 1 else Regime.COLLECTIVE


def channel_multipliers(k: QndKernel, t: float) -> np.ndarray:
    """Element-wise multipliers m_ij(t) applied to the density matrix."""
    if t < 0:
        raise OutOfRange(f"time must be nonnegative, got {t}")
    delta = k.delta(t)
    phase = k.phase(t)
    if Regime(k.regime) is Regime.COLLECTIVE:
        expo = (_MTOT[:, None] - _MTOT[None, :]) ** 2
    else:
        expo = (_M1[:, None] - _M1[None, :]) ** 2 + (_M2[:, None] - _M2[None, :]) ** 2
    ph = _MTOT[:, None] ** 2 - _MTOT[None, :] ** 2
    m = np.exp(-expo * delta + 1j * ph * phase)
    np.fill_diagonal(m, 1.0)
    return m


def apply_qnd_channel(rho0, k: QndKernel, t: float) -> np.ndarray:
    rho0 = check_state(rho0)
    return rho0 * channel_multipliers(k, t)


@dataclass(frozen=True)
class ChoiReport:
    min_eigenvalue: float
    trace_residual: float

    @property
    def passed(self) -> bool:
        return self.min_eigenvalue >= -1e-10 and self.trace_residual < 1e-10


def choi_matrix(channel: Callable[[np.ndarray], np.ndarray], dim: int = 4) -> np.ndarray:
    """Choi matrix sum_ab |a><b| (x) channel(|a><b|)."""
    j = np.zeros((dim * dim, dim * dim), dtype=complex)
    for a in range(dim):
        for b in range(dim):
            e = np.zeros((dim, dim), dtype=complex)
            e[a, b] = 1.0
            j += np.kron(e, channel(e))
    return j


def choi_cptp_check(k, t: float = 0.0) -> ChoiReport:
    """Complete positivity and trace preservation of the channel at time ``t``.

    ``k`` is a :class:`QndKernel` or an explicit 4x4 multiplier matrix.
    """
    m = channel_multipliers(k, t) if isinstance(k, QndKernel) else np.asarray(k, dtype=complex)
    j = choi_matrix(lambda e: e * m)
    w = np.linalg.eigvalsh(0.5 * (j + j.conj().T))
    # trace over the output factor must give the identity on the input
    tr_out = np.einsum("aibi->ab", j.reshape(4, 4, 4, 4))
    resid = float(np.max(np.abs(tr_out - np.eye(4))))
    return ChoiReport(min_eigenvalue=float(w[0]), trace_residual=resid)


QND_PARAMS = ("r", "r12", "T", "t")


def qnd_correlation_sweep(
    rho0,
    param: str,
    grid,
    bath: BathSpec = BathSpec(),
    t: float = 1.0,
    gamma0: float = 1.0,
    regime=Regime.INDEPENDENT,
    wavelength: float = 1.0,
    kernel_factory: Callable[..., QndKernel] | None = None,
    mode="optimized",
    measured: int = 2,
):
    """Apply the channel across ``grid`` values of ``param`` and measure each output.

    ``kernel_factory(bath, gamma0, regime)`` builds the kernel at each
    point (default :func:`default_kernel`). Sweeping ``r12`` switches the
    regime through :func:`regime_for_separation`.
    Returns a list of ``(value, state, report)`` tuples.
    """
    if param not in QND_PARAMS:
        raise OutOfRange(f"QND sweep parameter must be one of {QND_PARAMS}, got {param!r}")
    rho0 = check_state(rho0)
    factory = kernel_factory or default_kernel
    out = []
    for v in np.asarray(grid, dtype=float):
        b, tt, reg = bath, t, regime
        if param == "r":
            b = BathSpec(T=bath.T, r=v, phi=bath.phi, omega0=bath.omega0)
        elif param == "T":
            b = BathSpec(T=v, r=bath.r, phi=bath.phi, omega0=bath.omega0)
        elif param == "t":
            tt = v
        else:
            reg = regime_for_separation(v, wavelength)
        rho = apply_qnd_channel(rho0, factory(b, gamma0, reg), tt)
        out.append((float(v), rho, correlation_report(rho, mode, measured)))
    return out
