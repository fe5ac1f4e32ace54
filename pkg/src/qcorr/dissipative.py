"""Two-qubit dissipative dynamics in a squeezed thermal bath.

Born-Markov/RWA master equation for two dipole-coupled qubits with
position-dependent collective decay ``gamma12`` and coherent exchange
``omega12``. Units: hbar = k_B = 1, rates in units of the single-qubit
spontaneous emission rate.

Operators follow the state basis convention |0> = |e>, |1> = |g>.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from qcorr.errors import OutOfRange, SeparationTooSmall, StepSizeTooLarge
from qcorr.measures import correlation_report
from qcorr.states import check_state, validate

log = logging.getLogger(__name__)

SMALL_X = 1e-4
MIN_SHIFT_X = 1e-3
HALVING_TOL = 1e-8
TRAJECTORY_POS_TOL = 1e-6

_SP = np.array([[0, 1], [0, 0]], dtype=complex)  # |e><g|
_SM = _SP.T.copy()
_SZ = 0.5 * np.diag([1.0, -1.0]).astype(complex)
_I2 = np.eye(2, dtype=complex)

S_PLUS = (np.kron(_SP, _I2), np.kron(_I2, _SP))
S_MINUS = (np.kron(_SM, _I2), np.kron(_I2, _SM))
S_Z = (np.kron(_SZ, _I2), np.kron(_I2, _SZ))


def planck_occupation(omega: float, temperature: float) -> float:
    if omega <= 0:
        raise OutOfRange(f"frequency must be positive, got {omega}")
    if temperature < 0:
        raise OutOfRange(f"temperature must be nonnegative, got {temperature}")
    if temperature == 0:
        return 0.0
    return 1.0 / math.expm1(omega / temperature)


@dataclass(frozen=True)
class BathSpec:
    T: float = 0.0
    r: float = 0.0
    phi: float = 0.0
    omega0: float = 1.0

    def __post_init__(self):
        if self.T < 0:
            raise OutOfRange(f"temperature must be nonnegative, got {self.T}")
        if self.omega0 <= 0:
            raise OutOfRange(f"omega0 must be positive, got {self.omega0}")

    @property
    def n_thermal(self) -> float:
        return planck_occupation(self.omega0, self.T)


def squeezed_bath_params(spec: BathSpec) -> tuple[float, complex]:
    """Effective occupation ``N~`` and squeezing correlation ``M~`` at ``omega0``."""
    nth = spec.n_thermal
    ch2 = math.cosh(spec.r) ** 2
    sh2 = math.sinh(spec.r) ** 2
    n = nth * (ch2 + sh2) + sh2
    m = -0.5 * math.sinh(2 * spec.r) * complex(math.cos(spec.phi), math.sin(spec.phi)) * (2 * nth + 1)
    return n, m


def geometric_factor(x: float, a: float) -> float:
    """Collective decay factor F(k0 r12) for alignment ``a = (mu.r12)^2``."""
    if x <= 0:
        raise OutOfRange(f"separation must be positive, got {x}")
    if not 0 <= a <= 1:
        raise OutOfRange(f"alignment must lie in [0, 1], got {a}")
    if x < SMALL_X:
        return 1.0
    s, c = math.sin(x), math.cos(x)
    return 1.5 * ((1 - a) * s / x + (1 - 3 * a) * (c / x**2 - s / x**3))


def collective_shift(x: float, a: float, gamma: float = 1.0) -> float:
    """Bath-mediated dipole-dipole shift Omega12 for identical qubits."""
    if x < MIN_SHIFT_X:
        raise SeparationTooSmall(f"k0 r12 = {x} is below {MIN_SHIFT_X}; Omega12 diverges as 1/x^3")
    if not 0 <= a <= 1:
        raise OutOfRange(f"alignment must lie in [0, 1], got {a}")
    s, c = math.sin(x), math.cos(x)
    return 0.75 * gamma * (-(1 - a) * c / x + (1 - 3 * a) * (s / x**2 + c / x**3))


@dataclass(frozen=True)
class DissipativeParams:
    """Parameters of the two-qubit master equation.

    ``x`` is the dimensionless separation k0 r12 and ``a`` the squared
    cosine between the dipole moment and the inter-qubit axis.
    ``gamma12``/``omega12`` follow from ``x`` unless pinned explicitly;
    ``omega12`` raises :class:`SeparationTooSmall` below x = 1e-3.
    """

    gamma: float = 1.0
    x: float = 1.0
    a: float = 0.0
    omega1: float = 1.0
    omega2: float = 1.0
    bath: BathSpec = field(default_factory=BathSpec)
    gamma12_override: float | None = None
    omega12_override: float | None = None

    @classmethod
    def from_separation(cls, r12: float, wavelength: float, **kw) -> "DissipativeParams":
        return cls(x=2 * math.pi * r12 / wavelength, **kw)

    @classmethod
    def independent(cls, **kw) -> "DissipativeParams":
        return cls(gamma12_override=0.0, omega12_override=0.0, **kw)

    @property
    def gamma12(self) -> float:
        if self.gamma12_override is not None:
            return self.gamma12_override
        return self.gamma * geometric_factor(self.x, self.a)

    @property
    def omega12(self) -> float:
        if self.omega12_override is not None:
            return self.omega12_override
        return collective_shift(self.x, self.a, self.gamma)

    @property
    def bath_params(self) -> tuple[float, complex]:
        return squeezed_bath_params(self.bath)

    def with_(self, **kw) -> "DissipativeParams":
        return replace(self, **kw)


def _hamiltonian(p: DissipativeParams) -> np.ndarray:
    h = p.omega1 * S_Z[0] + p.omega2 * S_Z[1]
    w12 = p.omega12
    h = h + w12 * (S_PLUS[0] @ S_MINUS[1] + S_PLUS[1] @ S_MINUS[0])
    return h


def _rates(p: DissipativeParams) -> np.ndarray:
    g12 = p.gamma12
    return np.array([[p.gamma, g12], [g12, p.gamma]])


def liouvillian_rhs(rho, p: DissipativeParams) -> np.ndarray:
    """Right-hand side d(rho)/dt of the squeezed-bath master equation."""
    rho = check_state(rho, TRAJECTORY_POS_TOL)
    return _rhs(rho, p)


def _rhs(rho: np.ndarray, p: DissipativeParams) -> np.ndarray:
    n, m = p.bath_params
    g = _rates(p)
    h = _hamiltonian(p)
    out = -1j * (h @ rho - rho @ h)
    sp, sm = S_PLUS, S_MINUS
    for i in range(2):
        for j in range(2):
            gij = g[i, j]
            if gij == 0:
                continue
            a = sp[i] @ sm[j]
            out -= 0.5 * gij * (1 + n) * (rho @ a + a @ rho - 2 * sm[j] @ rho @ sp[i])
            b = sm[i] @ sp[j]
            out -= 0.5 * gij * n * (rho @ b + b @ rho - 2 * sp[j] @ rho @ sm[i])
            c = sp[i] @ sp[j]
            out += 0.5 * gij * m * (rho @ c + c @ rho - 2 * sp[j] @ rho @ sp[i])
            d = sm[i] @ sm[j]
            out += 0.5 * gij * np.conj(m) * (rho @ d + d @ rho - 2 * sm[j] @ rho @ sm[i])
    return out


def liouvillian_matrix(p: DissipativeParams) -> np.ndarray:
    """16x16 generator acting on row-major vectorized density matrices."""
    cols = []
    for k in range(16):
        e = np.zeros(16, dtype=complex)
        e[k] = 1.0
        cols.append(_rhs(e.reshape(4, 4), p).ravel())
    return np.array(cols).T


def _rk4_step_matrix(gen: np.ndarray, h: float) -> np.ndarray:
    """Propagator of one classical RK4 step for the linear system v' = L v."""
    a = h * gen
    a2 = a @ a
    a3 = a2 @ a
    return np.eye(gen.shape[0]) + a + a2 / 2 + a3 / 6 + (a3 @ a) / 24


@dataclass
class Trajectory:
    times: np.ndarray
    states: list
    params: DissipativeParams
    dt: float = 0.0

    def __len__(self):
        return len(self.times)

    def populations(self) -> np.ndarray:
        return np.array([np.diag(s).real for s in self.states])


def _integrate(rho0: np.ndarray, gen: np.ndarray, times: np.ndarray, dt: float) -> np.ndarray:
    v = rho0.ravel().astype(complex)
    out = np.empty((len(times), 16), dtype=complex)
    t_prev = 0.0
    cache = {}
    for k, t in enumerate(times):
        span = t - t_prev
        if span > 0:
            nsteps = max(1, math.ceil(span / dt - 1e-9))
            h = span / nsteps
            key = round(h, 15)
            if key not in cache:
                cache[key] = _rk4_step_matrix(gen, h)
            prop = cache[key]
            for _ in range(nsteps):
                v = prop @ v
        out[k] = v
        t_prev = t
    return out


def evolve(rho0, p: DissipativeParams, t_end: float, dt: float, times=None) -> Trajectory:
    """Integrate from t = 0 to ``t_end`` with fixed-step RK4.

    States are stored at ``times`` (default: ``t_end`` only, plus t = 0).
    The run is accepted once halving the step changes no stored matrix
    element by more than 1e-8; after two consecutive failures
    :class:`StepSizeTooLarge` is raised. The returned trajectory is the
    finer run of the accepted pair.
    """
    if t_end <= 0 or dt <= 0:
        raise OutOfRange("t_end and dt must be positive")
    rho0 = check_state(rho0)
    if times is None:
        times = np.array([0.0, t_end])
    times = np.asarray(times, dtype=float)
    if np.any(np.diff(times) < 0) or times[0] < 0 or times[-1] > t_end + 1e-12:
        raise OutOfRange("sample times must be ascending within [0, t_end]")
    gen = liouvillian_matrix(p)
    coarse = _integrate(rho0, gen, times, dt)
    failures = 0
    while True:
        fine = _integrate(rho0, gen, times, dt / 2)
        err = float(np.max(np.abs(fine - coarse)))
        if np.isfinite(err) and err < HALVING_TOL:
            break
        failures += 1
        log.debug("step halving test failed at dt=%g (max change %.3e)", dt, err)
        if failures >= 2:
            raise StepSizeTooLarge(f"halving dt={dt:g} still changes states by {err:.3e}")
        dt /= 2
        coarse = fine
    states = [0.5 * (s.reshape(4, 4) + s.reshape(4, 4).conj().T) for s in fine]
    for t, s in zip(times, states):
        rep = validate(s, TRAJECTORY_POS_TOL)
        if not rep.passed:
            raise StepSizeTooLarge(f"state at t={t:g} invalid: {rep.describe()}")
    return Trajectory(times=times, states=states, params=p, dt=dt / 2)


def suggest_dt(p: DissipativeParams, scale: float = 0.02) -> float:
    """Step size proportional to the inverse spectral radius of the generator."""
    rad = float(np.max(np.abs(np.linalg.eigvals(liouvillian_matrix(p)))))
    return scale / max(rad, 1e-12)


def correlation_trajectory(rho0, p: DissipativeParams, times, mode="optimized", dt=None, measured=2):
    """Evolve and compute a :class:`CorrelationReport` at each sample time."""
    times = np.asarray(times, dtype=float)
    if dt is None:
        dt = suggest_dt(p)
    t_end = float(times[-1])
    if t_end == 0:
        return [correlation_report(check_state(rho0), mode, measured)]
    traj = evolve(rho0, p, t_end, dt, times)
    return [correlation_report(s, mode, measured, pos_tol=TRAJECTORY_POS_TOL) for s in traj.states]
