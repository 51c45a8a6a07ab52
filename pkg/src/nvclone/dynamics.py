"""Evolution of the spin under pulse sequences.

Two paths share one op interpreter: ``ideal`` applies exact unitaries, and
``lindblad`` integrates the rotating-frame master equation with a fixed-step
RK4 on the 9x9 Liouvillian. With zero dephasing the two agree to RK4 error.
"""
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .errors import ConfigError, IntegrationError
from .pulses import Init, Mw, Readout, Wait
from .spin import M_MINUS, M_PLUS, M_ZERO, TWO_PI, basis, ket_to_density

_TARGET = {1: M_MINUS, 2: M_PLUS}


def mw_rotation(channel, theta, phase=0.0):
    """Selective rotation on span{|0>, |s>}, s = -1 (channel 1) or +1 (channel 2).

    |0> -> cos(theta/2)|0> + i e^{i phase} sin(theta/2)|s>
    |s> -> i e^{-i phase} sin(theta/2)|0> + cos(theta/2)|s>
    """
    s = _TARGET[channel]
    c, sn = math.cos(theta / 2), math.sin(theta / 2)
    U = np.eye(3, dtype=complex)
    U[M_ZERO, M_ZERO] = c
    U[s, s] = c
    U[s, M_ZERO] = 1j * np.exp(1j * phase) * sn
    U[M_ZERO, s] = 1j * np.exp(-1j * phase) * sn
    return U


def free_evolution(state, t, omega_env):
    """Rotating-frame idle: the |m=-1> amplitude picks up e^{i omega t}."""
    if t < 0:
        raise ValueError("free evolution time must be non-negative")
    out = np.array(state, dtype=complex)
    out[M_MINUS] *= np.exp(1j * omega_env * t)
    return out


def rwa_hamiltonian(channel, rabi_hz, phase=0.0, detuning_hz=0.0):
    """Rotating-frame drive Hamiltonian (rad/s) for one channel.

    H = Delta |s><s| - (Omega/2)(e^{i phase}|s><0| + h.c.); the minus sign
    makes exp(-iHt) equal :func:`mw_rotation` with theta = Omega t.
    """
    s = _TARGET[channel]
    omega = TWO_PI * rabi_hz
    H = np.zeros((3, 3), dtype=complex)
    H[s, s] = TWO_PI * detuning_hz
    H[s, M_ZERO] = -0.5 * omega * np.exp(1j * phase)
    H[M_ZERO, s] = -0.5 * omega * np.exp(-1j * phase)
    return H


def idle_hamiltonian(omega_env):
    H = np.zeros((3, 3), dtype=complex)
    H[M_MINUS, M_MINUS] = -omega_env
    return H


@dataclass(frozen=True)
class EvolutionConfig:
    """How sequences are evolved.

    ``dephasing_rates`` are the coherence decay rates (1/s) of the 0<->-1 and
    0<->+1 transitions; ``None`` means 1/t2star for both. ``polarization`` is
    the |m=0> population left by the laser init.
    """

    path: str = "ideal"
    integrator_step: float = 1e-9
    dephasing_rates: tuple = None
    polarization: float = 1.0

    def __post_init__(self):
        if self.path not in ("ideal", "lindblad"):
            raise ConfigError(f"path must be 'ideal' or 'lindblad', got {self.path!r}")
        if not self.integrator_step > 0:
            raise ConfigError("integrator_step must be positive")
        if self.dephasing_rates is not None:
            rates = tuple(float(r) for r in self.dephasing_rates)
            if len(rates) != 2 or min(rates) < 0:
                raise ConfigError("dephasing_rates needs two non-negative rates")
            object.__setattr__(self, "dephasing_rates", rates)
        if not 0.0 <= self.polarization <= 1.0:
            raise ConfigError("polarization must lie in [0, 1]")

    def validate(self, params):
        if self.path == "lindblad":
            period = 1.0 / max(params.rabi_mw1, params.rabi_mw2)
            if self.integrator_step > period / 10:
                raise ConfigError(
                    f"integrator_step {self.integrator_step:g} s gives fewer than "
                    f"10 steps per Rabi period ({period:g} s)")
        return self

    def coherence_rates(self, params):
        if self.dephasing_rates is not None:
            return self.dephasing_rates
        return (1.0 / params.t2star, 1.0 / params.t2star)


def level_dephasing_rates(coherence_rates):
    """Per-level rates for L_k = |k><k| giving the requested coherence decay.

    A coherence rho_ij decays at (g_i + g_j)/2; m=0 is taken as the
    reference level with g_0 = 0.
    """
    g1, g2 = coherence_rates
    rates = np.zeros(3)
    rates[M_MINUS] = 2.0 * g1
    rates[M_PLUS] = 2.0 * g2
    return rates


def liouvillian(H, level_rates):
    """9x9 generator acting on row-major vec(rho)."""
    eye = np.eye(3)
    L = -1j * (np.kron(H, eye) - np.kron(eye, H.T))
    for k, g in enumerate(level_rates):
        if g == 0:
            continue
        P = np.zeros((3, 3))
        P[k, k] = 1.0
        L += g * (np.kron(P, P) - 0.5 * np.kron(P, eye) - 0.5 * np.kron(eye, P))
    return L


def rk4_propagator(L, h):
    """One classical RK4 step for the linear ODE dv/dt = L v, as a matrix."""
    A = h * L
    A2 = A @ A
    A3 = A2 @ A
    return np.eye(L.shape[0]) + A + A2 / 2 + A3 / 6 + A3 @ A / 24


def integrate_lindblad(rho, H, level_rates, duration, step):
    """Fixed-step RK4 over ``duration``; the step is shrunk to divide it evenly."""
    if duration == 0:
        return rho
    n = max(1, math.ceil(duration / step - 1e-9))
    P = rk4_propagator(liouvillian(H, level_rates), duration / n)
    with np.errstate(over="ignore", invalid="ignore"):
        v = np.linalg.matrix_power(P, n) @ rho.reshape(-1)
    out = v.reshape(3, 3)
    tr = np.trace(out).real
    if not np.all(np.isfinite(out)) or abs(tr - 1.0) > 1e-6:
        raise IntegrationError(f"trace drifted to {tr!r}; integrator step too large")
    return 0.5 * (out + out.conj().T)


def initial_density(polarization=1.0):
    rest = 0.5 * (1.0 - polarization)
    return np.diag([rest, polarization, rest]).astype(complex)


def pulse_duration(op, params):
    if op.duration is not None:
        return op.duration
    return abs(op.angle) / (TWO_PI * params.rabi(op.channel))


def _drive_hamiltonian(op, params):
    # A negative pulse area is the positive area with the drive phase flipped.
    phase = op.phase
    if op.angle is not None and op.angle < 0:
        phase += math.pi
    return rwa_hamiltonian(op.channel, params.rabi(op.channel), phase, op.detuning)


def apply_op(rho, op, params, cfg):
    """Evolve ``rho`` through one non-Readout op."""
    if isinstance(op, Init):
        return initial_density(cfg.polarization)
    if isinstance(op, Readout):
        return rho
    if cfg.path == "ideal":
        if isinstance(op, Wait):
            U = np.diag(free_evolution(np.ones(3), op.duration, params.omega_env))
        elif op.detuning == 0:
            theta = op.angle if op.angle is not None else TWO_PI * params.rabi(op.channel) * op.duration
            U = mw_rotation(op.channel, theta, op.phase)
        else:
            U = expm(-1j * _drive_hamiltonian(op, params) * pulse_duration(op, params))
        return U @ rho @ U.conj().T
    rates = level_dephasing_rates(cfg.coherence_rates(params))
    if isinstance(op, Wait):
        return integrate_lindblad(rho, idle_hamiltonian(params.omega_env), rates,
                                  op.duration, cfg.integrator_step)
    return integrate_lindblad(rho, _drive_hamiltonian(op, params), rates,
                              pulse_duration(op, params), cfg.integrator_step)


def evolve_ops(ops, params, cfg, rho=None):
    """Run ``ops`` (no Readout handling) starting from ``rho``."""
    if rho is None:
        rho = initial_density(cfg.polarization)
    for op in ops:
        rho = apply_op(rho, op, params, cfg)
    return rho


def evolve_sequence(seq, params, cfg=None):
    """Density matrix at every Readout of ``seq``, in program order.

    Raises:
        IntegrationError: if the Lindblad integration loses trace.
    """
    cfg = (cfg or EvolutionConfig()).validate(params)
    rho = initial_density(cfg.polarization)
    out = []
    for op in seq.ops:
        if isinstance(op, Readout):
            out.append(rho.copy())
        else:
            rho = apply_op(rho, op, params, cfg)
    return out


def final_density(seq, params, cfg=None):
    return evolve_sequence(seq, params, cfg)[0]


def state_after(ops, params):
    """Ideal-path pure state after ``ops`` starting from |m=0>."""
    psi = basis(M_ZERO)
    for op in ops:
        if isinstance(op, Init):
            psi = basis(M_ZERO)
        elif isinstance(op, Wait):
            psi = free_evolution(psi, op.duration, params.omega_env)
        elif isinstance(op, Mw):
            if op.detuning:
                psi = expm(-1j * _drive_hamiltonian(op, params) * pulse_duration(op, params)) @ psi
            else:
                theta = op.angle if op.angle is not None else TWO_PI * params.rabi(op.channel) * op.duration
                psi = mw_rotation(op.channel, theta, op.phase) @ psi
    return psi


def is_pure(rho, tol=1e-9):
    return abs(np.trace(rho @ rho).real - 1.0) <= tol


__all__ = [
    "EvolutionConfig", "mw_rotation", "free_evolution", "rwa_hamiltonian",
    "evolve_sequence", "final_density", "evolve_ops", "apply_op", "state_after",
    "liouvillian", "rk4_propagator", "integrate_lindblad", "ket_to_density",
]
