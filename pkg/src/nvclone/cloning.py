"""Logical two-qubit picture of the cloner and its fidelity bookkeeping.

Encoding between the qutrit (basis order -1, 0, +1) and the economical
two-qubit subspace {|00>, |01>, |10>}:

    |m=-1> <-> -i|00>,   |m=0> <-> |10>,   |m=+1> <-> -i|01>

``|11>`` is never populated. Copy A is the first logical qubit, copy B the
second.
"""
import hashlib
import json
from dataclasses import asdict, dataclass

import numpy as np

from .errors import DegenerateInput, InvalidState
from .spin import M_MINUS, M_PLUS, M_ZERO, fidelity_with_equator_state

PC_BOUND = 0.5 + 1.0 / np.sqrt(8.0)
UNIVERSAL_BOUND = 5.0 / 6.0

# Logical amplitude index for each qutrit level, and the encoding factor.
_MAP = {M_MINUS: (0, -1j), M_ZERO: (2, 1.0), M_PLUS: (1, -1j)}


def bounds():
    """Optimal phase-covariant and universal 1->2 cloning fidelities."""
    return float(PC_BOUND), float(UNIVERSAL_BOUND)


def check_logical(state, tol=1e-12):
    state = np.asarray(state, dtype=complex)
    if state.shape != (4,):
        raise InvalidState(f"logical state needs 4 amplitudes, got shape {state.shape}")
    if abs(np.linalg.norm(state) - 1.0) > tol:
        raise InvalidState("logical state is not normalised")
    if abs(state[3]) > tol:
        raise InvalidState("|11> is populated; not an economical-cloner state")
    return state


def decode(physical):
    """Qutrit amplitudes -> logical amplitudes on (|00>, |01>, |10>, |11>)."""
    physical = np.asarray(physical, dtype=complex)
    out = np.zeros(4, dtype=complex)
    for level, (idx, factor) in _MAP.items():
        out[idx] = factor * physical[level]
    return out


def encode(logical):
    """Inverse of :func:`decode`; rejects states with a |11> component."""
    logical = np.asarray(logical, dtype=complex)
    if abs(logical[3]) > 1e-12 * max(1.0, np.linalg.norm(logical)):
        raise InvalidState("|11> has no physical encoding")
    out = np.zeros(3, dtype=complex)
    for level, (idx, factor) in _MAP.items():
        out[level] = logical[idx] / factor
    return out


def ideal_clone(phi):
    """Optimal phase-covariant output for the input (|0> + e^{i phi}|1>)/sqrt(2)."""
    e = np.exp(1j * phi)
    return np.array([1 / np.sqrt(2), 0.5 * e, 0.5 * e, 0.0], dtype=complex)


def reduced_copy(state, which):
    """Single-copy density of copy ``"A"`` (first qubit) or ``"B"`` (second)."""
    psi = check_logical(state).reshape(2, 2)
    if which == "A":
        rho = psi @ psi.conj().T
    elif which == "B":
        rho = psi.T @ psi.conj()
    else:
        raise ValueError(f"which must be 'A' or 'B', got {which!r}")
    return 0.5 * (rho + rho.conj().T)


def logical_phase(physical):
    """Equator phase of the input carried by a prepared qutrit state."""
    logical = decode(physical)
    return float(np.angle(logical[2] / logical[0]))


def _norm2(alpha, beta):
    n2 = alpha + beta - alpha * beta
    if n2 <= 1e-12:
        raise DegenerateInput(f"alpha + beta - alpha*beta = {n2:g} is not positive")
    return n2


def _check_unit(alpha, beta):
    for name, v in (("alpha", alpha), ("beta", beta)):
        if not 0.0 <= v <= 1.0:
            raise DegenerateInput(f"{name} must lie in [0, 1], got {v!r}")


def reconstruct(alpha, beta, phi=0.0):
    """Qutrit output state inferred from the two start-point populations."""
    _check_unit(alpha, beta)
    n = np.sqrt(_norm2(alpha, beta))
    e = np.exp(1j * phi)
    out = np.zeros(3, dtype=complex)
    out[M_ZERO] = np.sqrt(alpha * beta) * e
    out[M_MINUS] = 1j * np.sqrt((1 - alpha) * beta)
    out[M_PLUS] = 1j * np.sqrt((1 - beta) * alpha) * e
    return out / n


def copy_fidelities(alpha, beta):
    """Closed-form (F1, F2) of the reconstructed output; independent of phi."""
    _check_unit(alpha, beta)
    n2 = _norm2(alpha, beta)
    a_m = np.sqrt((1 - alpha) * beta)
    a_0 = np.sqrt(alpha * beta)
    a_p = np.sqrt((1 - beta) * alpha)
    f1 = ((a_m + a_0) ** 2 + alpha * (1 - beta)) / (2 * n2)
    f2 = ((a_m + a_p) ** 2 + alpha * beta) / (2 * n2)
    # Same [0, 1] clamp as the density-matrix fidelity; only rounding is cut.
    return float(np.clip(f1, 0.0, 1.0)), float(np.clip(f2, 0.0, 1.0))


def pipeline_fidelities(alpha, beta, phi=0.0):
    """Brute-force (F1, F2): reconstruct, decode, partial trace, overlap."""
    logical = decode(reconstruct(alpha, beta, phi))
    return (fidelity_with_equator_state(reduced_copy(logical, "A"), phi),
            fidelity_with_equator_state(reduced_copy(logical, "B"), phi))


def cerf_check(f1, f2):
    """F1 + F2 - sqrt((1-F1)(1-F2)) and whether it beats the universal 3/2."""
    value = f1 + f2 - np.sqrt((1 - f1) * (1 - f2))
    return float(value), bool(value > 1.5)


@dataclass
class CloningReport:
    alpha: float
    beta: float
    phi: float
    F1: float
    F2: float
    F_avg: float
    pc_bound: float
    universal_bound: float
    cerf_value: float
    beats_universal: bool
    seed: int = None
    config_digest: str = ""

    def to_json(self):
        return json.dumps(_round9(asdict(self)), indent=2, sort_keys=False) + "\n"

    @classmethod
    def from_json(cls, text):
        return cls(**json.loads(text))


def _round9(obj):
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, float):
        return float(f"{obj:.9g}")
    if isinstance(obj, dict):
        return {k: _round9(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round9(v) for v in obj]
    return obj


def config_digest(text):
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


def build_report(alpha, beta, phi=0.0, seed=None, digest=""):
    f1, f2 = copy_fidelities(alpha, beta)
    cerf, beats = cerf_check(f1, f2)
    pc, uni = bounds()
    return CloningReport(
        alpha=float(alpha), beta=float(beta), phi=float(phi), F1=f1, F2=f2,
        F_avg=(f1 + f2) / 2, pc_bound=pc, universal_bound=uni,
        cerf_value=cerf, beats_universal=beats, seed=seed, config_digest=digest)


def average_fidelity(reports):
    """Mean single-copy fidelity over every copy of every report."""
    values = [f for r in reports for f in (r.F1, r.F2)]
    return float(np.mean(values))
