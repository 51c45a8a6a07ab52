"""Spin-1 algebra and the NV ground-triplet Hamiltonian.

Every vector and matrix in the package uses the basis order
``(|m=-1>, |m=0>, |m=+1>)``; the index constants below name the positions.
Energies are angular frequencies (rad/s) internally and Hz at the API edge.
"""
from dataclasses import dataclass, fields, replace

import numpy as np

from .errors import ConfigError, DegenerateLevels, InvalidDensity

TWO_PI = 2.0 * np.pi

M_MINUS, M_ZERO, M_PLUS = 0, 1, 2
BASIS_LABELS = ("m=-1", "m=0", "m=+1")

# Spin-1 operators in the (-1, 0, +1) order.
_s = 1.0 / np.sqrt(2.0)
SX = np.array([[0, _s, 0], [_s, 0, _s], [0, _s, 0]], dtype=complex)
SY = np.array([[0, 1j * _s, 0], [-1j * _s, 0, 1j * _s], [0, -1j * _s, 0]], dtype=complex)
SZ = np.diag([-1.0, 0.0, 1.0]).astype(complex)


@dataclass(frozen=True)
class NvParams:
    """Physical configuration of one NV centre.

    Frequencies are in Hz, times in seconds, ``omega_env`` in rad/s and
    fluorescence rates in counts/s. ``D`` and ``E`` default to typical NV
    values and can be overridden from the config file.
    """

    D: float = 2.87e9
    E: float = 5.0e6
    B: tuple = (0.0, 0.0, 0.0)
    gamma_e: float = 28.024951e9
    rabi_mw1: float = 2.5e6
    rabi_mw2: float = 2.5e6
    r0: float = 30.0e3
    r1: float = 21.0e3
    t2star: float = 2.0e-6
    omega_env: float = TWO_PI * 0.5e6
    readout_window: float = 300e-9
    repetitions: int = 100_000
    background: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "B", tuple(float(b) for b in self.B))
        if len(self.B) != 3:
            raise ConfigError("B must have three components")
        for name in ("D", "gamma_e", "rabi_mw1", "rabi_mw2", "r0", "r1",
                     "t2star", "omega_env", "readout_window"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise ConfigError(f"{name} must be strictly positive, got {value!r}")
        if not np.isfinite(self.E) or self.E < 0:
            raise ConfigError(f"E must be non-negative, got {self.E!r}")
        if self.background < 0:
            raise ConfigError("background must be non-negative")
        if self.r0 <= self.r1:
            raise ConfigError("bright rate r0 must exceed dark rate r1")
        if int(self.repetitions) != self.repetitions or self.repetitions < 1:
            raise ConfigError("repetitions must be a positive integer")
        object.__setattr__(self, "repetitions", int(self.repetitions))

    def rabi(self, channel):
        """Rabi frequency in Hz of microwave channel 1 or 2."""
        if channel == 1:
            return self.rabi_mw1
        if channel == 2:
            return self.rabi_mw2
        raise ConfigError(f"channel must be 1 or 2, got {channel!r}")

    def with_(self, **changes):
        return replace(self, **changes)

    @classmethod
    def field_names(cls):
        return [f.name for f in fields(cls)]


def basis(index):
    """Basis ket as a complex vector."""
    v = np.zeros(3, dtype=complex)
    v[index] = 1.0
    return v


def normalize(state):
    state = np.asarray(state, dtype=complex)
    norm = np.linalg.norm(state)
    if norm == 0:
        raise ValueError("cannot normalize the zero vector")
    return state / norm


def ket_to_density(state):
    state = np.asarray(state, dtype=complex)
    return np.outer(state, state.conj())


def check_density(rho, trace_tol=1e-9, herm_tol=1e-12, pos_tol=1e-9):
    """Validate a density matrix and return it as a complex array.

    Raises:
        InvalidDensity: on a shape, Hermiticity, trace or positivity failure.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise InvalidDensity(f"density must be square, got shape {rho.shape}")
    if not np.all(np.isfinite(rho)):
        raise InvalidDensity("density has non-finite entries")
    if np.max(np.abs(rho - rho.conj().T)) > herm_tol:
        raise InvalidDensity("density is not Hermitian")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > trace_tol:
        raise InvalidDensity(f"density trace is {tr!r}, expected 1")
    if np.linalg.eigvalsh(rho).min() < -pos_tol:
        raise InvalidDensity("density has negative eigenvalues")
    return rho


def build_hamiltonian(params):
    """Ground-triplet Hamiltonian in rad/s.

    H = D Sz^2 + E (Sx^2 - Sy^2) + gamma_e (B . S), with each coefficient
    converted from Hz by 2*pi.
    """
    bx, by, bz = params.B
    h_hz = (params.D * SZ @ SZ
            + params.E * (SX @ SX - SY @ SY)
            + params.gamma_e * (bx * SX + by * SY + bz * SZ))
    h = TWO_PI * h_hz
    return 0.5 * (h + h.conj().T)


def transition_frequencies(H):
    """Return the two transition frequencies (Hz) out of the m=0 level.

    The ground level is the eigenvector with the largest |m=0> weight.

    Raises:
        DegenerateLevels: if two eigenvectors carry |m=0> weight within 1e-6.
    """
    H = np.asarray(H, dtype=complex)
    evals, evecs = np.linalg.eigh(H)
    weight = np.abs(evecs[M_ZERO, :]) ** 2
    order = np.argsort(weight)[::-1]
    if weight[order[0]] - weight[order[1]] < 1e-6:
        raise DegenerateLevels("m=0 character is shared by two eigenvectors")
    ground = order[0]
    gaps = np.sort([evals[k] - evals[ground] for k in range(3) if k != ground])
    f_minus, f_plus = gaps / TWO_PI
    return float(f_minus), float(f_plus)


def equator_state(phi):
    """Logical qubit (|0> + e^{i phi}|1>)/sqrt(2)."""
    return np.array([1.0, np.exp(1j * phi)], dtype=complex) / np.sqrt(2.0)


def fidelity_with_equator_state(rho, phi):
    """Overlap <psi|rho|psi> of a qubit density with the equator state at ``phi``."""
    rho = check_density(rho)
    if rho.shape != (2, 2):
        raise InvalidDensity(f"expected a 2x2 density, got {rho.shape}")
    psi = equator_state(phi)
    f = np.real(psi.conj() @ rho @ psi)
    return float(min(1.0, max(0.0, f)))
