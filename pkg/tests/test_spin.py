import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nvclone.errors import ConfigError, DegenerateLevels, InvalidDensity
from nvclone.spin import (SX, SY, SZ, TWO_PI, NvParams, build_hamiltonian,
                          fidelity_with_equator_state, normalize, transition_frequencies)

D = 2.87e9


def _params(E=0.0, gamma_bz=0.0):
    # gamma_e = 1 Hz/T lets Bz carry the Zeeman shift directly in Hz.
    return NvParams(D=D, E=E, B=(0.0, 0.0, gamma_bz), gamma_e=1.0)


def test_spin_one_algebra():
    assert np.allclose(SX @ SY - SY @ SX, 1j * SZ)
    assert np.allclose(SX @ SX + SY @ SY + SZ @ SZ, 2 * np.eye(3))


@pytest.mark.parametrize("E, gamma_bz, expected", [
    (0.0, 0.0, [0.0, D, D]),
    (5e6, 0.0, [0.0, D - 5e6, D + 5e6]),
    (0.0, 1e7, [0.0, D - 1e7, D + 1e7]),
])
def test_hamiltonian_spectrum(E, gamma_bz, expected):
    H = build_hamiltonian(_params(E, gamma_bz))
    assert np.max(np.abs(H - H.conj().T)) <= 1e-12 * np.max(np.abs(H))
    evals = np.sort(np.linalg.eigvalsh(H)) / TWO_PI
    assert np.allclose(evals, expected, rtol=0, atol=1e-6 * D)


def test_ground_level_is_m0_at_zero_field():
    H = build_hamiltonian(_params())
    evals, evecs = np.linalg.eigh(H)
    assert abs(evecs[1, np.argmin(evals)]) == pytest.approx(1.0)


@pytest.mark.parametrize("E, gamma_bz, expected", [
    (0.0, 0.0, (2.87e9, 2.87e9)),
    (5e6, 0.0, (2.865e9, 2.875e9)),
    (3e6, 4e6, (2.87e9 - 5e6, 2.87e9 + 5e6)),
])
def test_transition_frequencies(E, gamma_bz, expected):
    f = transition_frequencies(build_hamiltonian(_params(E, gamma_bz)))
    # {+1,-1} block gap is 2*sqrt(E^2 + (gamma Bz)^2) about D.
    half_gap = np.hypot(E, gamma_bz)
    assert f == pytest.approx((D - half_gap, D + half_gap), rel=1e-12)
    assert f == pytest.approx(expected, rel=1e-9)


def test_transition_frequencies_rejects_ambiguous_ground():
    H = np.zeros((3, 3), complex)
    H[0, 1] = H[1, 0] = 1.0  # |0> split evenly between two eigenvectors
    with pytest.raises(DegenerateLevels):
        transition_frequencies(H)


@settings(max_examples=50, deadline=None)
@given(E=st.floats(0, 50e6), bz=st.floats(-50e6, 50e6), c=st.floats(-1e10, 1e10))
def test_hamiltonian_properties(E, bz, c):
    H = build_hamiltonian(_params(E, bz))
    evals = np.linalg.eigvalsh(H)
    assert abs(evals.sum() - np.trace(H).real) <= 1e-9 * np.abs(H).max()
    f = transition_frequencies(H)
    g = transition_frequencies(H + c * np.eye(3))
    assert g == pytest.approx(f, rel=1e-9)


def test_params_validation():
    with pytest.raises(ConfigError):
        NvParams(r0=10.0, r1=20.0)
    with pytest.raises(ConfigError):
        NvParams(t2star=0.0)
    with pytest.raises(ConfigError):
        NvParams(repetitions=0)
    with pytest.raises(ConfigError):
        NvParams().rabi(3)


def test_normalize():
    v = normalize([1, 2j, 3])
    assert abs(np.vdot(v, v).real - 1) <= 1e-12


def _equator(phi):
    psi = np.array([1, np.exp(1j * phi)]) / np.sqrt(2)
    return np.outer(psi, psi.conj())


@pytest.mark.parametrize("phi", [0.0, 0.7, np.pi, -2.0])
def test_equator_fidelity_examples(phi):
    assert fidelity_with_equator_state(_equator(phi), phi) == pytest.approx(1.0, abs=1e-12)
    assert fidelity_with_equator_state(np.eye(2) / 2, phi) == pytest.approx(0.5, abs=1e-12)


def test_equator_fidelity_rejects_invalid():
    with pytest.raises(InvalidDensity):
        fidelity_with_equator_state(np.array([[1, 1], [0, 0]]), 0.0)
    with pytest.raises(InvalidDensity):
        fidelity_with_equator_state(np.eye(2), 0.0)
    with pytest.raises(InvalidDensity):
        fidelity_with_equator_state(np.diag([1.5, -0.5]), 0.0)


def _random_density(rng):
    a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), phi=st.floats(-10, 10), w=st.floats(0, 1))
def test_equator_fidelity_is_linear_and_bounded(seed, phi, w):
    rng = np.random.default_rng(seed)
    r1, r2 = _random_density(rng), _random_density(rng)
    f1 = fidelity_with_equator_state(r1, phi)
    f2 = fidelity_with_equator_state(r2, phi)
    fm = fidelity_with_equator_state(w * r1 + (1 - w) * r2, phi)
    assert 0.0 <= f1 <= 1.0
    assert fm == pytest.approx(w * f1 + (1 - w) * f2, abs=1e-12)
