"""Fluorescence readout, shot noise, Rabi traces and ESR spectra."""
import csv
import io
from dataclasses import dataclass

import numpy as np

from .dynamics import EvolutionConfig, apply_op, evolve_ops
from .errors import DegenerateCalibration
from .pulses import Mw, PulseSequence
from .spin import M_MINUS, M_PLUS, M_ZERO, TWO_PI, build_hamiltonian, transition_frequencies

SIGNAL_CLAMP = (-0.05, 1.05)


def fluorescence(rho, params):
    """Expected counts in one readout window."""
    pops = np.real(np.diag(rho))
    rate = params.r0 * pops[M_ZERO] + params.r1 * (pops[M_MINUS] + pops[M_PLUS])
    return (rate + params.background) * params.readout_window


@dataclass(frozen=True)
class Calibration:
    """Bright (|m=0>) and dark (|m=+-1>) readout levels, per shot."""

    bright: float
    dark: float

    def __post_init__(self):
        if self.bright - self.dark < 0.1 * self.bright:
            raise DegenerateCalibration(
                f"contrast {self.bright - self.dark:g} is below 10% of the bright level")

    @classmethod
    def from_params(cls, params):
        # Extrema of the ideal rabi-cal trace: t = 0 and a full pi pulse.
        w = params.readout_window
        return cls((params.r0 + params.background) * w, (params.r1 + params.background) * w)

    def scaled(self, factor):
        return Calibration(self.bright * factor, self.dark * factor)


def normalize_signal(signal, calibration):
    """Map raw fluorescence onto the |m=0> population scale.

    ``signal`` and ``calibration`` must share units (per shot or totals).
    """
    s = (np.asarray(signal, dtype=float) - calibration.dark) / (calibration.bright - calibration.dark)
    s = np.clip(s, *SIGNAL_CLAMP)
    return float(s) if s.ndim == 0 else s


def point_rng(seed, index, stream=0):
    """Independent generator for one trace point, fixed by (seed, stream, index)."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(stream), int(index))))


def sample_counts(expected_per_shot, repetitions, seed, index, stream=0):
    """Poisson total counts over ``repetitions`` shots."""
    lam = float(expected_per_shot) * repetitions
    return int(point_rng(seed, index, stream).poisson(lam))


@dataclass
class RabiTrace:
    channel: int
    times: np.ndarray
    expected_signal: np.ndarray
    counts: np.ndarray = None
    repetitions: int = 1
    seed: int = 0

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.expected_signal = np.asarray(self.expected_signal, dtype=float)
        if self.times.ndim != 1 or len(self.times) == 0:
            raise ValueError("trace needs a non-empty 1-D time grid")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("trace times must be strictly increasing")
        if self.expected_signal.shape != self.times.shape:
            raise ValueError("expected_signal length must match times")
        if self.counts is not None:
            self.counts = np.asarray(self.counts, dtype=np.int64)
            if self.counts.shape != self.times.shape:
                raise ValueError("counts length must match times")
            if np.any(self.counts < 0):
                raise ValueError("counts must be non-negative")

    @property
    def sampled(self):
        return self.counts is not None

    def measured_signal(self, calibration):
        """Normalised signal from counts (or the expectation when unsampled)."""
        if self.counts is None:
            return self.expected_signal
        return normalize_signal(self.counts / self.repetitions, calibration)

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t_ns", "expected", "counts", "reps"])
        for i, t in enumerate(self.times):
            counts = "" if self.counts is None else str(int(self.counts[i]))
            w.writerow([f"{t * 1e9:.9g}", f"{self.expected_signal[i]:.9g}", counts,
                        str(self.repetitions)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text, channel=1, seed=0):
        """Parse the ``t_ns,expected,counts,reps`` format.

        Raises:
            ValueError: on a wrong header, ragged rows or unparsable numbers.
        """
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or [h.strip() for h in rows[0]] != ["t_ns", "expected", "counts", "reps"]:
            raise ValueError("trace CSV must start with header t_ns,expected,counts,reps")
        times, expected, counts, reps = [], [], [], set()
        for lineno, row in enumerate(rows[1:], start=2):
            if not row:
                continue
            if len(row) != 4:
                raise ValueError(f"line {lineno}: expected 4 fields, got {len(row)}")
            try:
                times.append(float(row[0]) * 1e-9)
                expected.append(float(row[1]))
                counts.append(int(row[2]) if row[2].strip() else None)
                reps.add(int(row[3]))
            except ValueError:
                raise ValueError(f"line {lineno}: unparsable number") from None
        if not times:
            raise ValueError("trace CSV has no data rows")
        if len(reps) != 1:
            raise ValueError("reps must be constant across the trace")
        has = [c is not None for c in counts]
        if any(has) and not all(has):
            raise ValueError("counts column must be all filled or all empty")
        return cls(channel, np.array(times), np.array(expected),
                   np.array(counts) if all(has) else None, reps.pop(), seed)


def generate_rabi_trace(prep, channel, t_grid, params, cfg=None, seed=0, sampled=False,
                        calibration=None, stream=0):
    """Tomography Rabi trace: ``prep`` then Mw(channel, dur=t) then readout.

    ``prep`` is a PulseSequence (its ops before the first Readout are used)
    or a plain op tuple. Sampled counts are Poisson over
    ``params.repetitions`` shots, drawn from the per-point stream
    (seed, 10*stream + channel, index).
    """
    cfg = (cfg or EvolutionConfig()).validate(params)
    calibration = calibration or Calibration.from_params(params)
    ops = prep.prefix() if isinstance(prep, PulseSequence) else tuple(prep)
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or len(t_grid) == 0:
        raise ValueError("t_grid must be a non-empty 1-D array")
    rho0 = evolve_ops(ops, params, cfg)
    expected_counts = np.empty(len(t_grid))
    for i, t in enumerate(t_grid):
        rho = apply_op(rho0, Mw(channel, duration=float(t), phase=0.0), params, cfg)
        expected_counts[i] = fluorescence(rho, params)
    signal = np.clip(normalize_signal(expected_counts, calibration), 0.0, 1.0)
    counts = None
    if sampled:
        reps = params.repetitions
        counts = np.array([sample_counts(lam, reps, seed, i, stream=10 * stream + channel)
                           for i, lam in enumerate(expected_counts)], dtype=np.int64)
    return RabiTrace(channel, t_grid, signal, counts, params.repetitions, seed)


def esr_spectrum(f_grid, params, pulse_duration=None):
    """Normalised fluorescence after a fixed pulse swept in drive frequency.

    Each frequency drives only the nearer transition (f_minus on MW1, f_plus
    on MW2); the signal is 1 - P_transfer of the detuned two-level Rabi
    formula. The default pulse is an MW1 pi pulse.
    """
    f_grid = np.asarray(f_grid, dtype=float)
    if f_grid.size == 0:
        raise ValueError("frequency grid is empty")
    if pulse_duration is None:
        pulse_duration = 0.5 / params.rabi_mw1
    f_lo, f_hi = transition_frequencies(build_hamiltonian(params))
    near_lo = np.abs(f_grid - f_lo) <= np.abs(f_grid - f_hi)
    omega = TWO_PI * np.where(near_lo, params.rabi_mw1, params.rabi_mw2)
    delta = TWO_PI * (f_grid - np.where(near_lo, f_lo, f_hi))
    gen = np.sqrt(omega ** 2 + delta ** 2)
    p = omega ** 2 / gen ** 2 * np.sin(gen * pulse_duration / 2) ** 2
    return 1.0 - p


def spectrum_csv(f_grid, signal):
    lines = ["f_hz,signal"]
    lines += [f"{f:.9g},{s:.9g}" for f, s in zip(f_grid, signal)]
    return "\n".join(lines) + "\n"
