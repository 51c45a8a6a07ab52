"""End-to-end workflows: simulate the cloner, run tomography, analyse traces."""
from dataclasses import dataclass

import numpy as np

from .cloning import build_report, logical_phase
from .dynamics import EvolutionConfig, final_density, state_after
from .fitting import fit_damped_cosine, subspace_population
from .photonics import (Calibration, RabiTrace, fluorescence, generate_rabi_trace,
                        sample_counts)
from .pulses import FIG5_DT, Mw, PulseSequence, preset, tomography_grid

FIG5_SPAN = 2e-6


def prepared_phase(seq, params):
    """Logical input phase of ``seq``: ideal state just before its last MW2 pulse."""
    ops = seq.prefix() if isinstance(seq, PulseSequence) else tuple(seq)
    last = max((i for i, op in enumerate(ops) if isinstance(op, Mw) and op.channel == 2),
               default=len(ops))
    return logical_phase(state_after(ops[:last], params))


def tomography_traces(seq, params, cfg=None, grid=None, seed=0, sampled=False, stream=0):
    """MW1 and MW2 tomography traces after the program ``seq``."""
    grid = tomography_grid() if grid is None else grid
    return tuple(generate_rabi_trace(seq, ch, grid, params, cfg, seed, sampled, stream=stream)
                 for ch in (1, 2))


@dataclass
class Analysis:
    report: object
    fit_mw1: object
    fit_mw2: object


def analyze_traces(trace_mw1, trace_mw2, phi=0.0, calibration=None, seed=None, digest=""):
    """Fit both tomography traces and turn their start points into a report.

    ``calibration`` is only needed for sampled traces (counts per shot).
    """
    fit1 = fit_damped_cosine(trace_mw1, calibration)
    fit2 = fit_damped_cosine(trace_mw2, calibration)
    alpha = subspace_population(fit1)
    beta = subspace_population(fit2)
    return Analysis(build_report(alpha, beta, phi, seed, digest), fit1, fit2)


def roundtrip(trace):
    """Trace as it would be read back from its CSV file."""
    return RabiTrace.from_csv(trace.to_csv(), channel=trace.channel, seed=trace.seed)


def simulate_clone(seq, params, cfg=None, grid=None, seed=0, sampled=False, phi=None,
                   digest="", stream=0):
    """Full simulated experiment for one preparation.

    Returns ``(analysis, trace_mw1, trace_mw2)``. Traces are round-tripped
    through CSV before fitting so file-based analysis gives identical numbers.
    """
    if isinstance(seq, str):
        seq = preset(seq)
    if phi is None:
        phi = prepared_phase(seq, params)
    t1, t2 = (roundtrip(t) for t in tomography_traces(seq, params, cfg, grid, seed, sampled,
                                                               stream))
    cal = Calibration.from_params(params)
    return analyze_traces(t1, t2, phi, cal, seed if sampled else None, digest), t1, t2


@dataclass
class Fig5Sweep:
    dt: float
    j: np.ndarray
    wait: np.ndarray
    expected: np.ndarray
    counts: np.ndarray = None
    repetitions: int = 1

    def flatness(self):
        """Spread of the post-cloning signal across the wait-time series."""
        mean = self.expected.mean()
        out = {
            "dt_ns": self.dt * 1e9,
            "points": int(len(self.j)),
            "expected_mean": float(mean),
            "expected_max_rel_dev": float(np.max(np.abs(self.expected - mean)) / mean),
        }
        if self.counts is not None:
            lam = mean * self.repetitions
            std = float(np.std(self.counts, ddof=1))
            out.update(counts_mean=float(self.counts.mean()), counts_std=std,
                       poisson_std=float(np.sqrt(lam)),
                       std_ratio=std / float(np.sqrt(lam)))
        return out

    def to_csv(self):
        lines = ["j,wait_ns,expected,counts,reps"]
        for i in range(len(self.j)):
            c = "" if self.counts is None else str(int(self.counts[i]))
            lines.append(f"{int(self.j[i])},{self.wait[i] * 1e9:.9g},{self.expected[i]:.9g},"
                         f"{c},{self.repetitions}")
        return "\n".join(lines) + "\n"


def fig5_sweep(params, cfg=None, dt=FIG5_DT[0], span=FIG5_SPAN, seed=0, sampled=False):
    """Post-cloning fluorescence (counts per shot) for waits j*dt <= span."""
    cfg = cfg or EvolutionConfig()
    n = int(np.floor(span / dt + 1e-9))
    js = np.arange(n + 1)
    expected = np.array([fluorescence(final_density(preset("fig5", j=int(j), dt=dt), params, cfg),
                                      params) for j in js])
    counts = None
    if sampled:
        stream = 5000 + int(round(dt * 1e9))
        counts = np.array([sample_counts(lam, params.repetitions, seed, i, stream)
                           for i, lam in enumerate(expected)], dtype=np.int64)
    return Fig5Sweep(dt, js, js * dt, expected, counts, params.repetitions)
