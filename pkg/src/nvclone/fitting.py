"""Damped-cosine least squares and start-point population extraction.

The model is ``S(t) = C + A cos(W t + theta0) exp(-k t)``. It is fitted by a
small Levenberg-Marquardt loop in reduced time ``u = t / span`` so that all
five parameters are O(1).
"""
from dataclasses import dataclass

import numpy as np

from .errors import EmptySubspace, NoOscillation, NonConvergence
from .photonics import Calibration

MAX_ITER = 200
STEP_TOL = 1e-10
MIN_SUBSPACE = 0.05


@dataclass(frozen=True)
class DampedCosineFit:
    """Fitted parameters in SI units (``omega`` in rad/s, ``decay_rate`` in 1/s)."""

    offset: float
    amplitude: float
    omega: float
    phase: float
    decay_rate: float
    rms: float
    covariance: np.ndarray = None
    iterations: int = 0

    @property
    def tau(self):
        # An undamped (ideal) trace fits k ~ 0; report that as infinite.
        return 1.0 / self.decay_rate if self.decay_rate > 0 else float("inf")

    @property
    def frequency(self):
        return self.omega / (2 * np.pi)

    def model(self, t):
        return damped_cosine(np.asarray(t, dtype=float), self.offset, self.amplitude,
                             self.omega, self.phase, self.decay_rate)

    def stderr(self):
        if self.covariance is None:
            return None
        return np.sqrt(np.clip(np.diag(self.covariance), 0, None))

    def as_dict(self):
        return {
            "offset": self.offset, "amplitude": self.amplitude, "omega": self.omega,
            "phase": self.phase, "decay_rate": self.decay_rate,
            "tau": self.tau if np.isfinite(self.tau) else None,
            "rms": self.rms, "iterations": self.iterations,
            "stderr": None if self.covariance is None else [float(x) for x in self.stderr()],
        }


def damped_cosine(t, C, A, W, theta0, k):
    return C + A * np.cos(W * t + theta0) * np.exp(-k * t)


def _residual_and_jac(p, u, y):
    C, A, W, th, k = p
    with np.errstate(over="ignore", invalid="ignore"):
        return _residual_and_jac_raw(C, A, W, th, k, u, y)


def _residual_and_jac_raw(C, A, W, th, k, u, y):
    env = np.exp(-k * u)
    arg = W * u + th
    cos, sin = np.cos(arg), np.sin(arg)
    r = C + A * cos * env - y
    J = np.empty((len(u), 5))
    J[:, 0] = 1.0
    J[:, 1] = cos * env
    J[:, 2] = -A * sin * env * u
    J[:, 3] = -A * sin * env
    J[:, 4] = -A * cos * env * u
    return r, J


def spectral_peak(u, y, pad=16):
    """Angular frequency (per unit of ``u``) of the strongest non-DC component.

    Also returns the peak-to-median power ratio of the unpadded spectrum.
    """
    n = len(y)
    d = y - y.mean()
    du = (u[-1] - u[0]) / (n - 1)
    power = np.abs(np.fft.rfft(d)) ** 2
    body = power[1:]
    ratio = body.max() / np.median(body) if np.median(body) > 0 else np.inf
    if not np.any(body > 0):
        ratio = 0.0
    padded = np.abs(np.fft.rfft(d, n * pad)) ** 2
    freqs = np.fft.rfftfreq(n * pad, du)
    # Skip the DC lobe of the padded spectrum.
    start = pad
    peak = start + int(np.argmax(padded[start:]))
    return 2 * np.pi * freqs[peak], ratio


def fit_damped_cosine(trace, calibration=None, weights=None):
    """Fit a RabiTrace (or ``(times, signal)`` pair) with a damped cosine.

    Sampled traces are fitted on their normalised counts with Poisson
    weights 1/max(counts, 1); unsampled traces use unit weights on the
    expected signal.

    Raises:
        NoOscillation: the spectrum has no peak above 3x its median power.
        NonConvergence: no convergence within 200 iterations.
    """
    if isinstance(trace, tuple):
        t, y = (np.asarray(a, dtype=float) for a in trace)
    else:
        t = trace.times
        if trace.counts is not None:
            y = trace.measured_signal(calibration)
            if weights is None:
                weights = 1.0 / np.maximum(trace.counts, 1)
        else:
            y = trace.expected_signal
    if len(t) < 8:
        raise ValueError("need at least 8 points to fit")
    w = np.ones_like(y) if weights is None else np.asarray(weights, dtype=float)
    w = w / w.mean()
    sw = np.sqrt(w)

    span = t[-1] - t[0]
    u = (t - t[0]) / span
    if np.ptp(y) < 1e-12:
        raise NoOscillation("trace is constant")
    W0, ratio = spectral_peak(u, y)
    if ratio < 3.0:
        raise NoOscillation(f"spectral peak only {ratio:.2f}x the median power")
    # Linear least squares at the spectral frequency seeds C, A and theta0.
    X = np.column_stack([np.ones_like(u), np.cos(W0 * u), np.sin(W0 * u)])
    c0, a, b = np.linalg.lstsq(X * sw[:, None], sw * y, rcond=None)[0]
    p = np.array([c0, np.hypot(a, b), W0, np.arctan2(-b, a), 1.0])

    lam = 1e-3
    r, J = _residual_and_jac(p, u, y)
    cost = np.sum(w * r ** 2)
    for it in range(1, MAX_ITER + 1):
        Jw = J * sw[:, None]
        JTJ = Jw.T @ Jw
        g = Jw.T @ (sw * r)
        A = JTJ + lam * np.diag(np.diag(JTJ) + 1e-300)
        try:
            step = -np.linalg.solve(A, g)
        except np.linalg.LinAlgError:
            step = -np.linalg.lstsq(A, g, rcond=None)[0]
        p_new = p + step
        r_new, J_new = _residual_and_jac(p_new, u, y)
        with np.errstate(over="ignore", invalid="ignore"):
            cost_new = np.sum(w * r_new ** 2)
        if np.isfinite(cost_new) and cost_new <= cost:
            p, r, J, cost = p_new, r_new, J_new, cost_new
            lam = max(lam / 10, 1e-12)
        else:
            lam = min(lam * 10, 1e16)
        if np.linalg.norm(step) < STEP_TOL * (np.linalg.norm(p) + STEP_TOL) or cost == 0:
            break
    else:
        raise NonConvergence(f"no convergence after {MAX_ITER} iterations")

    C, A, W, th, k = p
    if W < 0:
        W, th = -W, -th
    if A < 0:
        A, th = -A, th + np.pi
    th = float(np.angle(np.exp(1j * th)))
    n, m = len(y), 5
    rms = float(np.sqrt(np.mean(r ** 2)))
    cov = None
    dof = n - m
    if dof > 0:
        Jw = J * sw[:, None]
        try:
            cov_u = np.linalg.inv(Jw.T @ Jw) * cost / dof
            scale = np.array([1.0, 1.0, 1.0 / span, 1.0, 1.0 / span])
            cov = cov_u * np.outer(scale, scale)
        except np.linalg.LinAlgError:
            cov = None
    # Shift the phase back from the reduced origin u = 0 (t = t[0]) to t = 0.
    W_si, k_si = W / span, k / span
    th_t0 = th - W_si * t[0]
    A_t0 = A * np.exp(k_si * t[0])
    return DampedCosineFit(float(C), float(A_t0), float(W_si),
                           float(np.angle(np.exp(1j * th_t0))), float(k_si), rms, cov, it)


def start_point(fit):
    """Fitted signal at t = 0, clamped to [0, 1]."""
    return float(np.clip(fit.offset + fit.amplitude * np.cos(fit.phase), 0.0, 1.0))


def subspace_population(fit):
    """Relative |m=0> population inside the driven two-level subspace.

    The driven pair holds total population 2C (the oscillation relaxes to
    its midpoint and the spectator level is untouched), so the answer is
    S(0) / 2C.

    Raises:
        EmptySubspace: if C <= 0.05.
    """
    if fit.offset <= MIN_SUBSPACE:
        raise EmptySubspace(f"offset {fit.offset:.4g} leaves the driven subspace empty")
    return float(np.clip(start_point(fit) / (2 * fit.offset), 0.0, 1.0))


def spectator_population(fit):
    return 1.0 - 2.0 * fit.offset


__all__ = ["DampedCosineFit", "fit_damped_cosine", "start_point", "subspace_population",
           "spectator_population", "damped_cosine", "Calibration"]
