"""Dephasing during the cloning pulses, via the Lindblad integrator.

The ideal path applies exact rotations. The Lindblad path integrates the
master equation with RK4; with zero rates both agree. Dephasing damps the
tomography traces and shifts the fitted start points. The reconstruction
assumes a pure output, so the shift shows up as unbalanced copies rather
than a lower overall score.
"""
import numpy as np

from nvclone import EvolutionConfig, NvParams, simulate_clone

params = NvParams()
for t2 in (np.inf, 20e-6, 2e-6, 0.5e-6):
    rate = 0.0 if np.isinf(t2) else 1.0 / t2
    cfg = EvolutionConfig(path="lindblad", integrator_step=2e-9, dephasing_rates=(rate, rate))
    r = simulate_clone("fig3a", params, cfg)[0].report
    print(f"T2* = {t2 * 1e6:>5} us: alpha={r.alpha:.4f} beta={r.beta:.4f} "
          f"F1={r.F1:.4f} F2={r.F2:.4f}")
