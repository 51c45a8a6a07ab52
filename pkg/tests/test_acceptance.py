"""Acceptance suite: one check per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py`` (lines appear in the terminal
summary) or directly with ``python tests/test_acceptance.py``.
"""
import filecmp
import os
import sys
import tempfile

import numpy as np
import pytest

from nvclone.cli import main
from nvclone.cloning import average_fidelity, bounds, build_report, cerf_check, copy_fidelities
from nvclone.cloning import pipeline_fidelities
from nvclone.dynamics import (EvolutionConfig, final_density, integrate_lindblad,
                              level_dephasing_rates, mw_rotation)
from nvclone.fitting import fit_damped_cosine
from nvclone.pipeline import fig5_sweep, simulate_clone
from nvclone.pulses import FIG5_DT, Init, Mw, PulseSequence, Readout, preset
from nvclone.spin import M_MINUS, M_ZERO, NvParams, basis, ket_to_density

PARAMS = NvParams()
PC = 0.5 + 1 / np.sqrt(8)
RESULTS = []


def _report(number, title, ok, detail):
    line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
    RESULTS.append(line)
    print(line)
    return ok


def criterion_1():
    pc, uni = bounds()
    ok = abs(pc - 0.853553391) <= 1e-9 and abs(uni - 0.833333333) <= 1e-9
    return _report(1, "bounds", ok, f"pc={pc:.10f} universal={uni:.10f}")


def criterion_2():
    r = simulate_clone("fig3a", PARAMS)[0].report
    ok = (abs(r.alpha - 1 / 3) <= 1e-6 and abs(r.beta - 0.5) <= 1e-6
          and abs(r.F1 - 0.853553) <= 1e-6 and abs(r.F2 - 0.853553) <= 1e-6)
    return _report(2, "ideal pipeline", ok,
                   f"alpha={r.alpha:.9f} beta={r.beta:.9f} F1={r.F1:.9f} F2={r.F2:.9f}")


def criterion_3():
    a = copy_fidelities(0.33, 0.48)
    b = copy_fidelities(0.36, 0.44)
    ok = (np.allclose(a, (0.846, 0.861), atol=1e-3, rtol=0)
          and np.allclose(b, (0.829, 0.871), atol=1e-3, rtol=0))
    return _report(3, "regression vectors", ok,
                   f"(0.33,0.48)->({a[0]:.6f},{a[1]:.6f}) (0.36,0.44)->({b[0]:.6f},{b[1]:.6f})")


def criterion_4():
    avg = average_fidelity([build_report(0.33, 0.48), build_report(0.36, 0.44)])
    return _report(4, "average fidelity", abs(avg - 0.852) <= 5e-4, f"mean={avg:.6f}")


def criterion_5():
    value, beats = cerf_check(0.829, 0.871)
    trivial, flag = cerf_check(5 / 6, 5 / 6)
    ok = abs(value - 1.5515) <= 1e-3 and beats and trivial == 1.5 and not flag
    return _report(5, "cerf check", ok, f"{value:.6f} beats={beats}; (5/6,5/6)->{trivial!r}")


def criterion_6():
    ideal_dev, counts_ok, parts = 0.0, True, []
    for dt in FIG5_DT:
        ideal_dev = max(ideal_dev, fig5_sweep(PARAMS, dt=dt).flatness()["expected_max_rel_dev"])
        good = sum(fig5_sweep(PARAMS, dt=dt, seed=s, sampled=True).flatness()["std_ratio"] <= 3.0
                   for s in range(20))
        counts_ok &= good >= 18
        parts.append(f"dt={dt * 1e9:g}ns {good}/20 seeds within 3x Poisson")
    ok = ideal_dev <= 1e-12 and counts_ok
    return _report(6, "phase covariance", ok, f"ideal max rel dev {ideal_dev:.2e}; "
                   + "; ".join(parts))


def criterion_7():
    grid = np.linspace(0, 1, 50)
    phis = np.linspace(0, 2 * np.pi, 32, endpoint=False)
    worst = 0.0
    for a in grid:
        for b in grid:
            if a + b - a * b <= 1e-12:
                continue  # no reconstructable state at alpha = beta = 0
            f = np.array(copy_fidelities(a, b))
            for phi in phis:
                worst = max(worst, float(np.max(np.abs(f - pipeline_fidelities(a, b, phi)))))
    return _report(7, "oracle equivalence", worst <= 1e-12, f"max |diff| {worst:.2e}")


def criterion_8():
    lind = EvolutionConfig(path="lindblad", integrator_step=1e-9, dephasing_rates=(0.0, 0.0))
    seq = preset("fig5", j=11, dt=50e-9).with_probe(2, 173e-9)
    match = float(np.max(np.abs(final_density(seq, PARAMS) - final_density(seq, PARAMS, lind))))

    period = 1.0 / PARAMS.rabi_mw1
    pi_seq = PulseSequence((Init(), Mw(1, angle=np.pi), Readout()))
    exact = ket_to_density(mw_rotation(1, np.pi) @ basis(M_ZERO))
    errs = [np.max(np.abs(final_density(pi_seq, PARAMS, EvolutionConfig(
        path="lindblad", integrator_step=h, dephasing_rates=(0.0, 0.0))) - exact))
        for h in (period / 10, period / 20)]
    ratio = errs[0] / errs[1]

    gamma = 1.0 / PARAMS.t2star
    rho0 = ket_to_density(np.array([1, 1, 0], complex) / np.sqrt(2))
    rho = integrate_lindblad(rho0, np.zeros((3, 3), complex), level_dephasing_rates((gamma, 0.0)),
                             1.0 / gamma, 1e-9)
    decay = abs(abs(rho[M_ZERO, M_MINUS]) - 0.5 * np.exp(-1.0))
    ok = match <= 1e-6 and ratio >= 8.0 and decay <= 1e-6
    return _report(8, "dynamics", ok, f"lindblad vs ideal {match:.2e}; step-halving x{ratio:.1f}; "
                   f"dephasing error {decay:.2e}")


def criterion_9():
    t = np.linspace(0, 2e-6, 64)
    w = 2 * np.pi * 5e6
    fit = fit_damped_cosine((t, 0.5 + 0.5 * np.cos(w * t) * np.exp(-t / 1e-6)))
    rel = max(abs(fit.offset - 0.5) / 0.5, abs(fit.amplitude - 0.5) / 0.5,
              abs(fit.omega - w) / w, abs(fit.tau - 1e-6) / 1e-6)
    alphas = [simulate_clone("fig3a", PARAMS, seed=s, sampled=True)[0].report.alpha
              for s in range(20)]
    hits = sum(abs(a - 1 / 3) <= 0.02 for a in alphas)
    ok = rel <= 1e-6 and hits >= 18
    return _report(9, "fitting robustness", ok,
                   f"noiseless max rel err {rel:.2e}; alpha within 0.02 in {hits}/20 seeds")


def criterion_10():
    with tempfile.TemporaryDirectory() as tmp:
        ini = os.path.join(tmp, "empty.ini")
        open(ini, "w").close()
        runs = [os.path.join(tmp, d) for d in ("a", "b")]
        codes = [main(["reproduce", "--config", ini, "--seed", "42", "--out", d]) for d in runs]
        names = sorted(os.listdir(runs[0]))
        same = sorted(os.listdir(runs[1])) == names
        _, mismatch, errors = filecmp.cmpfiles(runs[0], runs[1], names, shallow=False)
    ok = codes == [0, 0] and same and not mismatch and not errors and len(names) > 0
    return _report(10, "determinism", ok, f"{len(names)} files, {len(mismatch)} differ")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9, criterion_10]


@pytest.mark.parametrize("check", CRITERIA, ids=[f"criterion_{i}" for i in range(1, 11)])
def test_criterion(check):
    assert check()


if __name__ == "__main__":
    results = [check() for check in CRITERIA]
    print(f"{sum(results)}/{len(results)} criteria pass")
    sys.exit(0 if all(results) else 1)
