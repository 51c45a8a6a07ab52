"""Calibration Rabi trace on MW1, ideal and shot-noise limited, with fits.

The fitter returns the damped-cosine parameters; the Rabi frequency should
match the configured drive and the sampled fit should land within a fraction
of a percent.
"""
from nvclone import Calibration, NvParams, fit_damped_cosine, generate_rabi_trace, preset
from nvclone.pulses import tomography_grid

params = NvParams()
cal = Calibration.from_params(params)
grid = tomography_grid()
seq = preset("rabi-cal", channel=1, duration=0.0)

ideal = fit_damped_cosine(generate_rabi_trace(seq, 1, grid, params))
print(f"ideal:   {ideal.frequency / 1e6:.6f} MHz, offset {ideal.offset:.6f}, "
      f"{ideal.iterations} LM iterations")

for seed in range(3):
    trace = generate_rabi_trace(seq, 1, grid, params, seed=seed, sampled=True)
    fit = fit_damped_cosine(trace, cal)
    err = fit.stderr()
    print(f"seed {seed}: {fit.frequency / 1e6:.4f} MHz (+- {err[2] / 6.283e6:.4f}), "
          f"offset {fit.offset:.4f} (+- {err[0]:.4f})")
