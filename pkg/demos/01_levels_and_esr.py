"""Ground-state levels of the NV qutrit and the ESR sweep that finds them.

With strain E = 5 MHz and no field the m=+-1 pair splits symmetrically about
D, so the ESR spectrum shows two dips 2E apart. Adding an axial field widens
the gap.
"""
import numpy as np

from nvclone import NvParams, build_hamiltonian, esr_spectrum, transition_frequencies

params = NvParams()
f_lo, f_hi = transition_frequencies(build_hamiltonian(params))
print(f"f- = {f_lo / 1e9:.6f} GHz, f+ = {f_hi / 1e9:.6f} GHz, gap {(f_hi - f_lo) / 1e6:.3f} MHz")

grid = np.linspace(2.85e9, 2.89e9, 4001)
signal = esr_spectrum(grid, params)
dips = grid[1:-1][(signal[1:-1] < signal[:-2]) & (signal[1:-1] < signal[2:]) & (signal[1:-1] < 0.05)]
print("dips found at (GHz):", np.round(dips / 1e9, 6))

# 1 mT along the NV axis: gamma_e * Bz ~ 28 MHz on each side.
biased = params.with_(B=(0.0, 0.0, 1e-3))
f_lo, f_hi = transition_frequencies(build_hamiltonian(biased))
print(f"with Bz = 1 mT: gap {(f_hi - f_lo) / 1e6:.3f} MHz")
