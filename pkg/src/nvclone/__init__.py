"""Simulation and analysis of phase-covariant 1->2 cloning on an NV-centre spin qutrit."""
from .cloning import (CloningReport, bounds, build_report, cerf_check, copy_fidelities, decode,
                      encode, ideal_clone, reconstruct, reduced_copy)
from .dynamics import EvolutionConfig, evolve_sequence, free_evolution, mw_rotation
from .errors import NumericalError, NvCloneError, SequenceError
from .fitting import DampedCosineFit, fit_damped_cosine, start_point, subspace_population
from .photonics import (Calibration, RabiTrace, esr_spectrum, fluorescence, generate_rabi_trace,
                        normalize_signal)
from .pipeline import analyze_traces, fig5_sweep, simulate_clone
from .pulses import PulseSequence, parse_sequence, preset, render
from .spin import NvParams, build_hamiltonian, fidelity_with_equator_state, transition_frequencies

__version__ = "0.1.0"
