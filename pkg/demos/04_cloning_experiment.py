"""End-to-end cloning: prepare, clone, run tomography, fit, score the copies.

MW1 tomography reads the |0> share of the {|0>, |-1>} pair (alpha), MW2 the
share of the {|0>, |+1>} pair (beta). The optimum sits at alpha = 1/3 and
beta = 1/2, giving both copies 1/2 + 1/sqrt(8).
"""
from nvclone import NvParams, bounds, copy_fidelities, simulate_clone

params = NvParams()
pc, uni = bounds()
print(f"optimal phase-covariant {pc:.6f}, universal {uni:.6f}")

for name in ("fig3a", "fig3c"):
    ideal = simulate_clone(name, params)[0].report
    noisy = simulate_clone(name, params, seed=1, sampled=True,
                           stream=0 if name == "fig3a" else 1)[0].report
    for label, r in (("ideal", ideal), ("sampled", noisy)):
        print(f"{name} {label:<7} alpha={r.alpha:.4f} beta={r.beta:.4f} "
              f"F1={r.F1:.4f} F2={r.F2:.4f} cerf={r.cerf_value:.4f}")

# Measured start points analysed directly.
for alpha, beta in ((0.33, 0.48), (0.36, 0.44)):
    f1, f2 = copy_fidelities(alpha, beta)
    print(f"start points ({alpha}, {beta}) -> F1={f1:.3f}, F2={f2:.3f}")
