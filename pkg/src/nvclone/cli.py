"""Command-line entry point: ``nvclone <verb> [--config F] [--seed N] [--out DIR]``.

Exit codes: 0 success, 2 configuration/input error, 3 numerical/analysis error.
"""
import argparse
import json
import os
import sys

import numpy as np

from . import config as config_mod
from .cloning import average_fidelity, bounds, build_report, cerf_check, config_digest
from .errors import ConfigError, NumericalError, NvCloneError, SequenceError
from .fitting import fit_damped_cosine
from .photonics import Calibration, RabiTrace, esr_spectrum, generate_rabi_trace, spectrum_csv
from .pipeline import analyze_traces, fig5_sweep, prepared_phase, simulate_clone
from .pulses import preset, tomography_grid
from .spin import build_hamiltonian, transition_frequencies

PUBLISHED_START_POINTS = ((0.33, 0.48), (0.36, 0.44))


def _write(out, name, text):
    os.makedirs(out, exist_ok=True)
    with open(os.path.join(out, name), "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _json(obj):
    return json.dumps(_clean(obj), indent=2) + "\n"


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return float(f"{x:.9g}") if np.isfinite(x) else None
    return obj


def _sampled(cfg, args):
    sampled = bool(cfg.get("sampled", False))
    if sampled and _seed(cfg, args) is None:
        raise ConfigError("sampling needs a seed (--seed or [experiment] seed)")
    return sampled


def _seed(cfg, args):
    return args.seed if args.seed is not None else cfg.seed


def _fit_plot_rows(label, trace, fit, calibration):
    y = trace.measured_signal(calibration)
    model = fit.model(trace.times)
    return [f"{label},{t * 1e9:.9g},{s:.9g},{m:.9g}" for t, s, m in zip(trace.times, y, model)]


def cmd_rabi(cfg, args):
    channel = args.channel if args.channel is not None else cfg.get("channel", 1)
    if channel not in (1, 2):
        raise ConfigError(f"channel must be 1 or 2, got {channel}")
    params = cfg.params
    grid = tomography_grid(cfg.get("rabi_span", 2e-6), cfg.get("rabi_points", 2001))
    sampled = _sampled(cfg, args)
    seed = _seed(cfg, args) or 0
    trace = generate_rabi_trace(preset("rabi-cal", channel=channel), channel, grid, params,
                                cfg.evolution, seed, sampled)
    trace = RabiTrace.from_csv(trace.to_csv(), channel, seed)
    cal = Calibration.from_params(params)
    fit = fit_damped_cosine(trace, cal)
    summary = dict(fit.as_dict(), channel=channel, frequency_hz=fit.frequency,
                   configured_rabi_hz=params.rabi(channel), sampled=sampled,
                   seed=seed if sampled else None)
    _write(args.out, f"rabi_ch{channel}.csv", trace.to_csv())
    _write(args.out, f"rabi_ch{channel}.fit.json", _json(summary))
    if args.plot_data:
        rows = ["series,t_ns,signal,fit"] + _fit_plot_rows(f"rabi_ch{channel}", trace, fit, cal)
        _write(args.out, f"plot_rabi_ch{channel}.csv", "\n".join(rows) + "\n")
    print(f"channel {channel}: fitted {fit.frequency:.9g} Hz "
          f"(configured {params.rabi(channel):.9g} Hz)")


def cmd_esr(cfg, args):
    params = cfg.params
    f_lo, f_hi = transition_frequencies(build_hamiltonian(params))
    centre, half = 0.5 * (f_lo + f_hi), max(20e6, f_hi - f_lo)
    n = cfg.get("esr_points", 801)
    if n < 1:
        raise ConfigError("esr_points must be at least 1")
    grid = np.linspace(cfg.get("esr_start", centre - half), cfg.get("esr_stop", centre + half), n)
    signal = esr_spectrum(grid, params, cfg.get("esr_pulse"))
    _write(args.out, "esr.csv", spectrum_csv(grid, signal))
    print(f"transitions at {f_lo:.9g} Hz and {f_hi:.9g} Hz")


def _clone_outputs(cfg, args):
    digest = config_digest(cfg.text)
    seed = _seed(cfg, args)
    if cfg.get("alpha") is not None or cfg.get("beta") is not None:
        if cfg.get("alpha") is None or cfg.get("beta") is None:
            raise ConfigError("alpha and beta overrides must be given together")
        report = build_report(cfg.get("alpha"), cfg.get("beta"), cfg.get("phi", 0.0), seed, digest)
        return report, None
    seq = cfg.sequence()
    sampled = _sampled(cfg, args)
    analysis, t1, t2 = simulate_clone(seq, cfg.params, cfg.evolution, cfg.tomo_grid(),
                                      seed or 0, sampled, cfg.get("phi"), digest)
    analysis.report.seed = seed
    return analysis.report, (analysis, t1, t2)


def cmd_clone(cfg, args):
    report, sim = _clone_outputs(cfg, args)
    _write(args.out, "clone_report.json", report.to_json())
    if sim is not None:
        analysis, t1, t2 = sim
        _write(args.out, "tomo_mw1.csv", t1.to_csv())
        _write(args.out, "tomo_mw2.csv", t2.to_csv())
        if args.plot_data:
            cal = Calibration.from_params(cfg.params)
            rows = (["series,t_ns,signal,fit"]
                    + _fit_plot_rows("mw1", t1, analysis.fit_mw1, cal)
                    + _fit_plot_rows("mw2", t2, analysis.fit_mw2, cal))
            _write(args.out, "plot_tomography.csv", "\n".join(rows) + "\n")
    print(f"alpha={report.alpha:.6f} beta={report.beta:.6f} "
          f"F1={report.F1:.6f} F2={report.F2:.6f}")


def _read_trace(path, channel):
    if not os.path.exists(path):
        raise ConfigError(f"trace file not found: {path}")
    with open(path, encoding="utf-8") as fh:
        try:
            return RabiTrace.from_csv(fh.read(), channel)
        except ValueError as exc:
            raise ConfigError(f"{path}: {exc}") from None


def cmd_analyze(cfg, args):
    if not args.mw1 or not args.mw2:
        raise ConfigError("analyze needs --mw1 and --mw2 trace CSVs")
    t1, t2 = _read_trace(args.mw1, 1), _read_trace(args.mw2, 2)
    seed = _seed(cfg, args)
    phi = args.phi if args.phi is not None else cfg.get("phi")
    if phi is None:
        phi = prepared_phase(cfg.sequence(), cfg.params)
    if args.bright is not None or args.dark is not None:
        if args.bright is None or args.dark is None:
            raise ConfigError("--bright and --dark must be given together")
        cal = Calibration(args.bright, args.dark)
    else:
        cal = Calibration.from_params(cfg.params)
    analysis = analyze_traces(t1, t2, phi, cal, seed, config_digest(cfg.text))
    _write(args.out, "clone_report.json", analysis.report.to_json())
    r = analysis.report
    print(f"alpha={r.alpha:.6f} beta={r.beta:.6f} F1={r.F1:.6f} F2={r.F2:.6f}")


def cmd_reproduce(cfg, args):
    seed = _seed(cfg, args)
    seed = 0 if seed is None else seed
    out = args.out
    params, evo = cfg.params, cfg.evolution
    digest = config_digest(cfg.text)
    grid = cfg.tomo_grid()
    summary = {"seed": seed, "config_digest": digest}
    pc, uni = bounds()
    summary["bounds"] = {"phase_covariant": pc, "universal": uni}

    simulated = {}
    preps = {"pi/2": ("fig3a", "fig3b"), "3pi/2": ("fig3c", "fig3d")}
    for stream, (prep, (a, b)) in enumerate(preps.items()):
        for mode in ("ideal", "sampled"):
            sampled = mode == "sampled"
            analysis, t1, t2 = simulate_clone(preset(a), params, evo, grid, seed, sampled,
                                              digest=digest, stream=stream)
            tag = f"{a}{b[-1]}_{mode}"
            _write(out, f"tomo_{a}_{mode}.csv", t1.to_csv())
            _write(out, f"tomo_{b}_{mode}.csv", t2.to_csv())
            _write(out, f"report_{tag}.json", analysis.report.to_json())
            r = analysis.report
            simulated[f"{prep} {mode}"] = {"alpha": r.alpha, "beta": r.beta, "F1": r.F1,
                                           "F2": r.F2, "cerf": r.cerf_value}
    summary["simulated"] = simulated

    published = [build_report(a, b, 0.0, None, digest) for a, b in PUBLISHED_START_POINTS]
    summary["published_start_points"] = [
        {"alpha": r.alpha, "beta": r.beta, "F1": r.F1, "F2": r.F2, "cerf": r.cerf_value,
         "beats_universal": r.beats_universal} for r in published]
    summary["published_average_fidelity"] = average_fidelity(published)
    summary["published_cerf_3pi2"] = cerf_check(published[1].F1, published[1].F2)[0]

    fig5 = []
    span = cfg.get("fig5_span", 2e-6)
    plot_rows = ["series,wait_ns,expected,counts"]
    for dt in cfg.fig5_dts():
        sweep = fig5_sweep(params, evo, dt, span, seed, sampled=True)
        _write(out, f"fig5_dt{int(round(dt * 1e9))}ns.csv", sweep.to_csv())
        fig5.append(sweep.flatness())
        for i in range(len(sweep.j)):
            plot_rows.append(f"fig5_dt{int(round(dt * 1e9))}ns,{sweep.wait[i] * 1e9:.9g},"
                             f"{sweep.expected[i]:.9g},{int(sweep.counts[i])}")
    summary["fig5"] = fig5
    if args.plot_data:
        _write(out, "plot_fig5.csv", "\n".join(plot_rows) + "\n")

    _write(out, "summary.json", _json(summary))
    _write(out, "summary.txt", _summary_table(summary))
    print(_summary_table(summary), end="")


def _summary_table(s):
    lines = ["case                      alpha     beta      F1        F2        cerf"]
    for name, r in s["simulated"].items():
        lines.append(f"simulated {name:<15} {r['alpha']:.6f}  {r['beta']:.6f}  "
                     f"{r['F1']:.6f}  {r['F2']:.6f}  {r['cerf']:.6f}")
    for r in s["published_start_points"]:
        lines.append(f"published ({r['alpha']:.2f}, {r['beta']:.2f})     {r['alpha']:.6f}  "
                     f"{r['beta']:.6f}  {r['F1']:.6f}  {r['F2']:.6f}  {r['cerf']:.6f}")
    lines.append(f"published average fidelity: {s['published_average_fidelity']:.6f}")
    lines.append(f"bounds: phase-covariant {s['bounds']['phase_covariant']:.9f}, "
                 f"universal {s['bounds']['universal']:.9f}")
    for f in s["fig5"]:
        lines.append(f"fig5 dt={f['dt_ns']:g} ns: {f['points']} waits, ideal max rel dev "
                     f"{f['expected_max_rel_dev']:.3g}, sampled std/poisson "
                     f"{f.get('std_ratio', float('nan')):.3f}")
    return "\n".join(lines) + "\n"


COMMANDS = {"rabi": cmd_rabi, "esr": cmd_esr, "clone": cmd_clone, "analyze": cmd_analyze,
            "reproduce": cmd_reproduce}


def _global_flags(suppress):
    # Flags are accepted before or after the verb; the verb-level copies use
    # SUPPRESS so they do not clobber values given before it.
    kw = {"default": argparse.SUPPRESS} if suppress else {}
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", help="INI run configuration", **kw)
    p.add_argument("--seed", type=int, help="RNG seed (overrides [experiment] seed)", **kw)
    p.add_argument("--out", help="output directory (default: [output] directory or .)", **kw)
    p.add_argument("--plot-data", action="store_true", help="also write long-format plot CSVs",
                   **kw)
    return p


def build_parser():
    common = _global_flags(suppress=True)
    parser = argparse.ArgumentParser(
        prog="nvclone", description="Phase-covariant cloning on an NV-centre qutrit.",
        epilog=config_mod.__doc__, formatter_class=argparse.RawDescriptionHelpFormatter,
        parents=[_global_flags(suppress=False)])
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("rabi", parents=[common], help="calibration Rabi trace and fit")
    p.add_argument("--channel", type=int)
    sub.add_parser("esr", parents=[common], help="ESR spectrum")
    sub.add_parser("clone", parents=[common], help="simulate and analyse one cloning run")
    p = sub.add_parser("analyze", parents=[common], help="analyse measured tomography CSVs")
    p.add_argument("--mw1")
    p.add_argument("--mw2")
    p.add_argument("--phi", type=float)
    p.add_argument("--bright", type=float, help="bright level, counts per shot")
    p.add_argument("--dark", type=float, help="dark level, counts per shot")
    sub.add_parser("reproduce", parents=[common], help="full figure reproduction bundle")
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        cfg = config_mod.load_config(args.config)
        if args.out is None:
            args.out = cfg.output.get("directory", ".")
        COMMANDS[args.command](cfg, args)
    except NumericalError as exc:
        print(f"nvclone: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except (ConfigError, SequenceError, NvCloneError, ValueError, OSError) as exc:
        print(f"nvclone: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
