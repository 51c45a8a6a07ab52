"""INI run configuration.

Sections and keys (all optional; SI units unless noted)::

    [nv]          D E Bx By Bz gamma_e rabi_mw1 rabi_mw2 r0 r1 t2star
                  omega_env readout_window repetitions background
    [evolution]   path (ideal|lindblad) integrator_step dephasing_mw1
                  dephasing_mw2 polarization
    [experiment]  preset (fig3a|fig3c) sequence (.seq path) phi channel
                  sampled (bool) seed tomo_span tomo_points rabi_span
                  rabi_points esr_start esr_stop esr_points esr_pulse
                  fig5_dt (comma list) fig5_span alpha beta
    [output]      directory formats
"""
import configparser
import math
import os
from dataclasses import dataclass, field

from .dynamics import EvolutionConfig
from .errors import ConfigError
from .pulses import (DEFAULT_TOMO_POINTS, DEFAULT_TOMO_SPAN, FIG5_DT, parse_sequence, preset,
                     tomography_grid)
from .spin import NvParams

NV_KEYS = ("D", "E", "gamma_e", "rabi_mw1", "rabi_mw2", "r0", "r1", "t2star",
           "omega_env", "readout_window", "background")
EXPERIMENT_KEYS = {
    "preset": str, "sequence": str, "phi": float, "channel": int, "sampled": "bool",
    "seed": int, "tomo_span": float, "tomo_points": int, "rabi_span": float,
    "rabi_points": int, "esr_start": float, "esr_stop": float, "esr_points": int,
    "esr_pulse": float, "fig5_dt": "list", "fig5_span": float, "alpha": float,
    "beta": float,
}
KNOWN = {
    "nv": set(NV_KEYS) | {"Bx", "By", "Bz", "repetitions"},
    "evolution": {"path", "integrator_step", "dephasing_mw1", "dephasing_mw2", "polarization"},
    "experiment": set(EXPERIMENT_KEYS),
    "output": {"directory", "formats"},
}


@dataclass
class RunConfig:
    params: NvParams = field(default_factory=NvParams)
    evolution: EvolutionConfig = field(default_factory=EvolutionConfig)
    experiment: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)
    text: str = ""
    base_dir: str = "."

    def get(self, key, default=None):
        return self.experiment.get(key, default)

    @property
    def seed(self):
        return self.experiment.get("seed")

    def tomo_grid(self):
        return tomography_grid(self.get("tomo_span", DEFAULT_TOMO_SPAN),
                               self.get("tomo_points", DEFAULT_TOMO_POINTS))

    def fig5_dts(self):
        return tuple(self.get("fig5_dt", FIG5_DT))

    def sequence(self):
        """The preparation+cloning program named by the experiment section."""
        path = self.get("sequence")
        if path:
            path = path if os.path.isabs(path) else os.path.join(self.base_dir, path)
            if not os.path.exists(path):
                raise ConfigError(f"sequence file not found: {path}")
            with open(path, encoding="utf-8") as fh:
                return parse_sequence(fh.read(), name=os.path.basename(path))
        name = self.get("preset", "fig3a")
        if name not in ("fig3a", "fig3b", "fig3c", "fig3d", "fig3a-clone", "fig3c-clone"):
            raise ConfigError(f"experiment.preset must be fig3a..fig3d, got {name!r}")
        phi = self.get("phi")
        if phi is None:
            return preset(name)
        # Logical input phase is phi0 - (MW1 phase), phi0 = 0 (pi/2 prep) or pi (3pi/2 prep).
        phi0 = 0.0 if name in ("fig3a", "fig3b", "fig3a-clone") else math.pi
        return preset(name, phase=phi0 - phi)


def _float(section, key, raw):
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"[{section}] {key}: not a number: {raw!r}") from None


def _convert(key, kind, raw):
    if kind == "bool":
        low = raw.strip().lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"[experiment] {key}: not a boolean: {raw!r}")
    if kind == "list":
        return tuple(_float("experiment", key, x) for x in raw.split(",") if x.strip())
    if kind is int:
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(f"[experiment] {key}: not an integer: {raw!r}") from None
    if kind is float:
        return _float("experiment", key, raw)
    return raw.strip()


def parse_config(text, base_dir="."):
    """Build a RunConfig from INI text.

    Raises:
        ConfigError: unknown section/key, bad value, or invalid parameters.
    """
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";", "#"))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    for section in cp.sections():
        if section not in KNOWN:
            raise ConfigError(f"unknown config section [{section}]")
        unknown = set(cp[section]) - KNOWN[section]
        if unknown:
            raise ConfigError(f"unknown keys in [{section}]: {', '.join(sorted(unknown))}")

    nv = cp["nv"] if cp.has_section("nv") else {}
    kwargs = {k: _float("nv", k, nv[k]) for k in NV_KEYS if k in nv}
    if any(k in nv for k in ("Bx", "By", "Bz")):
        kwargs["B"] = tuple(_float("nv", k, nv.get(k, "0")) for k in ("Bx", "By", "Bz"))
    if "repetitions" in nv:
        kwargs["repetitions"] = _float("nv", "repetitions", nv["repetitions"])
    params = NvParams(**kwargs)

    ev = cp["evolution"] if cp.has_section("evolution") else {}
    ekw = {}
    if "path" in ev:
        ekw["path"] = ev["path"].strip()
    if "integrator_step" in ev:
        ekw["integrator_step"] = _float("evolution", "integrator_step", ev["integrator_step"])
    if "polarization" in ev:
        ekw["polarization"] = _float("evolution", "polarization", ev["polarization"])
    if "dephasing_mw1" in ev or "dephasing_mw2" in ev:
        default = 1.0 / params.t2star
        ekw["dephasing_rates"] = tuple(
            _float("evolution", k, ev[k]) if k in ev else default
            for k in ("dephasing_mw1", "dephasing_mw2"))
    evolution = EvolutionConfig(**ekw).validate(params)

    ex = cp["experiment"] if cp.has_section("experiment") else {}
    experiment = {k: _convert(k, EXPERIMENT_KEYS[k], ex[k]) for k in ex}
    output = dict(cp["output"]) if cp.has_section("output") else {}
    return RunConfig(params, evolution, experiment, output, text, base_dir)


def load_config(path):
    if path is None:
        return parse_config("")
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), os.path.dirname(os.path.abspath(path)))
