"""Run configuration: a flat ``key = value`` document split into sections.

Every dimensioned value carries a unit. Frequencies and rates may be cyclic
(``Hz`` .. ``THz``) or angular (``rad/s`` .. ``Trad/s``) and are stored in
cyclic MHz. Temperatures may be given in kelvin or as ``k_B T / h`` in any
frequency unit and are stored as MHz. Times are stored in microseconds, the
inverse of MHz.

Example::

    [model]
    kind = 3L

    [resonator]
    omega_r = 1 GHz
    kappa = 0.1 MHz
    g = 1.5 MHz
    nbar_r = 6200
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from importlib.resources import files

import numpy as np

from .atoms import (
    FourLevelParams,
    ThreeLevelParams,
    kelvin_to_mhz,
    mhz_to_kelvin,
    planck_occupation,
    temperature_for_occupation,
)
from .harness import RATE_SOURCES, SweepSpec, default_grid, doppler_broadening
from .rates import dephasing_rates
from .resonator import ResonatorParams

_CYCLIC = {"Hz": 1e-6, "kHz": 1e-3, "MHz": 1.0, "GHz": 1e3, "THz": 1e6}
_ANGULAR = {"rad/s": 1e-6, "krad/s": 1e-3, "Mrad/s": 1.0, "Grad/s": 1e3, "Trad/s": 1e6}
_KELVIN = {"K": 1.0, "mK": 1e-3, "uK": 1e-6}
_TIME = {"s": 1e6, "ms": 1e3, "us": 1.0, "ns": 1e-3}
_MASS = {"u": 1.0, "amu": 1.0}

# kind of each field: freq, temp, time, mass, float, int, str or a tuple of choices
SCHEMA = {
    "model": {"kind": ("3L", "4L"), "name": "str"},
    "atom": {
        "omega_ea": "freq", "omega_em": "freq", "omega_ma": "freq", "omega_eb": "freq",
        "gamma_ea": "freq", "gamma_eb": "freq", "gamma_em": "freq", "gamma_ma": "freq",
        "ups_ab": "freq",
        "gp_a": "freq", "gp_b": "freq", "gp_m": "freq", "gp_e": "freq", "drive": "freq",
    },
    "bath": {"temperature": "temp"},
    "resonator": {"omega_r": "freq", "kappa": "freq", "g": "freq", "nbar_r": "float", "n_atoms": "int"},
    "sweep": {"points": "int", "drive_min": "freq", "drive_max": "freq", "rate_source": RATE_SOURCES},
    "estimate": {"ups_ab": "freq", "doppler_mass": "mass"},
    "simulate": {"n0": "float", "t_final": "time", "points": "int"},
    "output": {"path": "str", "format": ("csv", "tsv")},
}

_ATOM_KEYS = {
    "3L": ("omega_ea", "gamma_ea", "gamma_eb"),
    "4L": ("omega_em", "omega_ma", "gamma_em", "gamma_ma", "gamma_eb"),
}
_ATOM_ONLY = {"3L": {"omega_ea", "gamma_ea"}, "4L": {"omega_em", "omega_ma", "gamma_em", "gamma_ma", "gp_m"}}

_UNIT_FOR_KIND = {"freq": "MHz", "temp": "MHz", "time": "us", "mass": "u"}


@dataclass(frozen=True)
class ConfigIssue:
    line: int | None
    field: str
    message: str

    def __str__(self):
        where = f"line {self.line}: " if self.line else ""
        return f"{where}{self.field}: {self.message}"


class ConfigError(ValueError):
    def __init__(self, issues):
        self.issues = list(issues)
        super().__init__("invalid configuration\n  " + "\n  ".join(str(i) for i in self.issues))


@dataclass(frozen=True)
class RunConfig:
    """Parsed configuration, all values normalized to MHz / us / u."""

    sections: dict
    lines: dict = field(default_factory=dict, compare=False, repr=False)

    def get(self, section, key, default=None):
        return self.sections.get(section, {}).get(key, default)

    @property
    def model(self):
        return self.get("model", "kind")

    @property
    def name(self):
        return self.get("model", "name", "")

    @property
    def omega_r(self):
        return self.get("resonator", "omega_r")

    @property
    def temperature(self):
        """Bath temperature in MHz, given directly or implied by ``nbar_r``."""
        t = self.get("bath", "temperature")
        if t is not None:
            return t
        return temperature_for_occupation(self.omega_r, self.get("resonator", "nbar_r"))

    @property
    def nbar_r(self):
        n = self.get("resonator", "nbar_r")
        if n is not None:
            return n
        return planck_occupation(self.omega_r, self.temperature)

    @property
    def g(self):
        """Collective coupling ``sqrt(n_atoms) g``."""
        return self.get("resonator", "g") * math.sqrt(self.get("resonator", "n_atoms", 1))

    @property
    def kappa(self):
        return self.get("resonator", "kappa")

    def atom_params(self, drive=None):
        if self.model is None:
            raise ValueError("configuration has no [model] kind")
        a = dict(self.sections.get("atom", {}))
        ups_ab = a.pop("ups_ab", None)
        if drive is not None:
            a["drive"] = drive
        cls = ThreeLevelParams if self.model == "3L" else FourLevelParams
        kwargs = dict(a, omega_r=self.omega_r, temperature=self.temperature)
        if ups_ab is not None:
            return cls.with_ups_ab(ups_ab, **kwargs)
        return cls(**kwargs)

    def resonator_params(self, a_plus=0.0, a_minus=0.0):
        return ResonatorParams(self.kappa, self.nbar_r, a_plus, a_minus)

    def sweep_spec(self, rate_source=None):
        params = self.atom_params()
        points = self.get("sweep", "points", 200)
        lo, hi = self.get("sweep", "drive_min"), self.get("sweep", "drive_max")
        if lo is None and hi is None:
            grid = default_grid(params, points)
        else:
            auto = default_grid(params, 2)
            lo = auto[0] if lo is None else lo
            hi = auto[-1] if hi is None else hi
            grid = tuple(np.logspace(math.log10(lo), math.log10(hi), points))
        source = rate_source or self.get("sweep", "rate_source", "closed")
        return SweepSpec(params, self.kappa, self.nbar_r, self.g, grid, source)

    def estimate_inputs(self):
        """Keyword arguments for :func:`qrefrig.harness.estimate_report`."""
        ups = self.get("estimate", "ups_ab")
        if ups is None and self.get("estimate", "doppler_mass") is not None:
            # half the Doppler FWHM, at the bath temperature
            kelvin = mhz_to_kelvin(self.temperature)
            ups = 0.5 * doppler_broadening(self.omega_r, kelvin, self.get("estimate", "doppler_mass"))
        if ups is None and self.model is not None:
            ups = dephasing_rates(self.atom_params()).microwave
        if ups is None:
            raise ValueError("no a-b dephasing rate: set estimate.ups_ab, estimate.doppler_mass or an atom")
        return dict(omega_r=self.omega_r, g=self.g, kappa=self.kappa, ups_ab=ups, nbar_r=self.nbar_r, name=self.name)


_NUMBER = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"
_VALUE_RE = re.compile(rf"^\s*({_NUMBER})\s*([A-Za-z/]*)\s*$")


def _parse_value(kind, raw):
    """Return the normalized value or raise ``ValueError`` with a reason."""
    if kind == "str":
        if not raw:
            raise ValueError("empty value")
        return raw
    if isinstance(kind, tuple):
        if raw not in kind:
            raise ValueError(f"expected one of {', '.join(kind)}, got {raw!r}")
        return raw
    m = _VALUE_RE.match(raw)
    if not m:
        raise ValueError(f"cannot read {raw!r} as a number with optional unit")
    number, unit = float(m.group(1)), m.group(2)
    if not math.isfinite(number):
        raise ValueError("value must be finite")
    if kind == "int":
        if unit or not number.is_integer():
            raise ValueError(f"expected a plain integer, got {raw!r}")
        return int(number)
    if kind == "float":
        if unit:
            raise ValueError(f"dimensionless value takes no unit, got {unit!r}")
        return number
    if not unit:
        raise ValueError(f"missing unit tag (for example '{raw} {_UNIT_FOR_KIND[kind]}')")
    if kind in ("freq", "temp"):
        if unit in _CYCLIC:
            return number * _CYCLIC[unit]
        if unit in _ANGULAR:
            return number * _ANGULAR[unit] / (2.0 * math.pi)
        if kind == "temp" and unit in _KELVIN:
            return kelvin_to_mhz(number * _KELVIN[unit])
    elif kind == "time" and unit in _TIME:
        return number * _TIME[unit]
    elif kind == "mass" and unit in _MASS:
        return number * _MASS[unit]
    raise ValueError(f"unit {unit!r} is not valid here")


def parse_value(kind, raw):
    """Public single-value parser, used for command-line overrides."""
    return _parse_value(kind, raw.strip())


def parse_config(text):
    """Parse and validate a configuration document.

    Raises
    ------
    ConfigError
        Listing every problem found, each with its line and ``section.key``.
    """
    sections, lines, issues = {}, {}, []
    section = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = re.split(r"\s[#;]|^[#;]", line, maxsplit=1)[0].strip()
        if not stripped:
            continue
        if stripped.startswith("["):
            if not stripped.endswith("]"):
                issues.append(ConfigIssue(lineno, stripped, "unterminated section header"))
                continue
            section = stripped[1:-1].strip()
            if section not in SCHEMA:
                issues.append(ConfigIssue(lineno, section, "unknown section"))
            sections.setdefault(section, {})
            continue
        if "=" not in stripped:
            issues.append(ConfigIssue(lineno, stripped, "expected 'key = value'"))
            continue
        key, raw = (part.strip() for part in stripped.split("=", 1))
        name = f"{section}.{key}"
        if section is None:
            issues.append(ConfigIssue(lineno, key, "key outside any section"))
            continue
        if section not in SCHEMA:
            continue
        if key not in SCHEMA[section]:
            issues.append(ConfigIssue(lineno, name, "unknown key"))
            continue
        if key in sections[section]:
            issues.append(ConfigIssue(lineno, name, f"duplicate key (first set on line {lines[name]})"))
            continue
        try:
            sections[section][key] = _parse_value(SCHEMA[section][key], raw)
            lines[name] = lineno
        except ValueError as exc:
            issues.append(ConfigIssue(lineno, name, str(exc)))
    if issues:
        raise ConfigError(issues)
    cfg = RunConfig({k: v for k, v in sections.items() if v}, lines)
    _validate(cfg)
    return cfg


def _issue(cfg, name, message):
    return ConfigIssue(cfg.lines.get(name), name, message)


def _validate(cfg):
    issues = []
    for key in ("omega_r", "g", "kappa"):
        if cfg.get("resonator", key) is None:
            issues.append(ConfigIssue(None, f"resonator.{key}", "required key missing"))
    if cfg.get("resonator", "nbar_r") is None and cfg.get("bath", "temperature") is None:
        issues.append(ConfigIssue(None, "resonator.nbar_r", "required: set resonator.nbar_r or bath.temperature"))
    t = cfg.get("bath", "temperature")
    if t is not None and t <= 0:
        issues.append(_issue(cfg, "bath.temperature", "must be positive"))
    model = cfg.model
    if model is not None:
        for key in _ATOM_KEYS[model]:
            if cfg.get("atom", key) is None:
                issues.append(ConfigIssue(None, f"atom.{key}", f"required for model {model}"))
        other = "4L" if model == "3L" else "3L"
        for key in _ATOM_ONLY[other]:
            if cfg.get("atom", key) is not None:
                issues.append(_issue(cfg, f"atom.{key}", f"not a parameter of model {model}"))
        if cfg.get("atom", "ups_ab") is not None and (
            cfg.get("atom", "gp_a") is not None or cfg.get("atom", "gp_b") is not None
        ):
            issues.append(_issue(cfg, "atom.ups_ab", "conflicts with gp_a/gp_b; give one or the other"))
    elif cfg.sections.get("atom"):
        issues.append(ConfigIssue(None, "model.kind", "required when an [atom] section is present"))
    for key in ("kappa", "g", "nbar_r"):
        v = cfg.get("resonator", key)
        if v is not None and v < 0:
            issues.append(_issue(cfg, f"resonator.{key}", "must be non-negative"))
    if cfg.get("resonator", "omega_r") is not None and cfg.omega_r <= 0:
        issues.append(_issue(cfg, "resonator.omega_r", "must be positive"))
    if cfg.get("resonator", "n_atoms") is not None and cfg.get("resonator", "n_atoms") < 1:
        issues.append(_issue(cfg, "resonator.n_atoms", "must be at least 1"))
    if cfg.get("sweep", "points") is not None and cfg.get("sweep", "points") < 2:
        issues.append(_issue(cfg, "sweep.points", "need at least 2 points"))
    lo, hi = cfg.get("sweep", "drive_min"), cfg.get("sweep", "drive_max")
    if lo is not None and lo <= 0:
        issues.append(_issue(cfg, "sweep.drive_min", "must be positive"))
    if lo is not None and hi is not None and hi <= lo:
        issues.append(_issue(cfg, "sweep.drive_max", "must exceed sweep.drive_min"))
    if issues:
        raise ConfigError(issues)

    if model is not None:
        try:
            cfg.atom_params()
        except ValueError as exc:
            msg = str(exc)
            word = re.match(r"\w+", msg).group(0)
            if "ladder" in msg:
                fld = "atom.omega_eb"
            elif word == "omega_r":
                fld = "resonator.omega_r"
            elif word in SCHEMA["atom"]:
                fld = f"atom.{word}"
            else:
                fld = "atom"
            raise ConfigError([_issue(cfg, fld, msg)]) from exc


def format_config(cfg: RunConfig):
    """Canonical text of a configuration; :func:`parse_config` reads it back unchanged."""
    out = []
    for section, keys in SCHEMA.items():
        values = cfg.sections.get(section)
        if not values:
            continue
        out.append(f"[{section}]")
        for key, kind in keys.items():
            if key not in values:
                continue
            v = values[key]
            if kind in _UNIT_FOR_KIND:
                text = f"{v!r} {_UNIT_FOR_KIND[kind]}"
            else:
                text = repr(v) if isinstance(v, float) else str(v)
            out.append(f"{key} = {text}")
        out.append("")
    return "\n".join(out)


PRESETS = ("fig2a", "fig2b", "sec5_nv", "sec5_na", "desk")


def preset_text(name):
    if name not in PRESETS:
        raise ValueError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    return (files("qrefrig") / "presets" / f"{name}.conf").read_text()


def load_preset(name):
    return parse_config(preset_text(name))


def load_config(path_or_preset):
    """Parse a file, or a shipped preset when given a bare preset name."""
    if path_or_preset in PRESETS:
        return load_preset(path_or_preset)
    with open(path_or_preset, encoding="utf-8") as fh:
        return parse_config(fh.read())
