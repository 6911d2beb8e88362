"""Run configuration: flat TOML files, presets and ``key=value`` overrides.

A config file is a flat TOML document (no tables). Every output file starts
with the config that produced it, so any output can be fed back with
``--config`` to regenerate it.
"""
from __future__ import annotations

import dataclasses
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import tomli
import tomli_w

from .errors import ConfigError
from .model import COUPLING_CONVENTIONS, PERIOD_POLICIES, ModelParams

SCHEMA_VERSION = 1
MODES = ("single", "sweep", "oracle-compare", "convergence-scan", "theta-scan")
FORMATS = ("csv", "json")
PARAM_FIELDS = tuple(f.name for f in dataclasses.fields(ModelParams))
SWEEPABLE = ("Omega", "Delta", "omegaD", "gamma0", "theta0")

FIG_THETAS_DEG = [23.5, 35.0, 40.0, 45.0, 50.0, 62.0, 73.0, 84.5]

PRESETS = {
    "fig1": dict(mode="single", gamma0=1.0, Delta=0.0, omegaD=0.0, cycles=15),
    "fig1-unitary": dict(mode="single", gamma0=1e-12, Delta=0.0, omegaD=0.0, cycles=15),
    "fig4": dict(mode="single", gamma0=0.01, Omega=20.0, theta0=math.pi / 4,
                 Delta=0.0, omegaD=0.0, cycles=15),
    "fig7": dict(mode="sweep", gamma0=0.01, cycles=8,
                 axis1=["Delta", 0.0, 8.0, 17], axis2=["omegaD", 0.0, 8.0, 17],
                 N_list=[2, 3, 4, 5, 8]),
    "fig8": dict(mode="single", gamma0=1.0, Delta=7.0, omegaD=4.0, cycles=15),
    "fig10": dict(mode="sweep", gamma0=1.0, cycles=8,
                  axis1=["Delta", 0.0, 8.0, 17], axis2=["omegaD", 0.0, 8.0, 17],
                  N_list=[2, 3, 4, 5, 8]),
    "theta-scan": dict(mode="theta-scan", gamma0=1.0, Delta=7.0, omegaD=4.0, cycles=15,
                       thetas_deg=FIG_THETAS_DEG),
}
PRESETS["fig8-frozen"] = PRESETS["fig8"]


@dataclass(frozen=True)
class Axis:
    name: str
    lo: float
    hi: float
    count: int

    def values(self) -> list[float]:
        if self.count == 1:
            return [float(self.lo)]
        step = (self.hi - self.lo) / (self.count - 1)
        return [float(self.lo + k * step) for k in range(self.count)]

    def to_list(self):
        return [self.name, float(self.lo), float(self.hi), int(self.count)]


@dataclass
class RunConfig:
    params: ModelParams = field(default_factory=ModelParams)
    mode: str = "single"
    axes: tuple[Axis, ...] = ()
    N_list: tuple[int, ...] = ()
    thetas_deg: tuple[float, ...] = ()
    depths: tuple[tuple[int, int], ...] = ((5, 5), (10, 10), (20, 20), (25, 25))
    out: str = "-"
    format: str = "csv"
    workers: int = 1
    seed: int = 0
    prominence: float = 1e-3
    preset: str = ""

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode: expected one of {MODES}, got {self.mode!r}")
        if self.format not in FORMATS:
            raise ConfigError(f"format: expected one of {FORMATS}, got {self.format!r}")
        if len(self.axes) > 2:
            raise ConfigError("at most two sweep axes are supported")
        for ax in self.axes:
            if ax.name not in SWEEPABLE:
                raise ConfigError(f"axis: unknown parameter {ax.name!r}; sweepable: {SWEEPABLE}")
            if ax.count < 1:
                raise ConfigError(f"axis {ax.name}: count must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.prominence <= 0:
            raise ConfigError("prominence must be positive")
        if any(n < 1 or n > self.params.cycles for n in self.N_list):
            raise ConfigError(f"N_list entries must lie in [1, cycles={self.params.cycles}]")

    @property
    def report_cycles(self) -> tuple[int, ...]:
        return tuple(self.N_list) or (self.params.cycles,)

    def to_flat(self, include_out: bool = True) -> dict:
        """Flat, TOML-serialisable dict; inverse of :func:`from_flat`.

        Outputs echo their config without ``out`` and ``workers``, so a file
        regenerated under another name or worker count is byte-identical.
        """
        d = {"schema_version": SCHEMA_VERSION, "mode": self.mode}
        if self.preset:
            d["preset"] = self.preset
        for name in PARAM_FIELDS:
            value = getattr(self.params, name)
            if name == "dt" and value is None:
                continue
            d[name] = list(value) if name == "depth" else value
        for k, ax in enumerate(self.axes, 1):
            d[f"axis{k}"] = ax.to_list()
        if self.N_list:
            d["N_list"] = list(self.N_list)
        if self.thetas_deg:
            d["thetas_deg"] = list(self.thetas_deg)
        if self.mode == "convergence-scan":
            d["depths"] = [list(x) for x in self.depths]
        if include_out:
            d.update(out=self.out, workers=self.workers)
        d.update(format=self.format, seed=self.seed, prominence=self.prominence)
        return d

    def dumps(self, include_out: bool = True) -> str:
        return tomli_w.dumps(self.to_flat(include_out))


_CFG_FIELDS = {"mode", "N_list", "thetas_deg", "depths", "out", "format",
               "workers", "seed", "prominence", "preset"}


def _coerce(name, value, template):
    try:
        if template is None:
            return None if value in (None, "", "none", "None") else float(value)
        if isinstance(template, bool):
            return value if isinstance(value, bool) else str(value).lower() in ("1", "true", "yes")
        if isinstance(template, int):
            if isinstance(value, float) and not value.is_integer():
                raise ValueError("not an integer")
            return int(value)
        if isinstance(template, float):
            return float(value)
        if isinstance(template, tuple):
            return tuple(int(v) for v in value)
        return str(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"field {name!r}: cannot use {value!r} ({exc})") from None


def from_flat(d: dict) -> RunConfig:
    d = dict(d)
    version = d.pop("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"schema_version {version} is not supported (expected {SCHEMA_VERSION})")
    defaults = ModelParams()
    pkw = {}
    for name in PARAM_FIELDS:
        if name in d:
            template = getattr(defaults, name)
            pkw[name] = _coerce(name, d.pop(name), template)
    axes = []
    for key in ("axis1", "axis2"):
        if key in d:
            raw = d.pop(key)
            if isinstance(raw, str):
                raw = raw.split(":")
            if len(raw) != 4:
                raise ConfigError(f"field {key!r}: expected [name, min, max, count], got {raw!r}")
            axes.append(Axis(str(raw[0]), _coerce(key, raw[1], 0.0), _coerce(key, raw[2], 0.0),
                             _coerce(key, raw[3], 0)))
    unknown = set(d) - _CFG_FIELDS
    if unknown:
        raise ConfigError(f"unknown key(s): {', '.join(sorted(unknown))}")
    kw = {}
    if "N_list" in d:
        kw["N_list"] = tuple(_coerce("N_list", v, 0) for v in d.pop("N_list"))
    if "thetas_deg" in d:
        kw["thetas_deg"] = tuple(_coerce("thetas_deg", v, 0.0) for v in d.pop("thetas_deg"))
    if "depths" in d:
        kw["depths"] = tuple(_coerce("depths", v, (0, 0)) for v in d.pop("depths"))
    for name in ("workers", "seed"):
        if name in d:
            kw[name] = _coerce(name, d.pop(name), 0)
    if "prominence" in d:
        kw["prominence"] = _coerce("prominence", d.pop("prominence"), 0.0)
    for name in ("mode", "out", "format", "preset"):
        if name in d:
            kw[name] = str(d.pop(name))
    try:
        params = ModelParams(**pkw)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return RunConfig(params=params, axes=tuple(axes), **kw)


def parse_value(text: str):
    """Parse a ``--set`` value as a TOML scalar/array, falling back to a string."""
    try:
        return tomli.loads(f"v = {text}")["v"]
    except tomli.TOMLDecodeError:
        return text


def read_config_text(path: str | os.PathLike) -> str:
    """Config text from a TOML file or from the header of a CSV/JSON output."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None
    if path.suffix == ".csv":
        lines = []
        for line in text.splitlines():
            if not line.startswith("#"):
                break
            if line.startswith("# heomgp "):
                continue
            lines.append(line[2:])
        return "\n".join(lines) + "\n"
    if path.suffix == ".json":
        import json

        try:
            return tomli_w.dumps(json.loads(text)["config"])
        except (ValueError, KeyError) as exc:
            raise ConfigError(f"{path}: not a heomgp JSON output ({exc})") from None
    return text


def load_flat(path) -> dict:
    text = read_config_text(path)
    try:
        return tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def build_config(preset: str | None = None, path=None, overrides=(), **flags) -> RunConfig:
    """Merge preset < config file < ``--set`` overrides < explicit flags."""
    flat = {}
    if preset:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
        flat.update(PRESETS[preset])
        flat["preset"] = preset
    if path:
        flat.update(load_flat(path))
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, value = item.split("=", 1)
        flat[key.strip()] = parse_value(value.strip())
    flat.update({k: v for k, v in flags.items() if v is not None})
    return from_flat(flat)


def check_writable(out: str):
    if out == "-":
        return
    parent = Path(out).resolve().parent
    if not parent.is_dir():
        raise ConfigError(f"out: directory {parent} does not exist")
    if not os.access(parent, os.W_OK) or (Path(out).exists() and not os.access(out, os.W_OK)):
        raise ConfigError(f"out: {out} is not writable")
