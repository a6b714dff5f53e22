"""Run configuration: flat ``key = value`` files merged with command-line flags."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from . import functions as fc
from .criteria import DEFAULT_TOL, PRESETS
from .errors import ValidationError

EMIT_NAMES = ("report", "heatmap1", "heatmap2", "domain", "beltrami", "diagnostics")


class ConfigError(ValidationError):
    """A configuration value that cannot be parsed; the message names its source."""


@dataclass(frozen=True)
class Key:
    name: str
    default: str | None
    kind: str
    help: str
    echo: bool = True
    hidden: bool = False

    @property
    def flag(self) -> str:
        return "--" + self.name.replace("_", "-")


KEYS = (
    Key("criterion", "becker", "criterion", "criterion preset id"),
    Key("f", "identity", "function", "catalog function name:param:param (params 're' or 're,im')"),
    Key("f_coeffs", None, "coeffs", "Taylor coefficients of f, ';'-separated, each 're' or 're,im'"),
    Key("g", None, "function", "catalog function for g (presets with a free g)"),
    Key("g_coeffs", None, "coeffs", "Taylor coefficients of g"),
    Key("coeffs_truncated", "false", "bool", "coefficient lists are truncations of an infinite series"),
    Key("alpha", "1", "complex", "alpha ('re' or 're,im')"),
    Key("beta", "0", "complex", "beta"),
    Key("A", "1", "complex", "A"),
    Key("B", "1", "complex", "B"),
    Key("k", "0.5", "real", "quasiconformality constant k"),
    Key("nr", "128", "int", "radial grid points"),
    Key("ntheta", "256", "int", "angular grid points"),
    Key("rmax", "0.999", "real", "outer grid radius"),
    Key("tol", repr(DEFAULT_TOL), "real", "margin tolerance"),
    Key("refine", "3", "int", "local refinement rounds around the worst point"),
    Key("out_dir", ".", "str", "output directory", echo=False),
    Key("emit", "report", "emit", "comma list of: " + ",".join(EMIT_NAMES)),
    Key("threads", "1", "int", "worker threads for grid evaluation", echo=False),
    Key("fault_rhs_scale", "1", "real", "multiply criterion bounds (fault injection)", hidden=True),
)
KEY_BY_NAME = {k.name: k for k in KEYS}
EXCLUSIVE = (("f", "f_coeffs"), ("g", "g_coeffs"))


def parse_complex(text: str, where: str) -> complex:
    parts = [s.strip() for s in text.split(",")]
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise ConfigError(f"{where}: expected 're' or 're,im', got {text!r}")


def parse_function(text: str, where: str) -> fc.AnalyticFunction:
    name, *params = [s.strip() for s in text.split(":")]
    values = [parse_complex(s, where) for s in params]
    try:
        return fc.preset(name, *values)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{where}: {exc}") from None


def parse_coeffs(text: str, where: str, truncated: bool) -> fc.AnalyticFunction:
    items = [s for s in (s.strip() for s in text.split(";")) if s]
    if not items:
        raise ConfigError(f"{where}: empty coefficient list")
    coeffs = [parse_complex(s, where) for s in items]
    try:
        return fc.from_coefficients(coeffs, fc.infer_class_tag(coeffs), truncated=truncated)
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from None


def _parse_value(key: Key, text: str, where: str):
    try:
        if key.kind == "int":
            return int(text)
        if key.kind == "real":
            return float(text)
    except ValueError:
        raise ConfigError(f"{where}: {key.name} expects a {key.kind}, got {text!r}") from None
    if key.kind == "complex":
        return parse_complex(text, where)
    if key.kind == "bool":
        low = text.strip().lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"{where}: {key.name} expects true/false, got {text!r}")
    if key.kind == "emit":
        names = tuple(s.strip() for s in text.split(",") if s.strip())
        bad = [n for n in names if n not in EMIT_NAMES]
        if bad:
            raise ConfigError(f"{where}: unknown emit item(s) {', '.join(bad)}; known: {', '.join(EMIT_NAMES)}")
        return names
    if key.kind == "criterion":
        if text not in PRESETS:
            raise ConfigError(f"{where}: unknown criterion {text!r}; known: {', '.join(PRESETS)}")
        return text
    return text


def read_config_file(path) -> dict[str, tuple[str, str]]:
    """key -> (raw value, 'file:line') for a flat key = value file."""
    out: dict[str, tuple[str, str]] = {}
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config file: {exc.strerror}") from None
    for n, line in enumerate(lines, start=1):
        where = f"{path}:{n}"
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"{where}: expected 'key = value', got {line.strip()!r}")
        key, value = (s.strip() for s in body.split("=", 1))
        key = key.replace("-", "_")
        if key not in KEY_BY_NAME:
            raise ConfigError(f"{where}: unknown key {key!r}")
        if key in out:
            raise ConfigError(f"{where}: duplicate key {key!r} (first set at {out[key][1]})")
        out[key] = (value, where)
    return out


def _overlay(base: dict, layer: dict) -> dict:
    merged = dict(base)
    for pair in EXCLUSIVE:
        set_here = [k for k in pair if k in layer]
        if len(set_here) == 2:
            raise ConfigError(f"{layer[pair[1]][1]}: {pair[0]} and {pair[1]} are mutually exclusive")
        if set_here:
            for k in pair:
                merged.pop(k, None)
    merged.update(layer)
    return merged


@dataclass(frozen=True, eq=False)
class RunConfig:
    values: dict
    raw: dict = field(default_factory=dict)
    sources: dict = field(default_factory=dict)

    def __getattr__(self, name):
        if name in ("values", "raw", "sources"):
            raise AttributeError(name)
        try:
            return self.values[name]
        except KeyError:
            raise AttributeError(name) from None

    @classmethod
    def from_layers(cls, file_values: dict | None = None, flag_values: dict | None = None) -> RunConfig:
        """Defaults, then file values, then flags; each value is (raw text, source)."""
        merged = {k.name: (k.default, "default") for k in KEYS if k.default is not None}
        merged = _overlay(merged, file_values or {})
        merged = _overlay(merged, flag_values or {})
        values = {k.name: None for k in KEYS}
        for name, (text, where) in merged.items():
            values[name] = _parse_value(KEY_BY_NAME[name], text, where)
        cfg = cls(values, {n: t for n, (t, _) in merged.items()}, {n: w for n, (_, w) in merged.items()})
        cfg._check()
        return cfg

    @classmethod
    def from_mapping(cls, mapping: dict) -> RunConfig:
        """Programmatic construction; values are given as their textual form."""
        return cls.from_layers(flag_values={k: (str(v), f"<{k}>") for k, v in mapping.items()})

    def _check(self):
        v = self.values
        for name in ("nr", "ntheta", "threads"):
            if v[name] < 1:
                raise ConfigError(f"{self.sources[name]}: {name} must be positive")
        if v["refine"] < 0:
            raise ConfigError(f"{self.sources['refine']}: refine must be >= 0")
        if v["tol"] < 0:
            raise ConfigError(f"{self.sources['tol']}: tol must be >= 0")

    def build_f(self) -> fc.AnalyticFunction:
        if self.values["f_coeffs"] is not None:
            return parse_coeffs(self.raw["f_coeffs"], self.sources["f_coeffs"], self.values["coeffs_truncated"])
        return parse_function(self.raw["f"], self.sources["f"])

    def build_g(self) -> fc.AnalyticFunction | None:
        if self.values["g_coeffs"] is not None:
            return parse_coeffs(self.raw["g_coeffs"], self.sources["g_coeffs"], self.values["coeffs_truncated"])
        if self.values["g"] is not None:
            return parse_function(self.raw["g"], self.sources["g"])
        return None

    def echo(self) -> dict:
        """Raw text of every reported key, in fixed order (None when unset)."""
        return {k.name: self.raw.get(k.name) for k in KEYS if k.echo}
