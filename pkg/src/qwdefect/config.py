"""Run configuration: one JSON document per run.

Example::

    {
      "schema": 1,
      "theta": "0.25pi",
      "defects": [{"position": 0, "phase": "0.5pi"}, {"position": 4, "phase": "0.5pi"}],
      "k_grid": {"min": "0.5pi", "max": "1.5pi", "count": 2000, "endpoints": false},
      "output": {"path": "fig5_N4.csv", "format": "csv"}
    }

Angles are radians when given as numbers, or multiples of pi when given as
strings such as ``"0.5pi"``, ``"-pi"`` or ``"pi"``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .errors import ConfigError, QWalkError
from .scattering import Defect
from .transfer import DefectStack
from .wavecore import Coin

SCHEMA_VERSION = 1

_PI_FORM = re.compile(r"^\s*([+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)?\s*\*?\s*pi\s*$")
_SIGN_PI = re.compile(r"^\s*([+-])\s*pi\s*$")

_TOP_KEYS = {
    "schema",
    "theta",
    "defects",
    "phase",
    "k_grid",
    "phases",
    "thetas",
    "simulation",
    "output",
}


def _fail(field_name, message, code):
    raise ConfigError(field_name, message, code)


def parse_angle(value: Any, field_name: str) -> float:
    """Radians from a number or a ``"<x>pi"`` string."""
    if isinstance(value, bool):
        _fail(field_name, "angle must be a number or '<x>pi' string", "E_ANGLE")
    if isinstance(value, (int, float)):
        x = float(value)
    elif isinstance(value, str):
        m = _SIGN_PI.match(value)
        if m:
            x = -np.pi if m.group(1) == "-" else np.pi
        else:
            m = _PI_FORM.match(value)
            if m:
                x = float(m.group(1) or 1.0) * np.pi
            else:
                try:
                    x = float(value)
                except ValueError:
                    _fail(field_name, f"cannot parse angle {value!r}", "E_ANGLE")
    else:
        _fail(field_name, f"cannot parse angle {value!r}", "E_ANGLE")
    if not np.isfinite(x):
        _fail(field_name, "angle must be finite", "E_ANGLE")
    return x


def _angle_list(value, field_name):
    if isinstance(value, dict):
        return _grid(value, field_name, band_check=False)
    if not isinstance(value, list) or not value:
        _fail(field_name, "expected a non-empty list or a {min, max, count} grid", "E_GRID")
    return np.array([parse_angle(v, f"{field_name}[{i}]") for i, v in enumerate(value)])


def _grid(spec, field_name, band_check):
    unknown = set(spec) - {"min", "max", "count", "endpoints"}
    if unknown:
        _fail(field_name, f"unknown keys {sorted(unknown)}", "E_UNKNOWN_KEY")
    try:
        lo = parse_angle(spec["min"], f"{field_name}.min")
        hi = parse_angle(spec["max"], f"{field_name}.max")
        count = spec["count"]
    except KeyError as e:
        _fail(field_name, f"missing {e.args[0]!r}", "E_GRID")
    if isinstance(count, bool) or not isinstance(count, int) or count < 1:
        _fail(f"{field_name}.count", "must be a positive integer", "E_GRID")
    if hi < lo:
        _fail(field_name, "max must not be below min", "E_GRID")
    endpoints = spec.get("endpoints", True)
    if not isinstance(endpoints, bool):
        _fail(f"{field_name}.endpoints", "must be true or false", "E_GRID")
    pts = np.linspace(lo, hi, count) if endpoints else np.linspace(lo, hi, count + 2)[1:-1]
    if band_check and (np.any(pts <= np.pi / 2) or np.any(pts >= 3 * np.pi / 2)):
        _fail(
            field_name,
            "grid leaves the propagating band (pi/2, 3pi/2) for left incidence",
            "E_K_BAND",
        )
    return pts


@dataclass
class SimOptions:
    k0: float
    sigma_k: float
    steps: int | None = None
    window: int | None = None
    n0: int | None = None


@dataclass
class RunConfig:
    theta: float
    defects: DefectStack | None = None
    phase: float | None = None
    k_grid: np.ndarray | None = None
    phases: np.ndarray | None = None
    thetas: np.ndarray | None = None
    simulation: SimOptions | None = None
    output_path: str | None = None
    output_format: str | None = None
    raw: dict = field(default_factory=dict, repr=False)

    @property
    def coin(self) -> Coin:
        return Coin(self.theta)

    def k_points(self) -> np.ndarray:
        if self.k_grid is not None:
            return self.k_grid
        return np.linspace(np.pi / 2, 3 * np.pi / 2, 2001 + 2)[1:-1]


def _int_field(value, field_name, code="E_INT"):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
        _fail(field_name, f"must be an integer, got {value!r}", code)
    return int(value)


def _parse_defects(value):
    if not isinstance(value, list):
        _fail("defects", "expected a list", "E_DEFECTS")
    out = []
    for i, item in enumerate(value):
        name = f"defects[{i}]"
        if isinstance(item, dict):
            unknown = set(item) - {"position", "phase"}
            if unknown:
                _fail(name, f"unknown keys {sorted(unknown)}", "E_UNKNOWN_KEY")
            if "position" not in item or "phase" not in item:
                _fail(name, "needs position and phase", "E_DEFECTS")
            pos, phase = item["position"], item["phase"]
        elif isinstance(item, list) and len(item) == 2:
            pos, phase = item
        else:
            _fail(name, "expected {position, phase} or [position, phase]", "E_DEFECTS")
        pos = _int_field(pos, f"{name}.position", "E_POSITION")
        out.append(Defect(pos, parse_angle(phase, f"{name}.phase")))
    return DefectStack(tuple(out))


def parse_config(doc: dict) -> RunConfig:
    """Validate a config document; raises :class:`ConfigError` naming the field."""
    if not isinstance(doc, dict):
        _fail("<root>", "config must be a JSON object", "E_ROOT")
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        _fail(sorted(unknown)[0], "unknown key", "E_UNKNOWN_KEY")
    if doc.get("schema") != SCHEMA_VERSION:
        _fail("schema", f"expected {SCHEMA_VERSION}, got {doc.get('schema')!r}", "E_SCHEMA")
    if "theta" not in doc:
        _fail("theta", "required", "E_THETA")
    theta = parse_angle(doc["theta"], "theta")
    if not 0.0 < theta < np.pi / 2:
        _fail("theta", f"coin angle {theta:.6g} outside (0, pi/2)", "E_THETA_RANGE")
    cfg = RunConfig(theta=theta, raw=doc)
    if "defects" in doc:
        try:
            cfg.defects = _parse_defects(doc["defects"])
        except QWalkError as e:
            _fail("defects", str(e), "E_DEFECTS")
    if "phase" in doc:
        cfg.phase = parse_angle(doc["phase"], "phase")
    if "k_grid" in doc:
        if not isinstance(doc["k_grid"], dict):
            _fail("k_grid", "expected {min, max, count}", "E_GRID")
        cfg.k_grid = _grid(doc["k_grid"], "k_grid", band_check=True)
    if "phases" in doc:
        cfg.phases = _angle_list(doc["phases"], "phases")
    if "thetas" in doc:
        cfg.thetas = _angle_list(doc["thetas"], "thetas")
        bad = (cfg.thetas <= 0) | (cfg.thetas >= np.pi / 2)
        if np.any(bad):
            _fail("thetas", "every coin angle must lie in (0, pi/2)", "E_THETA_RANGE")
    if "simulation" in doc:
        sim = doc["simulation"]
        if not isinstance(sim, dict):
            _fail("simulation", "expected an object", "E_SIM")
        unknown = set(sim) - {"k0", "sigma_k", "steps", "window", "n0"}
        if unknown:
            _fail("simulation", f"unknown keys {sorted(unknown)}", "E_UNKNOWN_KEY")
        if "k0" not in sim or "sigma_k" not in sim:
            _fail("simulation", "needs k0 and sigma_k", "E_SIM")
        sigma = sim["sigma_k"]
        if (
            isinstance(sigma, bool)
            or not isinstance(sigma, (int, float))
            or not 0.005 <= sigma <= 0.2
        ):
            _fail("simulation.sigma_k", "must lie in [0.005, 0.2]", "E_SIM")
        opts = SimOptions(k0=parse_angle(sim["k0"], "simulation.k0"), sigma_k=float(sigma))
        for key in ("steps", "window", "n0"):
            if sim.get(key) is not None:
                val = _int_field(sim[key], f"simulation.{key}")
                if key != "n0" and val < 1:
                    _fail(f"simulation.{key}", "must be positive", "E_SIM")
                setattr(opts, key, val)
        cfg.simulation = opts
    if "output" in doc:
        out = doc["output"]
        if not isinstance(out, dict) or set(out) - {"path", "format"}:
            _fail("output", "expected {path, format}", "E_OUTPUT")
        cfg.output_path = out.get("path")
        fmt = out.get("format")
        if fmt is not None and fmt not in ("csv", "json"):
            _fail("output.format", "must be csv or json", "E_OUTPUT")
        cfg.output_format = fmt
    return cfg


def load_config(path: str | Path) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        _fail("--config", f"cannot read {path}: {e.strerror}", "E_IO")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        _fail("--config", f"invalid JSON: {e.msg} at line {e.lineno}", "E_JSON")
    return parse_config(doc)
