"""JSON experiment configs: schema, parsing into models, and validation findings.

A config names exactly one model source, either a preset::

    {"model": {"preset": "two-spin"}, "task": "phase-diagram",
     "gammas": [0.01, 0.03, 0.1], "outputs": {"csv": "fig1.csv"}}

or an inline model, where matrices are nested rows of ``[re, im]`` pairs::

    {"model": {"direct": {"spectrum_a": [0, 1], "spectrum_b": [0, 1.3],
                          "couplings": [{"weight": 1.0,
                                         "v_a": [[[0, 0], [1, 0]], [[1, 0], [0, 0]]],
                                         "v_b": [[[0, 0], [1, 0]], [[1, 0], [0, 0]]]}]}},
     "task": "critical-temperature", "gamma": 0.01,
     "outputs": {"csv": "out.csv"}}

See README.md for every field.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import jsonschema
import numpy as np

from .dynamics import RESONANCE_TOL, TimeGrid
from .errors import SchemaError
from .models import PRESETS, Coupling, DirectModel, IndirectModel, Model, preset
from .operators import hermiticity_defect, HERMITIAN_RTOL

TASKS = ("phase-diagram", "negativity-curve", "critical-temperature", "evolve")

_number = {"type": "number"}
_entry = {"oneOf": [_number, {"type": "array", "items": _number, "minItems": 2, "maxItems": 2}]}
_matrix = {"type": "array", "minItems": 1, "items": {"type": "array", "minItems": 1, "items": _entry}}
_spectrum = {"type": "array", "minItems": 2, "items": _number}
_temperature = {"oneOf": [{"type": "number", "minimum": 0}, {"const": "inf"}]}

SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": ["model", "outputs"],
    "additionalProperties": False,
    "properties": {
        "model": {
            "type": "object",
            "minProperties": 1,
            "maxProperties": 3,
            "additionalProperties": False,
            "properties": {
                "preset": {"enum": list(PRESETS)},
                "omega": {"type": "number", "exclusiveMinimum": 0},
                "bath_coupling": {"enum": ["tridiagonal", "identity"]},
                "direct": {
                    "type": "object",
                    "required": ["spectrum_a", "spectrum_b", "couplings"],
                    "additionalProperties": False,
                    "properties": {
                        "spectrum_a": _spectrum,
                        "spectrum_b": _spectrum,
                        "couplings": {
                            "type": "array", "minItems": 1,
                            "items": {
                                "type": "object",
                                "required": ["v_a", "v_b"],
                                "additionalProperties": False,
                                "properties": {"weight": _number, "v_a": _matrix, "v_b": _matrix},
                            },
                        },
                    },
                },
                "indirect": {
                    "type": "object",
                    "required": ["spectrum_a", "spectrum_b", "spectrum_c", "v_a", "v_b", "v_c",
                                 "bath_temperature"],
                    "additionalProperties": False,
                    "properties": {
                        "spectrum_a": _spectrum, "spectrum_b": _spectrum, "spectrum_c": _spectrum,
                        "v_a": _matrix, "v_b": _matrix, "v_c": _matrix,
                        "bath_temperature": _temperature,
                    },
                },
            },
            "oneOf": [
                {"required": ["preset"], "not": {"anyOf": [{"required": ["direct"]},
                                                           {"required": ["indirect"]}]}},
                {"required": ["direct"], "not": {"anyOf": [{"required": ["preset"]},
                                                           {"required": ["indirect"]}]}},
                {"required": ["indirect"], "not": {"anyOf": [{"required": ["preset"]},
                                                             {"required": ["direct"]}]}},
            ],
        },
        "task": {"enum": list(TASKS)},
        "gamma": {"type": "number", "exclusiveMinimum": 0},
        "gammas": {"type": "array", "minItems": 1,
                   "items": {"type": "number", "exclusiveMinimum": 0}},
        "temperatures": {
            "type": "object",
            "minProperties": 1, "maxProperties": 1,
            "additionalProperties": False,
            "properties": {
                "values": {"type": "array", "minItems": 1, "items": _temperature},
                "grid": {
                    "type": "object",
                    "required": ["start", "stop", "num"],
                    "additionalProperties": False,
                    "properties": {"start": {"type": "number", "minimum": 0},
                                   "stop": {"type": "number", "minimum": 0},
                                   "num": {"type": "integer", "minimum": 1}},
                },
                "bracket": {"type": "array", "minItems": 2, "maxItems": 2,
                            "items": {"type": "number", "exclusiveMinimum": 0}},
            },
        },
        "horizon": {"oneOf": [
            {"const": "auto"},
            {"type": "object", "required": ["t_end", "steps"], "additionalProperties": False,
             "properties": {"t_end": {"type": "number", "exclusiveMinimum": 0},
                            "steps": {"type": "integer", "minimum": 1}}},
        ]},
        "horizon_multiplier": {"type": "number", "exclusiveMinimum": 0},
        "threshold": {"type": "number", "minimum": 0},
        "tolerance": {"type": "number", "exclusiveMinimum": 0},
        "outputs": {
            "type": "object",
            "required": ["csv"],
            "additionalProperties": False,
            "properties": {"csv": {"type": "string", "minLength": 1},
                           "svg": {"type": "string", "minLength": 1}},
        },
    },
}


@dataclass(frozen=True)
class Finding:
    level: str  # "error" | "warning"
    message: str

    def __str__(self) -> str:
        return f"{self.level}: {self.message}"


@dataclass
class ExperimentConfig:
    model: Model
    task: str = "phase-diagram"
    gammas: tuple[float, ...] = ()
    temperatures: tuple[float, ...] = ()
    bracket: tuple[float, float] | None = None
    grid: TimeGrid | None = None
    horizon_multiplier: float = 1.0
    threshold: float = 1e-10
    tolerance: float = 1e-3
    csv_path: str = "out.csv"
    svg_path: str | None = None


def load(path: str | Path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc})") from exc


def _matrix(raw) -> np.ndarray:
    rows = [[complex(x[0], x[1]) if isinstance(x, list) else complex(x) for x in row]
            for row in raw]
    if len({len(r) for r in rows}) != 1 or len(rows) != len(rows[0]):
        raise SchemaError("coupling matrices must be square")
    return np.array(rows, dtype=complex)


def _temperature(x) -> float:
    return math.inf if x == "inf" else float(x)


def _raw_matrices(model_cfg: dict) -> list[tuple[str, np.ndarray]]:
    out = []
    if "direct" in model_cfg:
        for i, c in enumerate(model_cfg["direct"]["couplings"]):
            out.append((f"model.direct.couplings[{i}].v_a", _matrix(c["v_a"])))
            out.append((f"model.direct.couplings[{i}].v_b", _matrix(c["v_b"])))
    elif "indirect" in model_cfg:
        for key in ("v_a", "v_b", "v_c"):
            out.append((f"model.indirect.{key}", _matrix(model_cfg["indirect"][key])))
    return out


def build_model(model_cfg: dict, gamma: float | None = None) -> Model:
    if "preset" in model_cfg:
        return preset(model_cfg["preset"], gamma, omega=model_cfg.get("omega", 1.0),
                      bath_coupling=model_cfg.get("bath_coupling", "tridiagonal"))
    g = 1.0 if gamma is None else gamma
    try:
        if "direct" in model_cfg:
            d = model_cfg["direct"]
            couplings = tuple(Coupling(c.get("weight", 1.0), _matrix(c["v_a"]), _matrix(c["v_b"]))
                              for c in d["couplings"])
            return DirectModel(d["spectrum_a"], d["spectrum_b"], couplings, gamma=g)
        d = model_cfg["indirect"]
        return IndirectModel(d["spectrum_a"], d["spectrum_b"], d["spectrum_c"], g,
                             _matrix(d["v_a"]), _matrix(d["v_b"]), _matrix(d["v_c"]),
                             _temperature(d["bath_temperature"]))
    except SchemaError:
        raise
    except (ValueError, IndexError) as exc:
        raise SchemaError(str(exc)) from exc


def schema_findings(raw: Any) -> list[Finding]:
    validator = jsonschema.Draft202012Validator(SCHEMA)
    return [Finding("error", f"{'/'.join(map(str, e.absolute_path)) or '<root>'}: {e.message}")
            for e in sorted(validator.iter_errors(raw), key=lambda e: list(map(str, e.path)))]


def _resonances(model: Model) -> list[float]:
    e = model.unperturbed_energies()
    v = model.with_gamma(1.0).coupling_operator()
    linked = np.abs(v) > 1e-12
    if model.coupling_order >= 2:
        linked |= np.abs(v @ v) > 1e-12
    np.fill_diagonal(linked, False)
    gaps = np.abs(np.subtract.outer(e, e))[linked]
    return sorted(set(np.round(gaps[gaps < 1e-6], 12)))


def validate(raw: Any) -> list[Finding]:
    """Schema errors, non-Hermitian couplings, resonances and timescale warnings."""
    findings = schema_findings(raw)
    if findings:
        return findings
    model_cfg = raw["model"]
    for name, m in _raw_matrices(model_cfg):
        if m.shape[0] != m.shape[1]:
            findings.append(Finding("error", f"{name} is not square"))
        elif hermiticity_defect(m) > HERMITIAN_RTOL:
            findings.append(Finding("error", f"{name} is not Hermitian"))
    if findings:
        return findings
    try:
        model = build_model(model_cfg, raw.get("gamma"))
    except SchemaError as exc:
        return [Finding("error", str(exc))]
    if _resonances(model):
        findings.append(Finding(
            "warning", "resonance: coupled unperturbed levels are degenerate "
                       "(|ΔE| < 1e-6); perturbative formulas do not apply"))
    if isinstance(model, IndirectModel):
        from .perturbative import timescale_ratio
        r = timescale_ratio(model)
        if 1 / 5 < r < 5:
            findings.append(Finding(
                "warning", f"bath/system timescale ratio {r:.3g} is within a factor 5 of unity; "
                           "neither timescale-separated formula applies"))
    task = raw.get("task", "phase-diagram")
    temps = raw.get("temperatures", {})
    if task == "negativity-curve" and "values" not in temps and "grid" not in temps:
        findings.append(Finding("error", "negativity-curve needs temperatures.values or .grid"))
    if task == "evolve" and "values" not in temps:
        findings.append(Finding("error", "evolve needs temperatures.values"))
    return findings


def parse(raw: Any) -> ExperimentConfig:
    """Validate and convert a raw config; raises SchemaError on any error finding."""
    errors = [f for f in validate(raw) if f.level == "error"]
    if errors:
        raise SchemaError("; ".join(f.message for f in errors))
    gammas = tuple(raw.get("gammas", ()))
    gamma = raw.get("gamma", gammas[0] if gammas else None)
    model = build_model(raw["model"], gamma)
    if not gammas:
        gammas = (model.gamma,)
    temps: tuple[float, ...] = ()
    bracket = None
    t_cfg = raw.get("temperatures", {})
    if "values" in t_cfg:
        temps = tuple(sorted(_temperature(x) for x in t_cfg["values"]))
    elif "grid" in t_cfg:
        g = t_cfg["grid"]
        temps = tuple(float(x) for x in np.linspace(g["start"], g["stop"], g["num"]))
    elif "bracket" in t_cfg:
        bracket = tuple(sorted(t_cfg["bracket"]))
    horizon = raw.get("horizon", "auto")
    grid = None if horizon == "auto" else TimeGrid(horizon["t_end"], horizon["steps"])
    return ExperimentConfig(
        model=model,
        task=raw.get("task", "phase-diagram"),
        gammas=tuple(sorted(gammas)),
        temperatures=temps,
        bracket=bracket,
        grid=grid,
        horizon_multiplier=raw.get("horizon_multiplier", 1.0),
        threshold=raw.get("threshold", 1e-10),
        tolerance=raw.get("tolerance", 1e-3),
        csv_path=raw["outputs"]["csv"],
        svg_path=raw["outputs"].get("svg"),
    )
