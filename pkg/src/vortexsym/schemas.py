"""JSON Schemas for every file the command line tool writes."""
from __future__ import annotations

import jsonschema

_VEC3 = {"type": "array", "items": {"type": "number"}, "minItems": 3, "maxItems": 3}
_NUM_OR_NULL = {"type": ["number", "null"]}

SCHEME = {
    "type": "object",
    "properties": {
        "group": {"enum": ["Dn", "T"]},
        "n": {"type": "integer", "minimum": 2},
        "fixed": {"enum": ["none", "poles", "cube"]},
    },
    "required": ["group", "fixed"],
    "additionalProperties": False,
}

RECORD = {
    "type": "object",
    "properties": {
        "name": {"type": "string"},
        "label": {"type": "string"},
        "kind": {"enum": ["min", "max", "saddle", "collision"]},
        "point": _VEC3,
        "chart": {"type": ["object", "null"]},
        "defining_root": _NUM_OR_NULL,
    },
    "required": ["name", "label", "kind", "point", "chart", "defining_root"],
    "additionalProperties": False,
}

CATALOG = {
    "type": "object",
    "properties": {
        "scheme": SCHEME,
        "n_vortices": {"type": "integer"},
        "records": {"type": "array", "items": RECORD},
        "roots": {"type": "object"},
    },
    "required": ["scheme", "n_vortices", "records"],
    "additionalProperties": False,
}

PORTRAIT = {
    "type": "object",
    "properties": {
        "scheme": SCHEME,
        "grid": {"type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2},
        "t_span": {"type": "number"},
        "tol": {"type": "number"},
        "color_key": {"type": "object", "additionalProperties": {"type": "string"}},
        "trajectories": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "seed": _VEC3,
                    "closed": {"type": "boolean"},
                    "label": {"enum": ["min-loop", "collision-loop", "separatrix", "unclassified"]},
                    "color": {"enum": ["green", "blue", "black", "red", "purple", "orange"]},
                    "period": _NUM_OR_NULL,
                    "n_points": {"type": "integer", "minimum": 1},
                    "file": {"type": "string"},
                },
                "required": ["seed", "closed", "label", "color", "period", "n_points", "file"],
                "additionalProperties": False,
            },
        },
    },
    "required": ["scheme", "grid", "t_span", "tol", "color_key", "trajectories"],
    "additionalProperties": False,
}

SIMULATION = {
    "type": "object",
    "properties": {
        "n_vortices": {"type": "integer", "minimum": 2},
        "t_end": {"type": "number"},
        "tol": {"type": "number"},
        "samples": {"type": "integer"},
        "energy0": {"type": "number"},
        "energy_drift": {"type": "number"},
        "relative_energy_drift": {"type": "number"},
        "momentum0": _VEC3,
        "momentum_drift": {"type": "number"},
        "max_position_drift": {"type": "number"},
        "min_distance": {"type": "number"},
        "near_collision": {"type": "boolean"},
        "scheme": {"oneOf": [SCHEME, {"type": "null"}]},
    },
    "required": ["n_vortices", "t_end", "tol", "energy_drift", "relative_energy_drift",
                 "momentum_drift", "near_collision"],
    "additionalProperties": False,
}

ORBIT = {
    "type": "object",
    "properties": {
        "scheme": SCHEME,
        "orbits": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "u0": _VEC3,
                    "energy": {"type": "number"},
                    "period": {"type": "number", "exclusiveMinimum": 0},
                    "closure_error": {"type": "number"},
                    "regularized_period": _NUM_OR_NULL,
                    "time_factor": _NUM_OR_NULL,
                    "lift_residual": {"type": "number"},
                    "lift_energy_drift": {"type": "number"},
                    "lift_momentum": {"type": "number"},
                    "reduced_file": {"type": "string"},
                    "lifted_file": {"type": "string"},
                },
                "required": ["u0", "energy", "period", "closure_error", "reduced_file", "lifted_file"],
                "additionalProperties": False,
            },
        },
        "center": {"type": ["string", "null"]},
        "failure_energy": _NUM_OR_NULL,
    },
    "required": ["scheme", "orbits"],
    "additionalProperties": False,
}

VERIFY = {
    "type": "object",
    "properties": {
        "passed": {"type": "boolean"},
        "seed": {"type": "integer"},
        "checks": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "section": {"type": "string"},
                    "name": {"type": "string"},
                    "passed": {"type": "boolean"},
                    "value": {"type": ["number", "string"]},
                    "threshold": {"type": "number"},
                    "measure": {"type": "string"},
                },
                "required": ["section", "name", "passed", "value", "threshold", "measure"],
                "additionalProperties": False,
            },
        },
    },
    "required": ["passed", "checks"],
    "additionalProperties": False,
}


_POS = {"type": "number", "exclusiveMinimum": 0}
_TRIPLE = {"oneOf": [{"type": "string"}, _VEC3]}

RUN_CONFIG = {
    "type": "object",
    "properties": {
        "group": {"enum": ["Dn", "T"]},
        "n": {"type": "integer", "minimum": 1},
        "fixed": {"enum": ["none", "poles", "cube"]},
        "grid": {"oneOf": [{"type": "string"},
                           {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 2, "maxItems": 2}]},
        "tspan": _POS,
        "tol": _POS,
        "jobs": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
        "out": {"type": "string"},
        "section": {"oneOf": [{"type": "string"}, {"type": "array", "items": {"type": "string"}}]},
        "u0": _TRIPLE,
        "input": {"type": "string"},
        "view": _TRIPLE,
        "center": {"type": "string"},
        "regularized": {"type": "boolean"},
        "samples": {"type": "integer", "minimum": 1},
    },
    "additionalProperties": False,
}


def validate(document, schema) -> None:
    """Raise ``jsonschema.ValidationError`` if ``document`` does not match."""
    jsonschema.validate(document, schema)
