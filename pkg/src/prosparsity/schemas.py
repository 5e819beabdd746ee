"""JSON Schemas for the CLI's machine-readable reports.

Every ``--format json`` report validates against the schema registered
here under its command name; the test suite enforces it.  Text reports
render the same dictionaries, so numbers never diverge between formats.
"""

from __future__ import annotations

_NUMBER_OR_NULL = {"type": ["number", "null"]}

_TILE = {
    "type": "object",
    "properties": {"m": {"type": "integer"}, "n": {"type": "integer"}, "k": {"type": "integer"}},
    "required": ["m", "n", "k"],
}

_CYCLES = {
    "type": "object",
    "properties": {
        "dense": {"type": "integer"},
        "bitsparse": {"type": "integer"},
        "prosparse_compute": {"type": "integer"},
        "prosparse_total": {"type": "integer"},
    },
    "required": ["dense", "bitsparse", "prosparse_compute", "prosparse_total"],
}

_SPEEDUP = {
    "type": "object",
    "properties": {
        "vs_dense": {"type": "number"},
        "vs_bitsparse": {"type": "number"},
        "full_vs_dense": {"type": "number"},
        "full_vs_bitsparse": {"type": "number"},
    },
    "required": ["vs_dense", "vs_bitsparse", "full_vs_dense", "full_vs_bitsparse"],
}

_DENSITY_FIELDS = {
    "bit_density": {"type": "number"},
    "pro_density": {"type": "number"},
    "reduction": _NUMBER_OR_NULL,
    "em_fraction": {"type": "number"},
    "pm_fraction": {"type": "number"},
    "no_prefix_fraction": {"type": "number"},
}

VERIFY_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        "command": {"const": "verify"},
        "mode": {"enum": ["int8", "f32"]},
        "layers": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "name": {"type": "string"},
                    "M": {"type": "integer"},
                    "K": {"type": "integer"},
                    "N": {"type": "integer"},
                    "passed": {"type": "boolean"},
                    "max_relative_error": {"type": "number"},
                    "first_mismatch": {
                        "type": ["object", "null"],
                        "properties": {
                            "row": {"type": "integer"},
                            "col": {"type": "integer"},
                            "expected": {"type": "number"},
                            "got": {"type": "number"},
                        },
                        "required": ["row", "col", "expected", "got"],
                    },
                    "accumulations": {
                        "type": "object",
                        "properties": {
                            "prosparse": {"type": "integer"},
                            "bitsparse": {"type": "integer"},
                        },
                        "required": ["prosparse", "bitsparse"],
                    },
                },
                "required": ["name", "passed", "max_relative_error", "first_mismatch"],
            },
        },
        "all_passed": {"type": "boolean"},
    },
    "required": ["command", "mode", "layers", "all_passed"],
}

DENSITY_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        "command": {"const": "density"},
        "tile": _TILE,
        "layers": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {"name": {"type": "string"}, **_DENSITY_FIELDS},
                "required": ["name", *_DENSITY_FIELDS],
            },
        },
        "aggregate": {
            "type": "object",
            "properties": dict(_DENSITY_FIELDS),
            "required": list(_DENSITY_FIELDS),
        },
    },
    "required": ["command", "tile", "layers", "aggregate"],
}

SIMULATE_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        "command": {"const": "simulate"},
        "tile": _TILE,
        "pipeline": {
            "type": "object",
            "properties": {
                "prosparsity_stages": {"type": "integer"},
                "processor_stages": {"type": "integer"},
                "pe_width": {"type": "integer"},
            },
            "required": ["prosparsity_stages", "processor_stages", "pe_width"],
        },
        "layers": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "name": {"type": "string"},
                    "cycles": _CYCLES,
                    "speedup": _SPEEDUP,
                    "accumulations": {
                        "type": "object",
                        "properties": {
                            "dense": {"type": "integer"},
                            "bitsparse": {"type": "integer"},
                            "prosparse": {"type": "integer"},
                        },
                        "required": ["dense", "bitsparse", "prosparse"],
                    },
                    "traffic_bytes": {
                        "type": "object",
                        "properties": {
                            "spikes": {"type": "integer"},
                            "dense_weights": {"type": "integer"},
                            "bitsparse_weights": {"type": "integer"},
                            "prosparse_weights": {"type": "integer"},
                        },
                        "required": [
                            "spikes",
                            "dense_weights",
                            "bitsparse_weights",
                            "prosparse_weights",
                        ],
                    },
                },
                "required": ["name", "cycles", "speedup", "accumulations", "traffic_bytes"],
            },
        },
        "total": {
            "type": "object",
            "properties": {"cycles": _CYCLES, "speedup": _SPEEDUP},
            "required": ["cycles", "speedup"],
        },
    },
    "required": ["command", "tile", "pipeline", "layers", "total"],
}

DSE_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        "command": {"const": "dse"},
        "points": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "m": {"type": "integer"},
                    "k": {"type": "integer"},
                    "bit_density": {"type": "number"},
                    "pro_density": {"type": "number"},
                    "prosparsity_cycles": {"type": "integer"},
                    "bitsparse_cycles": {"type": "integer"},
                    "relative_latency": {"type": "number"},
                    "best": {"type": "boolean"},
                },
                "required": [
                    "m",
                    "k",
                    "bit_density",
                    "pro_density",
                    "prosparsity_cycles",
                    "bitsparse_cycles",
                    "relative_latency",
                    "best",
                ],
            },
        },
        "best": {
            "type": "object",
            "properties": {"m": {"type": "integer"}, "k": {"type": "integer"}},
            "required": ["m", "k"],
        },
        "monotonicity_checked": {"type": "boolean"},
    },
    "required": ["command", "points", "best", "monotonicity_checked"],
}

ORACLE_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        "command": {"const": "oracle"},
        "layers": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "name": {"type": "string"},
                    "rows": {"type": "integer"},
                    "agreement": {"type": "boolean"},
                    "first_disagreement": {
                        "type": ["object", "null"],
                        "properties": {
                            "row": {"type": "integer"},
                            "engine_prefix": {"type": ["integer", "null"]},
                            "oracle_prefix": {"type": ["integer", "null"]},
                        },
                        "required": ["row", "engine_prefix", "oracle_prefix"],
                    },
                    "one_prefix": {
                        "type": "object",
                        "properties": {
                            "pro_density": {"type": "number"},
                            "prefix_ratio": {"type": "number"},
                        },
                        "required": ["pro_density", "prefix_ratio"],
                    },
                    "two_prefix": {
                        "type": "object",
                        "properties": {
                            "pro_density": {"type": "number"},
                            "prefix_ratio": {"type": "number"},
                        },
                        "required": ["pro_density", "prefix_ratio"],
                    },
                    "forest": {
                        "type": "object",
                        "properties": {
                            "trees": {"type": "integer"},
                            "max_depth": {"type": "integer"},
                        },
                        "required": ["trees", "max_depth"],
                    },
                },
                "required": [
                    "name",
                    "rows",
                    "agreement",
                    "first_disagreement",
                    "one_prefix",
                    "two_prefix",
                    "forest",
                ],
            },
        },
        "all_agree": {"type": "boolean"},
    },
    "required": ["command", "layers", "all_agree"],
}

COST_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        "command": {"const": "cost"},
        "m": {"type": "integer"},
        "k": {"type": "integer"},
        "n": {"type": "integer"},
        "delta_s": {"type": "number"},
        "tcam_ops": {"type": "integer"},
        "sorter_ops": {"type": "number"},
        "pruner_ops": {"type": "number"},
        "saved_flops": {"type": "number"},
        "ratio": {"type": "number"},
        "ratio_full": {"type": "number"},
        "breakeven_delta_s": {"type": "number"},
    },
    "required": [
        "command",
        "m",
        "k",
        "n",
        "delta_s",
        "tcam_ops",
        "sorter_ops",
        "pruner_ops",
        "saved_flops",
        "ratio",
        "ratio_full",
        "breakeven_delta_s",
    ],
}

GEN_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        "command": {"const": "gen"},
        "spec": {
            "type": "object",
            "properties": {
                "kind": {"enum": ["bernoulli", "clustered"]},
                "m_total": {"type": "integer"},
                "k_total": {"type": "integer"},
                "density": {"type": "number"},
                "base_pattern_count": {"type": "integer"},
                "flip_probability": {"type": "number"},
                "seed": {"type": "integer"},
            },
            "required": ["kind", "m_total", "k_total", "density", "seed"],
        },
        "files": {
            "type": "object",
            "properties": {
                "spikes": {"type": "string"},
                "weights": {"type": ["string", "null"]},
                "manifest": {"type": "string"},
            },
            "required": ["spikes", "weights", "manifest"],
        },
    },
    "required": ["command", "spec", "files"],
}

SCHEMAS = {
    "verify": VERIFY_SCHEMA,
    "density": DENSITY_SCHEMA,
    "simulate": SIMULATE_SCHEMA,
    "dse": DSE_SCHEMA,
    "oracle": ORACLE_SCHEMA,
    "cost": COST_SCHEMA,
    "gen": GEN_SCHEMA,
}
