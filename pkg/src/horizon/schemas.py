"""Published JSON Schemas for the HTTP API responses.

Masses and all other real values are serialized as decimal strings with 17
significant digits so that clients can render exactly what the engine
computed; the schemas pin that down.
"""

from __future__ import annotations

REAL_STRING = {"type": "string", "pattern": r"^-?(\d+(\.\d+)?([eE][+-]?\d+)?)$"}

SOURCE = {
    "type": "object",
    "required": ["name", "confidence", "independent", "entry_path"],
    "properties": {
        "name": {"type": "string"},
        "confidence": {"enum": ["certain", "probable", "possible"]},
        "independent": {"type": "boolean"},
        "entry_path": {"enum": ["static_kb", "automated_feed", "manual"]},
        "timestamp": {"type": ["string", "null"]},
    },
    "additionalProperties": False,
}

MASS_ENTRY = {
    "type": "object",
    "required": ["set", "mass"],
    "properties": {
        "set": {"type": "array", "items": {"type": "string"}},
        "mass": REAL_STRING,
    },
    "additionalProperties": False,
}

NODE = {
    "type": "object",
    "required": [
        "node_id",
        "frame",
        "kind",
        "open_world",
        "masses",
        "source",
        "op",
        "inputs",
        "disabled",
        "inconclusive",
    ],
    "properties": {
        "node_id": {"type": "string"},
        "frame": {"type": "string"},
        "kind": {"enum": ["initial", "secondary"]},
        "open_world": {"type": "boolean"},
        "masses": {"type": "array", "items": MASS_ENTRY},
        "source": SOURCE,
        "op": {
            "type": "object",
            "required": ["kind"],
            "properties": {
                "kind": {
                    "enum": ["entered", "discounted", "auto_discounted", "translated", "fused"]
                },
                "rate": REAL_STRING,
                "rule": {"enum": ["dempster", "smets", "dependent"]},
                "path": {
                    "type": "array",
                    "items": {
                        "type": "array",
                        "items": {"type": "string"},
                        "minItems": 2,
                        "maxItems": 2,
                    },
                },
                "loss": REAL_STRING,
            },
            "additionalProperties": False,
        },
        "inputs": {"type": "array", "items": {"type": "string"}},
        "disabled": {"type": "boolean"},
        "conflict": REAL_STRING,
        "inconclusive": {"type": "boolean"},
        "request_inputs": {"type": "array", "items": {"type": "string"}},
    },
    "additionalProperties": False,
}

FRAMES_RESPONSE = {
    "type": "object",
    "required": ["frames"],
    "properties": {
        "frames": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "label", "propositions"],
                "properties": {
                    "id": {"type": "string"},
                    "label": {"type": "string"},
                    "propositions": {"type": "array", "items": {"type": "string"}},
                },
                "additionalProperties": False,
            },
        }
    },
    "additionalProperties": False,
}

RELATIONS_RESPONSE = {
    "type": "object",
    "required": ["relations"],
    "properties": {
        "relations": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["a", "b", "pairs"],
                "properties": {
                    "a": {"type": "string"},
                    "b": {"type": "string"},
                    "pairs": {
                        "type": "array",
                        "items": {
                            "type": "array",
                            "items": {"type": "string"},
                            "minItems": 2,
                            "maxItems": 2,
                        },
                    },
                },
                "additionalProperties": False,
            },
        }
    },
    "additionalProperties": False,
}

BOES_RESPONSE = {
    "type": "object",
    "required": ["nodes"],
    "properties": {"nodes": {"type": "array", "items": NODE}},
    "additionalProperties": False,
}

NODE_CREATED_RESPONSE = {
    "type": "object",
    "required": ["node_id"],
    "properties": {"node_id": {"type": "string"}},
    "additionalProperties": False,
}

CONCLUSION_RESPONSE = {
    "type": "object",
    "required": ["boe_id", "rows", "conflict", "unknown_mass"],
    "properties": {
        "boe_id": {"type": "string"},
        "conflict": REAL_STRING,
        "unknown_mass": REAL_STRING,
        "rows": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["statement", "support", "uncertainty", "against"],
                "properties": {
                    "statement": {"type": "array", "items": {"type": "string"}},
                    "support": REAL_STRING,
                    "uncertainty": REAL_STRING,
                    "against": REAL_STRING,
                },
                "additionalProperties": False,
            },
        },
    },
    "additionalProperties": False,
}

EXPLANATION_RESPONSE = {
    "type": "object",
    "required": ["conclusion_id", "entries", "most_influential", "least_influential", "exact", "method", "text"],
    "properties": {
        "conclusion_id": {"type": "string"},
        "most_influential": {"type": "string"},
        "least_influential": {"type": "string"},
        "exact": {"type": "boolean"},
        "method": {"enum": ["standalone_info", "leave_one_out"]},
        "text": {"type": "string"},
        "entries": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["boe_id", "source", "influence", "share"],
                "properties": {
                    "boe_id": {"type": "string"},
                    "source": {"type": "string"},
                    "influence": REAL_STRING,
                    "share": REAL_STRING,
                },
                "additionalProperties": False,
            },
        },
    },
    "additionalProperties": False,
}

META_RESPONSE = {
    "type": "object",
    "required": ["kb", "log_position", "auto_discount"],
    "properties": {
        "kb": {
            "type": "object",
            "required": ["name", "version", "created"],
            "properties": {
                "name": {"type": "string"},
                "version": {"type": "string"},
                "created": {"type": "string"},
            },
            "additionalProperties": False,
        },
        "log_position": {"type": "integer"},
        "auto_discount": {
            "type": "object",
            "required": ["enabled", "rate_certain", "rate_probable", "rate_possible"],
            "properties": {
                "enabled": {"type": "boolean"},
                "rate_certain": REAL_STRING,
                "rate_probable": REAL_STRING,
                "rate_possible": REAL_STRING,
            },
            "additionalProperties": False,
        },
    },
    "additionalProperties": False,
}

ERROR_RESPONSE = {
    "type": "object",
    "required": ["code", "message"],
    "properties": {
        "code": {"type": "string"},
        "message": {"type": "string"},
        "detail": {"type": "object"},
    },
    "additionalProperties": False,
}

RESPONSE_SCHEMAS = {
    "frames": FRAMES_RESPONSE,
    "relations": RELATIONS_RESPONSE,
    "boes": BOES_RESPONSE,
    "node": NODE,
    "node_created": NODE_CREATED_RESPONSE,
    "conclusion": CONCLUSION_RESPONSE,
    "explanation": EXPLANATION_RESPONSE,
    "meta": META_RESPONSE,
    "error": ERROR_RESPONSE,
}
