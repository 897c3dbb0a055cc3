"""Input documents: matrices, ideals, configurations, campaigns.

All documents are JSON objects with a fixed field set; unknown fields are
rejected so that typos fail loudly.  Polynomial strings use the expression
grammar from the parser module; rationals are accepted as integers or
"p/q" strings.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .configurations import ConfigurationMatrix
from .errors import ValidationError
from .fields import QQ
from .jets import IdealGens
from .matrices import PolyMatrix
from .poly import parse_poly


def _check_fields(doc, allowed, what):
    if not isinstance(doc, dict):
        raise ValidationError(f"{what} document must be a JSON object")
    unknown = set(doc) - set(allowed)
    if unknown:
        raise ValidationError(f"unknown fields in {what} document: {sorted(unknown)}")


def _rational(v):
    if isinstance(v, bool):
        raise ValidationError(f"bad rational {v!r}")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        try:
            return Fraction(v)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValidationError(f"bad rational {v!r}") from exc
    raise ValidationError(f"bad rational {v!r}")


def matrix_from_doc(doc) -> PolyMatrix:
    """{"vars": [names...], "rows": [[poly strings...], ...]}"""
    _check_fields(doc, {"vars", "rows"}, "matrix")
    if "vars" not in doc or "rows" not in doc:
        raise ValidationError("matrix document needs 'vars' and 'rows'")
    variables = tuple(doc["vars"])
    if not variables or not all(isinstance(v, str) for v in variables):
        raise ValidationError("'vars' must be a nonempty list of names")
    if len(set(variables)) != len(variables):
        raise ValidationError("duplicate variable names")
    rows = doc["rows"]
    if not isinstance(rows, list) or not rows:
        raise ValidationError("'rows' must be a nonempty list")
    entries = []
    for row in rows:
        if not isinstance(row, list) or not row:
            raise ValidationError("each row must be a nonempty list of polynomial strings")
        entries.append([parse_poly(text, variables, QQ) for text in row])
    return PolyMatrix(entries)


def ideal_from_doc(doc) -> IdealGens:
    """{"vars": [names...], "generators": [poly strings...]}"""
    _check_fields(doc, {"vars", "generators"}, "ideal")
    if "vars" not in doc or "generators" not in doc:
        raise ValidationError("ideal document needs 'vars' and 'generators'")
    variables = tuple(doc["vars"])
    gens = doc["generators"]
    if not isinstance(gens, list) or not gens:
        raise ValidationError("'generators' must be a nonempty list")
    return IdealGens(tuple(parse_poly(text, variables, QQ) for text in gens))


def configuration_from_doc(doc) -> ConfigurationMatrix:
    """Either {"d_matrix": [[rationals...], ...]} or
    {"graph": {"vertices": V, "edges": [[a, b], ...]}}."""
    _check_fields(doc, {"d_matrix", "graph"}, "configuration")
    if ("d_matrix" in doc) == ("graph" in doc):
        raise ValidationError("configuration document needs exactly one of 'd_matrix' or 'graph'")
    if "d_matrix" in doc:
        rows = doc["d_matrix"]
        if not isinstance(rows, list) or not rows:
            raise ValidationError("'d_matrix' must be a nonempty list of rows")
        return ConfigurationMatrix.from_rows([[_rational(v) for v in row] for row in rows])
    graph = doc["graph"]
    _check_fields(graph, {"vertices", "edges"}, "graph")
    if "vertices" not in graph or "edges" not in graph:
        raise ValidationError("graph needs 'vertices' and 'edges'")
    edges = [tuple(e) for e in graph["edges"]]
    if any(len(e) != 2 for e in edges):
        raise ValidationError("edges must be pairs")
    return ConfigurationMatrix.from_graph(int(graph["vertices"]), edges)


def campaign_from_doc(doc):
    """{"name": ..., "inputs": {name: {"matrix"|"ideal"|"configuration": {...}}},
    "tasks": [{"name": ..., "kind": ..., ...params}]}"""
    from .harness import Campaign, Task

    _check_fields(doc, {"name", "inputs", "tasks"}, "campaign")
    if "tasks" not in doc:
        raise ValidationError("campaign document needs 'tasks'")
    inputs = {}
    for name, spec in (doc.get("inputs") or {}).items():
        _check_fields(spec, {"matrix", "ideal", "configuration"}, f"input {name!r}")
        if len(spec) != 1:
            raise ValidationError(f"input {name!r} must have exactly one of matrix/ideal/configuration")
        ((kind, body),) = spec.items()
        if kind == "matrix":
            inputs[name] = ("matrix", matrix_from_doc(body))
        elif kind == "ideal":
            inputs[name] = ("ideal", ideal_from_doc(body))
        else:
            inputs[name] = ("configuration", configuration_from_doc(body))
    tasks = []
    for t in doc["tasks"]:
        if not isinstance(t, dict) or "name" not in t or "kind" not in t:
            raise ValidationError("each task needs 'name' and 'kind'")
        params = {k: v for k, v in t.items() if k not in ("name", "kind")}
        tasks.append(Task.make(t["name"], t["kind"], **params))
    return Campaign.make(doc.get("name", "custom"), inputs, tasks)


def load_json(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path} is not valid JSON: {exc}") from exc
