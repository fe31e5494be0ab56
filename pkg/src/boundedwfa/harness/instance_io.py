"""JSON instance documents.

::

    {"type": "mts" | "kserver",
     "metric": {"matrix": [[...]]} | {"points": [[...]]} | {"graph": [[p, q, w], ...]},
     "k": int,                      # kserver only
     "initial": [ints],             # one state (mts) or k points (kserver)
     "requests": [[reals]] | [ints],
     "id": str, "meta": {...}}      # optional

MTS costs may be the strings "inf"/"Infinity" (or a JSON Infinity literal).
"""

from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path

from ..kserver import KServerInstance
from ..metric import MetricError, metric_from_graph, metric_from_points, validate_metric
from ..mts import InstanceError, MtsInstance

METRIC_FORMS = ("matrix", "points", "graph")
TOP_KEYS = {"type", "metric", "k", "initial", "requests", "id", "meta"}


class SchemaError(ValueError):
    def __init__(self, location: str, message: str):
        self.location = location
        super().__init__(f"{location}: {message}")


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _is_num(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def _cost(x, where):
    if isinstance(x, str) and x.strip().lower() in ("inf", "infinity", "+inf"):
        return math.inf
    if not _is_num(x):
        raise SchemaError(where, f"expected a number, got {x!r}")
    return float(x)


def _metric(obj):
    if not isinstance(obj, dict):
        raise SchemaError("metric", "must be an object")
    forms = [f for f in METRIC_FORMS if f in obj]
    extra = set(obj) - set(METRIC_FORMS)
    if extra:
        raise SchemaError("metric", f"unknown keys {sorted(extra)}")
    if len(forms) != 1:
        raise SchemaError("metric", f"exactly one of {METRIC_FORMS} required, found {forms}")
    form = forms[0]
    body = obj[form]
    if not isinstance(body, list) or not all(isinstance(r, list) for r in body):
        raise SchemaError(f"metric.{form}", "must be a list of lists")
    for i, row in enumerate(body):
        for j, v in enumerate(row):
            if not _is_num(v):
                raise SchemaError(f"metric.{form}[{i}][{j}]", f"expected a number, got {v!r}")
    try:
        if form == "matrix":
            return validate_metric(body)
        if form == "points":
            return metric_from_points(body)
        for i, e in enumerate(body):
            if len(e) != 3 or not (_is_int(e[0]) and _is_int(e[1])):
                raise SchemaError(f"metric.graph[{i}]", "edges are [p, q, weight] with integer endpoints")
        return metric_from_graph(body)
    except MetricError as exc:
        raise MetricError(exc.axiom, exc.indices, f"metric.{form}: {exc}") from None


def instance_from_document(doc: dict):
    if not isinstance(doc, dict):
        raise SchemaError("$", "top level must be an object")
    extra = set(doc) - TOP_KEYS
    if extra:
        raise SchemaError("$", f"unknown keys {sorted(extra)}")
    for key in ("type", "metric", "initial", "requests"):
        if key not in doc:
            raise SchemaError("$", f"missing key {key!r}")
    kind = doc["type"]
    if kind not in ("mts", "kserver"):
        raise SchemaError("type", f"must be 'mts' or 'kserver', got {kind!r}")
    space = _metric(doc["metric"])
    initial = doc["initial"]
    if _is_int(initial):
        initial = [initial]
    if not isinstance(initial, list) or not all(_is_int(p) for p in initial):
        raise SchemaError("initial", "must be a list of integers")
    for i, p in enumerate(initial):
        if not 0 <= p < space.n:
            raise SchemaError(f"initial[{i}]", f"index {p} out of range [0, {space.n})")
    requests = doc["requests"]
    if not isinstance(requests, list):
        raise SchemaError("requests", "must be a list")
    if kind == "mts":
        if "k" in doc:
            raise SchemaError("k", "not allowed for mts instances")
        if len(initial) != 1:
            raise SchemaError("initial", "mts instances take exactly one initial state")
        rows = []
        for i, req in enumerate(requests):
            if not isinstance(req, list) or len(req) != space.n:
                raise SchemaError(f"requests[{i}]", f"must be a list of {space.n} costs")
            rows.append([_cost(v, f"requests[{i}][{j}]") for j, v in enumerate(req)])
            if any(v < 0 for v in rows[-1]):
                raise SchemaError(f"requests[{i}]", "costs must be >= 0")
        try:
            return MtsInstance(space, initial[0], rows)
        except InstanceError as exc:
            raise SchemaError("$", str(exc)) from None
    k = doc.get("k")
    if not _is_int(k) or k < 1:
        raise SchemaError("k", f"must be a positive integer, got {k!r}")
    if len(initial) != k:
        raise SchemaError("initial", f"has {len(initial)} positions, expected k={k}")
    for i, r in enumerate(requests):
        if not _is_int(r):
            raise SchemaError(f"requests[{i}]", f"expected a point index, got {r!r}")
        if not 0 <= r < space.n:
            raise SchemaError(f"requests[{i}]", f"index {r} out of range [0, {space.n})")
    return KServerInstance(space, k, tuple(initial), tuple(requests))


def load_instance(text: str):
    """Parse and fully validate a JSON instance document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"line {exc.lineno} col {exc.colno}", exc.msg) from None
    return instance_from_document(doc)


def read_instance(path):
    return load_instance(Path(path).read_text(encoding="utf-8"))


def instance_to_document(instance, instance_id: str | None = None) -> dict:
    """Serialize with the explicit ``matrix`` form."""
    doc: dict = {"type": "kserver" if isinstance(instance, KServerInstance) else "mts"}
    doc["metric"] = {"matrix": instance.space.dist.tolist()}
    if isinstance(instance, KServerInstance):
        doc["k"] = instance.k
        doc["initial"] = list(instance.initial)
        doc["requests"] = list(instance.requests)
    else:
        doc["initial"] = [instance.initial]
        doc["requests"] = instance.requests.tolist()
    if instance_id is not None:
        doc["id"] = instance_id
    return doc


def document_id(doc: dict) -> str:
    if "id" in doc:
        return str(doc["id"])
    blob = json.dumps(doc, sort_keys=True).encode()
    return hashlib.sha1(blob).hexdigest()[:12]
