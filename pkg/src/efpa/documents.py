"""JSON documents for instances and allocations."""

from __future__ import annotations

import json
from typing import Any

from .core import Allocation, Instance, UsageError, check_allocation

INSTANCE_KEYS = {"utilities", "agents", "resources"}
ALLOCATION_KEYS = {"owner"}


def _is_int(x: Any) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def instance_from_dict(doc: Any) -> Instance:
    if not isinstance(doc, dict):
        raise UsageError("instance document must be a JSON object")
    unknown = set(doc) - INSTANCE_KEYS
    if unknown:
        raise UsageError(f"unknown keys in instance document: {sorted(unknown)}")
    if "utilities" not in doc:
        raise UsageError('instance document needs "utilities"')
    rows = doc["utilities"]
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise UsageError('"utilities" must be an array of arrays')
    for row in rows:
        if not all(_is_int(x) for x in row):
            raise UsageError("utilities must be integers")
    for key in ("agents", "resources"):
        if key in doc and not (isinstance(doc[key], list) and all(isinstance(s, str) for s in doc[key])):
            raise UsageError(f'"{key}" must be an array of strings')
    return Instance(rows, agent_labels=doc.get("agents"), resource_labels=doc.get("resources"))


def instance_to_dict(instance: Instance) -> dict:
    doc: dict[str, Any] = {"utilities": [list(r) for r in instance.utilities]}
    if instance.agent_labels is not None:
        doc["agents"] = list(instance.agent_labels)
    if instance.resource_labels is not None:
        doc["resources"] = list(instance.resource_labels)
    return doc


def dumps_instance(instance: Instance) -> str:
    return json.dumps(instance_to_dict(instance))


def loads_instance(text: str) -> Instance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"invalid JSON: {exc}") from None
    return instance_from_dict(doc)


def allocation_from_dict(doc: Any, instance: Instance) -> Allocation:
    if not isinstance(doc, dict):
        raise UsageError("allocation document must be a JSON object")
    unknown = set(doc) - ALLOCATION_KEYS
    if unknown:
        raise UsageError(f"unknown keys in allocation document: {sorted(unknown)}")
    owner = doc.get("owner")
    if not isinstance(owner, list):
        raise UsageError('"owner" must be an array')
    for o in owner:
        if o is not None and not (_is_int(o) and o >= 0):
            raise UsageError("owner entries must be non-negative integers or null")
    alloc = Allocation(owner)
    check_allocation(instance, alloc)
    return alloc


def allocation_to_dict(allocation: Allocation) -> dict:
    return {"owner": list(allocation.owner)}


def dumps_allocation(allocation: Allocation) -> str:
    return json.dumps(allocation_to_dict(allocation))


def loads_allocation(text: str, instance: Instance) -> Allocation:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"invalid JSON: {exc}") from None
    return allocation_from_dict(doc, instance)
