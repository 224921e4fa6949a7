"""JSON codec for program and formula trees.

Nodes become ``{"node": "core_ir.Attention", <field>: ...}``. Rationals are
``{"rat": [numerator, denominator]}`` so they survive bit-exact; booleans,
tuples, letter sets and enum members carry their own tags so nothing is
confused with a plain number or list.
"""
from dataclasses import MISSING, fields, is_dataclass
from enum import Enum
from fractions import Fraction
from typing import Any, Dict
import json

from . import core_ir, logic
from .core_ir import canon
from .errors import SerializationError


def _tag(cls) -> str:
    return f"{cls.__module__.rsplit('.', 1)[-1]}.{cls.__name__}"


def _registry(*modules) -> Dict[str, type]:
    found = {}
    for module in modules:
        for obj in vars(module).values():
            if isinstance(obj, type) and obj.__module__ == module.__name__ \
                    and (is_dataclass(obj) or issubclass(obj, Enum)):
                found[_tag(obj) if is_dataclass(obj) else obj.__name__] = obj
    return found


_TYPES = _registry(core_ir, logic)


def to_json(obj) -> Any:
    if obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, bool):
        return {'bool': obj}
    if isinstance(obj, (int, Fraction)):
        obj = Fraction(obj)
        return {'rat': [obj.numerator, obj.denominator]}
    if isinstance(obj, Enum):
        return {'enum': type(obj).__name__, 'name': obj.name}
    if isinstance(obj, tuple):
        return {'tuple': [to_json(x) for x in obj]}
    if isinstance(obj, frozenset):
        return {'set': sorted(obj)}
    if is_dataclass(obj) and _tag(type(obj)) in _TYPES:
        data = {'node': _tag(type(obj))}
        for f in fields(obj):
            data[f.name] = to_json(getattr(obj, f.name))
        return data
    raise SerializationError(f"cannot serialize {type(obj).__name__}")


def from_json(data) -> Any:
    if data is None or isinstance(data, str):
        return data
    if not isinstance(data, dict):
        raise SerializationError(f"unexpected JSON value {data!r}")
    if 'node' in data:
        cls = _TYPES.get(data['node'])
        if cls is None:
            raise SerializationError(f"unknown node type {data['node']!r}")
        names = {f.name for f in fields(cls)}
        unknown = set(data) - names - {'node'}
        if unknown:
            raise SerializationError(f"{data['node']} has no field(s) {', '.join(sorted(unknown))}")
        missing = {f.name for f in fields(cls)
                   if f.default is MISSING and f.default_factory is MISSING} - set(data)
        if missing:
            raise SerializationError(f"{data['node']} is missing field(s) {', '.join(sorted(missing))}")
        return cls(**{k: from_json(v) for k, v in data.items() if k != 'node'})
    if 'rat' in data:
        try:
            numerator, denominator = data['rat']
            return canon(Fraction(numerator, denominator))
        except (TypeError, ValueError, ZeroDivisionError):
            raise SerializationError(f"bad rational {data['rat']!r}")
    if 'bool' in data:
        return bool(data['bool'])
    if 'tuple' in data:
        return tuple(from_json(x) for x in data['tuple'])
    if 'set' in data:
        return frozenset(data['set'])
    if 'enum' in data:
        cls = _TYPES.get(data['enum'])
        if cls is None:
            raise SerializationError(f"unknown enum {data['enum']!r}")
        return cls[data['name']]
    raise SerializationError(f"unrecognized JSON object with keys {sorted(data)}")


def dumps(obj, indent: int = 2) -> str:
    return json.dumps(to_json(obj), indent=indent)


def loads(text: str) -> Any:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise SerializationError(f"invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}")
    return from_json(data)
