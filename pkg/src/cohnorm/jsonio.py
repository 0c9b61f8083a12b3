"""Deterministic JSON emission with floats at 17 significant digits.

json.dumps formats floats with repr (shortest round-trip), which is
deterministic but not fixed-width; report files pin '%.17g' instead so that
identical runs are byte-identical regardless of interpreter version.
"""

import json
import math


def format_float(x):
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    if math.isnan(x):
        return '"nan"'
    return format(float(x), ".17g")


def dumps(obj, indent=None):
    return _emit(obj, indent, 0) + ("\n" if indent is not None else "")


def dump(obj, path, indent=2):
    with open(path, "w") as fh:
        fh.write(dumps(obj, indent=indent))


def load(path):
    with open(path) as fh:
        return json.load(fh)


def _emit(obj, indent, level):
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        items = [(json.dumps(str(k)), _emit(v, indent, level + 1)) for k, v in obj.items()]
        return _wrap(["%s: %s" % kv for kv in items], "{}", indent, level)
    if isinstance(obj, (list, tuple)):
        return _wrap([_emit(v, indent, level + 1) for v in obj], "[]", indent, level)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _wrap(parts, braces, indent, level):
    if not parts:
        return braces
    if indent is None:
        return braces[0] + ", ".join(parts) + braces[1]
    pad = " " * (indent * (level + 1))
    closing = " " * (indent * level) + braces[1]
    return braces[0] + "\n" + ",\n".join(pad + p for p in parts) + "\n" + closing
