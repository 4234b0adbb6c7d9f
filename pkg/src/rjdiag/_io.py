"""Float formatting shared by the JSON and CSV writers.

Every double is written with 17 significant digits, which is enough for an
exact round trip through text.
"""

import json
import math


def fmt(x):
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite value {x!r}")
    return format(x, ".17g")


def dumps(obj, indent=None, _level=0):
    """Serialize nested dicts/lists/numbers/strings to JSON text.

    Works like :func:`json.dumps` except that floats use :func:`fmt`.  Lists of
    scalars are always written on one line.
    """
    if isinstance(obj, bool) or obj is None:
        return {True: "true", False: "false", None: "null"}[obj]
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return fmt(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if hasattr(obj, "tolist"):
        return dumps(obj.tolist(), indent, _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return _join("{", items, "}", indent, _level)
    if isinstance(obj, (list, tuple)):
        items = [dumps(v, indent, _level + 1) for v in obj]
        if indent is None or all(not isinstance(v, (list, tuple, dict)) for v in obj):
            return "[" + ", ".join(items) + "]"
        return _join("[", items, "]", indent, _level)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _join(open_, items, close, indent, level):
    if indent is None:
        return open_ + ", ".join(items) + close
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    return open_ + "\n" + ",\n".join(pad + it for it in items) + "\n" + end + close
