"""Deterministic serialization helpers.

Every number leaving the package through the CLI is printed with 12
significant digits so that repeated runs produce byte-identical artifacts.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import InputError


def fmt_float(x: float) -> str:
    """Render a finite float with 12 significant digits ('-0' normalized to '0')."""
    x = float(x)
    if not math.isfinite(x):
        raise InputError(f"cannot serialize non-finite value {x!r}")
    s = format(x, ".12g")
    if s == "-0":
        s = "0"
    return s


def _render(obj, out: list[str], indent: int, level: int) -> None:
    pad = " " * (indent * level)
    pad_in = " " * (indent * (level + 1))
    if isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, (k, v) in enumerate(obj.items()):
            if not isinstance(k, str):
                raise InputError(f"JSON object keys must be strings, got {k!r}")
            out.append(f'{pad_in}"{k}": ')
            _render(v, out, indent, level + 1)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(pad + "}")
    elif isinstance(obj, (list, tuple)) or isinstance(obj, np.ndarray):
        items = obj.tolist() if isinstance(obj, np.ndarray) else list(obj)
        if not items:
            out.append("[]")
            return
        out.append("[\n")
        for i, v in enumerate(items):
            out.append(pad_in)
            _render(v, out, indent, level + 1)
            out.append(",\n" if i < len(items) - 1 else "\n")
        out.append(pad + "]")
    elif isinstance(obj, bool) or isinstance(obj, np.bool_):
        out.append("true" if obj else "false")
    elif obj is None:
        out.append("null")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(fmt_float(obj))
    elif isinstance(obj, str):
        out.append(_escape(obj))
    else:
        raise InputError(f"cannot serialize object of type {type(obj).__name__}")


def _escape(s: str) -> str:
    body = (
        s.replace("\\", "\\\\")
        .replace('"', '\\"')
        .replace("\n", "\\n")
        .replace("\r", "\\r")
        .replace("\t", "\\t")
    )
    return f'"{body}"'


def dumps(obj, indent: int = 2) -> str:
    """Serialize to JSON text with fixed float formatting and a trailing newline."""
    out: list[str] = []
    _render(obj, out, indent, 0)
    return "".join(out) + "\n"


def csv_cell(v) -> str:
    if isinstance(v, bool) or isinstance(v, np.bool_):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return fmt_float(v)
    return str(v)


def csv_lines(header: list[str], rows) -> str:
    """Render a CSV table (comma-separated, '\\n' line endings, trailing newline)."""
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(csv_cell(v) for v in row))
    return "\n".join(lines) + "\n"
