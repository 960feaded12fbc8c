"""Deterministic CSV helpers shared by the report objects and the CLI."""
from __future__ import annotations

from typing import Iterable, Sequence


def format_value(x, precision: int = 17) -> str:
    """Decimal form of one cell; bools and ints pass through bare.

    precision=17 means the shortest decimal that round-trips the float
    exactly (repr); smaller values round to that many significant digits.
    """
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, str):
        return x
    if isinstance(x, int):
        return str(x)
    if x is None:
        return ""
    if precision >= 17:
        return repr(float(x))
    return f"{float(x):.{precision}g}"


def render_csv(header: Sequence[str], rows: Iterable[Sequence],
               precision: int = 17) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format_value(x, precision) for x in row))
    return "\n".join(lines) + "\n"


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence],
              precision: int = 17) -> None:
    text = render_csv(header, rows, precision)
    with open(path, "w", newline="\n") as f:
        f.write(text)
