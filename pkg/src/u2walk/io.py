"""CSV/JSON artifact writers and the matching CSV reader."""

from __future__ import annotations

import csv
import io
import json
from typing import Any, Iterable, Sequence

import numpy as np


def fmt(value: Any) -> str:
    """Shortest round-trip text for floats; ints and strings pass through."""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, np.integer):
        return str(int(value))
    return str(value)


def render_csv(meta: Sequence[tuple[str, Any]], header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    for key, value in meta:
        buf.write(f"# {key}: {fmt(value)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def render_json(payload: dict[str, Any]) -> str:
    return json.dumps(payload, sort_keys=True, indent=2, default=_json_default) + "\n"


def _json_default(obj: Any) -> Any:
    if hasattr(obj, "tolist"):
        return obj.tolist()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def parse_csv(text: str) -> tuple[dict[str, str], list[str], list[list[float | int]]]:
    """
    Inverse of :func:`render_csv`.

    Returns the metadata (values as raw strings), the column names and the rows.
    Cells that look like integers come back as ``int``; everything else as ``float``.
    """
    meta: dict[str, str] = {}
    body: list[str] = []
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition(":")
            meta[key.strip()] = value.strip()
        elif line.strip():
            body.append(line)
    reader = csv.reader(body)
    header = next(reader, [])
    rows = [[_cell(c) for c in row] for row in reader]
    return meta, header, rows


def _cell(text: str) -> float | int | str:
    for convert in (int, float):
        try:
            return convert(text)
        except ValueError:
            pass
    return text
