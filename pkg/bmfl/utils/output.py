"""
Result writers - CSV and JSON with fixed float formatting.

Floats are written with '%.17g', complex numbers as [re, im], matrices as
nested arrays; files are UTF-8 with LF line endings.
"""
import csv
import io
import json
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence

import numpy as np

FLOAT_FORMAT = "%.17g"


def format_float(value: float) -> str:
    return FLOAT_FORMAT % value


def to_plain(value: Any) -> Any:
    """Numpy scalars and arrays to Python scalars and nested lists; complex to [re, im]."""
    if isinstance(value, np.ndarray):
        return [to_plain(v) for v in value.tolist()]
    if isinstance(value, (list, tuple)):
        return [to_plain(v) for v in value]
    if isinstance(value, dict):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, (float, np.floating)):
        return float(value)
    return value


def _json_text(value: Any) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if not np.isfinite(value):
            return json.dumps(format_float(value))
        return format_float(value)
    if isinstance(value, list):
        return "[" + ", ".join(_json_text(v) for v in value) + "]"
    if isinstance(value, dict):
        return "{" + ", ".join(f"{json.dumps(k)}: {_json_text(v)}" for k, v in value.items()) + "}"
    return json.dumps(str(value), ensure_ascii=False)


def _csv_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format_float(value)
    if isinstance(value, (list, dict)):
        return _json_text(value)
    return str(value)


def render_csv(rows: Iterable[dict], columns: Sequence[str]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        plain = to_plain(row)
        writer.writerow([_csv_cell(plain.get(c)) for c in columns])
    return buffer.getvalue()


def render_json(rows: Iterable[dict], columns: Sequence[str]) -> str:
    """JSON array of objects with the CSV columns in order."""
    lines = []
    for row in rows:
        plain = to_plain(row)
        lines.append("  {" + ", ".join(f"{json.dumps(c)}: {_json_text(plain.get(c))}" for c in columns) + "}")
    if not lines:
        return "[]\n"
    return "[\n" + ",\n".join(lines) + "\n]\n"


def write_rows(rows: Sequence[dict], columns: Sequence[str], fmt: str = "csv",
               path: Optional[Path] = None, stream=None) -> None:
    """Write rows to `path`, or to `stream` when no path is given."""
    text = render_json(rows, columns) if fmt == "json" else render_csv(rows, columns)
    if path is not None:
        Path(path).write_bytes(text.encode("utf-8"))
    else:
        stream.write(text)
