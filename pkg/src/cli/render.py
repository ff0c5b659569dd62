"""Table, CSV and JSON renderings of command results; floats are printed with repr."""

import csv
import io
import json
from typing import Any, Dict, List, Sequence

from utils.json_utils import clean_dict_for_json


def format_value(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _cells(columns: Sequence[str], rows: Sequence[Dict[str, Any]]) -> List[List[str]]:
    return [[format_value(row.get(col)) for col in columns] for row in rows]


def render_table(columns: Sequence[str], rows: Sequence[Dict[str, Any]]) -> str:
    cells = _cells(columns, rows)
    widths = [max([len(col)] + [len(r[k]) for r in cells]) for k, col in enumerate(columns)]
    lines = ["  ".join(col.ljust(w) for col, w in zip(columns, widths)).rstrip(),
             "  ".join("-" * w for w in widths)]
    lines += ["  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip() for r in cells]
    return "\n".join(lines) + "\n"


def render_csv(columns: Sequence[str], rows: Sequence[Dict[str, Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    writer.writerows(_cells(columns, rows))
    return buffer.getvalue()


def render_json(result: Dict[str, Any]) -> str:
    return json.dumps(clean_dict_for_json(result), indent=2, ensure_ascii=False) + "\n"


def render(result: Dict[str, Any], output_format: str) -> str:
    """
    Render a result dictionary.

    Error results render as their JSON document in json format and as one
    ``error: ...`` line otherwise.
    """
    if output_format == "json":
        return render_json(result)
    if not result.get("success", False) and "rows" not in result:
        return f"error: {result.get('error', 'unknown error')}\n"
    columns = result.get("columns", [])
    rows = result.get("rows", [])
    if output_format == "csv":
        return render_csv(columns, rows)
    return render_table(columns, rows)
