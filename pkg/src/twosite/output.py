"""CSV and JSON emission for record sequences.

Floats are written with a fixed number of significant digits and rows keep
the order they are given in, so identical runs produce identical bytes.
"""
import csv
import io
import json
import math
from dataclasses import fields, is_dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, TextIO, Type, Union

from .utils.formatting import DEFAULT_SIGNIFICANT_DIGITS, format_float

OUTPUT_FORMATS = ('csv', 'json')


def header(record_type: Type) -> List[str]:
    """Column names with a unit suffix, e.g. ``j1[h^2]``; text columns carry none."""
    columns = []
    for f in fields(record_type):
        unit = f.metadata.get('unit')
        columns.append(f"{f.name}[{unit}]" if unit else f.name)
    return columns


def _cell(value: Any, digits: int) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, (int, float)):
        return format_float(value, digits)
    if isinstance(value, (tuple, list)):
        return ";".join(str(v) for v in value)
    return "" if value is None else str(value)


def write_csv(records: Sequence[Any], stream: TextIO, record_type: Optional[Type] = None,
              digits: int = DEFAULT_SIGNIFICANT_DIGITS) -> int:
    """Write a header row and one row per record; returns the number of rows."""
    if record_type is None:
        if not records:
            raise ValueError("record_type is required for an empty record sequence")
        record_type = type(records[0])
    if not is_dataclass(record_type):
        raise TypeError(f"{record_type!r} is not a dataclass")
    names = [f.name for f in fields(record_type)]
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header(record_type))
    for record in records:
        writer.writerow([_cell(getattr(record, name), digits) for name in names])
    return len(records)


def _json_value(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, (tuple, list)):
        return [_json_value(v) for v in value]
    if isinstance(value, dict):
        return {key: _json_value(v) for key, v in value.items()}
    return value


def records_to_dicts(records: Sequence[Any]) -> List[Dict[str, Any]]:
    return [{f.name: _json_value(getattr(record, f.name)) for f in fields(record)} for record in records]


def write_json(records: Sequence[Any], stream: TextIO, summary: Optional[Dict[str, Any]] = None) -> int:
    """Write ``{"records": [...], "summary": {...}}``; non-finite floats become null."""
    document: Dict[str, Any] = {"records": records_to_dicts(records)}
    if summary is not None:
        document["summary"] = {key: _json_value(value) for key, value in summary.items()}
    json.dump(document, stream, indent=2, sort_keys=False, allow_nan=False)
    stream.write("\n")
    return len(records)


def render(records: Sequence[Any], fmt: str = 'csv', record_type: Optional[Type] = None,
           digits: int = DEFAULT_SIGNIFICANT_DIGITS, summary: Optional[Dict[str, Any]] = None) -> str:
    """Serialize records to a string in the requested format."""
    if fmt not in OUTPUT_FORMATS:
        raise ValueError(f"Invalid output format '{fmt}'. Allowed: {', '.join(OUTPUT_FORMATS)}")
    buffer = io.StringIO()
    if fmt == 'csv':
        write_csv(records, buffer, record_type, digits)
    else:
        write_json(records, buffer, summary)
    return buffer.getvalue()


def render_mapping(data: Dict[str, Any], fmt: str = 'csv', digits: int = DEFAULT_SIGNIFICANT_DIGITS) -> str:
    """Serialize a flat report: a one-row CSV or a JSON object."""
    if fmt not in OUTPUT_FORMATS:
        raise ValueError(f"Invalid output format '{fmt}'. Allowed: {', '.join(OUTPUT_FORMATS)}")
    buffer = io.StringIO()
    if fmt == 'csv':
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(list(data.keys()))
        writer.writerow([_cell(value, digits) for value in data.values()])
    else:
        json.dump(_json_value(data), buffer, indent=2, allow_nan=False)
        buffer.write("\n")
    return buffer.getvalue()


def write_text(text: str, path: Union[str, Path]) -> Path:
    path = Path(path).expanduser()
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', newline='') as handle:
        handle.write(text)
    return path
