"""Flat rendering of results to CSV and JSON.

CSV uses ``,`` separators and LF line endings; a degenerate value appears as
``NA:<reason>``.  JSON documents have the shape::

    {"schema_version": 1, "kind": "<record kind>", "records": [{...}, ...]}

where a degenerate field is ``null`` and a sibling ``<field>_reason`` key
holds the reason.  Infinite values are the strings ``"inf"`` / ``"-inf"`` in
both formats.  Floats are rounded to ``digits`` significant digits so both
formats carry the same values.
"""

from __future__ import annotations

import csv
import io
import json
import math

from .measures import NA

SCHEMA_VERSION = 1


def format_float(value, digits=6):
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    if math.isnan(value):
        return "nan"
    return format(value, f".{digits}g")


def _csv_cell(value, digits):
    if isinstance(value, NA):
        return str(value)
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format_float(value, digits)
    if isinstance(value, tuple):
        return "".join(str(v) for v in value)
    return str(value)


def _json_record(record, digits):
    out = {}
    for key, value in record.items():
        if isinstance(value, NA):
            out[key] = None
            out[f"{key}_reason"] = value.reason
        elif isinstance(value, float):
            text = format_float(value, digits)
            out[key] = text if text in ("inf", "-inf", "nan") else float(text)
        elif isinstance(value, tuple):
            out[key] = "".join(str(v) for v in value)
        else:
            out[key] = value
    return out


def render_csv(records, digits=6):
    if not records:
        return ""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = list(records[0])
    writer.writerow(header)
    for rec in records:
        writer.writerow([_csv_cell(rec[k], digits) for k in header])
    return buf.getvalue()


def render_json(records, kind, digits=6):
    doc = {
        "schema_version": SCHEMA_VERSION,
        "kind": kind,
        "records": [_json_record(r, digits) for r in records],
    }
    return json.dumps(doc, indent=2) + "\n"


def render(records, fmt, kind, digits=6):
    if fmt == "json":
        return render_json(records, kind, digits)
    if fmt == "csv":
        return render_csv(records, digits)
    raise ValueError(f"unknown format {fmt!r}")
