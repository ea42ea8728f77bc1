"""Tables for Fracrot: column definitions and CSV/JSON rendering of suite rows."""

import csv
import io
import json
import math

DERIVATIVE_COLUMNS = ("field", "kind", "axis", "alpha", "point_x", "point_y", "value")
TRANSFORM_COLUMNS = ("law", "axis", "alpha", "phi", "point_x", "point_y", "lhs", "rhs", "residual", "ratio", "passed")
SCAN_COLUMNS = ("expr_id", "alpha", "phi", "point_x", "point_y", "value", "deviation")
IDENTITY_COLUMNS = ("identity", "field", "phi", "residual", "passed")
FIT_COLUMNS = ("a", "degenerate", "point_x", "point_y", "drift_q1", "drift_q2", "passed")


def format_value(value, precision):
    """Render a cell: reals at ``precision`` significant digits, None as empty, booleans as words."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return f"{value:.{precision}g}"
    return str(value)


def _json_value(value, precision):
    if isinstance(value, float) and math.isfinite(value):
        return float(f"{value:.{precision}g}")
    if isinstance(value, float):
        return str(value)
    return value


def render_csv(columns, rows, precision=10):
    """CSV text with a header row; ``rows`` are mappings keyed by column."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(row.get(column), precision) for column in columns])
    return buffer.getvalue()


def render_json(columns, rows, precision=10, summary=None):
    """JSON document ``{"rows": [...], "summary": {...}}`` with keys in column order."""
    document = {"rows": [{column: _json_value(row.get(column), precision) for column in columns} for row in rows]}
    if summary is not None:
        document["summary"] = {key: _json_value(value, precision) for key, value in summary.items()}
    return json.dumps(document, indent=2) + "\n"


def render(columns, rows, output_format="csv", precision=10, summary=None):
    """Render rows in the requested format (``csv`` or ``json``)."""
    if output_format == "json":
        return render_json(columns, rows, precision, summary)
    return render_csv(columns, rows, precision)
