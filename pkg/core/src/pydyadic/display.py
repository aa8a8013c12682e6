import csv
import io
import logging
import sys
from pathlib import Path

from pydyadic.storage import SCHEMA, dumps, plain

logger = logging.getLogger(__name__)

CSV_COLUMNS = ("series", "x", "averaged", "exact")


def _render_json(report):
    # rows are CSV material
    summary = {k: v for k, v in report.items() if k not in ("rows", "columns")}
    return dumps({"schema": SCHEMA, **summary})


def _csv_cell(value):
    if isinstance(value, float):
        return repr(value)
    return "" if value is None else value


def _render_csv(report):
    rows = report.get("rows")
    if rows is None:
        raise ValueError(f"Report {report.get('operation')!r} has no rows to write as CSV")
    columns = report.get("columns", CSV_COLUMNS)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in plain(rows):
        writer.writerow([_csv_cell(row.get(c)) for c in columns])
    return buffer.getvalue()


_RENDERERS = {
    "json": _render_json,
    "csv": _render_csv,
}


def render(report, format="json"):
    try:
        renderer = _RENDERERS[format]
    except KeyError:
        raise ValueError(f"format must be one of {sorted(_RENDERERS)}, not {format!r}") from None
    return renderer(report)


def display(report, target=None, format="json"):
    """
    Render a report and write it to `target`, a path, or to stdout when
    target is None.
    """
    if target is not None and not isinstance(target, (str, Path)):
        raise TypeError("target must be str, Path or None")
    text = render(report, format)
    if target is None:
        sys.stdout.write(text)
    else:
        Path(target).write_text(text)
        logger.info("Wrote %s report to %s", format, target)
    return text
