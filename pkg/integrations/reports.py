"""
Reports.

Turns scores, slice tables, agreement and prediction results into
versioned JSON payloads and plain-text tables.

Payloads are deterministic: fixed key order, floats rounded to 12
decimals, no timestamps.
"""

from typing import Any, Dict, List, Sequence

from core.diagnostics import SliceReport, SliceRow
from core.span_attributes import key_label

SCHEMA_VERSION = "1.0"
FLOAT_DIGITS = 12


# =============================================================================
# JSON Payloads
# =============================================================================

def _clean(value: Any) -> Any:
    """Round floats recursively so payload bytes are stable."""
    if isinstance(value, bool):
        return value
    if isinstance(value, float):
        rounded = round(value, FLOAT_DIGITS)
        return 0.0 if rounded == 0 else rounded
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    return value


def envelope(command: str, body: Dict[str, Any]) -> Dict[str, Any]:
    """Wrap a command result with schema version and command name."""
    payload = {"schema_version": SCHEMA_VERSION, "command": command}
    payload.update(body)
    return _clean(payload)


def slice_row_payload(row: SliceRow) -> Dict[str, Any]:
    return {
        "counts": {"tp": row.counts.tp, "fp": row.counts.fp, "fn": row.counts.fn},
        "summary": row.summary.as_dict(),
        "typology": row.typology.as_dict(),
    }


def slice_report_payload(report: SliceReport) -> Dict[str, Any]:
    """JSON body of a slice report; rows in sorted key order."""
    rows = []
    for key, row in report.rows.items():
        entry = {"key": dict(key), "label": key_label(key)}
        entry.update(slice_row_payload(row))
        rows.append(entry)
    return {
        "dims": list(report.dims),
        "rows": rows,
        "spurious": slice_row_payload(report.spurious),
        "total": slice_row_payload(report.total()),
    }


# =============================================================================
# Text Tables
# =============================================================================

def _format_table(header: Sequence[str], body: List[Sequence[str]]) -> str:
    widths = [len(h) for h in header]
    for row in body:
        widths = [max(w, len(cell)) for w, cell in zip(widths, row)]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(header, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    for row in body:
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
    return "\n".join(lines) + "\n"


def _recall_cell(row: SliceRow) -> str:
    return f"{row.summary.recall * 100:.2f} ({row.counts.gold})"


def render_slice_table(report: SliceReport) -> str:
    """Recall table: rows are the projection without ``quoted``, columns
    are quoted/unquoted when ``quoted`` is sliced on. Cells read
    ``recall% (support)``; empty buckets are shown as ``-``.
    """
    row_dims = [d for d in report.dims if d != "quoted"]
    columns = ["true", "false"] if "quoted" in report.dims else [None]
    column_names = {"true": "quoted", "false": "unquoted", None: "recall"}

    grid: Dict[tuple, Dict[Any, SliceRow]] = {}
    for key, row in report.rows.items():
        values = dict(key)
        row_key = tuple(values[d] for d in row_dims)
        grid.setdefault(row_key, {})[values.get("quoted")] = row

    header = list(row_dims) + [column_names[c] for c in columns]
    body = []
    for row_key in sorted(grid):
        cells = grid[row_key]
        body.append(list(row_key) + [_recall_cell(cells[c]) if c in cells else "-" for c in columns])

    total = report.total()
    footer = (
        f"overall recall {total.summary.recall * 100:.2f} over {total.counts.gold} spans; "
        f"spurious predictions {report.spurious.counts.fp}\n"
    )
    return _format_table(header or ["bucket"], body) + footer


def render_text(payload: Dict[str, Any], indent: int = 0) -> str:
    """Flatten a payload into ``key: value`` lines for terminal reading."""
    lines = []
    pad = "  " * indent
    for key, value in payload.items():
        if isinstance(value, dict):
            lines.append(f"{pad}{key}:")
            lines.append(render_text(value, indent + 1).rstrip("\n"))
        elif isinstance(value, list) and value and isinstance(value[0], dict):
            lines.append(f"{pad}{key}:")
            for item in value:
                lines.append(render_text(item, indent + 1).rstrip("\n"))
                lines.append(f"{pad}  --")
        else:
            if isinstance(value, float):
                value = f"{value:.4f}"
            lines.append(f"{pad}{key}: {value}")
    return "\n".join(line for line in lines if line) + "\n"
