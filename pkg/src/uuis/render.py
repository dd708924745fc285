"""Shared output rendering: CSV and self-contained printable documents.

Both renderings are deterministic functions of their inputs so re-exports
of unchanged data are byte-identical.
"""

from __future__ import annotations

import csv
import html
import io


def _cell(value) -> str:
    return "" if value is None else str(value)


def to_csv(columns: list[str], rows: list[dict]) -> str:
    """Comma-separated, double-quote quoted, with a header row."""
    out = io.StringIO()
    writer = csv.writer(out, quoting=csv.QUOTE_MINIMAL, quotechar='"')
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row.get(c)) for c in columns])
    return out.getvalue()


def to_printable(title: str, description: str, columns: list[str],
                 rows: list[dict]) -> str:
    """Standalone printable HTML document mirroring the displayed data."""
    parts = [
        "<!DOCTYPE html>",
        "<html><head><meta charset='utf-8'>",
        f"<title>{html.escape(title)}</title>",
        "<style>body{font-family:sans-serif}table{border-collapse:collapse}"
        "td,th{border:1px solid #666;padding:4px 8px}</style>",
        "</head><body>",
        f"<h1>{html.escape(title)}</h1>",
        f"<p>{html.escape(description)}</p>",
    ]
    if rows:
        parts.append("<table><thead><tr>")
        parts.extend(f"<th>{html.escape(c)}</th>" for c in columns)
        parts.append("</tr></thead><tbody>")
        for row in rows:
            parts.append("<tr>" + "".join(
                f"<td>{html.escape(_cell(row.get(c)))}</td>" for c in columns)
                + "</tr>")
        parts.append("</tbody></table>")
        parts.append(f"<p>{len(rows)} row(s)</p>")
    else:
        parts.append("<p>zero matches</p>")
    parts.append("</body></html>")
    return "\n".join(parts)
