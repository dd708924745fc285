"""CSV upload parsing shared by the user and asset bulk importers.

Convention: UTF-8 (BOM tolerated), comma-separated, double-quote quoting,
CRLF or LF line endings, required header row, payloads capped at 2 MB.
"""

from __future__ import annotations

import csv
import io

from .errors import ServiceError

MAX_UPLOAD_BYTES = 2 * 1024 * 1024


def parse_csv_upload(data: bytes, expected_header: tuple[str, ...],
                     min_columns: int | None = None) -> list[dict]:
    """Parse an uploaded CSV into row dicts keyed by the expected header.

    The file's header must be `expected_header` or a prefix of it covering
    at least `min_columns` columns (trailing columns are optional). Every
    data row must match the file's own header width; omitted optional
    columns come back as None.
    """
    if len(data) > MAX_UPLOAD_BYTES:
        raise ServiceError("too-large",
                           f"upload exceeds {MAX_UPLOAD_BYTES // (1024 * 1024)} MB")
    if min_columns is None:
        min_columns = len(expected_header)
    try:
        text = data.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise ServiceError("invalid-input", f"CSV is not valid UTF-8: {exc}") from None
    reader = csv.reader(io.StringIO(text, newline=""))
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise ServiceError("invalid-input", "CSV is empty; header row required") from None
    if len(header) < min_columns or len(header) > len(expected_header) or \
            tuple(header) != expected_header[:len(header)]:
        raise ServiceError(
            "invalid-input",
            f"CSV header must be {','.join(expected_header)} (trailing optional"
            f" columns may be omitted); got {','.join(header)}")
    rows = []
    for lineno, raw in enumerate(reader, start=2):
        if not raw or (len(raw) == 1 and not raw[0].strip()):
            continue                      # ignore blank lines
        if len(raw) != len(header):
            raise ServiceError(
                "invalid-input",
                f"line {lineno}: expected {len(header)} columns, got {len(raw)}",
                detail={"line": lineno})
        row: dict = dict.fromkeys(expected_header)
        row.update(zip(header, (v.strip() for v in raw)))
        row["_line"] = lineno
        rows.append(row)
    return rows
