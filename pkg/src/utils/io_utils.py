"""File output helpers: atomic writes and reproducible CSV text."""

import csv
import io
import os
import logging
import tempfile
from pathlib import Path
from typing import Iterable, List, Optional, Sequence

from src.errors import OutputError

logger = logging.getLogger(__name__)


def format_value(value) -> str:
    """17 significant digits for floats; -0.0 is written as 0."""
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, int):
        return str(value)
    value = float(value)
    if value == 0.0:
        return "0"
    return format(value, ".17g")


def render_csv(
    header: Sequence[str],
    rows: Iterable[Sequence],
    comments: Optional[List[str]] = None,
    header_comments: Optional[List[str]] = None,
) -> str:
    """CSV with a header row and '\\n' line endings.

    header_comments become '# ' lines above the header row, comments
    become '# ' lines after the last data row.
    """
    buffer = io.StringIO()
    for comment in header_comments or []:
        buffer.write(f"# {comment}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    for comment in comments or []:
        buffer.write(f"# {comment}\n")
    return buffer.getvalue()


def atomic_write_text(path: str, text: str) -> Path:
    """Write text to a temp file beside path, then rename it into place.

    On any failure the temp file is removed and path is left untouched.
    """
    target = Path(path)
    tmp_name = None
    try:
        fd, tmp_name = tempfile.mkstemp(prefix=f".{target.name}.", suffix=".tmp", dir=target.parent)
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp_name, target)
    except OSError as e:
        if tmp_name and os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise OutputError(f"Could not write {path}: {e}") from e

    logger.debug(f"Wrote {len(text)} characters to {target}")
    return target
