"""CSV output with a reproducibility header.

Numbers are written with 17 significant digits so a float read back is the
same float. Output never depends on locale, time or platform: identical
inputs give byte-identical files.
"""

from __future__ import annotations

import csv
import io
import math
import sys
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence, Union


def format_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float) or hasattr(v, "__float__") and not isinstance(v, str):
        x = float(v)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return format(x, ".17g")
    return str(v)


def render_csv(rows: Iterable[Union[Mapping, Sequence]], schema: Sequence[str],
               comments: Sequence[str] = ()) -> str:
    """CSV text: ``# ``-prefixed comment lines, a header row, then the rows.

    A row is either a mapping keyed by column name (missing keys are blank)
    or a sequence in schema order.
    """
    buf = io.StringIO(newline="")
    for line in comments:
        for part in str(line).splitlines() or [""]:
            buf.write(f"# {part}\n".replace("# \n", "#\n"))
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(schema)
    for row in rows:
        if isinstance(row, Mapping):
            unknown = set(row) - set(schema)
            if unknown:
                raise ValueError(f"row has columns outside the schema: {sorted(unknown)}")
            w.writerow([format_value(row.get(c)) for c in schema])
        else:
            row = list(row)
            if len(row) != len(schema):
                raise ValueError(f"row has {len(row)} fields, schema has {len(schema)}")
            w.writerow([format_value(x) for x in row])
    return buf.getvalue()


def emit_csv(rows, schema: Sequence[str], path: Optional[Union[str, Path]] = None,
             comments: Sequence[str] = ()) -> None:
    """Write the table to ``path`` (UTF-8, ``\\n`` newlines) or to stdout when None."""
    text = render_csv(rows, schema, comments)
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def read_csv(path: Union[str, Path]) -> tuple[list[str], list[dict], list[str]]:
    """(comment lines, rows as dicts of strings, schema) of a file written by emit_csv."""
    comments, body = [], []
    with open(path, encoding="utf-8", newline="") as fh:
        for line in fh:
            if line.startswith("#"):
                comments.append(line[1:].strip())
            else:
                body.append(line)
    reader = csv.reader(body)
    try:
        schema = next(reader)
    except StopIteration:
        return comments, [], []
    return comments, [dict(zip(schema, r)) for r in reader], schema
