"""Line-oriented data files: a ``# key: value`` header block followed by a CSV body.

Layout::

    # lgallee-data: 1
    # kind: portrait
    # param.A: 0.1
    # ...
    object_id,object_kind,u,v
    eq:P1,attractor,0.0935...,0.0935...

Every header line is ``# <key>: <value>``.  The first non-header line holds the
column names.  Values are kept as strings when parsing, so parse + dump is
byte-identical.  Floats are written with ``repr`` (shortest round-trip form).
"""
from __future__ import annotations

import csv
import io
import os
import tempfile
from dataclasses import dataclass, field

SCHEMA_VERSION = "1"


def fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


@dataclass
class DataFile:
    kind: str
    header: dict[str, str] = field(default_factory=dict)
    columns: list[str] = field(default_factory=list)
    rows: list[list[str]] = field(default_factory=list)

    def add(self, *values):
        if len(values) != len(self.columns):
            raise ValueError(f"row has {len(values)} fields, expected {len(self.columns)}")
        self.rows.append([fmt(v) for v in values])

    def dumps(self) -> str:
        out = io.StringIO()
        out.write(f"# lgallee-data: {SCHEMA_VERSION}\n")
        out.write(f"# kind: {self.kind}\n")
        for k, v in self.header.items():
            if "\n" in str(v) or ":" in k:
                raise ValueError(f"header entry {k!r} cannot be serialized")
            out.write(f"# {k}: {v}\n")
        w = csv.writer(out, lineterminator="\n")
        w.writerow(self.columns)
        w.writerows(self.rows)
        return out.getvalue()

    def column(self, name: str) -> list[str]:
        i = self.columns.index(name)
        return [r[i] for r in self.rows]


def loads(text: str) -> DataFile:
    lines = text.split("\n")
    header: dict[str, str] = {}
    i = 0
    while i < len(lines) and lines[i].startswith("# "):
        key, sep, value = lines[i][2:].partition(": ")
        if not sep:
            raise ValueError(f"malformed header line {i + 1}: {lines[i]!r}")
        header[key] = value
        i += 1
    if header.pop("lgallee-data", None) != SCHEMA_VERSION:
        raise ValueError("not an lgallee data file (schema line missing or unsupported)")
    kind = header.pop("kind", "")
    body = list(csv.reader(io.StringIO("\n".join(lines[i:]))))
    columns = body[0] if body else []
    return DataFile(kind, header, columns, [r for r in body[1:]])


def write_atomic(path: str, text: str) -> None:
    """Write via a temp file in the target directory and rename into place."""
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=d)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read(path: str) -> DataFile:
    with open(path, newline="") as fh:
        return loads(fh.read())
