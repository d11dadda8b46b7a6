"""Versioned plain-text checkpoint format for parameter matrices.

Layout::

    xlsent-checkpoint 1
    kind <kind>
    meta key=value key=value ...
    matrix <name> <rows> <cols>
    <row values separated by spaces>
    ...
    end

Values are written with ``repr`` so a load/save round trip is exact.
"""

from __future__ import annotations

import os
import tempfile
from pathlib import Path
from typing import TextIO

import numpy as np

from .errors import FormatError

MAGIC = "xlsent-checkpoint"
VERSION = 1


def write_checkpoint(stream: TextIO, kind: str, meta: dict, matrices: dict) -> None:
    stream.write(f"{MAGIC} {VERSION}\n")
    stream.write(f"kind {kind}\n")
    stream.write("meta " + " ".join(f"{k}={v}" for k, v in meta.items()) + "\n")
    for name, mat in matrices.items():
        if mat is None:
            continue
        mat = np.atleast_2d(np.asarray(mat, dtype=np.float64))
        stream.write(f"matrix {name} {mat.shape[0]} {mat.shape[1]}\n")
        for row in mat:
            stream.write(" ".join(repr(float(x)) for x in row) + "\n")
    stream.write("end\n")


def read_checkpoint(stream: TextIO):
    """Return ``(kind, meta, matrices)``; meta values are strings."""
    lines = iter(enumerate(stream, start=1))

    def next_line():
        try:
            n, raw = next(lines)
        except StopIteration:
            raise FormatError("unexpected end of checkpoint") from None
        return n, raw.rstrip("\n")

    n, header = next_line()
    parts = header.split()
    if len(parts) != 2 or parts[0] != MAGIC:
        raise FormatError("not an xlsent checkpoint", n)
    if int(parts[1]) != VERSION:
        raise FormatError(f"unsupported checkpoint version {parts[1]}", n)
    n, line = next_line()
    if not line.startswith("kind "):
        raise FormatError("missing kind line", n)
    kind = line.split(None, 1)[1].strip()
    n, line = next_line()
    if not line.startswith("meta"):
        raise FormatError("missing meta line", n)
    meta = {}
    for item in line.split()[1:]:
        key, _, value = item.partition("=")
        meta[key] = value
    matrices: dict[str, np.ndarray] = {}
    while True:
        n, line = next_line()
        if line == "end":
            break
        parts = line.split()
        if len(parts) != 4 or parts[0] != "matrix":
            raise FormatError(f"expected 'matrix <name> <rows> <cols>', got {line!r}", n)
        name, rows, cols = parts[1], int(parts[2]), int(parts[3])
        data = np.empty((rows, cols))
        for r in range(rows):
            n, row = next_line()
            vals = row.split()
            if len(vals) != cols:
                raise FormatError(f"matrix {name} row {r} has {len(vals)} values, expected {cols}", n)
            data[r] = [float(v) for v in vals]
        matrices[name] = data
    return kind, meta, matrices


def atomic_write_text(path, text: str) -> None:
    """Write ``text`` to ``path`` through a temporary file and rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise

