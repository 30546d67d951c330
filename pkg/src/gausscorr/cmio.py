"""Plain-text covariance matrix files.

Format: an integer mode count ``N`` on the first non-comment line, followed by
``2N`` rows of ``2N`` whitespace-separated numbers. Lines whose first
non-blank character is ``#`` are ignored.
"""

from __future__ import annotations

import io
import os
from typing import TextIO

import numpy as np

from .symplectic import MalformedCMError, as_cm


class CMParseError(MalformedCMError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def loads(text: str) -> np.ndarray:
    rows: list[tuple[int, str]] = [
        (i, ln) for i, ln in enumerate(text.splitlines(), start=1)
        if ln.strip() and not ln.lstrip().startswith("#")
    ]
    if not rows:
        raise CMParseError("empty CM file")
    lineno, head = rows[0]
    try:
        n = int(head.strip())
    except ValueError:
        raise CMParseError(f"expected the mode count, got {head.strip()!r}", lineno) from None
    if n < 1:
        raise CMParseError("mode count must be positive", lineno)
    dim = 2 * n
    body = rows[1:]
    if len(body) != dim:
        where = body[-1][0] if body else lineno
        raise CMParseError(f"expected {dim} matrix rows, found {len(body)}", where)
    out = np.empty((dim, dim))
    for r, (lineno, ln) in enumerate(body):
        fields = ln.split()
        if len(fields) != dim:
            raise CMParseError(f"expected {dim} values, found {len(fields)}", lineno)
        try:
            out[r] = [float(x) for x in fields]
        except ValueError:
            raise CMParseError(f"non-numeric entry in {ln.strip()!r}", lineno) from None
    return as_cm(out)


def load(path: str | os.PathLike) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def dump(sigma, fh: TextIO, comment: str | None = None) -> None:
    sigma = np.asarray(sigma, dtype=float)
    if comment:
        for line in comment.splitlines():
            fh.write(f"# {line}\n")
    fh.write(f"{sigma.shape[0] // 2}\n")
    for row in sigma:
        fh.write(" ".join(repr(float(x)) for x in row) + "\n")


def dumps(sigma, comment: str | None = None) -> str:
    buf = io.StringIO()
    dump(sigma, buf, comment)
    return buf.getvalue()


def save(path: str | os.PathLike, sigma, comment: str | None = None) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        dump(sigma, fh, comment)
