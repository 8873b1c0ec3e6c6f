"""Plain-text readers and writers for length spectra and eigenvalue lists.

Length spectrum::

    # comment
    genus 2
    3.057 24 unknown
    <length> <multiplicity> <class>

Eigenvalue list::

    genus 2
    0
    <eigenvalue>        (nondecreasing)

ASCII, LF line endings, ``#`` starts a comment anywhere on a line.
Multiplicities count non-oriented geodesics unless the header line
``oriented true`` follows the genus line.
"""

from __future__ import annotations

import os
from pathlib import Path

from .trace_stats import CLASSES, EigenvalueList, LengthSpectrum, SpectrumEntry

__all__ = [
    "FormatError",
    "read_length_spectrum",
    "write_length_spectrum",
    "read_eigenvalues",
    "write_eigenvalues",
]


class FormatError(ValueError):
    def __init__(self, path, lineno, msg):
        self.path, self.lineno = path, lineno
        where = f"{path}:{lineno}" if lineno else str(path)
        super().__init__(f"{where}: {msg}")


def _content_lines(path):
    raw = Path(path).read_bytes()
    try:
        text = raw.decode("ascii")
    except UnicodeDecodeError as exc:
        raise FormatError(path, 0, f"file is not ASCII ({exc.reason} at byte {exc.start})") from None
    for lineno, line in enumerate(text.split("\n"), start=1):
        line = line.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def _parse_genus(path, lines):
    try:
        lineno, line = next(lines)
    except StopIteration:
        raise FormatError(path, 0, "missing 'genus <int>' header") from None
    parts = line.split()
    if len(parts) != 2 or parts[0] != "genus":
        raise FormatError(path, lineno, f"expected 'genus <int>', got {line!r}")
    try:
        genus = int(parts[1])
    except ValueError:
        raise FormatError(path, lineno, f"genus is not an integer: {parts[1]!r}") from None
    if genus < 2:
        raise FormatError(path, lineno, f"genus must be >= 2, got {genus}")
    return genus


def read_length_spectrum(path: str | os.PathLike) -> LengthSpectrum:
    lines = _content_lines(path)
    genus = _parse_genus(path, lines)
    oriented = False
    entries = []
    prev = 0.0
    for lineno, line in lines:
        parts = line.split()
        if parts[0] == "oriented" and not entries:
            if len(parts) != 2 or parts[1] not in ("true", "false"):
                raise FormatError(path, lineno, "expected 'oriented true|false'")
            oriented = parts[1] == "true"
            continue
        if len(parts) != 3:
            raise FormatError(path, lineno, f"expected '<length> <multiplicity> <class>', got {line!r}")
        try:
            length = float(parts[0])
        except ValueError:
            raise FormatError(path, lineno, f"length is not a number: {parts[0]!r}") from None
        try:
            mult = int(parts[1])
        except ValueError:
            raise FormatError(path, lineno, f"multiplicity is not an integer: {parts[1]!r}") from None
        cls = parts[2]
        if not length > 0 or length == float("inf"):
            raise FormatError(path, lineno, f"length must be positive and finite, got {parts[0]}")
        if length <= prev:
            raise FormatError(path, lineno, f"lengths must be strictly increasing ({parts[0]} after {prev!r})")
        if mult < 1:
            raise FormatError(path, lineno, f"multiplicity must be >= 1, got {mult}")
        if cls not in CLASSES:
            raise FormatError(path, lineno, f"unknown class {cls!r}; expected one of {', '.join(CLASSES)}")
        entries.append(SpectrumEntry(length, mult, cls))
        prev = length
    return LengthSpectrum(genus, tuple(entries), oriented)


def write_length_spectrum(path: str | os.PathLike, spec: LengthSpectrum) -> None:
    out = [f"genus {spec.genus}"]
    if spec.oriented:
        out.append("oriented true")
    # repr() round-trips floats exactly.
    out += [f"{e.length!r} {e.multiplicity} {e.cls}" for e in spec.entries]
    Path(path).write_bytes(("\n".join(out) + "\n").encode("ascii"))


def read_eigenvalues(path: str | os.PathLike) -> EigenvalueList:
    lines = _content_lines(path)
    genus = _parse_genus(path, lines)
    values = []
    for lineno, line in lines:
        try:
            v = float(line)
        except ValueError:
            raise FormatError(path, lineno, f"expected one eigenvalue per line, got {line!r}") from None
        if not values and v != 0.0:
            raise FormatError(path, lineno, f"first eigenvalue must be 0, got {line}")
        if v < 0:
            raise FormatError(path, lineno, f"eigenvalues must be >= 0, got {line}")
        if values and v < values[-1]:
            raise FormatError(path, lineno, f"eigenvalues must be nondecreasing ({line} after {values[-1]!r})")
        values.append(v)
    if not values:
        raise FormatError(path, 0, "no eigenvalues")
    return EigenvalueList(genus, tuple(values))


def write_eigenvalues(path: str | os.PathLike, ev: EigenvalueList) -> None:
    out = [f"genus {ev.genus}"] + [repr(v) for v in ev.values]
    Path(path).write_bytes(("\n".join(out) + "\n").encode("ascii"))
