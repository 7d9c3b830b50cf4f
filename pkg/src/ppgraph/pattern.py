"""Multi-type point patterns in a rectangular window.

A pattern is an immutable bundle of event coordinates, integer type marks
and the window they were observed in. Construction validates the pattern;
:func:`load_pattern` reads one from CSV.
"""
from __future__ import annotations

import csv
import io
import logging
import os
import warnings
from dataclasses import dataclass, field
from typing import IO, Iterable, Sequence

import numpy as np

logger = logging.getLogger(__name__)


class ValidationError(ValueError):
    """A pattern violates one of its invariants."""


class ParseError(ValueError):
    """Malformed CSV input."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class ObservationWindow:
    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self):
        for name in ("x_min", "y_min", "x_max", "y_max"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not (self.lx > 0 and self.ly > 0):
            raise ValidationError(
                f"window must have positive side lengths, got {self.lx} x {self.ly}")

    @classmethod
    def unit(cls) -> "ObservationWindow":
        return cls(0.0, 0.0, 1.0, 1.0)

    @property
    def lx(self) -> float:
        return self.x_max - self.x_min

    @property
    def ly(self) -> float:
        return self.y_max - self.y_min

    @property
    def area(self) -> float:
        return self.lx * self.ly

    @property
    def is_unit_square(self) -> bool:
        return (self.x_min, self.y_min, self.x_max, self.y_max) == (0.0, 0.0, 1.0, 1.0)

    def contains(self, x, y):
        """Elementwise test against the closed rectangle."""
        x = np.asarray(x)
        y = np.asarray(y)
        return (x >= self.x_min) & (x <= self.x_max) & (y >= self.y_min) & (y <= self.y_max)


def _readonly(a, dtype):
    a = np.array(a, dtype=dtype, copy=True).reshape(-1)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class MultiTypePointPattern:
    """Events ``(x[k], y[k])`` of type ``types[marks[k]]`` inside ``window``.

    ``duplicates_dropped`` records how many exact duplicate rows the loader
    discarded before construction; it is provenance only.
    """

    window: ObservationWindow
    types: tuple[str, ...]
    x: np.ndarray
    y: np.ndarray
    marks: np.ndarray
    duplicates_dropped: int = field(default=0, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "types", tuple(str(t) for t in self.types))
        object.__setattr__(self, "x", _readonly(self.x, float))
        object.__setattr__(self, "y", _readonly(self.y, float))
        object.__setattr__(self, "marks", _readonly(self.marks, np.int64))
        self._validate()

    def _validate(self):
        d = len(self.types)
        if d < 1:
            raise ValidationError("a pattern needs at least one type")
        if len(set(self.types)) != d:
            raise ValidationError(f"type labels must be distinct: {self.types}")
        n = self.x.size
        if self.y.size != n or self.marks.size != n:
            raise ValidationError("x, y and marks must have equal length")
        if not (np.all(np.isfinite(self.x)) and np.all(np.isfinite(self.y))):
            raise ValidationError("coordinates must be finite")
        if n and (self.marks.min() < 0 or self.marks.max() >= d):
            raise ValidationError(f"type index outside [0, {d})")
        outside = np.flatnonzero(~self.window.contains(self.x, self.y))
        if outside.size:
            k = int(outside[0])
            raise ValidationError(
                f"event {k} at ({self.x[k]!r}, {self.y[k]!r}) lies outside {self.window}")
        counts = self.counts
        empty = [t for t, c in zip(self.types, counts) if c == 0]
        if empty:
            raise ValidationError(f"types without events: {empty}")

        keys = np.stack([self.x, self.y, self.marks.astype(float)], axis=1)
        if np.unique(keys, axis=0).shape[0] != n:
            raise ValidationError("pattern contains duplicate (x, y, type) events")
        if np.unique(keys[:, :2], axis=0).shape[0] != n:
            warnings.warn("events of different types share identical coordinates",
                          stacklevel=3)

    @property
    def d(self) -> int:
        return len(self.types)

    @property
    def n(self) -> int:
        return int(self.x.size)

    @property
    def counts(self) -> np.ndarray:
        return np.bincount(self.marks, minlength=len(self.types))

    def type_index(self, label: str) -> int:
        try:
            return self.types.index(label)
        except ValueError:
            raise KeyError(f"unknown type label {label!r}; known: {list(self.types)}") from None

    def points(self, type_index: int) -> tuple[np.ndarray, np.ndarray]:
        """Coordinates of the events of one type."""
        if not 0 <= type_index < self.d:
            raise IndexError(f"type index {type_index} out of range for d={self.d}")
        sel = self.marks == type_index
        return self.x[sel], self.y[sel]

    def count_by_label(self) -> dict[str, int]:
        return {t: int(c) for t, c in zip(self.types, self.counts)}


def rescale_to_unit_square(pattern: MultiTypePointPattern) -> MultiTypePointPattern:
    """Map the window affinely onto [0, 1]^2."""
    w = pattern.window
    if w.is_unit_square:
        return pattern
    x = (pattern.x - w.x_min) / w.lx
    y = (pattern.y - w.y_min) / w.ly
    # guard against 1 + eps from rounding at the upper boundary
    x = np.clip(x, 0.0, 1.0)
    y = np.clip(y, 0.0, 1.0)
    return MultiTypePointPattern(ObservationWindow.unit(), pattern.types, x, y,
                                 pattern.marks, pattern.duplicates_dropped)


def estimate_intensity(pattern: MultiTypePointPattern, type_index: int) -> float:
    """Homogeneous intensity estimate n_i / |S| in events per unit area."""
    if not 0 <= type_index < pattern.d:
        raise IndexError(f"type index {type_index} out of range for d={pattern.d}")
    return float(pattern.counts[type_index]) / pattern.window.area


def _open_text(source) -> tuple[IO[str], bool]:
    if isinstance(source, (str, os.PathLike)):
        return open(source, newline="", encoding="utf-8"), True
    if isinstance(source, (bytes, bytearray)):
        return io.StringIO(bytes(source).decode("utf-8"), newline=""), False
    if isinstance(source, io.TextIOBase):
        return source, False
    # binary stream
    return io.TextIOWrapper(source, encoding="utf-8", newline=""), False


def load_pattern(source, *, x: str = "x", y: str = "y", type: str = "type",
                 window: Sequence[float] | ObservationWindow | None = None,
                 types: Iterable[str] | None = None) -> MultiTypePointPattern:
    """Read a multi-type pattern from CSV.

    Parameters
    ----------
    source : path, bytes, or text/binary stream
        UTF-8, comma separated, with a header row.
    x, y, type : str
        Column names.
    window : (x_min, y_min, x_max, y_max), optional
        Defaults to the bounding box of all retained events.
    types : iterable of str, optional
        Explicit type order. Rows with other labels are skipped. Without it
        types are ordered by first appearance.

    Exact duplicate rows are dropped; the count is logged and stored on the
    returned pattern as ``duplicates_dropped``.
    """
    stream, owned = _open_text(source)
    try:
        reader = csv.reader(stream)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("empty input, expected a header row", 1) from None
        header = [h.strip() for h in header]
        try:
            cols = [header.index(c) for c in (x, y, type)]
        except ValueError:
            raise ParseError(f"header {header} lacks one of the columns "
                             f"{[x, y, type]}", 1) from None
        width = max(cols) + 1

        wanted = None if types is None else list(types)
        order: list[str] = list(wanted) if wanted is not None else []
        index = {t: i for i, t in enumerate(order)}
        xs, ys, ms, lines = [], [], [], []
        seen = set()
        dropped = 0
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) < width:
                raise ParseError(f"expected at least {width} fields, got {len(row)}", line)
            label = row[cols[2]].strip()
            try:
                xv = float(row[cols[0]])
                yv = float(row[cols[1]])
            except ValueError:
                raise ParseError(f"non-numeric coordinate in {row!r}", line) from None
            if not label:
                raise ParseError("empty type label", line)
            if label not in index:
                if wanted is not None:
                    continue
                index[label] = len(order)
                order.append(label)
            key = (xv, yv, label)
            if key in seen:
                dropped += 1
                continue
            seen.add(key)
            xs.append(xv)
            ys.append(yv)
            ms.append(index[label])
            lines.append(line)
    finally:
        if owned:
            stream.close()

    if not xs:
        raise ValidationError("no events in input")
    xa = np.asarray(xs)
    ya = np.asarray(ys)
    if window is None:
        win = ObservationWindow(xa.min(), ya.min(), xa.max(), ya.max())
    elif isinstance(window, ObservationWindow):
        win = window
    else:
        win = ObservationWindow(*window)
    outside = np.flatnonzero(~win.contains(xa, ya))
    if outside.size:
        k = int(outside[0])
        raise ValidationError(f"line {lines[k]}: event ({xs[k]!r}, {ys[k]!r}) "
                              f"lies outside the window {win}")
    counts = np.bincount(ms, minlength=len(order))
    empty = [t for t, c in zip(order, counts) if c == 0]
    if empty:
        raise ValidationError(f"no events for type(s) {empty}")
    if dropped:
        logger.info("dropped %d exact duplicate rows", dropped)
    return MultiTypePointPattern(win, tuple(order), xa, ya, np.asarray(ms), dropped)


def write_pattern(pattern: MultiTypePointPattern, dest: IO[str]) -> None:
    """Write events as ``x,y,type`` CSV rows in storage order."""
    w = csv.writer(dest, lineterminator="\n")
    w.writerow(["x", "y", "type"])
    for xv, yv, m in zip(pattern.x, pattern.y, pattern.marks):
        w.writerow([repr(float(xv)), repr(float(yv)), pattern.types[m]])
