"""The k-group sample container, its validation, and CSV ingestion."""
from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np

from .errors import ParseError, ValidationError

MIN_GROUP_SIZE = 2


@dataclass(frozen=True)
class GroupLayout:
    """Group sizes of the stacked sample and their cumulative offsets.

    ``offsets[j]:offsets[j + 1]`` is the row block of group ``j``.
    """

    sizes: tuple[int, ...]

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.sizes)
        if not sizes or any(s < 1 for s in sizes):
            raise ValidationError(f"group sizes must be positive, got {sizes}")
        object.__setattr__(self, "sizes", sizes)

    @property
    def k(self) -> int:
        return len(self.sizes)

    @property
    def n(self) -> int:
        return sum(self.sizes)

    @cached_property
    def offsets(self) -> tuple[int, ...]:
        return tuple(int(v) for v in np.concatenate([[0], np.cumsum(self.sizes)]))

    def block(self, j: int) -> slice:
        return slice(self.offsets[j], self.offsets[j + 1])

    def blocks(self) -> list[slice]:
        return [self.block(j) for j in range(self.k)]

    @property
    def proportions(self) -> np.ndarray:
        return np.asarray(self.sizes, dtype=np.float64) / self.n


@dataclass(frozen=True, eq=False)
class MultiSample:
    """``k`` labelled groups of ``d``-dimensional observations.

    Construction validates every invariant and raises ValidationError on the
    first violation.
    """

    labels: tuple[str, ...]
    groups: tuple[np.ndarray, ...]

    def __post_init__(self):
        groups = []
        for g in self.groups:
            arr = np.array(g, dtype=np.float64)
            if arr.ndim == 1:
                arr = arr[:, None]
            arr.setflags(write=False)
            groups.append(arr)
        object.__setattr__(self, "labels", tuple(str(label) for label in self.labels))
        object.__setattr__(self, "groups", tuple(groups))
        err = validate(self)
        if err is not None:
            raise err

    @classmethod
    def from_groups(cls, groups: Mapping[str, object] | Sequence[object]) -> "MultiSample":
        if isinstance(groups, Mapping):
            return cls(tuple(groups.keys()), tuple(groups.values()))
        return cls(tuple(str(i + 1) for i in range(len(groups))), tuple(groups))

    @property
    def k(self) -> int:
        return len(self.groups)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(g.shape[0] for g in self.groups)

    @property
    def n(self) -> int:
        return sum(self.sizes)

    @property
    def dim(self) -> int:
        return self.groups[0].shape[1]

    @property
    def layout(self) -> GroupLayout:
        return GroupLayout(self.sizes)

    @property
    def offsets(self) -> tuple[int, ...]:
        return self.layout.offsets

    @property
    def proportions(self) -> np.ndarray:
        return self.layout.proportions

    def stacked(self) -> np.ndarray:
        return np.concatenate(self.groups, axis=0)

    def reorder(self, order: Sequence[int]) -> "MultiSample":
        """Return a copy with groups in ``order`` (0-based indices)."""
        if sorted(order) != list(range(self.k)):
            raise ValueError(f"not a permutation of 0..{self.k - 1}: {order}")
        return MultiSample(
            tuple(self.labels[i] for i in order), tuple(self.groups[i] for i in order)
        )

    def shifted(self, offset) -> "MultiSample":
        return MultiSample(self.labels, tuple(g + offset for g in self.groups))

    def __eq__(self, other):
        if not isinstance(other, MultiSample):
            return NotImplemented
        return self.labels == other.labels and all(
            a.shape == b.shape and np.array_equal(a, b)
            for a, b in zip(self.groups, other.groups)
        )

    __hash__ = None


def validate(sample: MultiSample) -> ValidationError | None:
    """Check the MultiSample invariants; return the first violation or None."""
    groups = sample.groups
    if len(sample.labels) != len(groups):
        return ValidationError(
            f"{len(sample.labels)} labels for {len(groups)} groups"
        )
    if len(groups) < 2:
        return ValidationError("need at least 2 groups")
    if len(set(sample.labels)) != len(sample.labels):
        return ValidationError("group labels must be unique")
    dim = None
    for label, g in zip(sample.labels, groups):
        g = np.asarray(g)
        if g.ndim != 2:
            return ValidationError(f"group {label!r}: expected (n, d) array", group=label)
        if g.shape[0] < MIN_GROUP_SIZE:
            return ValidationError(
                f"group {label!r} has {g.shape[0]} observation(s); need at least {MIN_GROUP_SIZE}",
                group=label,
            )
        if g.shape[1] < 1:
            return ValidationError(f"group {label!r}: zero-dimensional points", group=label)
        if dim is None:
            dim = g.shape[1]
        elif g.shape[1] != dim:
            return ValidationError(
                f"group {label!r} has dimension {g.shape[1]}, expected {dim}", group=label
            )
        bad = np.flatnonzero(~np.isfinite(g).all(axis=1))
        if bad.size:
            return ValidationError(
                f"group {label!r} row {int(bad[0])}: non-finite coordinate",
                group=label,
                row=int(bad[0]),
            )
    return None


def _read_text(source) -> str:
    if isinstance(source, (bytes, bytearray)):
        return bytes(source).decode("utf-8")
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8", newline="") as fh:
            return fh.read()
    data = source.read()
    return data.decode("utf-8") if isinstance(data, bytes) else data


def parse_csv(text: str) -> MultiSample:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("empty CSV input") from None
    header = [h.strip() for h in header]
    if len(header) < 2 or header[0] != "group":
        raise ParseError("header must be 'group,x1[,x2,...]'")
    d = len(header) - 1
    rows: dict[str, list[list[float]]] = {}
    for lineno, row in enumerate(reader, start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != d + 1:
            raise ParseError(f"line {lineno}: expected {d + 1} fields, got {len(row)}")
        try:
            coords = [float(cell) for cell in row[1:]]
        except ValueError as exc:
            raise ParseError(f"line {lineno}: {exc}") from None
        rows.setdefault(row[0], []).append(coords)
    return MultiSample(
        tuple(rows), tuple(np.asarray(v, dtype=np.float64).reshape(-1, d) for v in rows.values())
    )


def load_csv(source) -> MultiSample:
    """Read a ``group,x1[,x2,...]`` CSV from a path, bytes, or a file object.

    Groups are ordered by first appearance; rows keep file order within a group.
    """
    return parse_csv(_read_text(source))


def to_csv(sample: MultiSample) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["group"] + [f"x{i + 1}" for i in range(sample.dim)])
    for label, g in zip(sample.labels, sample.groups):
        for point in g:
            # repr round-trips float64 exactly
            writer.writerow([label] + [repr(float(v)) for v in point])
    return buf.getvalue()


def write_csv(sample: MultiSample, target) -> None:
    text = to_csv(sample)
    if isinstance(target, (str, os.PathLike)):
        with open(target, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        target.write(text)

