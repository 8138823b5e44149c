"""Binary field-snapshot format.

Layout: header ``{magic "ENPP", version u32, d u32, N u32, L f64,
field-count u32}`` followed by row-major little-endian float64 real-space
values for each field. A trajectory directory additionally carries a
``manifest.csv`` sidecar (index, time, nu) because the per-file header has
no time slot.
"""

from __future__ import annotations

import csv
import struct
from pathlib import Path

import numpy as np

from .errors import EnppError
from .spectral import Field, make_grid

MAGIC = b"ENPP"
VERSION = 1
_HEADER = struct.Struct("<4sIIIdI")


class SnapshotError(EnppError, ValueError):
    """Malformed snapshot file."""


def write_snapshot(path, fields) -> None:
    """Write one or more fields sharing a grid to ``path``."""
    fields = list(fields)
    if not fields:
        raise SnapshotError("snapshot needs at least one field")
    grid = fields[0].grid
    for f in fields[1:]:
        if f.grid != grid:
            raise SnapshotError("snapshot fields live on different grids")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, grid.d, grid.N, grid.L, len(fields)))
        for f in fields:
            fh.write(np.ascontiguousarray(f.values, dtype="<f8").tobytes())


def read_snapshot(path):
    """Read a snapshot; returns ``(grid, [Field, ...])``."""
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise SnapshotError(f"{path}: truncated header")
    magic, version, d, N, L, count = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise SnapshotError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise SnapshotError(f"{path}: unsupported version {version}")
    grid = make_grid(d, N, L)
    expected = _HEADER.size + count * grid.size * 8
    if len(raw) != expected:
        raise SnapshotError(
            f"{path}: expected {expected} bytes for {count} fields, got {len(raw)}")
    fields = []
    off = _HEADER.size
    for _ in range(count):
        arr = np.frombuffer(raw, dtype="<f8", count=grid.size, offset=off)
        fields.append(Field.from_real(grid, arr.reshape(grid.shape)))
        off += grid.size * 8
    return grid, fields


def write_manifest(directory, times, nu: float) -> None:
    path = Path(directory) / "manifest.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "time", "nu"])
        for i, t in enumerate(times):
            writer.writerow([i, repr(float(t)), repr(float(nu))])


def read_manifest(directory):
    """Returns ``(times, nu)`` from a trajectory directory."""
    path = Path(directory) / "manifest.csv"
    if not path.exists():
        raise SnapshotError(f"missing manifest: {path}")
    times = []
    nu = 0.0
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            times.append(float(row["time"]))
            nu = float(row["nu"])
    return times, nu


def snapshot_name(index: int) -> str:
    return f"t_{index:05d}.bin"
