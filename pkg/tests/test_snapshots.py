import struct

import numpy as np
import pytest

from enpp.snapshots import (
    MAGIC,
    SnapshotError,
    read_manifest,
    read_snapshot,
    write_manifest,
    write_snapshot,
)
from enpp.spectral import Field

from conftest import random_field, rel_err


def test_round_trip(tmp_path, grid16, rng):
    fields = [random_field(grid16, rng) for _ in range(4)]
    path = tmp_path / "state.bin"
    write_snapshot(path, fields)
    grid, back = read_snapshot(path)
    assert grid == grid16
    assert len(back) == 4
    for a, b in zip(fields, back):
        assert rel_err(b.values, a.values) < 1e-15


def test_header_layout(tmp_path, grid16):
    path = tmp_path / "one.bin"
    write_snapshot(path, [Field.zeros(grid16)])
    raw = path.read_bytes()
    magic, version, d, N, L, count = struct.unpack_from("<4sIIIdI", raw)
    assert magic == MAGIC == b"ENPP"
    assert (version, d, N, count) == (1, 2, 16, 1)
    assert L == pytest.approx(grid16.L)
    assert len(raw) == struct.calcsize("<4sIIIdI") + 16 * 16 * 8


def test_truncated_file_rejected(tmp_path, grid16):
    path = tmp_path / "bad.bin"
    write_snapshot(path, [Field.zeros(grid16)])
    path.write_bytes(path.read_bytes()[:-10])
    with pytest.raises(SnapshotError):
        read_snapshot(path)


def test_bad_magic_rejected(tmp_path, grid16):
    path = tmp_path / "bad.bin"
    write_snapshot(path, [Field.zeros(grid16)])
    raw = bytearray(path.read_bytes())
    raw[:4] = b"NOPE"
    path.write_bytes(bytes(raw))
    with pytest.raises(SnapshotError):
        read_snapshot(path)


def test_little_endian_values(tmp_path, grid16):
    values = np.zeros(grid16.shape)
    values[0, 0] = 1.5
    path = tmp_path / "le.bin"
    write_snapshot(path, [Field.from_real(grid16, values)])
    raw = path.read_bytes()
    first = struct.unpack_from("<d", raw, struct.calcsize("<4sIIIdI"))[0]
    assert first == 1.5


def test_manifest_round_trip(tmp_path):
    write_manifest(tmp_path, [0.0, 0.1, 0.2], nu=1e-3)
    times, nu = read_manifest(tmp_path)
    assert times == [0.0, 0.1, 0.2]
    assert nu == 1e-3
