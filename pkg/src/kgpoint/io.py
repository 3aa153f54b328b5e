"""Binary snapshots and CSV writers.

Snapshot layout, little-endian: magic b"KGD1", version u32, m f64, L f64,
num_points u64, t f64, then num_points (Re psi, Im psi) f64 pairs and
num_points (Re pi, Im pi) f64 pairs.
"""
from __future__ import annotations

import csv
import struct
from pathlib import Path

import numpy as np

from .model import FieldState, Grid

MAGIC = b"KGD1"
VERSION = 1
_HEADER = struct.Struct("<4sIddQd")


def snapshot_bytes(state: FieldState, m: float, grid: Grid) -> bytes:
    state.check_grid(grid)
    head = _HEADER.pack(MAGIC, VERSION, float(m), grid.half_length, grid.num_points, state.t)
    body = np.concatenate([state.psi, state.pi]).astype("<c16").tobytes()
    return head + body


def write_snapshot(path, state: FieldState, m: float, grid: Grid) -> Path:
    path = Path(path)
    path.write_bytes(snapshot_bytes(state, m, grid))
    return path


def parse_snapshot(data: bytes) -> tuple[FieldState, float, Grid]:
    if len(data) < _HEADER.size:
        raise ValueError("snapshot truncated: header incomplete")
    magic, version, m, L, n, t = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise ValueError(f"bad snapshot magic {magic!r}")
    if version != VERSION:
        raise ValueError(f"unsupported snapshot version {version}")
    expected = _HEADER.size + 2 * n * 16
    if len(data) != expected:
        raise ValueError(f"snapshot size {len(data)} != expected {expected}")
    z = np.frombuffer(data, dtype="<c16", offset=_HEADER.size)
    return FieldState(z[:n], z[n:], t), m, Grid(L, n)


def read_snapshot(path) -> tuple[FieldState, float, Grid]:
    return parse_snapshot(Path(path).read_bytes())


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


def write_csv(path, header, rows) -> Path:
    """Write rows with shortest round-trip float formatting (deterministic)."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    return path


def read_csv(path) -> dict[str, np.ndarray]:
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    cols = {}
    for j, name in enumerate(header):
        vals = [r[j] for r in body]
        try:
            cols[name] = np.array([float(v) for v in vals])
        except ValueError:
            cols[name] = np.array(vals, dtype=object)
    return cols
