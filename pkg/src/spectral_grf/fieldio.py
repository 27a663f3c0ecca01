"""Field and report file formats.

GRF1 binary layout (all little-endian)::

    b"GRF1"                     magic
    uint32                      version (1)
    uint32                      dim
    dim x (uint64 N_i, float64 l_i)
    P x float64                 values, row-major

PGM output is binary P5 for 2D fields, min-max scaled to 0..255, rows along
the first axis.
"""

from __future__ import annotations

import csv
import io
import math
import struct
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .grid import GridSpec

MAGIC = b"GRF1"
VERSION = 1
_HEAD = struct.Struct("<4sII")
_AXIS = struct.Struct("<Qd")


class FieldFormatError(ValueError):
    pass


def encode_grf1(grid: GridSpec, values: np.ndarray) -> bytes:
    values = np.asarray(values, dtype="<f8")
    if values.shape != grid.shape:
        raise FieldFormatError(f"values shape {values.shape} != grid shape {grid.shape}")
    parts = [_HEAD.pack(MAGIC, VERSION, grid.dim)]
    parts += [_AXIS.pack(n, l) for n, l in zip(grid.counts, grid.lengths)]
    parts.append(np.ascontiguousarray(values).tobytes())
    return b"".join(parts)


def decode_grf1(data: bytes) -> tuple[GridSpec, np.ndarray]:
    if len(data) < _HEAD.size:
        raise FieldFormatError("file too short for GRF1 header")
    magic, version, dim = _HEAD.unpack_from(data, 0)
    if magic != MAGIC:
        raise FieldFormatError(f"bad magic {magic!r}")
    if version != VERSION:
        raise FieldFormatError(f"unsupported GRF1 version {version}")
    offset = _HEAD.size
    if dim == 0 or len(data) < offset + dim * _AXIS.size:
        raise FieldFormatError("truncated GRF1 axis table")
    counts, lengths = [], []
    for _ in range(dim):
        n, l = _AXIS.unpack_from(data, offset)
        counts.append(n)
        lengths.append(l)
        offset += _AXIS.size
    p = math.prod(counts)
    if len(data) - offset != 8 * p:
        raise FieldFormatError(
            f"payload holds {(len(data) - offset) / 8:g} values, header declares {p}"
        )
    grid = GridSpec(tuple(lengths), tuple(counts))
    values = np.frombuffer(data, dtype="<f8", offset=offset).reshape(grid.shape)
    return grid, values.astype(float)


def write_grf1(path, grid: GridSpec, values: np.ndarray) -> None:
    Path(path).write_bytes(encode_grf1(grid, values))


def read_grf1(path) -> tuple[GridSpec, np.ndarray]:
    return decode_grf1(Path(path).read_bytes())


def encode_pgm(values: np.ndarray) -> bytes:
    values = np.asarray(values, dtype=float)
    if values.ndim != 2:
        raise FieldFormatError(f"PGM output needs a 2D field, got {values.ndim}D")
    lo, hi = float(values.min()), float(values.max())
    if hi > lo:
        scaled = np.rint((values - lo) / (hi - lo) * 255.0)
    else:
        scaled = np.zeros_like(values)
    pixels = scaled.astype(np.uint8)
    rows, cols = values.shape
    return f"P5\n{cols} {rows}\n255\n".encode("ascii") + pixels.tobytes()


def field_csv_rows(grid: GridSpec, values: np.ndarray):
    d = grid.dim
    header = [f"i{k + 1}" for k in range(d)] + [f"x{k + 1}" for k in range(d)] + ["value"]
    yield header
    coords = grid.axis_coordinates()
    for index in grid.indices():
        x = [coords[k][j] for k, j in enumerate(index)]
        yield [*index, *(repr(float(v)) for v in x), repr(float(values[index]))]


def to_csv(rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()


def write_field(path, grid: GridSpec, values: np.ndarray, fmt: str = "grf1") -> None:
    if fmt == "grf1":
        data = encode_grf1(grid, values)
    elif fmt == "csv":
        data = to_csv(field_csv_rows(grid, values)).encode()
    elif fmt == "pgm":
        data = encode_pgm(values)
    else:
        raise FieldFormatError(f"unknown field format {fmt!r}")
    Path(path).write_bytes(data)
