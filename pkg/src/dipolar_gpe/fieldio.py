"""
Binary field files (format DGPE1) and CSV / plot-data writers.

Layout, all little-endian::

    offset  size  content
    0       5     magic b"DGPE\\0"
    5       4     u32 version (1)
    9       4     u32 flags, bit 0 set for complex data
    13      12    u32 n1, n2, n3
    25      24    f64 L1, L2, L3
    49      24    f64 lambda1, lambda2, omega
    73      24    f64 axis components
    97      ...   f64 samples, x1 slowest and x3 fastest, (re, im) pairs if complex

The header carries everything needed to verify a standing wave without any
other input.
"""

from __future__ import annotations

import csv
import os
import struct
from dataclasses import dataclass

import numpy as np

from .functionals import Couplings
from .grid import Field, Grid

__all__ = [
    "MAGIC",
    "VERSION",
    "HEADER_SIZE",
    "CorruptFieldFile",
    "FieldFile",
    "write_field",
    "read_field",
    "write_diagnostics_csv",
    "write_plot_files",
]

MAGIC = b"DGPE\0"
VERSION = 1
FLAG_COMPLEX = 1
_HEADER = struct.Struct("<5sII3I3d3d3d")
HEADER_SIZE = _HEADER.size


class CorruptFieldFile(ValueError):
    """Bad magic, unknown version, inconsistent header or wrong payload length."""


@dataclass(frozen=True)
class FieldFile:
    field: Field
    couplings: Couplings
    omega: float
    axis: tuple


def write_field(path, field, couplings, omega, axis=(0.0, 0.0, 1.0)):
    """Write ``field`` with its metadata; complex samples are kept complex."""
    g = field.grid
    values = field.values
    is_complex = np.iscomplexobj(values)
    header = _HEADER.pack(
        MAGIC,
        VERSION,
        FLAG_COMPLEX if is_complex else 0,
        *g.n,
        *g.L,
        couplings.lambda1,
        couplings.lambda2,
        float(omega),
        *(float(a) for a in axis),
    )
    if is_complex:
        payload = np.ascontiguousarray(values, dtype="<c16").view("<f8")
    else:
        payload = np.ascontiguousarray(values, dtype="<f8")
    tmp = f"{path}.part"
    with open(tmp, "wb") as fh:
        fh.write(header)
        fh.write(payload.tobytes(order="C"))
    os.replace(tmp, path)


def read_field(path):
    """Read a DGPE1 file; raises :class:`CorruptFieldFile` on any inconsistency."""
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < HEADER_SIZE:
        raise CorruptFieldFile(f"corrupt field file {path}: {len(data)} bytes is shorter than the header")
    magic, version, flags, n1, n2, n3, L1, L2, L3, l1, l2, omega, a1, a2, a3 = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise CorruptFieldFile(f"corrupt field file {path}: bad magic {magic!r}")
    if version != VERSION:
        raise CorruptFieldFile(f"corrupt field file {path}: unsupported version {version}")
    if flags & ~FLAG_COMPLEX:
        raise CorruptFieldFile(f"corrupt field file {path}: unknown flag bits {flags:#x}")
    is_complex = bool(flags & FLAG_COMPLEX)
    count = n1 * n2 * n3 * (2 if is_complex else 1)
    expected = HEADER_SIZE + 8 * count
    if len(data) != expected:
        raise CorruptFieldFile(f"corrupt field file {path}: expected {expected} bytes, found {len(data)}")
    try:
        grid = Grid((n1, n2, n3), (L1, L2, L3))
        couplings = Couplings(l1, l2)
    except ValueError as exc:
        raise CorruptFieldFile(f"corrupt field file {path}: {exc}") from None
    flat = np.frombuffer(data, dtype="<f8", count=count, offset=HEADER_SIZE)
    values = flat.view("<c16") if is_complex else flat
    values = values.astype(complex if is_complex else float).reshape(grid.n)
    try:
        field = Field(grid, values)
    except FloatingPointError as exc:
        raise CorruptFieldFile(f"corrupt field file {path}: {exc}") from None
    return FieldFile(field, couplings, omega, (a1, a2, a3))


def write_diagnostics_csv(path, columns, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(columns)
        for row in rows:
            w.writerow([repr(float(x)) for x in row])


def write_plot_files(prefix, diagnostics, xname="t"):
    """One whitespace-separated two-column file per diagnostic; returns the paths."""
    x = diagnostics[xname]
    paths = []
    for name, y in diagnostics.items():
        if name == xname:
            continue
        path = f"{prefix}_{name}.dat"
        with open(path, "w") as fh:
            fh.write(f"# {xname} {name}\n")
            for a, b in zip(x, y):
                fh.write(f"{float(a)!r} {float(b)!r}\n")
        paths.append(path)
    return paths
