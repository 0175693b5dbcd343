"""HGRD binary raster container.

Layout (little endian)::

    magic    4s   b"HGRD"
    version  u16  1
    flags    u16  0
    channels u32, height u32, width u32
    pixels_per_meter f32, origin_x f32, origin_y f32, yaw f32
    anchor_row u32, anchor_col u32
    payload  channels*height*width f32, channel-major then row-major
"""
from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path
from typing import BinaryIO

import numpy as np

from gridforecast.errors import HgrdFormatError
from gridforecast.gridgeom import GridSpec

MAGIC = b"HGRD"
VERSION = 1
HEADER = struct.Struct("<4sHHIIIffffII")


@dataclass(frozen=True)
class Raster:
    spec: GridSpec
    values: np.ndarray  # (channels, height, width) float32

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float32)
        if vals.ndim == 2:
            vals = vals[None]
        if vals.ndim != 3 or vals.shape[1:] != self.spec.shape:
            raise ValueError(f"raster shape {vals.shape} does not match grid {self.spec.shape}")
        object.__setattr__(self, "values", vals)

    @property
    def channels(self) -> int:
        return self.values.shape[0]


def to_bytes(raster: Raster) -> bytes:
    vals = raster.values
    if np.isnan(vals).any():
        raise HgrdFormatError("NaN values cannot be stored in HGRD")
    s = raster.spec
    header = HEADER.pack(MAGIC, VERSION, 0, vals.shape[0], s.height_px, s.width_px,
                         s.pixels_per_meter, s.origin_world[0], s.origin_world[1], s.yaw,
                         s.anchor[0], s.anchor[1])
    return header + np.ascontiguousarray(vals, dtype="<f4").tobytes()


def from_bytes(data: bytes) -> Raster:
    if len(data) < HEADER.size:
        raise HgrdFormatError(f"truncated header: {len(data)} bytes")
    (magic, version, flags, channels, height, width, ppm, ox, oy, yaw,
     arow, acol) = HEADER.unpack_from(data)
    if magic != MAGIC:
        raise HgrdFormatError(f"bad magic {magic!r}")
    if version != VERSION:
        raise HgrdFormatError(f"unsupported version {version}")
    if flags != 0:
        raise HgrdFormatError(f"unsupported flags {flags:#x}")
    expected = channels * height * width * 4
    payload = data[HEADER.size:]
    if len(payload) != expected:
        raise HgrdFormatError(f"payload is {len(payload)} bytes, header implies {expected}")
    try:
        spec = GridSpec(height, width, ppm, (ox, oy), yaw, (arow, acol))
    except ValueError as e:
        raise HgrdFormatError(f"invalid grid header: {e}") from None
    vals = np.frombuffer(payload, dtype="<f4").reshape(channels, height, width)
    if np.isnan(vals).any():
        raise HgrdFormatError("payload contains NaN")
    return Raster(spec, vals.astype(np.float32))


def write_hgrd(path: str | Path | BinaryIO, raster: Raster) -> None:
    data = to_bytes(raster)
    if isinstance(path, (str, Path)):
        Path(path).write_bytes(data)
    else:
        path.write(data)


def read_hgrd(path: str | Path | BinaryIO) -> Raster:
    if isinstance(path, (str, Path)):
        data = Path(path).read_bytes()
    else:
        data = path.read()
    return from_bytes(data)


def heatmap_raster(heatmap) -> Raster:
    return Raster(heatmap.spec, np.asarray(heatmap.values, dtype=np.float32)[None])

