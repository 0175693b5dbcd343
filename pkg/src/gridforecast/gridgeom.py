"""Grid geometry: mapping between world meters and raster pixels.

The grid frame is agent-centric. With ``yaw`` equal to the agent heading, the
agent drives "up" the image: row indices grow opposite to the heading
(longitudinal axis) and column indices grow towards the agent's right
(lateral axis). The world point ``origin_world`` sits at the center of the
``anchor`` pixel, which by default is placed at ``(3/4 H, 1/2 W)`` so that
most of the raster lies ahead of the agent.

A world point belongs to pixel ``(r, c)`` iff its continuous grid coordinate
falls in ``[r, r+1) x [c, c+1)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from gridforecast.metrics import gamma

DEFAULT_RESOLUTION = 256

# pixels per meter chosen so >= 99.9 % of ground truths stay inside 256x256
TIME_BASED_PPM = {3.0: 3.0, 5.0: 2.0, 8.0: 1.0}


def default_anchor(height_px: int, width_px: int) -> tuple[int, int]:
    return (height_px * 3) // 4, width_px // 2


@dataclass(frozen=True)
class GridSpec:
    height_px: int
    width_px: int
    pixels_per_meter: float
    origin_world: tuple[float, float] = (0.0, 0.0)
    yaw: float = 0.0
    anchor: tuple[int, int] | None = field(default=None)

    def __post_init__(self):
        if int(self.height_px) != self.height_px or self.height_px <= 0:
            raise ValueError(f"height_px must be a positive integer, got {self.height_px}")
        if int(self.width_px) != self.width_px or self.width_px <= 0:
            raise ValueError(f"width_px must be a positive integer, got {self.width_px}")
        if not (self.pixels_per_meter > 0 and math.isfinite(self.pixels_per_meter)):
            raise ValueError(f"pixels_per_meter must be positive, got {self.pixels_per_meter}")
        object.__setattr__(self, "height_px", int(self.height_px))
        object.__setattr__(self, "width_px", int(self.width_px))
        object.__setattr__(self, "pixels_per_meter", float(self.pixels_per_meter))
        ox, oy = self.origin_world
        object.__setattr__(self, "origin_world", (float(ox), float(oy)))
        object.__setattr__(self, "yaw", float(self.yaw))
        if self.anchor is None:
            anchor = default_anchor(self.height_px, self.width_px)
        else:
            anchor = (int(self.anchor[0]), int(self.anchor[1]))
        if not (0 <= anchor[0] < self.height_px and 0 <= anchor[1] < self.width_px):
            raise ValueError(f"anchor {anchor} outside {self.height_px}x{self.width_px} raster")
        object.__setattr__(self, "anchor", anchor)

    @property
    def shape(self) -> tuple[int, int]:
        return self.height_px, self.width_px

    @property
    def meters_per_pixel(self) -> float:
        return 1.0 / self.pixels_per_meter

    def with_ppm(self, pixels_per_meter: float) -> "GridSpec":
        return GridSpec(self.height_px, self.width_px, pixels_per_meter,
                        self.origin_world, self.yaw, self.anchor)

    def world_to_grid(self, points) -> np.ndarray:
        """Continuous (row, col) grid coordinates of world points, shape (..., 2)."""
        p = np.asarray(points, dtype=np.float64)
        dx = p[..., 0] - self.origin_world[0]
        dy = p[..., 1] - self.origin_world[1]
        c, s = math.cos(self.yaw), math.sin(self.yaw)
        lon = c * dx + s * dy
        lat = -s * dx + c * dy
        ppm = self.pixels_per_meter
        rows = self.anchor[0] + 0.5 - lon * ppm
        cols = self.anchor[1] + 0.5 - lat * ppm
        return np.stack([rows, cols], axis=-1)

    def grid_to_world(self, grid_coords) -> np.ndarray:
        """Inverse of :meth:`world_to_grid` for continuous grid coordinates."""
        g = np.asarray(grid_coords, dtype=np.float64)
        ppm = self.pixels_per_meter
        lon = (self.anchor[0] + 0.5 - g[..., 0]) / ppm
        lat = (self.anchor[1] + 0.5 - g[..., 1]) / ppm
        c, s = math.cos(self.yaw), math.sin(self.yaw)
        x = self.origin_world[0] + c * lon - s * lat
        y = self.origin_world[1] + s * lon + c * lat
        return np.stack([x, y], axis=-1)

    def in_bounds(self, rows, cols):
        rows = np.asarray(rows)
        cols = np.asarray(cols)
        return (rows >= 0) & (rows < self.height_px) & (cols >= 0) & (cols < self.width_px)

    def pixel_centers_world(self) -> np.ndarray:
        """World coordinates of every pixel center, shape (H, W, 2)."""
        rr, cc = np.meshgrid(np.arange(self.height_px) + 0.5,
                             np.arange(self.width_px) + 0.5, indexing="ij")
        return self.grid_to_world(np.stack([rr, cc], axis=-1))


def world_to_pixel(spec: GridSpec, p) -> tuple[int, int] | None:
    """Pixel index containing world point ``p``; ``None`` when off the raster."""
    g = spec.world_to_grid(p)
    r, c = math.floor(g[0]), math.floor(g[1])
    if 0 <= r < spec.height_px and 0 <= c < spec.width_px:
        return r, c
    return None


def world_to_pixel_many(spec: GridSpec, points) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized variant: returns integer (N, 2) indices and an in-bounds mask."""
    g = spec.world_to_grid(np.asarray(points, dtype=np.float64).reshape(-1, 2))
    idx = np.floor(g).astype(np.int64)
    mask = spec.in_bounds(idx[:, 0], idx[:, 1])
    return idx, mask


def pixel_to_world(spec: GridSpec, idx) -> np.ndarray:
    """World coordinate of the center of pixel ``idx = (row, col)``."""
    r, c = idx
    if int(r) != r or int(c) != c:
        raise ValueError(f"pixel index must be integral, got {idx!r}")
    if not (0 <= r < spec.height_px and 0 <= c < spec.width_px):
        raise IndexError(f"pixel {idx!r} outside {spec.height_px}x{spec.width_px} raster")
    return spec.grid_to_world((r + 0.5, c + 0.5))


def time_based_scale(t: float, interpolate: bool = False) -> float:
    """Pixels per meter for prediction horizon ``t`` seconds.

    Only 3, 5 and 8 s are tabulated. With ``interpolate`` the meters-per-pixel
    value is interpolated linearly between the tabulated horizons.
    """
    t = float(t)
    if t in TIME_BASED_PPM:
        return TIME_BASED_PPM[t]
    if not interpolate:
        raise ValueError(f"no time-based scale for horizon {t} s (defined: 3, 5, 8)")
    knots = sorted(TIME_BASED_PPM)
    if not knots[0] <= t <= knots[-1]:
        raise ValueError(f"horizon {t} s outside interpolation range [{knots[0]}, {knots[-1]}]")
    mpp = np.interp(t, knots, [1.0 / TIME_BASED_PPM[k] for k in knots])
    return float(1.0 / mpp)


def velocity_based_scale(v: float) -> float:
    """Pixels per meter ``1 / gamma(v)``, in [1, 2]."""
    return 1.0 / gamma(v)


def agent_grid(position, yaw: float, pixels_per_meter: float,
               resolution: int | Sequence[int] = DEFAULT_RESOLUTION) -> GridSpec:
    """Agent-centric grid anchored at ``position`` and aligned with ``yaw``."""
    if isinstance(resolution, int):
        h = w = resolution
    else:
        h, w = resolution
    return GridSpec(h, w, pixels_per_meter, (float(position[0]), float(position[1])), float(yaw))


def coverage_fraction(dataset: Iterable[tuple[Sequence[float], GridSpec]]) -> float:
    """Fraction of ground-truth positions that land inside their grid."""
    total = 0
    inside = 0
    for gt, spec in dataset:
        total += 1
        if world_to_pixel(spec, gt) is not None:
            inside += 1
    if total == 0:
        raise ValueError("coverage_fraction needs a nonempty dataset")
    return inside / total
