"""Greedy, non-overlapping coordinate sampling from probability heatmaps.

Every sampled position "covers" the miss-rate rectangle around it. The
heatmap is box-summed with a window the size of that rectangle, then the
best window is taken repeatedly while the area it covers is blanked out, so
the returned positions cover disjoint parts of the grid.

Grid rows run along the longitudinal axis and columns along the lateral
axis (see :mod:`gridforecast.gridgeom`), so the window spans ``k_lon`` rows
and ``k_lat`` columns.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from gridforecast import kernels
from gridforecast.gridgeom import GridSpec, pixel_to_world
from gridforecast.metrics import MAX_PREDICTIONS, gamma, miss_threshold


@dataclass(frozen=True)
class Heatmap:
    spec: GridSpec
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.shape != self.spec.shape:
            raise ValueError(f"heatmap shape {vals.shape} does not match grid {self.spec.shape}")
        object.__setattr__(self, "values", vals)


@dataclass(frozen=True)
class KernelSize:
    k_lat: int
    k_lon: int

    def __post_init__(self):
        for name in ("k_lat", "k_lon"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise ValueError(f"{name} must be a positive integer, got {v}")
            object.__setattr__(self, name, int(v))

    @property
    def rows(self) -> int:
        return self.k_lon

    @property
    def cols(self) -> int:
        return self.k_lat

    @property
    def half_rows(self) -> int:
        return (self.k_lon - 1) // 2

    @property
    def half_cols(self) -> int:
        return (self.k_lat - 1) // 2


@dataclass
class SampleSet:
    coordinates: list[tuple[float, float]] = field(default_factory=list)
    confidences: list[float] = field(default_factory=list)
    confidences_raw: list[float] = field(default_factory=list)
    pixels: list[tuple[int, int]] = field(default_factory=list)

    def __len__(self):
        return len(self.coordinates)

    def to_dict(self) -> dict:
        return {
            "samples": [
                {"x": x, "y": y, "confidence": c, "confidence_raw": cr}
                for (x, y), c, cr in zip(self.coordinates, self.confidences, self.confidences_raw)
            ]
        }


def raw_kernel_size(v: float, t: float, ppm: float) -> tuple[int, int]:
    """Unadjusted ``floor(4 * gamma(v) * lambda_t * ppm)`` per axis as (lat, lon)."""
    if not ppm > 0:
        raise ValueError(f"pixels_per_meter must be positive, got {ppm}")
    lat, lon = miss_threshold(t)
    g = gamma(v)
    # the tiny epsilon keeps exact products like 4*0.75*1.0*(4/3)=4 from flooring to 3
    return (math.floor(4.0 * g * lat * ppm + 1e-9), math.floor(4.0 * g * lon * ppm + 1e-9))


def _odd(k: int) -> int:
    if k % 2 == 0:
        k -= 1
    return max(k, 1)


def kernel_size(v: float, t: float, ppm: float) -> KernelSize:
    k_lat, k_lon = raw_kernel_size(v, t, ppm)
    return KernelSize(_odd(k_lat), _odd(k_lon))


def box_sum(h, k: KernelSize) -> np.ndarray:
    """Sum of ``h`` over a centered window at every pixel, zero padded."""
    values = h.values if isinstance(h, Heatmap) else np.asarray(h)
    values = np.ascontiguousarray(values, dtype=np.float64)
    if values.ndim != 2:
        raise ValueError(f"expected a 2-D raster, got shape {values.shape}")
    if k.rows % 2 == 0 or k.cols % 2 == 0:
        raise ValueError(f"kernel must be odd in both axes, got {k}")
    hgt, wid = values.shape
    if k.rows > 2 * hgt or k.cols > 2 * wid:
        raise ValueError(f"kernel {k.rows}x{k.cols} larger than twice the {hgt}x{wid} raster")
    return np.asarray(kernels.box_sum(values, k.rows, k.cols))


def greedy_sample(convolved, num_samples: int, k: KernelSize, spec: GridSpec) -> SampleSet:
    """Pick up to ``num_samples`` maxima, blanking a ``k`` window after each pick.

    Works on a copy; ``convolved`` is left untouched.
    """
    if num_samples < 1:
        raise ValueError(f"num_samples must be >= 1, got {num_samples}")
    work = np.array(convolved, dtype=np.float64, order="C", copy=True)
    if work.shape != spec.shape:
        raise ValueError(f"raster shape {work.shape} does not match grid {spec.shape}")
    if np.isnan(work).any():
        raise ValueError("convolved raster contains NaN")
    rows, cols, confs = kernels.greedy_sample(work, int(num_samples), k.half_rows, k.half_cols)
    out = SampleSet()
    for r, c, conf in zip(rows, cols, confs):
        x, y = pixel_to_world(spec, (r, c))
        out.coordinates.append((float(x), float(y)))
        out.pixels.append((int(r), int(c)))
        out.confidences.append(float(conf))
    out.confidences_raw = list(out.confidences)
    return out


def sample_pipeline(h: Heatmap, v: float, t: float, num_samples: int = MAX_PREDICTIONS,
                    normalize: bool = False) -> SampleSet:
    """Kernel sizing, box summation and greedy sampling in one call.

    ``h.spec.pixels_per_meter`` must be the scale the heatmap was produced
    at. With ``normalize`` the confidences sum to one; the raw window sums
    stay in ``confidences_raw``.
    """
    k = kernel_size(v, t, h.spec.pixels_per_meter)
    conv = box_sum(h, k)
    samples = greedy_sample(conv, num_samples, k, h.spec)
    if normalize:
        total = sum(samples.confidences_raw)
        if total > 0:
            samples.confidences = [c / total for c in samples.confidences_raw]
    return samples
