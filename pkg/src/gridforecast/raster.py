"""Top-view rasterization of scenarios and Gaussian target heatmaps.

Channel layout of a :class:`TopView` (27 channels):

* 0-4: map categories (lane centers, white lines, yellow lines, road edges,
  crosswalks), 1-pixel Bresenham strokes
* 5-15: target agent occupancy, oldest history frame first
* 16-26: union of all other agents, oldest history frame first
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from gridforecast import kernels
from gridforecast.gridgeom import GridSpec, world_to_pixel
from gridforecast.sampler import Heatmap
from gridforecast.scenario import (HISTORY_LEN, MAP_CATEGORIES, AgentState, AgentTrack,
                                   MapPolyline, Scenario)

N_MAP_CHANNELS = len(MAP_CATEGORIES)
N_CHANNELS = 2 * HISTORY_LEN + N_MAP_CHANNELS

DEFAULT_TARGET_SIGMA_M = 1.0


@dataclass(frozen=True)
class TopView:
    spec: GridSpec
    channels: np.ndarray

    def __post_init__(self):
        if self.channels.shape != (N_CHANNELS, *self.spec.shape):
            raise ValueError(f"top view must be {N_CHANNELS}x{self.spec.shape}, "
                             f"got {self.channels.shape}")

    @property
    def map_channels(self):
        return self.channels[:N_MAP_CHANNELS]

    @property
    def target_channels(self):
        return self.channels[N_MAP_CHANNELS:N_MAP_CHANNELS + HISTORY_LEN]

    @property
    def other_channels(self):
        return self.channels[N_MAP_CHANNELS + HISTORY_LEN:]


def _clip_segment(p0, p1, lo_r, hi_r, lo_c, hi_c):
    """Liang-Barsky clip of a grid-space segment; ``None`` if fully outside."""
    d = p1 - p0
    t0, t1 = 0.0, 1.0
    for p, q in ((-d[0], p0[0] - lo_r), (d[0], hi_r - p0[0]),
                 (-d[1], p0[1] - lo_c), (d[1], hi_c - p0[1])):
        if p == 0:
            if q < 0:
                return None
            continue
        r = q / p
        if p < 0:
            if r > t1:
                return None
            t0 = max(t0, r)
        else:
            if r < t0:
                return None
            t1 = min(t1, r)
    return p0 + t0 * d, p0 + t1 * d


def draw_polyline(out: np.ndarray, spec: GridSpec, points) -> None:
    """Draw a world-space polyline into a binary ``uint8`` raster in place."""
    g = spec.world_to_grid(np.asarray(points, dtype=np.float64).reshape(-1, 2))
    h, w = spec.shape
    for a, b in zip(g[:-1], g[1:]):
        # clip against a one-pixel margin so long segments stay cheap
        clipped = _clip_segment(a, b, -1.0, h + 1.0, -1.0, w + 1.0)
        if clipped is None:
            continue
        a, b = clipped
        kernels.draw_line(out, math.floor(a[0]), math.floor(a[1]),
                          math.floor(b[0]), math.floor(b[1]))


def rasterize_map(polylines: Sequence[MapPolyline], spec: GridSpec) -> np.ndarray:
    out = np.zeros((N_MAP_CHANNELS, *spec.shape), dtype=np.uint8)
    for line in polylines:
        draw_polyline(out[line.channel], spec, line.points)
    return out


def fill_box(out: np.ndarray, spec: GridSpec, center, length: float, width: float,
             yaw: float) -> None:
    """Set every pixel whose center lies in the oriented box.

    Box-local coordinates are tested half-open, ``[-L/2, L/2) x [-W/2, W/2)``,
    so axis-aligned boxes cover exactly ``L*W*ppm^2`` pixels.
    """
    if length <= 0 or width <= 0:
        return
    hl, hw = length / 2.0, width / 2.0
    c, s = math.cos(yaw), math.sin(yaw)
    corners = np.array([[center[0] + c * a - s * b, center[1] + s * a + c * b]
                        for a in (-hl, hl) for b in (-hw, hw)])
    g = spec.world_to_grid(corners)
    h, w = spec.shape
    r0 = max(int(math.floor(g[:, 0].min())) - 1, 0)
    r1 = min(int(math.ceil(g[:, 0].max())) + 1, h)
    c0 = max(int(math.floor(g[:, 1].min())) - 1, 0)
    c1 = min(int(math.ceil(g[:, 1].max())) + 1, w)
    if r0 >= r1 or c0 >= c1:
        return
    rr, cc = np.meshgrid(np.arange(r0, r1) + 0.5, np.arange(c0, c1) + 0.5, indexing="ij")
    world = spec.grid_to_world(np.stack([rr, cc], axis=-1))
    dx = world[..., 0] - center[0]
    dy = world[..., 1] - center[1]
    along = c * dx + s * dy
    across = -s * dx + c * dy
    # round away float noise so pixel centers on the box edge fall deterministically
    along = np.round(along, 9)
    across = np.round(across, 9)
    inside = (along >= -hl) & (along < hl) & (across >= -hw) & (across < hw)
    out[r0:r1, c0:c1] |= inside.astype(out.dtype)


def _fill_state(out, spec, st: AgentState):
    if st.valid:
        fill_box(out, spec, (st.x, st.y), st.length, st.width, st.yaw)


def rasterize_agents(tracks: Sequence[AgentTrack], target_id: int, spec: GridSpec) -> np.ndarray:
    """22 binary channels: 11 target frames, then 11 unioned other-agent frames."""
    ids = [tr.id for tr in tracks]
    if target_id not in ids:
        raise KeyError(f"target {target_id} not among tracks {ids}")
    out = np.zeros((2 * HISTORY_LEN, *spec.shape), dtype=np.uint8)
    for tr in tracks:
        if len(tr.states) != HISTORY_LEN:
            raise ValueError(f"track {tr.id} has {len(tr.states)} history states, "
                             f"expected {HISTORY_LEN}")
        base = 0 if tr.id == target_id else HISTORY_LEN
        for f, st in enumerate(tr.states):
            _fill_state(out[base + f], spec, st)
    return out


def rasterize(scenario: Scenario, target_id: int, spec: GridSpec) -> TopView:
    channels = np.concatenate([
        rasterize_map(scenario.map, spec),
        rasterize_agents(scenario.tracks, target_id, spec),
    ]).astype(np.float32)
    return TopView(spec, channels)


def gaussian_heatmap(spec: GridSpec, center, sigma_m: float) -> np.ndarray:
    if not sigma_m > 0:
        raise ValueError(f"sigma must be positive, got {sigma_m}")
    pts = spec.pixel_centers_world()
    d2 = (pts[..., 0] - center[0]) ** 2 + (pts[..., 1] - center[1]) ** 2
    return np.clip(np.exp(-d2 / (2.0 * sigma_m * sigma_m)), 0.0, 1.0)


def render_target_heatmap(gt_pos, spec: GridSpec, sigma_m: float = DEFAULT_TARGET_SIGMA_M) -> Heatmap:
    """Unnormalized Gaussian around ``gt_pos``; the containing pixel is set to 1.

    The pixel containing ``gt_pos`` is the positive cell for the focal loss,
    so it is pinned to exactly 1 rather than ``exp(-d^2/2s^2)`` of its
    sub-pixel offset.
    """
    values = gaussian_heatmap(spec, gt_pos, sigma_m)
    idx = world_to_pixel(spec, gt_pos)
    if idx is not None:
        values[idx] = 1.0
    return Heatmap(spec, values)
