"""Analytic heatmap predictors (no learned model).

The predicted position is extrapolated from the current state and smeared
with a Gaussian whose width grows linearly with the horizon.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from gridforecast.gridgeom import (DEFAULT_RESOLUTION, GridSpec, agent_grid, time_based_scale,
                                   velocity_based_scale)
from gridforecast.raster import render_target_heatmap
from gridforecast.sampler import Heatmap
from gridforecast.scenario import TIMESTEP_S, AgentTrack

KINDS = ("constant_velocity", "constant_heading_rate")


@dataclass(frozen=True)
class BaselineConfig:
    kind: str = "constant_velocity"
    sigma_growth: float = 0.5
    base_sigma: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown baseline kind {self.kind!r}")
        if self.sigma_growth < 0:
            raise ValueError("sigma_growth must be >= 0")
        if not self.base_sigma > 0:
            raise ValueError("base_sigma must be > 0")

    def sigma(self, t: float) -> float:
        return self.base_sigma + self.sigma_growth * t


def _wrap(a):
    return (a + math.pi) % (2 * math.pi) - math.pi


def yaw_rate(track: AgentTrack, timestep_s: float = TIMESTEP_S) -> float:
    """Heading rate from the last two valid history frames (0 if unavailable)."""
    valid = [i for i, st in enumerate(track.states) if st.valid]
    if len(valid) < 2:
        return 0.0
    i, j = valid[-2], valid[-1]
    a, b = track.states[i], track.states[j]
    return _wrap(b.velocity_yaw - a.velocity_yaw) / ((j - i) * timestep_s)


def extrapolate(track: AgentTrack, t: float, kind: str = "constant_velocity",
                timestep_s: float = TIMESTEP_S) -> tuple[float, float]:
    st = track.current
    if not st.valid:
        raise ValueError(f"track {track.id}: current state is invalid")
    if kind == "constant_velocity":
        return st.x + st.vx * t, st.y + st.vy * t
    w = yaw_rate(track, timestep_s)
    speed = math.hypot(st.vx, st.vy)
    if abs(w) < 1e-6:
        return st.x + st.vx * t, st.y + st.vy * t
    th = math.atan2(st.vy, st.vx)
    r = speed / w
    return (st.x + r * (math.sin(th + w * t) - math.sin(th)),
            st.y - r * (math.cos(th + w * t) - math.cos(th)))


def grid_for(track: AgentTrack, t: float, policy: str = "velocity", ppm: float | None = None,
             resolution: int = DEFAULT_RESOLUTION) -> GridSpec:
    """Agent-centric grid for ``track`` under a scaling policy.

    ``policy`` is ``"static"`` (uses ``ppm``), ``"time"`` or ``"velocity"``.
    """
    st = track.current
    if policy == "static":
        if ppm is None:
            raise ValueError("static scaling needs an explicit pixels_per_meter")
        scale = ppm
    elif policy == "time":
        scale = time_based_scale(t)
    elif policy == "velocity":
        scale = velocity_based_scale(st.speed)
    else:
        raise ValueError(f"unknown scaling policy {policy!r}")
    return agent_grid(st.position, st.yaw, scale, resolution)


def predict_heatmap(track: AgentTrack, t: float, spec: GridSpec,
                    cfg: BaselineConfig = BaselineConfig()) -> Heatmap:
    center = extrapolate(track, t, cfg.kind)
    return render_target_heatmap(center, spec, cfg.sigma(t))
