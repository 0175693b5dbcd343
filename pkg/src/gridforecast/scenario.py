"""Scenario data model: agent tracks with kinematic states and map polylines."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

HISTORY_LEN = 11
FUTURE_LEN = 80
TIMESTEP_S = 0.1
MAX_AGENTS = 128

MAP_CATEGORIES = ("lane_center", "white_line", "yellow_line", "road_edge", "crosswalk")


class AgentType(IntEnum):
    PEDESTRIAN = 0
    VEHICLE = 1
    CYCLIST = 2


@dataclass(frozen=True)
class AgentState:
    x: float = 0.0
    y: float = 0.0
    valid: bool = True
    vx: float = 0.0
    vy: float = 0.0
    speed: float = 0.0
    width: float = 0.0
    length: float = 0.0
    yaw: float = 0.0
    velocity_yaw: float = 0.0
    agent_type: AgentType = AgentType.VEHICLE

    @classmethod
    def invalid(cls) -> "AgentState":
        return cls(valid=False)

    @classmethod
    def moving(cls, x, y, vx, vy, yaw=None, width=2.0, length=4.5,
               agent_type=AgentType.VEHICLE) -> "AgentState":
        """State whose speed and velocity yaw are derived from ``(vx, vy)``."""
        speed = math.hypot(vx, vy)
        vyaw = math.atan2(vy, vx) if speed > 0 else (yaw or 0.0)
        return cls(float(x), float(y), True, float(vx), float(vy), speed, float(width),
                   float(length), float(vyaw if yaw is None else yaw), vyaw, AgentType(agent_type))

    @property
    def position(self) -> tuple[float, float]:
        return self.x, self.y

    @property
    def features(self) -> tuple:
        """The 11 per-agent features in their canonical order."""
        return (self.x, self.y, float(self.valid), self.vx, self.vy, self.speed,
                self.width, self.length, self.yaw, self.velocity_yaw, int(self.agent_type))


@dataclass(frozen=True)
class AgentTrack:
    id: int
    states: tuple[AgentState, ...]
    future: tuple[AgentState, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "future", tuple(self.future))

    @property
    def current(self) -> AgentState:
        return self.states[-1]

    def future_at(self, t: float, timestep_s: float = TIMESTEP_S) -> AgentState | None:
        """Future state ``t`` seconds after the current frame."""
        i = int(round(t / timestep_s)) - 1
        if 0 <= i < len(self.future):
            return self.future[i]
        return None


@dataclass(frozen=True)
class MapPolyline:
    category: str
    points: np.ndarray

    def __post_init__(self):
        if self.category not in MAP_CATEGORIES:
            raise ValueError(f"unknown map category {self.category!r}")
        pts = np.asarray(self.points, dtype=np.float64).reshape(-1, 2)
        if len(pts) < 2:
            raise ValueError("a polyline needs at least 2 points")
        object.__setattr__(self, "points", pts)

    @property
    def channel(self) -> int:
        return MAP_CATEGORIES.index(self.category)


@dataclass
class Scenario:
    tracks: list[AgentTrack]
    map: list[MapPolyline] = field(default_factory=list)
    targets: list[int] = field(default_factory=list)
    timestep_s: float = TIMESTEP_S
    history_len: int = HISTORY_LEN
    future_len: int = FUTURE_LEN
    scenario_id: str = ""

    def track(self, track_id: int) -> AgentTrack:
        for tr in self.tracks:
            if tr.id == track_id:
                return tr
        raise KeyError(f"no track with id {track_id}")
