"""Deterministic synthetic driving scenarios.

Each scenario has one target agent whose motion kind is drawn from a mix,
a few constant-velocity background agents and a straight road (lane center
along the target path, two road edges). Ground-truth futures are stored for
the target.
"""
from __future__ import annotations

import math

import numpy as np

from gridforecast.scenario import (FUTURE_LEN, HISTORY_LEN, TIMESTEP_S, AgentState, AgentTrack,
                                   AgentType, MapPolyline, Scenario)

# motion kind -> intent bucket it is built to land in
MOTION_KINDS = {
    "stationary": "stationary",
    "constant_velocity": "straight",
    "stopping": "straight",
    "lane_change_left": "straight_left",
    "lane_change_right": "straight_right",
    "turn_left": "left",
    "turn_right": "right",
    "u_turn_left": "left_u_turn",
    "u_turn_right": "right_u_turn",
}

DEFAULT_MIX = {
    "stationary": 0.1,
    "constant_velocity": 0.35,
    "stopping": 0.1,
    "lane_change_left": 0.05,
    "lane_change_right": 0.05,
    "turn_left": 0.12,
    "turn_right": 0.12,
    "u_turn_left": 0.05,
    "u_turn_right": 0.06,
}

_TIMES = np.arange(-(HISTORY_LEN - 1), FUTURE_LEN + 1) * TIMESTEP_S


def parse_mix(text: str) -> dict[str, float]:
    """``"turn_left=1,constant_velocity=2"`` -> weights dict."""
    mix = {}
    for part in filter(None, (p.strip() for p in text.split(","))):
        key, sep, val = part.partition("=")
        if not sep:
            raise ValueError(f"mix entry {part!r} is not kind=weight")
        try:
            mix[key.strip()] = float(val)
        except ValueError:
            raise ValueError(f"mix weight {val!r} is not a number") from None
    return mix


def check_mix(mix: dict[str, float]) -> dict[str, float]:
    unknown = set(mix) - set(MOTION_KINDS)
    if unknown:
        raise ValueError(f"unknown motion kinds {sorted(unknown)}; known: {sorted(MOTION_KINDS)}")
    if any(not (w >= 0 and math.isfinite(w)) for w in mix.values()):
        raise ValueError("mix weights must be finite and non-negative")
    total = sum(mix.values())
    if total <= 0:
        raise ValueError("mix weights sum to zero")
    return {k: w / total for k, w in mix.items() if w > 0}


def allocate(mix: dict[str, float], n: int) -> list[str]:
    """Largest-remainder split of ``n`` scenarios over the kinds.

    Every kind with positive weight gets at least one scenario when ``n``
    allows it.
    """
    weights = check_mix(mix)
    kinds = [k for k in MOTION_KINDS if k in weights]
    quota = np.array([weights[k] * n for k in kinds])
    counts = np.floor(quota).astype(int)
    rest = n - counts.sum()
    order = np.lexsort((np.arange(len(kinds)), -(quota - counts)))
    counts[order[:rest]] += 1
    if n >= len(kinds):
        for i in range(len(kinds)):
            if counts[i] == 0:
                counts[int(np.argmax(counts))] -= 1
                counts[i] = 1
    return [k for k, c in zip(kinds, counts) for _ in range(c)]


def _local_motion(kind: str, rng: np.random.Generator):
    """Positions (N, 2), velocities (N, 2) and yaws (N,) in the agent frame at t0."""
    t = _TIMES
    zeros = np.zeros_like(t)
    if kind == "stationary":
        return np.stack([zeros, zeros], 1), np.stack([zeros, zeros], 1), zeros
    if kind == "constant_velocity":
        s = rng.uniform(2.0, 30.0)
        return np.stack([s * t, zeros], 1), np.stack([zeros + s, zeros], 1), zeros
    if kind == "stopping":
        s = rng.uniform(5.0, 20.0)
        a = rng.uniform(1.5, 4.0)
        tf = np.clip(t, 0.0, s / a)
        x = np.where(t <= 0, s * t, s * tf - 0.5 * a * tf ** 2)
        v = np.where(t <= 0, s, s - a * tf)
        return np.stack([x, zeros], 1), np.stack([v, zeros], 1), zeros
    if kind.startswith("lane_change"):
        sign = 1.0 if kind.endswith("left") else -1.0
        s = rng.uniform(8.0, 25.0)
        d = sign * rng.uniform(6.0, 9.0)
        dur = rng.uniform(4.0, 7.0)
        u = np.clip(t / dur, 0.0, 1.0)
        y = d * (3 * u ** 2 - 2 * u ** 3)
        vy = np.where((t > 0) & (t < dur), d * (6 * u - 6 * u ** 2) / dur, 0.0)
        vx = zeros + s
        return np.stack([s * t, y], 1), np.stack([vx, vy], 1), np.arctan2(vy, vx)
    if kind.startswith("turn") or kind.startswith("u_turn"):
        sign = 1.0 if kind.endswith("left") else -1.0
        if kind.startswith("turn"):
            s = rng.uniform(4.0, 12.0)
            heading = math.radians(rng.uniform(60.0, 110.0))
        else:
            s = rng.uniform(3.0, 7.0)
            heading = math.radians(rng.uniform(160.0, 178.0))
        w = sign * heading / (FUTURE_LEN * TIMESTEP_S)
        yaw = w * t
        x = s / w * np.sin(yaw)
        y = s / w * (1.0 - np.cos(yaw))
        return np.stack([x, y], 1), np.stack([s * np.cos(yaw), s * np.sin(yaw)], 1), yaw
    raise ValueError(f"unknown motion kind {kind!r}")


def _to_world(pos, vel, yaw, origin, heading):
    c, s = math.cos(heading), math.sin(heading)
    rot = np.array([[c, -s], [s, c]])
    return pos @ rot.T + origin, vel @ rot.T, yaw + heading


def _wrap(a):
    return (a + np.pi) % (2 * np.pi) - np.pi


def _states(pos, vel, yaw, width, length, agent_type, valid=None):
    out = []
    for i in range(len(pos)):
        if valid is not None and not valid[i]:
            out.append(AgentState.invalid())
            continue
        vx, vy = float(vel[i, 0]), float(vel[i, 1])
        speed = math.hypot(vx, vy)
        vyaw = math.atan2(vy, vx) if speed > 1e-9 else float(_wrap(yaw[i]))
        out.append(AgentState(float(pos[i, 0]), float(pos[i, 1]), True, vx, vy, speed,
                              width, length, float(_wrap(yaw[i])), vyaw, agent_type))
    return out


def generate_scenario(kind: str, rng: np.random.Generator, scenario_id: str = "",
                      n_background: tuple[int, int] = (2, 6)) -> Scenario:
    origin = rng.uniform(-500.0, 500.0, size=2)
    heading = rng.uniform(-math.pi, math.pi)
    pos, vel, yaw = _to_world(*_local_motion(kind, rng), origin, heading)
    width, length = float(rng.uniform(1.8, 2.2)), float(rng.uniform(4.0, 5.2))
    states = _states(pos, vel, yaw, width, length, AgentType.VEHICLE)
    target = AgentTrack(0, states[:HISTORY_LEN], states[HISTORY_LEN:])
    tracks = [target]

    c, s = math.cos(heading), math.sin(heading)
    for i in range(int(rng.integers(n_background[0], n_background[1] + 1))):
        offset = rng.uniform(-40.0, 40.0, size=2)
        lane_heading = heading + (math.pi if rng.random() < 0.3 else 0.0)
        speed = rng.uniform(0.0, 15.0)
        t = _TIMES[:HISTORY_LEN]
        p0 = origin + np.array([c * offset[0] - s * offset[1], s * offset[0] + c * offset[1]])
        v = speed * np.array([math.cos(lane_heading), math.sin(lane_heading)])
        bpos = p0 + t[:, None] * v
        bvel = np.tile(v, (HISTORY_LEN, 1))
        byaw = np.full(HISTORY_LEN, lane_heading)
        valid = rng.random(HISTORY_LEN) > 0.1
        atype = AgentType(int(rng.choice([0, 1, 1, 1, 2])))
        dims = {AgentType.PEDESTRIAN: (0.6, 0.6), AgentType.VEHICLE: (2.0, 4.5),
                AgentType.CYCLIST: (0.7, 1.8)}[atype]
        tracks.append(AgentTrack(i + 1, _states(bpos, bvel, byaw, dims[0], dims[1], atype, valid)))

    # road along the initial heading plus the target's own path as lane center
    along = np.array([-60.0, 120.0])
    axis = np.array([c, s])
    normal = np.array([-s, c])
    road = [MapPolyline("lane_center", pos[::10])]
    for side in (-1.0, 1.0):
        edge = origin + along[:, None] * axis + side * 5.25 * normal
        road.append(MapPolyline("road_edge", edge))
    road.append(MapPolyline("white_line", origin + along[:, None] * axis + 1.75 * normal))
    if rng.random() < 0.3:
        cw = origin + 30.0 * axis + np.array([-6.0, 6.0])[:, None] * normal
        road.append(MapPolyline("crosswalk", cw))
    return Scenario(tracks, road, [0], scenario_id=scenario_id)


def generate_synthetic(seed: int, n_scenarios: int,
                       motion_mix: dict[str, float] | None = None) -> list[Scenario]:
    """``n_scenarios`` scenarios; identical arguments give identical output."""
    if n_scenarios < 1:
        raise ValueError("n_scenarios must be >= 1")
    rng = np.random.default_rng(seed)
    kinds = allocate(DEFAULT_MIX if motion_mix is None else motion_mix, n_scenarios)
    kinds = [kinds[i] for i in rng.permutation(len(kinds))]
    return [generate_scenario(k, rng, str(i)) for i, k in enumerate(kinds)]
