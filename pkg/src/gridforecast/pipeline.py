"""Scenario -> heatmap -> samples -> metrics glue used by the CLI and tests."""
from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from gridforecast.baseline import BaselineConfig, grid_for, predict_heatmap
from gridforecast.gridgeom import DEFAULT_RESOLUTION, coverage_fraction, world_to_pixel
from gridforecast.metrics import HORIZONS, GroundTruth, PredictionSet
from gridforecast.sampler import SampleSet, sample_pipeline
from gridforecast.scenario import AgentTrack, Scenario


def ground_truth(scenario: Scenario, target_id: int,
                 horizons: Sequence[float] = HORIZONS) -> GroundTruth:
    tr = scenario.track(target_id)
    cur = tr.current
    positions, yaws, valid = {}, {}, {}
    for t in map(float, horizons):
        st = tr.future_at(t, scenario.timestep_s)
        ok = st is not None and st.valid
        valid[t] = ok
        positions[t] = (st.x, st.y) if ok else (np.nan, np.nan)
        yaws[t] = st.yaw if ok else 0.0
    traj = np.array([(s.x, s.y) for s in tr.future], dtype=np.float64).reshape(-1, 2)
    return GroundTruth(
        target_id=target_id, positions=positions, yaws=yaws, valid=valid, v0=cur.speed,
        trajectory=traj,
        trajectory_yaws=np.array([s.yaw for s in tr.future], dtype=np.float64),
        trajectory_valid=np.array([s.valid for s in tr.future], dtype=bool),
        yaw0=cur.yaw, position0=(cur.x, cur.y), scenario_id=scenario.scenario_id,
    )


def predict_track(track: AgentTrack, horizons: Sequence[float] = HORIZONS, n: int = 6,
                  policy: str = "velocity", ppm: float | None = None,
                  cfg: BaselineConfig = BaselineConfig(),
                  resolution: int = DEFAULT_RESOLUTION,
                  normalize: bool = False) -> dict[float, SampleSet]:
    out = {}
    speed = track.current.speed
    for t in map(float, horizons):
        spec = grid_for(track, t, policy, ppm, resolution)
        heat = predict_heatmap(track, t, spec, cfg)
        out[t] = sample_pipeline(heat, speed, t, n, normalize=normalize)
    return out


def to_prediction_set(target_id: int, scenario_id: str, samples: dict[float, SampleSet],
                      use_raw: bool = False) -> PredictionSet:
    horizons = {}
    for t, s in samples.items():
        confs = s.confidences_raw if use_raw else s.confidences
        horizons[t] = [(x, y, c) for (x, y), c in zip(s.coordinates, confs)]
    n = max((len(s) for s in samples.values()), default=0)
    return PredictionSet(target_id, horizons, scenario_id, max(n, 6))


def predict_scenarios(scenarios: Iterable[Scenario], horizons: Sequence[float] = HORIZONS,
                      n: int = 6, **kwargs) -> list[tuple[str, int, dict[float, SampleSet]]]:
    out = []
    for sc in scenarios:
        for tid in sc.targets:
            out.append((sc.scenario_id, tid, predict_track(sc.track(tid), horizons, n, **kwargs)))
    return out


def ground_truths(scenarios: Iterable[Scenario],
                  horizons: Sequence[float] = HORIZONS) -> list[GroundTruth]:
    return [ground_truth(sc, tid, horizons) for sc in scenarios for tid in sc.targets]


def in_grid(track: AgentTrack, position, t: float, policy: str = "velocity",
            ppm: float | None = None, resolution: int = DEFAULT_RESOLUTION) -> bool:
    return world_to_pixel(grid_for(track, t, policy, ppm, resolution), position) is not None


def coverage_sweep(scenarios: Sequence[Scenario], ppms: Sequence[float],
                   horizons: Sequence[float] = HORIZONS,
                   resolution: int = DEFAULT_RESOLUTION) -> list[tuple[float, float, float]]:
    """(ppm, horizon, coverage_fraction) rows over agent-centric static grids."""
    rows = []
    gts = [(sc.track(tid), ground_truth(sc, tid, horizons)) for sc in scenarios for tid in sc.targets]
    for ppm in ppms:
        for t in map(float, horizons):
            data = [(g.positions[t], grid_for(tr, t, "static", ppm, resolution))
                    for tr, g in gts if g.is_valid(t)]
            rows.append((float(ppm), t, coverage_fraction(data)))
    return rows
