"""Waymo-style motion forecasting metrics.

Predictions are compared against ground truth at a few fixed horizons
(3, 5 and 8 seconds). A prediction "hits" when it lies inside a rectangle
around the ground truth that is aligned with the agent heading at the
horizon and scaled by a speed-dependent factor.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

HORIZONS = (3.0, 5.0, 8.0)
MAX_PREDICTIONS = 6

# (lateral, longitudinal) thresholds in meters
MISS_THRESHOLDS = {
    3.0: (1.0, 2.0),
    5.0: (1.8, 3.6),
    8.0: (3.0, 6.0),
}

_V_LOW = 1.4
_V_HIGH = 11.0

BUCKETS = (
    "stationary",
    "straight",
    "straight_left",
    "straight_right",
    "left",
    "right",
    "left_u_turn",
    "right_u_turn",
)


def gamma(v: float) -> float:
    """Speed scale factor in [0.5, 1] applied to the miss thresholds."""
    v = float(v)
    if not v >= 0:
        raise ValueError(f"speed must be non-negative, got {v}")
    h = (v - _V_LOW) / (_V_HIGH - _V_LOW)
    f = max(min(h, 1.0), 0.0)
    return f / 2.0 + 0.5


def miss_threshold(t: float) -> tuple[float, float]:
    """(lateral, longitudinal) miss-rate threshold in meters for horizon ``t``."""
    try:
        return MISS_THRESHOLDS[float(t)]
    except KeyError:
        raise ValueError(f"no miss threshold for horizon {t} s (defined: 3, 5, 8)") from None


# the table symbol; kept as an alias for readability at call sites
lambda_t = miss_threshold


@dataclass(frozen=True)
class MissThreshold:
    lat: float
    lon: float
    scale: float

    @classmethod
    def for_horizon(cls, t: float, v0: float) -> "MissThreshold":
        lat, lon = miss_threshold(t)
        return cls(lat, lon, gamma(v0))

    def contains(self, d_lon: float, d_lat: float) -> bool:
        return abs(d_lon) <= self.scale * self.lon and abs(d_lat) <= self.scale * self.lat


def _to_agent_frame(d, yaw):
    c, s = math.cos(yaw), math.sin(yaw)
    return c * d[0] + s * d[1], -s * d[0] + c * d[1]


def is_hit(pred, gt_pos, gt_yaw: float, v0: float, t: float) -> bool:
    thr = MissThreshold.for_horizon(t, v0)
    d = (float(pred[0]) - float(gt_pos[0]), float(pred[1]) - float(gt_pos[1]))
    d_lon, d_lat = _to_agent_frame(d, gt_yaw)
    return thr.contains(d_lon, d_lat)


@dataclass
class PredictionSet:
    """Predicted positions for one target, keyed by horizon in seconds.

    Each horizon maps to a list of ``(x, y, confidence)`` tuples in greedy
    (descending confidence) order.
    """

    target_id: int
    horizons: dict[float, list[tuple[float, float, float]]] = field(default_factory=dict)
    scenario_id: str = ""
    max_predictions: int = MAX_PREDICTIONS

    def __post_init__(self):
        self.horizons = {float(t): [tuple(map(float, p)) for p in preds]
                         for t, preds in self.horizons.items()}
        for t, preds in self.horizons.items():
            self._check(t, preds)

    def _check(self, t, preds):
        if len(preds) > self.max_predictions:
            raise ValueError(f"target {self.target_id}: {len(preds)} predictions at {t} s "
                             f"exceeds limit of {self.max_predictions}")
        for p in preds:
            if len(p) != 3:
                raise ValueError("prediction entries are (x, y, confidence)")
            if not p[2] >= 0:
                raise ValueError(f"target {self.target_id}: negative confidence {p[2]}")

    def add(self, t: float, x: float, y: float, confidence: float) -> None:
        preds = self.horizons.setdefault(float(t), [])
        entry = (float(x), float(y), float(confidence))
        self._check(t, preds + [entry])
        preds.append(entry)

    def at(self, t: float) -> list[tuple[float, float, float]]:
        return self.horizons.get(float(t), [])

    def truncated(self, n: int) -> "PredictionSet":
        return PredictionSet(self.target_id, {t: p[:n] for t, p in self.horizons.items()},
                             self.scenario_id, max(self.max_predictions, n))


@dataclass
class GroundTruth:
    """Ground truth for one target.

    ``positions``/``yaws``/``valid`` are keyed by horizon. ``trajectory`` holds
    the full future (N, 2) positions and ``trajectory_yaws`` the matching
    headings; both are used only for intent bucketing.
    """

    target_id: int
    positions: dict[float, tuple[float, float]]
    yaws: dict[float, float]
    valid: dict[float, bool]
    v0: float
    trajectory: np.ndarray | None = None
    trajectory_yaws: np.ndarray | None = None
    trajectory_valid: np.ndarray | None = None
    yaw0: float = 0.0
    position0: tuple[float, float] = (0.0, 0.0)
    scenario_id: str = ""

    def is_valid(self, t: float) -> bool:
        return bool(self.valid.get(float(t), False))


def _check_aligned(preds, gts):
    if len(preds) != len(gts):
        raise ValueError(f"{len(preds)} prediction sets for {len(gts)} ground truths")
    for p, g in zip(preds, gts):
        if p.target_id != g.target_id or p.scenario_id != g.scenario_id:
            raise ValueError(f"misaligned prediction ({p.scenario_id!r}, {p.target_id}) "
                             f"and ground truth ({g.scenario_id!r}, {g.target_id})")


def hits_at(pred: PredictionSet, gt: GroundTruth, t: float) -> list[bool]:
    t = float(t)
    return [is_hit((x, y), gt.positions[t], gt.yaws[t], gt.v0, t) for x, y, _ in pred.at(t)]


def miss_rate(preds: Sequence[PredictionSet], gts: Sequence[GroundTruth], t: float) -> float:
    """Share of valid targets with no prediction inside the threshold at ``t``."""
    _check_aligned(preds, gts)
    t = float(t)
    n_valid = 0
    n_miss = 0
    for p, g in zip(preds, gts):
        if not g.is_valid(t):
            continue
        n_valid += 1
        if not any(hits_at(p, g, t)):
            n_miss += 1
    if n_valid == 0:
        raise ValueError(f"no valid targets at horizon {t} s")
    return n_miss / n_valid


def min_fde(pred: PredictionSet, gt: GroundTruth, t: float) -> float:
    t = float(t)
    preds = pred.at(t)
    if not preds:
        return math.inf
    gx, gy = gt.positions[t]
    return min(math.hypot(x - gx, y - gy) for x, y, _ in preds)


def min_ade(pred: PredictionSet, gt: GroundTruth, horizons: Sequence[float] = HORIZONS) -> float:
    """Smallest per-slot displacement averaged over the valid horizons.

    Slot ``k`` is the k-th prediction at every horizon; only slots present at
    all valid horizons are considered.
    """
    ts = [float(t) for t in horizons if gt.is_valid(t)]
    if not ts:
        return math.nan
    n_slots = min(len(pred.at(t)) for t in ts)
    if n_slots == 0:
        return math.inf
    dist = np.empty((n_slots, len(ts)))
    for j, t in enumerate(ts):
        gx, gy = gt.positions[t]
        for k, (x, y, _) in enumerate(pred.at(t)[:n_slots]):
            dist[k, j] = math.hypot(x - gx, y - gy)
    return float(dist.mean(axis=1).min())


def min_displacement(preds: Sequence[PredictionSet], gts: Sequence[GroundTruth], t: float,
                     horizons: Sequence[float] = HORIZONS) -> tuple[list[float], list[float]]:
    """Per-target minFDE at ``t`` and minADE over ``horizons`` (valid targets at ``t``)."""
    _check_aligned(preds, gts)
    fdes, ades = [], []
    for p, g in zip(preds, gts):
        if not g.is_valid(t):
            continue
        fdes.append(min_fde(p, g, t))
        ades.append(min_ade(p, g, horizons))
    return fdes, ades


@dataclass(frozen=True)
class BucketConfig:
    stationary_m: float = 2.0
    u_turn_deg: float = 135.0
    turn_deg: float = 30.0
    lateral_m: float = 5.0


def _wrap(a):
    return (a + math.pi) % (2 * math.pi) - math.pi


def bucket(positions, yaws=None, valid=None, cfg: BucketConfig = BucketConfig()) -> str:
    """Intent bucket of a trajectory from its first to last valid state.

    Headings come from ``yaws`` when given, otherwise from the first and last
    displacement segments.
    """
    pts = np.asarray(positions, dtype=np.float64).reshape(-1, 2)
    mask = np.ones(len(pts), bool) if valid is None else np.asarray(valid, bool)
    idx = np.flatnonzero(mask)
    if len(idx) < 2:
        return "stationary"
    first, last = idx[0], idx[-1]
    disp = pts[last] - pts[first]
    if math.hypot(*disp) < cfg.stationary_m:
        return "stationary"
    if yaws is not None:
        y = np.asarray(yaws, dtype=np.float64)
        yaw0, yaw1 = float(y[first]), float(y[last])
    else:
        d0 = pts[idx[1]] - pts[first]
        d1 = pts[last] - pts[idx[-2]]
        yaw0 = math.atan2(d0[1], d0[0])
        yaw1 = math.atan2(d1[1], d1[0])
    turn = math.degrees(_wrap(yaw1 - yaw0))
    if abs(turn) > cfg.u_turn_deg:
        return "left_u_turn" if turn > 0 else "right_u_turn"
    if abs(turn) > cfg.turn_deg:
        return "left" if turn > 0 else "right"
    _, lat = _to_agent_frame(disp, yaw0)
    if lat > cfg.lateral_m:
        return "straight_left"
    if lat < -cfg.lateral_m:
        return "straight_right"
    return "straight"


def bucket_of(gt: GroundTruth, cfg: BucketConfig = BucketConfig()) -> str:
    if gt.trajectory is None:
        raise ValueError(f"target {gt.target_id} has no trajectory for bucketing")
    pts = np.vstack([np.asarray(gt.position0, float)[None], np.asarray(gt.trajectory, float)])
    yaws = None
    if gt.trajectory_yaws is not None:
        yaws = np.concatenate([[gt.yaw0], np.asarray(gt.trajectory_yaws, float)])
    valid = None
    if gt.trajectory_valid is not None:
        valid = np.concatenate([[True], np.asarray(gt.trajectory_valid, bool)])
    return bucket(pts, yaws, valid, cfg)


def score_predictions(pred: PredictionSet, gt: GroundTruth, t: float) -> list[tuple[float, bool]]:
    """(confidence, true_positive) entries for one target at ``t``.

    Only the highest-confidence hit is a true positive; further hits are
    dropped rather than counted as false positives. Misses are false
    positives.
    """
    t = float(t)
    entries = []
    hits = hits_at(pred, gt, t)
    best = None
    for i, (hit, (_, _, conf)) in enumerate(zip(hits, pred.at(t))):
        if hit and (best is None or conf > pred.at(t)[best][2]):
            best = i
    for i, (hit, (_, _, conf)) in enumerate(zip(hits, pred.at(t))):
        if hit and i != best:
            continue
        entries.append((conf, i == best))
    return entries


def average_precision(entries: Sequence[tuple[float, bool]], n_positives: int) -> float:
    """Interpolated area under the precision-recall curve.

    Operating points are the distinct confidence thresholds: at threshold
    ``c`` every entry with confidence >= ``c`` is a detection. Precision is
    made monotone (max over higher recalls) before integrating over recall.
    """
    if n_positives <= 0:
        raise ValueError("average precision needs at least one positive")
    if not entries:
        return 0.0
    conf = np.array([c for c, _ in entries], dtype=np.float64)
    tp = np.array([p for _, p in entries], dtype=np.float64)
    order = np.argsort(-conf, kind="stable")
    conf, tp = conf[order], tp[order]
    tp_cum = np.cumsum(tp)
    fp_cum = np.cumsum(1.0 - tp)
    # keep the last entry of every run of equal confidences
    last_of_run = np.r_[conf[1:] != conf[:-1], True]
    tp_cum, fp_cum = tp_cum[last_of_run], fp_cum[last_of_run]
    recall = tp_cum / n_positives
    precision = tp_cum / (tp_cum + fp_cum)
    precision = np.maximum.accumulate(precision[::-1])[::-1]
    recall = np.r_[0.0, recall]
    return float(np.sum(np.diff(recall) * precision))


def soft_map(preds: Sequence[PredictionSet], gts: Sequence[GroundTruth], t: float,
             cfg: BucketConfig = BucketConfig(), per_bucket: bool = False):
    """Soft mAP at ``t``: average precision per intent bucket, averaged.

    With ``per_bucket`` a ``(mean, {bucket: ap})`` pair is returned.
    """
    _check_aligned(preds, gts)
    t = float(t)
    groups: dict[str, list[tuple[float, bool]]] = {}
    counts: dict[str, int] = {}
    for p, g in zip(preds, gts):
        if not g.is_valid(t):
            continue
        b = bucket_of(g, cfg)
        groups.setdefault(b, []).extend(score_predictions(p, g, t))
        counts[b] = counts.get(b, 0) + 1
    if not counts:
        raise ValueError(f"no valid targets at horizon {t} s; no buckets to average")
    aps = {b: average_precision(groups[b], counts[b]) for b in BUCKETS if b in counts}
    mean = float(np.mean(list(aps.values())))
    return (mean, aps) if per_bucket else mean


@dataclass
class MetricReport:
    horizons: dict[float, dict[str, float]]
    average: dict[str, float]
    per_bucket: dict[float, dict[str, float]] | None = None
    n_targets: int = 0

    def to_dict(self) -> dict:
        out = {
            "n_targets": self.n_targets,
            "horizons": {f"{t:g}": v for t, v in self.horizons.items()},
            "average": self.average,
        }
        if self.per_bucket is not None:
            out["per_bucket"] = {f"{t:g}": v for t, v in self.per_bucket.items()}
        return out


def evaluate(preds: Sequence[PredictionSet], gts: Sequence[GroundTruth],
             horizons: Sequence[float] = HORIZONS, per_bucket: bool = False,
             cfg: BucketConfig = BucketConfig()) -> MetricReport:
    _check_aligned(preds, gts)
    rows: dict[float, dict[str, float]] = {}
    buckets: dict[float, dict[str, float]] = {}
    for t in map(float, horizons):
        fdes, ades = min_displacement(preds, gts, t, horizons)
        smap, aps = soft_map(preds, gts, t, cfg, per_bucket=True)
        rows[t] = {
            "miss_rate": miss_rate(preds, gts, t),
            "min_ade": float(np.mean(ades)),
            "min_fde": float(np.mean(fdes)),
            "soft_map": smap,
        }
        buckets[t] = aps
    keys = ("miss_rate", "min_ade", "min_fde", "soft_map")
    average = {k: float(np.mean([rows[t][k] for t in rows])) for k in keys}
    return MetricReport(rows, average, buckets if per_bucket else None, len(gts))
