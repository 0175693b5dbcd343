"""Per-cell heatmap losses, mean-reduced over all cells."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# target cells at or above this value count as positives
POSITIVE_THRESHOLD = 1.0 - 1e-6


@dataclass(frozen=True)
class LossConfig:
    kind: str = "focal"
    focal_alpha: float = 2.0
    focal_beta: float = 4.0
    epsilon: float = 1e-7

    def __post_init__(self):
        if self.kind not in ("focal", "cross_entropy"):
            raise ValueError(f"unknown loss kind {self.kind!r}")
        if not 0 < self.epsilon < 0.5:
            raise ValueError(f"epsilon must lie in (0, 0.5), got {self.epsilon}")
        if self.focal_alpha < 0 or self.focal_beta < 0:
            raise ValueError("focal exponents must be non-negative")


def _values(h):
    return np.asarray(getattr(h, "values", h), dtype=np.float64)


def _pair(pred, target):
    p, y = _values(pred), _values(target)
    if p.shape != y.shape:
        raise ValueError(f"prediction shape {p.shape} does not match target {y.shape}")
    return p, y


def cross_entropy(pred, target, epsilon: float = 1e-7) -> float:
    p, y = _pair(pred, target)
    p = np.clip(p, epsilon, 1.0 - epsilon)
    return float(np.mean(-(y * np.log(p) + (1.0 - y) * np.log1p(-p))))


def cross_entropy_grad(pred, target, epsilon: float = 1e-7) -> np.ndarray:
    """d(cross_entropy)/d(pred) per cell; zero where the clamp is active."""
    p, y = _pair(pred, target)
    active = (p > epsilon) & (p < 1.0 - epsilon)
    pc = np.clip(p, epsilon, 1.0 - epsilon)
    g = (-y / pc + (1.0 - y) / (1.0 - pc)) / p.size
    return np.where(active, g, 0.0)


def focal_loss(pred, target, cfg: LossConfig = LossConfig()) -> float:
    """Penalty-reduced pixel-wise focal loss against a soft Gaussian target.

    Positive cells (target ~1) cost ``-(1-p)^a log p``; the rest cost
    ``-(1-y)^b p^a log(1-p)``, which discounts cells near a peak.
    """
    p, y = _pair(pred, target)
    a, b = cfg.focal_alpha, cfg.focal_beta
    p = np.clip(p, cfg.epsilon, 1.0 - cfg.epsilon)
    pos = y >= POSITIVE_THRESHOLD
    pos_loss = -np.power(1.0 - p, a) * np.log(p)
    neg_loss = -np.power(1.0 - y, b) * np.power(p, a) * np.log1p(-p)
    return float(np.mean(np.where(pos, pos_loss, neg_loss)))


def focal_loss_grad(pred, target, cfg: LossConfig = LossConfig()) -> np.ndarray:
    p, y = _pair(pred, target)
    a, b, eps = cfg.focal_alpha, cfg.focal_beta, cfg.epsilon
    active = (p > eps) & (p < 1.0 - eps)
    p = np.clip(p, eps, 1.0 - eps)
    pos = y >= POSITIVE_THRESHOLD
    q = 1.0 - p
    # d/dp [-(1-p)^a log p]
    g_pos = a * np.power(q, a - 1) * np.log(p) - np.power(q, a) / p if a > 0 else -1.0 / p
    # d/dp [-(1-y)^b p^a log(1-p)]
    w = np.power(1.0 - y, b)
    if a > 0:
        g_neg = -w * (a * np.power(p, a - 1) * np.log(q) - np.power(p, a) / q)
    else:
        g_neg = w / q
    g = np.where(pos, g_pos, g_neg) / p.size
    return np.where(active, g, 0.0)


def loss(pred, target, cfg: LossConfig = LossConfig()) -> float:
    if cfg.kind == "cross_entropy":
        return cross_entropy(pred, target, cfg.epsilon)
    return focal_loss(pred, target, cfg)
