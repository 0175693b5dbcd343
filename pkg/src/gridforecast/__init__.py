"""Non-neural core of heatmap-based motion forecasting.

Rasterize scenarios into agent-centric top-view grids, turn probability
heatmaps into a small set of non-redundant positions, and score them with
Waymo-style miss rate, minADE/minFDE and soft mAP.
"""
from gridforecast.gridgeom import GridSpec, pixel_to_world, world_to_pixel
from gridforecast.kernels import BACKEND as KERNEL_BACKEND
from gridforecast.metrics import GroundTruth, PredictionSet, gamma, miss_threshold
from gridforecast.sampler import Heatmap, KernelSize, SampleSet, kernel_size, sample_pipeline

__version__ = "0.1.0"

__all__ = [
    "GridSpec", "Heatmap", "KernelSize", "SampleSet", "GroundTruth", "PredictionSet",
    "world_to_pixel", "pixel_to_world", "gamma", "miss_threshold", "kernel_size",
    "sample_pipeline", "KERNEL_BACKEND",
]
