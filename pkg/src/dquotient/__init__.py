"""SSIM in symmetric/antisymmetric form and the Dissimilarity Quotient (DQ)."""

__version__ = "0.1.0"

from .image_io import Image, normalize, read_pgm, sum_diff, write_pgm
from .metrics import (
    MetricMap,
    MetricParams,
    dissimilarity_map,
    dq_map,
    nrmse,
    sl_map,
    ssim_three_term,
    ssim_two_term,
    sv_map,
)
from .pipeline import PipelineConfig, metric_maps, pooled_scores
from .window import WindowSpec, local_stats, sym_stats

__all__ = [
    "Image",
    "MetricMap",
    "MetricParams",
    "PipelineConfig",
    "WindowSpec",
    "dissimilarity_map",
    "dq_map",
    "local_stats",
    "metric_maps",
    "normalize",
    "nrmse",
    "pooled_scores",
    "read_pgm",
    "sl_map",
    "ssim_three_term",
    "ssim_two_term",
    "sum_diff",
    "sv_map",
    "sym_stats",
    "write_pgm",
]
