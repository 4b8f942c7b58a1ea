"""Deterministic spatio-temporal augmentation, background modeling and
evaluation toolkit for background subtraction datasets."""

from .background import MedianWindow, empty_background, median_background, streaming_median
from .container import read_tensor, write_tensor
from .crops import (
    PanParams,
    ZoomParams,
    crop,
    ptz_pan_crop,
    ptz_zoom_crop,
    randomly_shifted_crop,
    resize_bilinear,
    spatially_aligned_crop,
)
from .datasets import (
    CDNET_GRAY_LEVELS,
    LASIESTA_GRAY_LEVELS,
    GroundTruthMask,
    PixelLabel,
    SplitEntry,
    SplitManifest,
    VideoDescriptor,
    builtin_split,
    decode_ground_truth,
    fold_plan,
    load_cdnet_video,
    load_lasiesta_video,
)
from .errors import ToolkitError
from .metrics import (
    ConfusionCounts,
    MetricsReport,
    RankingTable,
    ReportTree,
    accumulate_confusion,
    aggregate,
    compute_metrics,
    rank_methods,
    relaxed_jaccard,
    threshold,
)
from .model import (
    CropSpec,
    ForegroundMask,
    MultiChannelImage,
    SampleTriplet,
    validate_triplet,
)
from .photometric import (
    IlluminationParams,
    NoiseParams,
    add_gaussian_noise,
    illumination_shift,
    intermittent_object_add,
)
from .pipeline import (
    AugmentationConfig,
    AugmentationPlan,
    TrainingHyperparams,
    apply_plan,
    load_config,
    make_batch,
    plan_batch,
    sample_augmentation,
    save_config,
    synthetic_ramp_triplet,
)

__version__ = "0.1.0"

__all__ = [
    "AugmentationConfig",
    "AugmentationPlan",
    "CDNET_GRAY_LEVELS",
    "ConfusionCounts",
    "CropSpec",
    "ForegroundMask",
    "GroundTruthMask",
    "IlluminationParams",
    "LASIESTA_GRAY_LEVELS",
    "MedianWindow",
    "MetricsReport",
    "MultiChannelImage",
    "NoiseParams",
    "PanParams",
    "PixelLabel",
    "RankingTable",
    "ReportTree",
    "SampleTriplet",
    "SplitEntry",
    "SplitManifest",
    "ToolkitError",
    "TrainingHyperparams",
    "VideoDescriptor",
    "ZoomParams",
    "accumulate_confusion",
    "add_gaussian_noise",
    "aggregate",
    "apply_plan",
    "builtin_split",
    "compute_metrics",
    "crop",
    "decode_ground_truth",
    "empty_background",
    "fold_plan",
    "illumination_shift",
    "intermittent_object_add",
    "load_cdnet_video",
    "load_config",
    "load_lasiesta_video",
    "make_batch",
    "median_background",
    "plan_batch",
    "ptz_pan_crop",
    "ptz_zoom_crop",
    "randomly_shifted_crop",
    "rank_methods",
    "read_tensor",
    "relaxed_jaccard",
    "resize_bilinear",
    "sample_augmentation",
    "save_config",
    "spatially_aligned_crop",
    "streaming_median",
    "synthetic_ramp_triplet",
    "threshold",
    "validate_triplet",
    "write_tensor",
]
