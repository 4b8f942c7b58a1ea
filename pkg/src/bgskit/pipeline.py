"""Online augmentation pipeline: plan sampling, application, batching.

One plan fully describes one augmented sample. Sampling draws, in a fixed
order (crop kind, crop parameters, crop center, illumination offsets, object
addition flag, noise seed), from a Philox stream, so a seed reproduces a plan
exactly. Crop centers are drawn uniformly over the integer rectangle for
which every window the plan will touch stays inside the source image, so an
emitted plan can never fail its own bounds checks.

Applying a plan runs, in order: the chosen crop, the illumination shift,
optionally intermittent-object addition with a donor, and Gaussian noise.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Sequence

import numpy as np

from .crops import (
    PanParams,
    ZoomParams,
    ptz_pan_crop,
    ptz_zoom_crop,
    randomly_shifted_crop,
    spatially_aligned_crop,
)
from .errors import ConfigError, EmptyDonorPoolError, MissingDonorError, OutOfBoundsError
from .model import CropSpec, ForegroundMask, MultiChannelImage, SampleTriplet
from .photometric import (
    IlluminationParams,
    NoiseParams,
    add_gaussian_noise,
    illumination_shift,
    intermittent_object_add,
)
from .rng import make_rng, split_seeds

CROP_KINDS = (
    "aligned",
    "shifted",
    "ptz_zoom_in",
    "ptz_zoom_out",
    "ptz_pan_left",
    "ptz_pan_right",
)


@dataclass(frozen=True)
class AugmentationConfig:
    """Sampling distributions and constants of the online augmentation.

    Defaults: background shifts and horizontal pan steps from U(0, 5) pixels
    (vertical pan disabled), zoom-in ratios from U(0, 0.02) recent and
    U(0, 0.04) empty with the zoom-out ranges mirrored, 10 zoom steps, 20/10
    pan steps, illumination offsets from N(0, 0.1^2) + N(0, 0.04^2) with the
    same extras added for the empty slot, object addition on 10% of samples,
    noise sigma 0.01 and binarization threshold 0.5.
    """

    out_height: int = 160
    out_width: int = 160
    enabled_crops: tuple[str, ...] = CROP_KINDS
    shift_low: float = 0.0
    shift_high: float = 5.0
    zoom_in_recent_low: float = 0.0
    zoom_in_recent_high: float = 0.02
    zoom_in_empty_low: float = 0.0
    zoom_in_empty_high: float = 0.04
    zoom_out_recent_low: float = -0.02
    zoom_out_recent_high: float = 0.0
    zoom_out_empty_low: float = -0.04
    zoom_out_empty_high: float = 0.0
    zoom_steps: int = 10
    pan_row_low: float = 0.0
    pan_row_high: float = 0.0
    pan_col_low: float = 0.0
    pan_col_high: float = 5.0
    pan_steps_empty: int = 20
    pan_steps_recent: int = 10
    illum_global_sigma: float = 0.1
    illum_channel_sigma: float = 0.04
    illum_empty_global_sigma: float = 0.1
    illum_empty_channel_sigma: float = 0.04
    ioa_probability: float = 0.10
    noise_sigma: float = 0.01
    threshold: float = 0.5

    def __post_init__(self) -> None:
        if self.out_height < 1 or self.out_width < 1:
            raise ValueError("output extents must be at least 1 pixel")
        if not self.enabled_crops:
            raise ValueError("at least one crop kind must be enabled")
        unknown = [k for k in self.enabled_crops if k not in CROP_KINDS]
        if unknown:
            raise ValueError(f"unknown crop kinds {unknown}; valid kinds are {CROP_KINDS}")
        object.__setattr__(self, "enabled_crops", tuple(self.enabled_crops))
        for low_name, high_name in (
            ("shift_low", "shift_high"),
            ("zoom_in_recent_low", "zoom_in_recent_high"),
            ("zoom_in_empty_low", "zoom_in_empty_high"),
            ("zoom_out_recent_low", "zoom_out_recent_high"),
            ("zoom_out_empty_low", "zoom_out_empty_high"),
            ("pan_row_low", "pan_row_high"),
            ("pan_col_low", "pan_col_high"),
        ):
            if getattr(self, low_name) > getattr(self, high_name):
                raise ValueError(f"{low_name} exceeds {high_name}")
        if self.zoom_steps < 1 or self.pan_steps_empty < 1 or self.pan_steps_recent < 1:
            raise ValueError("step counts must be at least 1")
        if not 0.0 <= self.ioa_probability <= 1.0:
            raise ValueError(f"object-addition probability must be in [0, 1], got {self.ioa_probability}")
        for name in (
            "illum_global_sigma",
            "illum_channel_sigma",
            "illum_empty_global_sigma",
            "illum_empty_channel_sigma",
            "noise_sigma",
        ):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError(f"threshold must be in [0, 1], got {self.threshold}")


@dataclass(frozen=True)
class TrainingHyperparams:
    """Optimizer settings emitted for external trainers; no training happens here."""

    learning_rate: float = 1e-4
    adam_beta1: float = 0.9
    adam_beta2: float = 0.99
    batch_size: int = 8
    epochs: int = 200
    jaccard_smoothing: float = 1.0

    def __post_init__(self) -> None:
        for f in fields(self):
            if getattr(self, f.name) <= 0:
                raise ValueError(f"{f.name} must be positive")


@dataclass(frozen=True)
class AugmentationPlan:
    """Fully concrete parameters for one augmented sample."""

    kind: str
    center_row: int
    center_col: int
    out_height: int
    out_width: int
    shift_empty: tuple[float, float] = (0.0, 0.0)
    shift_recent: tuple[float, float] = (0.0, 0.0)
    zoom_empty: float = 0.0
    zoom_recent: float = 0.0
    zoom_steps: int = 0
    pan_row: float = 0.0
    pan_col: float = 0.0
    pan_steps_empty: int = 0
    pan_steps_recent: int = 0
    illum_empty: tuple[float, float, float] = (0.0, 0.0, 0.0)
    illum_recent: tuple[float, float, float] = (0.0, 0.0, 0.0)
    illum_current: tuple[float, float, float] = (0.0, 0.0, 0.0)
    ioa: bool = False
    noise_sigma: float = 0.0
    noise_seed: int = 0

    def to_dict(self) -> dict:
        payload = asdict(self)
        for key, value in payload.items():
            if isinstance(value, tuple):
                payload[key] = list(value)
        return payload

    @classmethod
    def from_dict(cls, payload: dict) -> "AugmentationPlan":
        kwargs = dict(payload)
        for key in ("shift_empty", "shift_recent", "illum_empty", "illum_recent", "illum_current"):
            if key in kwargs:
                kwargs[key] = tuple(kwargs[key])
        return cls(**kwargs)


def _plan_windows(plan: AugmentationPlan) -> list[tuple[float, float, float, float]]:
    """Every (row_offset, col_offset, extent_h, extent_w) the plan will crop."""
    h, w = float(plan.out_height), float(plan.out_width)
    windows = [(0.0, 0.0, h, w)]
    if plan.kind == "shifted":
        windows.append((plan.shift_empty[0], plan.shift_empty[1], h, w))
        windows.append((plan.shift_recent[0], plan.shift_recent[1], h, w))
    elif plan.kind in ("ptz_zoom_in", "ptz_zoom_out"):
        for zoom in (plan.zoom_empty, plan.zoom_recent):
            for n in range(plan.zoom_steps):
                scale = 1.0 + n * zoom
                windows.append((0.0, 0.0, h * scale, w * scale))
    elif plan.kind in ("ptz_pan_left", "ptz_pan_right"):
        for n in range(max(plan.pan_steps_empty, plan.pan_steps_recent)):
            windows.append((n * plan.pan_row, n * plan.pan_col, h, w))
    return windows


def _center_bounds(
    windows: Sequence[tuple[float, float, float, float]], source_h: int, source_w: int
) -> tuple[int, int, int, int]:
    row_lo, row_hi = -math.inf, math.inf
    col_lo, col_hi = -math.inf, math.inf
    for dr, dc, eh, ew in windows:
        row_lo = max(row_lo, eh / 2 - dr)
        row_hi = min(row_hi, source_h - eh / 2 - dr)
        col_lo = max(col_lo, ew / 2 - dc)
        col_hi = min(col_hi, source_w - ew / 2 - dc)
    lo_r, hi_r = math.ceil(row_lo), math.floor(row_hi)
    lo_c, hi_c = math.ceil(col_lo), math.floor(col_hi)
    if lo_r > hi_r or lo_c > hi_c:
        raise OutOfBoundsError(
            f"no feasible crop center: plan windows do not fit a {source_h}x{source_w} source"
        )
    return lo_r, hi_r, lo_c, hi_c


def sample_augmentation(
    cfg: AugmentationConfig, rng_seed, source_height: int, source_width: int
) -> AugmentationPlan:
    """Draw one fully concrete plan for a source of the given size."""
    rng = make_rng(rng_seed)
    kind = cfg.enabled_crops[int(rng.integers(len(cfg.enabled_crops)))]

    params: dict = {}
    if kind == "shifted":
        draws = rng.uniform(cfg.shift_low, cfg.shift_high, size=4)
        params["shift_empty"] = (float(draws[0]), float(draws[1]))
        params["shift_recent"] = (float(draws[2]), float(draws[3]))
    elif kind == "ptz_zoom_in":
        params["zoom_empty"] = float(rng.uniform(cfg.zoom_in_empty_low, cfg.zoom_in_empty_high))
        params["zoom_recent"] = float(rng.uniform(cfg.zoom_in_recent_low, cfg.zoom_in_recent_high))
        params["zoom_steps"] = cfg.zoom_steps
    elif kind == "ptz_zoom_out":
        params["zoom_empty"] = float(rng.uniform(cfg.zoom_out_empty_low, cfg.zoom_out_empty_high))
        params["zoom_recent"] = float(rng.uniform(cfg.zoom_out_recent_low, cfg.zoom_out_recent_high))
        params["zoom_steps"] = cfg.zoom_steps
    elif kind in ("ptz_pan_left", "ptz_pan_right"):
        row = float(rng.uniform(cfg.pan_row_low, cfg.pan_row_high))
        col = float(rng.uniform(cfg.pan_col_low, cfg.pan_col_high))
        params["pan_row"] = row
        params["pan_col"] = -col if kind == "ptz_pan_left" else col
        params["pan_steps_empty"] = cfg.pan_steps_empty
        params["pan_steps_recent"] = cfg.pan_steps_recent

    probe = AugmentationPlan(
        kind=kind,
        center_row=0,
        center_col=0,
        out_height=cfg.out_height,
        out_width=cfg.out_width,
        **params,
    )
    lo_r, hi_r, lo_c, hi_c = _center_bounds(
        _plan_windows(probe), source_height, source_width
    )
    center_row = int(rng.integers(lo_r, hi_r + 1))
    center_col = int(rng.integers(lo_c, hi_c + 1))

    global_offset = rng.normal(0.0, cfg.illum_global_sigma)
    channel_offsets = rng.normal(0.0, cfg.illum_channel_sigma, size=3)
    d_current = tuple(float(global_offset + channel_offsets[k]) for k in range(3))
    empty_global = rng.normal(0.0, cfg.illum_empty_global_sigma)
    empty_channels = rng.normal(0.0, cfg.illum_empty_channel_sigma, size=3)
    d_empty = tuple(float(d_current[k] + empty_global + empty_channels[k]) for k in range(3))

    ioa = bool(rng.random() < cfg.ioa_probability)
    noise_seed = int(rng.integers(0, 2**63))

    return AugmentationPlan(
        kind=kind,
        center_row=center_row,
        center_col=center_col,
        out_height=cfg.out_height,
        out_width=cfg.out_width,
        illum_empty=d_empty,
        illum_recent=d_current,
        illum_current=d_current,
        ioa=ioa,
        noise_sigma=cfg.noise_sigma,
        noise_seed=noise_seed,
        **params,
    )


def _crop_stage(t: SampleTriplet, plan: AugmentationPlan) -> SampleTriplet:
    spec = CropSpec(plan.center_row, plan.center_col, plan.out_height, plan.out_width)
    if plan.kind == "aligned":
        return spatially_aligned_crop(t, spec)
    if plan.kind == "shifted":
        spec_empty = CropSpec(
            plan.center_row + plan.shift_empty[0],
            plan.center_col + plan.shift_empty[1],
            plan.out_height,
            plan.out_width,
        )
        spec_recent = CropSpec(
            plan.center_row + plan.shift_recent[0],
            plan.center_col + plan.shift_recent[1],
            plan.out_height,
            plan.out_width,
        )
        return randomly_shifted_crop(t, spec_empty, spec_recent, spec)
    if plan.kind in ("ptz_zoom_in", "ptz_zoom_out"):
        zp = ZoomParams(plan.zoom_empty, plan.zoom_recent, plan.zoom_steps)
        return ptz_zoom_crop(t, spec, zp)
    if plan.kind in ("ptz_pan_left", "ptz_pan_right"):
        pp = PanParams(plan.pan_row, plan.pan_col, plan.pan_steps_empty, plan.pan_steps_recent)
        return ptz_pan_crop(t, spec, pp)
    raise ValueError(f"unknown crop kind {plan.kind!r}")


def _illumination_stage(t: SampleTriplet, plan: AugmentationPlan) -> SampleTriplet:
    return illumination_shift(
        t, IlluminationParams(plan.illum_empty, plan.illum_recent, plan.illum_current)
    )


def _donor_window(donor: SampleTriplet, plan: AugmentationPlan) -> SampleTriplet:
    # The donor gets a centered aligned window so plan application stays
    # free of randomness; donors already at the output size pass through.
    spec = CropSpec(
        donor.height / 2, donor.width / 2, plan.out_height, plan.out_width
    )
    return spatially_aligned_crop(donor, spec)


def _ioa_stage(
    t: SampleTriplet, donor: SampleTriplet | None, plan: AugmentationPlan
) -> SampleTriplet:
    if not plan.ioa:
        return t
    if donor is None:
        raise MissingDonorError("plan requests object addition but no donor was given")
    return intermittent_object_add(t, _donor_window(donor, plan))


def _noise_stage(t: SampleTriplet, plan: AugmentationPlan) -> SampleTriplet:
    return add_gaussian_noise(t, NoiseParams(plan.noise_sigma), plan.noise_seed)


def apply_plan(
    t: SampleTriplet, donor: SampleTriplet | None, plan: AugmentationPlan
) -> SampleTriplet:
    """Apply crop, illumination, optional object addition, then noise."""
    out = _crop_stage(t, plan)
    out = _illumination_stage(out, plan)
    out = _ioa_stage(out, donor, plan)
    return _noise_stage(out, plan)


def timed_apply_plan(
    t: SampleTriplet, donor: SampleTriplet | None, plan: AugmentationPlan
) -> tuple[SampleTriplet, dict[str, float]]:
    """apply_plan with wall-clock seconds spent in each stage, for benchmarking."""
    import time

    timings: dict[str, float] = {}
    out = t
    for name, stage in (
        ("crop", lambda x: _crop_stage(x, plan)),
        ("illumination", lambda x: _illumination_stage(x, plan)),
        ("object_addition", lambda x: _ioa_stage(x, donor, plan)),
        ("noise", lambda x: _noise_stage(x, plan)),
    ):
        start = time.perf_counter()
        out = stage(out)
        timings[name] = time.perf_counter() - start
    return out, timings


def make_batch(
    samples: Sequence[SampleTriplet],
    donors: Sequence[SampleTriplet],
    cfg: AugmentationConfig,
    rng_seed,
    batch_size: int,
) -> list[SampleTriplet]:
    """Augment batch_size samples, cycling through the inputs.

    Each batch slot gets its own child seed, so results do not depend on
    evaluation order and a master seed reproduces the batch exactly.
    """
    if batch_size < 1:
        raise ValueError(f"batch size must be >= 1, got {batch_size}")
    if not samples:
        raise ValueError("no input samples")
    if cfg.ioa_probability > 0 and not donors:
        raise EmptyDonorPoolError("object addition enabled but the donor pool is empty")
    out = []
    for index, child in enumerate(split_seeds(rng_seed, batch_size)):
        sample = samples[index % len(samples)]
        rng = make_rng(child)
        plan = sample_augmentation(cfg, rng, sample.height, sample.width)
        donor = donors[int(rng.integers(len(donors)))] if plan.ioa else None
        out.append(apply_plan(sample, donor, plan))
    return out


def plan_batch(
    cfg: AugmentationConfig,
    rng_seed,
    batch_size: int,
    source_sizes: Sequence[tuple[int, int]],
    donor_count: int,
) -> list[tuple[AugmentationPlan, int | None]]:
    """The planning half of :func:`make_batch`: per-slot plans and donor picks."""
    if batch_size < 0:
        raise ValueError(f"batch size must be >= 0, got {batch_size}")
    if cfg.ioa_probability > 0 and batch_size > 0 and donor_count < 1:
        raise EmptyDonorPoolError("object addition enabled but the donor pool is empty")
    plans = []
    for index, child in enumerate(split_seeds(rng_seed, batch_size)):
        height, width = source_sizes[index % len(source_sizes)]
        rng = make_rng(child)
        plan = sample_augmentation(cfg, rng, height, width)
        donor_index = int(rng.integers(donor_count)) if plan.ioa else None
        plans.append((plan, donor_index))
    return plans


_LIST_FIELDS = {"enabled_crops"}
_INT_FIELDS = {
    "out_height",
    "out_width",
    "zoom_steps",
    "pan_steps_empty",
    "pan_steps_recent",
}


def save_config(cfg: AugmentationConfig, path) -> None:
    """Write the config as commented key = value lines."""
    lines = ["# augmentation configuration"]
    for f in fields(cfg):
        value = getattr(cfg, f.name)
        if f.name in _LIST_FIELDS:
            value = ", ".join(value)
        lines.append(f"{f.name} = {value}")
    Path(path).write_text("\n".join(lines) + "\n")


def load_config(path) -> AugmentationConfig:
    """Parse a key = value config file; unknown keys are rejected."""
    known = {f.name for f in fields(AugmentationConfig)}
    kwargs: dict = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in known:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            if key in _LIST_FIELDS:
                kwargs[key] = tuple(part.strip() for part in value.split(",") if part.strip())
            elif key in _INT_FIELDS:
                kwargs[key] = int(value)
            else:
                kwargs[key] = float(value)
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: cannot parse value for {key!r}: {exc}") from exc
    try:
        return AugmentationConfig(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def synthetic_ramp_triplet(
    height: int, width: int, channels: int = 4
) -> SampleTriplet:
    """Deterministic triplet for benchmarks, golden files and tests.

    Each member is a distinct affine ramp over pixel position; the label is a
    centered square of foreground.
    """
    rows = np.arange(height, dtype=np.float32)[:, None, None]
    cols = np.arange(width, dtype=np.float32)[None, :, None]
    chans = np.arange(channels, dtype=np.float32)[None, None, :]
    base = (rows / max(height - 1, 1) + cols / max(width - 1, 1) + chans / max(channels, 1)) / 3.0

    def member(offset: float) -> MultiChannelImage:
        return MultiChannelImage(np.clip(base + np.float32(offset), 0.0, 1.0))

    label = np.zeros((height, width), dtype=np.float32)
    label[height // 4 : height - height // 4, width // 4 : width - width // 4] = 1.0
    return SampleTriplet(
        empty=member(0.0),
        recent=member(0.05),
        current=member(0.10),
        label=ForegroundMask(label),
    )
