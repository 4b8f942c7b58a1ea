"""Core value types: images, masks, sample triplets and crop windows.

All pixel data is float32, row-major, channel-last, normalized so that 8-bit
sources map to v / 255. Values are wrapped in read-only views at construction
time, so instances can be shared freely across workers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

VALID_CHANNEL_COUNTS = (3, 4)


def _readonly(arr: np.ndarray) -> np.ndarray:
    view = arr.view()
    view.setflags(write=False)
    return view


def _normalize_plane_data(data, ndim: int) -> np.ndarray:
    arr = np.asarray(data, dtype=np.float32)
    if arr.ndim != ndim:
        raise ValueError(f"expected {ndim}-dimensional data, got shape {arr.shape}")
    if not arr.flags.c_contiguous:
        arr = np.ascontiguousarray(arr)
    return _readonly(arr)


@dataclass(frozen=True)
class MultiChannelImage:
    """H x W x C image. Channel 4, when present, is the foreground probability plane."""

    data: np.ndarray  # (H, W, C) float32, values meant to live in [0, 1]

    def __post_init__(self) -> None:
        object.__setattr__(self, "data", _normalize_plane_data(self.data, 3))

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def channels(self) -> int:
        return self.data.shape[2]


@dataclass(frozen=True)
class ForegroundMask:
    """H x W binary mask; 1 marks foreground."""

    data: np.ndarray  # (H, W) float32 in {0, 1}

    def __post_init__(self) -> None:
        object.__setattr__(self, "data", _normalize_plane_data(self.data, 2))

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class SampleTriplet:
    """The unit a segmentation network consumes: two backgrounds, the current frame, its label."""

    empty: MultiChannelImage
    recent: MultiChannelImage
    current: MultiChannelImage
    label: ForegroundMask

    @property
    def height(self) -> int:
        return self.current.height

    @property
    def width(self) -> int:
        return self.current.width

    @property
    def channels(self) -> int:
        return self.current.channels


@dataclass(frozen=True)
class CropSpec:
    """Crop window given by a real-valued center and real-valued extents.

    The index window is rows ceil(center_row - crop_height/2) up to (but not
    including) ceil(center_row + crop_height/2), and likewise for columns.
    """

    center_row: float
    center_col: float
    crop_height: float
    crop_width: float

    def __post_init__(self) -> None:
        if self.crop_height <= 0 or self.crop_width <= 0:
            raise ValueError(
                f"crop extents must be positive, got {self.crop_height} x {self.crop_width}"
            )

    def row_bounds(self) -> tuple[int, int]:
        return (
            math.ceil(self.center_row - self.crop_height / 2),
            math.ceil(self.center_row + self.crop_height / 2),
        )

    def col_bounds(self) -> tuple[int, int]:
        return (
            math.ceil(self.center_col - self.crop_width / 2),
            math.ceil(self.center_col + self.crop_width / 2),
        )


def validate_triplet(triplet: SampleTriplet) -> list[str]:
    """Check every triplet invariant; returns one message per violation.

    Never raises: a malformed triplet yields messages, a well-formed one an
    empty list.
    """
    violations: list[str] = []
    members = (
        ("empty", triplet.empty),
        ("recent", triplet.recent),
        ("current", triplet.current),
    )
    ref_h, ref_w = triplet.current.height, triplet.current.width
    ref_c = triplet.current.channels

    for name, img in members:
        if img.height != ref_h:
            violations.append(f"{name} height != image height")
        if img.width != ref_w:
            violations.append(f"{name} width != image width")
        if img.channels != ref_c:
            violations.append(f"{name} channel count != current channel count")
        if img.channels not in VALID_CHANNEL_COUNTS:
            violations.append(f"{name} channel count {img.channels} not in {VALID_CHANNEL_COUNTS}")
        if not bool(np.all((img.data >= 0.0) & (img.data <= 1.0))):
            violations.append(f"{name} value out of [0,1]")

    if triplet.label.height != ref_h:
        violations.append("label height != image height")
    if triplet.label.width != ref_w:
        violations.append("label width != image width")
    label = triplet.label.data
    if not bool(np.all((label == 0.0) | (label == 1.0))):
        violations.append("label value not in {0,1}")
    return violations
