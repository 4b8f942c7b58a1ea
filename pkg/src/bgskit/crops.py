"""Crop, bilinear resize, and the camera-motion crop augmentations.

Conventions fixed here (and relied on by the golden files):

* Crop windows use ceiling index arithmetic on real-valued centers and
  extents, see :class:`bgskit.model.CropSpec`. Windows that leave the image
  raise :class:`OutOfBoundsError`; nothing is ever padded or clamped.
* Resizing is corner-aligned bilinear interpolation: output sample o on an
  axis of length ``out`` maps to source coordinate ``o * (in - 1) / (out - 1)``
  (coordinate 0 when ``out == 1``), with index clamping at the top edge.
  Resizing an image to its own size returns it unchanged, bit for bit.
* The zoom and pan augmentations average their materialized steps with
  uniform 1/N weights, accumulated in float64 and stored back as float32.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import OutOfBoundsError
from .model import CropSpec, ForegroundMask, MultiChannelImage, SampleTriplet


@dataclass(frozen=True)
class ZoomParams:
    """Per-step zoom factors for the two background slots.

    Sampled values stay inside (-0.1, 0.1); positive factors simulate a camera
    zooming in, negative factors a camera zooming out.
    """

    zoom_empty: float
    zoom_recent: float
    steps: int

    def __post_init__(self) -> None:
        if self.steps < 1:
            raise ValueError(f"zoom needs at least one step, got {self.steps}")


@dataclass(frozen=True)
class PanParams:
    """Per-step row/column shift and step counts for the two background slots."""

    shift_row: float
    shift_col: float
    steps_empty: int
    steps_recent: int

    def __post_init__(self) -> None:
        if self.steps_empty < 1 or self.steps_recent < 1:
            raise ValueError("pan needs at least one step per background slot")


def _window(spec: CropSpec, height: int, width: int) -> tuple[int, int, int, int]:
    r0, r1 = spec.row_bounds()
    c0, c1 = spec.col_bounds()
    if r0 < 0 or c0 < 0 or r1 > height or c1 > width:
        raise OutOfBoundsError(
            f"crop window rows {r0}:{r1} cols {c0}:{c1} exceeds {height}x{width} source"
        )
    return r0, r1, c0, c1


def _crop_array(arr: np.ndarray, spec: CropSpec) -> np.ndarray:
    r0, r1, c0, c1 = _window(spec, arr.shape[0], arr.shape[1])
    return arr[r0:r1, c0:c1]


def crop(img: MultiChannelImage, spec: CropSpec) -> MultiChannelImage:
    """Extract the window named by spec, all channels."""
    return MultiChannelImage(_crop_array(img.data, spec))


def _axis_coords(in_size: int, out_size: int) -> np.ndarray:
    if out_size == 1:
        return np.zeros(1, dtype=np.float64)
    return np.arange(out_size, dtype=np.float64) * ((in_size - 1) / (out_size - 1))


def _lerp_axis(arr: np.ndarray, out_size: int, axis: int) -> np.ndarray:
    in_size = arr.shape[axis]
    if out_size == in_size:
        return arr
    coords = _axis_coords(in_size, out_size)
    lo = np.floor(coords).astype(np.intp)
    hi = np.minimum(lo + 1, in_size - 1)
    frac = (coords - lo).astype(np.float32)
    shape = [1, 1, 1]
    shape[axis] = out_size
    frac = frac.reshape(shape)
    a = np.take(arr, lo, axis=axis)
    b = np.take(arr, hi, axis=axis)
    return a + frac * (b - a)


def _resize_array(arr: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    arr = _lerp_axis(arr, out_h, axis=0)
    arr = _lerp_axis(arr, out_w, axis=1)
    return arr


def resize_bilinear(img: MultiChannelImage, out_h: int, out_w: int) -> MultiChannelImage:
    """Corner-aligned bilinear resize to (out_h, out_w), applied per channel."""
    if out_h < 1 or out_w < 1:
        raise ValueError(f"resize target must be at least 1x1, got {out_h}x{out_w}")
    if out_h == img.height and out_w == img.width:
        return img
    return MultiChannelImage(_resize_array(img.data, out_h, out_w))


def _require_integer_extent(spec: CropSpec) -> tuple[int, int]:
    h, w = float(spec.crop_height), float(spec.crop_width)
    if not h.is_integer() or not w.is_integer():
        raise ValueError(
            f"triplet crops need integer output extents, got {spec.crop_height} x {spec.crop_width}"
        )
    return int(h), int(w)


def spatially_aligned_crop(t: SampleTriplet, spec: CropSpec) -> SampleTriplet:
    """One window, applied identically to both backgrounds, the frame and the label."""
    _require_integer_extent(spec)
    return SampleTriplet(
        empty=crop(t.empty, spec),
        recent=crop(t.recent, spec),
        current=crop(t.current, spec),
        label=ForegroundMask(_crop_array(t.label.data, spec)),
    )


def randomly_shifted_crop(
    t: SampleTriplet,
    spec_empty: CropSpec,
    spec_recent: CropSpec,
    spec_current: CropSpec,
) -> SampleTriplet:
    """Camera-jitter augmentation: background windows shift, frame and label stay aligned."""
    extents = {
        (s.crop_height, s.crop_width) for s in (spec_empty, spec_recent, spec_current)
    }
    if len(extents) != 1:
        raise ValueError("all shifted-crop windows must share the same extents")
    _require_integer_extent(spec_current)
    return SampleTriplet(
        empty=crop(t.empty, spec_empty),
        recent=crop(t.recent, spec_recent),
        current=crop(t.current, spec_current),
        label=ForegroundMask(_crop_array(t.label.data, spec_current)),
    )


def _averaged_steps(arr: np.ndarray, specs: list[CropSpec], out_h: int, out_w: int) -> np.ndarray:
    acc = np.zeros((out_h, out_w, arr.shape[2]), dtype=np.float64)
    for spec in specs:
        acc += _resize_array(_crop_array(arr, spec), out_h, out_w)
    mean = (acc / len(specs)).astype(np.float32)
    np.clip(mean, 0.0, 1.0, out=mean)
    return mean


def ptz_zoom_crop(t: SampleTriplet, spec: CropSpec, zp: ZoomParams) -> SampleTriplet:
    """Zooming-camera augmentation.

    The frame and label get the plain aligned window; each background slot is
    the average of ``steps`` crops whose extents grow (or shrink) by its zoom
    factor per step, each resized back to the window size.
    """
    out_h, out_w = _require_integer_extent(spec)

    def scaled_specs(zoom: float) -> list[CropSpec]:
        specs = []
        for n in range(zp.steps):
            scale = 1.0 + n * zoom
            if scale <= 0:
                raise ValueError(f"zoom factor {zoom} collapses the window at step {n}")
            specs.append(
                CropSpec(spec.center_row, spec.center_col, out_h * scale, out_w * scale)
            )
        return specs

    return SampleTriplet(
        empty=MultiChannelImage(
            _averaged_steps(t.empty.data, scaled_specs(zp.zoom_empty), out_h, out_w)
        ),
        recent=MultiChannelImage(
            _averaged_steps(t.recent.data, scaled_specs(zp.zoom_recent), out_h, out_w)
        ),
        current=crop(t.current, spec),
        label=ForegroundMask(_crop_array(t.label.data, spec)),
    )


def ptz_pan_crop(t: SampleTriplet, spec: CropSpec, pp: PanParams) -> SampleTriplet:
    """Moving-camera augmentation.

    The frame and label get the plain aligned window; each background slot is
    the average of its own number of crops, the n-th shifted by n times the
    per-step row/column shift.
    """
    out_h, out_w = _require_integer_extent(spec)

    def shifted_specs(steps: int) -> list[CropSpec]:
        return [
            CropSpec(
                spec.center_row + n * pp.shift_row,
                spec.center_col + n * pp.shift_col,
                spec.crop_height,
                spec.crop_width,
            )
            for n in range(steps)
        ]

    return SampleTriplet(
        empty=MultiChannelImage(
            _averaged_steps(t.empty.data, shifted_specs(pp.steps_empty), out_h, out_w)
        ),
        recent=MultiChannelImage(
            _averaged_steps(t.recent.data, shifted_specs(pp.steps_recent), out_h, out_w)
        ),
        current=crop(t.current, spec),
        label=ForegroundMask(_crop_array(t.label.data, spec)),
    )
