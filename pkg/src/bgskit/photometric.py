"""Post-crop, content-modifying augmentations.

Illumination offsets and Gaussian noise touch only the RGB channels and clamp
back into [0, 1]; the probability plane (channel 4) and the label are never
modified by them. Intermittent-object addition composites all channels.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError
from .model import ForegroundMask, MultiChannelImage, SampleTriplet
from .rng import make_rng


@dataclass(frozen=True)
class IlluminationParams:
    """Per-channel RGB offsets for each triplet member."""

    offset_empty: tuple[float, float, float]
    offset_recent: tuple[float, float, float]
    offset_current: tuple[float, float, float]

    def __post_init__(self) -> None:
        for name in ("offset_empty", "offset_recent", "offset_current"):
            vec = getattr(self, name)
            if len(vec) != 3 or not all(np.isfinite(v) for v in vec):
                raise ValueError(f"{name} must be 3 finite components, got {vec!r}")


@dataclass(frozen=True)
class NoiseParams:
    """Standard deviation of zero-mean per-pixel Gaussian noise."""

    sigma: float

    def __post_init__(self) -> None:
        if self.sigma < 0:
            raise ValueError(f"noise sigma must be >= 0, got {self.sigma}")


def _shift_rgb(img: MultiChannelImage, offsets) -> MultiChannelImage:
    if not any(offsets):
        return img
    arr = img.data.copy()
    arr[:, :, :3] += np.asarray(offsets, dtype=np.float32)
    np.clip(arr[:, :, :3], 0.0, 1.0, out=arr[:, :, :3])
    return MultiChannelImage(arr)


def illumination_shift(t: SampleTriplet, ip: IlluminationParams) -> SampleTriplet:
    """Offset the RGB channels of each member by its vector, then clamp to [0, 1]."""
    return SampleTriplet(
        empty=_shift_rgb(t.empty, ip.offset_empty),
        recent=_shift_rgb(t.recent, ip.offset_recent),
        current=_shift_rgb(t.current, ip.offset_current),
        label=t.label,
    )


def add_gaussian_noise(t: SampleTriplet, noise: NoiseParams, rng_seed) -> SampleTriplet:
    """Add independent N(0, sigma^2) noise to the RGB channels of all three images.

    Deterministic given the seed: the three images consume one Philox stream
    in empty, recent, current order.
    """
    if noise.sigma == 0:
        return t
    rng = make_rng(rng_seed)
    sigma = np.float32(noise.sigma)
    noisy = []
    for img in (t.empty, t.recent, t.current):
        arr = img.data.copy()
        sample = rng.standard_normal(size=arr[:, :, :3].shape, dtype=np.float32)
        arr[:, :, :3] += sigma * sample
        np.clip(arr[:, :, :3], 0.0, 1.0, out=arr[:, :, :3])
        noisy.append(MultiChannelImage(arr))
    return SampleTriplet(empty=noisy[0], recent=noisy[1], current=noisy[2], label=t.label)


def intermittent_object_add(base: SampleTriplet, iom: SampleTriplet) -> SampleTriplet:
    """Paste the donor's foreground into the current and recent images.

    Where the donor label is 1 the donor pixel wins (all channels), elsewhere
    the base pixel stays. The empty background is returned untouched and the
    output label is donor_label + (1 - donor_label) * base_label, which for
    binary masks is the elementwise OR.
    """
    if (base.height, base.width, base.channels) != (iom.height, iom.width, iom.channels):
        raise DimensionMismatchError(
            f"donor {iom.height}x{iom.width}x{iom.channels} does not match "
            f"base {base.height}x{base.width}x{base.channels}"
        )
    m = iom.label.data
    m3 = m[:, :, None]

    def composite(donor: np.ndarray, under: np.ndarray) -> np.ndarray:
        return m3 * donor + (1.0 - m3) * under

    label = m + (1.0 - m) * base.label.data
    return SampleTriplet(
        empty=base.empty,
        recent=MultiChannelImage(composite(iom.recent.data, base.recent.data)),
        current=MultiChannelImage(composite(iom.current.data, base.current.data)),
        label=ForegroundMask(label),
    )
