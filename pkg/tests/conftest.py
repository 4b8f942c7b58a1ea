"""Shared fixtures: synthetic triplets, videos on disk, scalar oracles."""
from __future__ import annotations

import numpy as np
import pytest
from PIL import Image

from bgskit.model import ForegroundMask, MultiChannelImage, SampleTriplet


def random_image(rng: np.random.Generator, height: int, width: int, channels: int = 4) -> MultiChannelImage:
    return MultiChannelImage(rng.random((height, width, channels), dtype=np.float32))


def random_mask(rng: np.random.Generator, height: int, width: int) -> ForegroundMask:
    return ForegroundMask((rng.random((height, width)) < 0.3).astype(np.float32))


def random_triplet(rng: np.random.Generator, height: int, width: int, channels: int = 4) -> SampleTriplet:
    return SampleTriplet(
        empty=random_image(rng, height, width, channels),
        recent=random_image(rng, height, width, channels),
        current=random_image(rng, height, width, channels),
        label=random_mask(rng, height, width),
    )


def grid_image(rng: np.random.Generator, height: int, width: int, channels: int = 3) -> MultiChannelImage:
    """Image whose values sit on the 8-bit grid k/255."""
    levels = rng.integers(0, 256, size=(height, width, channels))
    return MultiChannelImage(levels.astype(np.float32) / np.float32(255.0))


def bilinear_oracle(arr: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Scalar corner-aligned bilinear interpolation, written independently."""
    in_h, in_w, channels = arr.shape
    out = np.zeros((out_h, out_w, channels), dtype=np.float64)
    for o in range(out_h):
        y = 0.0 if out_h == 1 else o * (in_h - 1) / (out_h - 1)
        y0 = int(np.floor(y))
        y1 = min(y0 + 1, in_h - 1)
        wy = y - y0
        for p in range(out_w):
            x = 0.0 if out_w == 1 else p * (in_w - 1) / (out_w - 1)
            x0 = int(np.floor(x))
            x1 = min(x0 + 1, in_w - 1)
            wx = x - x0
            for c in range(channels):
                top = arr[y0, x0, c] * (1 - wx) + arr[y0, x1, c] * wx
                bottom = arr[y1, x0, c] * (1 - wx) + arr[y1, x1, c] * wx
                out[o, p, c] = top * (1 - wy) + bottom * wy
    return out


def triplets_equal(a: SampleTriplet, b: SampleTriplet) -> bool:
    return (
        np.array_equal(a.empty.data, b.empty.data)
        and np.array_equal(a.recent.data, b.recent.data)
        and np.array_equal(a.current.data, b.current.data)
        and np.array_equal(a.label.data, b.label.data)
    )


def _save_gray(path, array: np.ndarray) -> None:
    Image.fromarray(array.astype(np.uint8), mode="L").save(path)


def _save_rgb(path, array: np.ndarray) -> None:
    Image.fromarray(array.astype(np.uint8), mode="RGB").save(path)


def build_fixture_video(
    video_dir,
    frames: list[np.ndarray],
    ground_truths: list[np.ndarray],
    roi: np.ndarray | None = None,
    temporal_roi: tuple[int, int] | None = None,
) -> None:
    """Write a miniature dataset video with the public directory layout."""
    frames_dir = video_dir / "input"
    gt_dir = video_dir / "groundtruth"
    frames_dir.mkdir(parents=True)
    gt_dir.mkdir(parents=True)
    for i, frame in enumerate(frames, start=1):
        _save_rgb(frames_dir / f"in{i:06d}.png", frame)
    for i, gt in enumerate(ground_truths, start=1):
        _save_gray(gt_dir / f"gt{i:06d}.png", gt)
    if roi is not None:
        _save_gray(video_dir / "ROI.bmp", roi)
    if temporal_roi is not None:
        (video_dir / "temporalROI.txt").write_text(f"{temporal_roi[0]} {temporal_roi[1]}\n")


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240811)
