"""Temporal median background models.

Two forms with identical semantics: a batch per-pixel median over a trailing
window, and a streaming form that pays O(256) per pixel per frame instead of
a full re-sort. The streaming form stores frames quantized to the 8-bit grid
(round(v * 255)), which is lossless for anything decoded from 8-bit sources;
its output therefore matches the batch median exactly on such data.

Even window counts use the lower median, so the output is always a realized
pixel value.
"""
from __future__ import annotations

from collections import deque
from typing import Sequence

import numpy as np

from .errors import (
    DimensionMismatchError,
    EmptySequenceError,
    FrameIdOutOfRangeError,
)
from .model import MultiChannelImage

MAX_STREAM_WINDOW = 255  # bucket counts are uint8


def _check_same_dims(frames: Sequence[MultiChannelImage]) -> None:
    shape = frames[0].data.shape
    for idx, frame in enumerate(frames):
        if frame.data.shape != shape:
            raise DimensionMismatchError(
                f"frame {idx} has shape {frame.data.shape}, expected {shape}"
            )


def median_background(
    frames: Sequence[MultiChannelImage], window_length: int
) -> MultiChannelImage:
    """Per-pixel, per-channel lower median over the last window_length frames.

    With fewer frames than the window, the median is over what exists.
    """
    frames = list(frames)
    if not frames:
        raise EmptySequenceError("median over zero frames")
    if window_length < 1:
        raise ValueError(f"window length must be >= 1, got {window_length}")
    _check_same_dims(frames)
    tail = frames[-window_length:]
    stack = np.stack([f.data for f in tail], axis=0)
    k = (len(tail) - 1) // 2
    median = np.partition(stack, k, axis=0)[k]
    return MultiChannelImage(median)


def _quantize(arr: np.ndarray) -> np.ndarray:
    return np.clip(np.rint(arr * 255.0), 0, 255).astype(np.uint8)


class MedianWindow:
    """Sliding window of quantized frames with per-pixel bucket counts.

    Pushing a frame updates one bucket up and (once full) one bucket down per
    pixel, so the per-frame cost does not grow with the window length. The
    window length is capped at 255 so the counts fit in uint8.
    """

    def __init__(self, window_length: int):
        if not 1 <= window_length <= MAX_STREAM_WINDOW:
            raise ValueError(
                f"window length must be in 1..{MAX_STREAM_WINDOW}, got {window_length}"
            )
        self.window_length = window_length
        self._ring: deque[np.ndarray] = deque()
        self._counts: np.ndarray | None = None  # (256, H, W, C) uint8

    def __len__(self) -> int:
        return len(self._ring)

    def _bump(self, quantized: np.ndarray, increment: bool) -> None:
        idx = quantized.astype(np.intp)[None, ...]
        current = np.take_along_axis(self._counts, idx, axis=0)
        updated = current + np.uint8(1) if increment else current - np.uint8(1)
        np.put_along_axis(self._counts, idx, updated, axis=0)

    def push(self, frame: MultiChannelImage) -> MultiChannelImage:
        """Add a frame, evict the oldest once full, and return the current median."""
        q = _quantize(frame.data)
        if self._counts is None:
            self._counts = np.zeros((256,) + q.shape, dtype=np.uint8)
        elif q.shape != self._counts.shape[1:]:
            raise DimensionMismatchError(
                f"frame shape {q.shape} does not match window {self._counts.shape[1:]}"
            )
        if len(self._ring) == self.window_length:
            self._bump(self._ring.popleft(), increment=False)
        self._ring.append(q)
        self._bump(q, increment=True)
        return self.median()

    def median(self) -> MultiChannelImage:
        if not self._ring:
            raise EmptySequenceError("median of an empty window")
        k = (len(self._ring) - 1) // 2 + 1  # cumulative count reaching the lower median
        cum = np.cumsum(self._counts, axis=0, dtype=np.int16)
        buckets = np.argmax(cum >= k, axis=0)
        return MultiChannelImage(buckets.astype(np.float32) / np.float32(255.0))


def streaming_median(window: MedianWindow, next_frame: MultiChannelImage) -> MultiChannelImage:
    """Push a frame into the window and return the median over its contents."""
    return window.push(next_frame)


def empty_background(
    frames: Sequence[MultiChannelImage],
    strategy: str,
    frame_id: int | None = None,
) -> MultiChannelImage:
    """Long-timescale background reference.

    strategy "manual" returns the designated frame verbatim; "global-median"
    returns the per-pixel median over the whole sequence.
    """
    frames = list(frames)
    if strategy == "manual":
        if frame_id is None:
            raise ValueError("manual strategy needs a frame id")
        if not 0 <= frame_id < len(frames):
            raise FrameIdOutOfRangeError(
                f"frame id {frame_id} outside 0..{len(frames) - 1}"
            )
        return frames[frame_id]
    if strategy == "global-median":
        if not frames:
            raise EmptySequenceError("global median over zero frames")
        return median_background(frames, len(frames))
    raise ValueError(f"unknown empty-background strategy {strategy!r}")
