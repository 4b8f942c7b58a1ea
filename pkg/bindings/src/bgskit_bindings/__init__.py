"""Array-level bindings for external training loops.

Thin wrappers around the core toolkit: batch augmentation, the relaxed
Jaccard loss with its gradient, and confusion-metric accumulation. All math
lives in the core library; these helpers only convert between bare numpy
arrays and the core value types, reusing buffers instead of copying wherever
the dtype and layout already match. Core exceptions pass through unchanged,
so callers can catch the library's error types directly.
"""
from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

import bgskit
from bgskit import (
    AugmentationConfig,
    ForegroundMask,
    GroundTruthMask,
    MultiChannelImage,
    SampleTriplet,
)

__version__ = "0.1.0"

if bgskit.__version__ != __version__:
    raise ImportError(
        f"bgskit-bindings {__version__} is locked to bgskit {__version__}, "
        f"found bgskit {bgskit.__version__}"
    )

__all__ = ["BoundBatchIterator", "py_jaccard", "py_make_batch", "py_metrics"]

ArrayTriplet = "tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]"


def _to_triplet(arrays) -> SampleTriplet:
    empty, recent, current, label = arrays
    return SampleTriplet(
        empty=MultiChannelImage(np.asarray(empty, dtype=np.float32)),
        recent=MultiChannelImage(np.asarray(recent, dtype=np.float32)),
        current=MultiChannelImage(np.asarray(current, dtype=np.float32)),
        label=ForegroundMask(np.asarray(label, dtype=np.float32)),
    )


def _from_triplet(t: SampleTriplet):
    return (t.empty.data, t.recent.data, t.current.data, t.label.data)


def _coerce_config(config) -> AugmentationConfig:
    if config is None:
        return AugmentationConfig()
    if isinstance(config, AugmentationConfig):
        return config
    if isinstance(config, dict):
        return AugmentationConfig(**config)
    return bgskit.load_config(config)


def py_make_batch(config, seed, inputs: Sequence, batch_size: int | None = None, donors=None):
    """Augment a batch and return (empty, recent, current, label) array tuples.

    ``inputs`` and ``donors`` are sequences of such tuples; donors default to
    the inputs. Values are bit-identical to the core batcher for the same
    seed and configuration.
    """
    cfg = _coerce_config(config)
    samples = [_to_triplet(item) for item in inputs]
    donor_triplets = samples if donors is None else [_to_triplet(item) for item in donors]
    if batch_size is None:
        batch_size = len(samples)
    batch = bgskit.make_batch(samples, donor_triplets, cfg, seed, batch_size)
    return [_from_triplet(t) for t in batch]


def py_jaccard(y, yhat, smoothing: float = 1.0):
    """Relaxed Jaccard value and gradient for a label array and probability map."""
    return bgskit.relaxed_jaccard(
        ForegroundMask(np.asarray(y, dtype=np.float32)),
        np.asarray(yhat, dtype=np.float64),
        smoothing,
    )


def py_metrics(pred, gt, roi=None) -> dict:
    """Confusion counts and the seven derived metrics as one flat record."""
    pred_mask = ForegroundMask(np.asarray(pred, dtype=np.float32))
    gt_mask = GroundTruthMask(np.asarray(gt, dtype=np.uint8))
    if roi is None:
        roi_mask = ForegroundMask(np.ones(pred_mask.data.shape, dtype=np.float32))
    else:
        roi_mask = ForegroundMask(np.asarray(roi, dtype=np.float32))
    counts = bgskit.accumulate_confusion(pred_mask, gt_mask, roi_mask)
    report = bgskit.compute_metrics(counts)
    record = {
        "tp": counts.tp,
        "fp": counts.fp,
        "fn": counts.fn,
        "tn": counts.tn,
        "degenerate": report.degenerate,
    }
    record.update(report.values())
    return record


class BoundBatchIterator:
    """Deterministic stream of augmented batches.

    Batch k is produced with the k-th spawned child of the master seed, so
    iteration order matches direct calls into the core batcher bit-exactly
    and restarting the iterator replays the same stream.
    """

    def __init__(
        self,
        config,
        seed: int,
        inputs: Sequence,
        batch_size: int,
        donors=None,
        num_batches: int | None = None,
    ):
        self._cfg = _coerce_config(config)
        self._seed = seed
        self._samples = [_to_triplet(item) for item in inputs]
        self._donors = (
            self._samples if donors is None else [_to_triplet(item) for item in donors]
        )
        self._batch_size = batch_size
        self._num_batches = num_batches
        self._parent: np.random.SeedSequence | None = None
        self._emitted = 0

    def __iter__(self) -> "BoundBatchIterator":
        self._parent = np.random.SeedSequence(self._seed)
        self._emitted = 0
        return self

    def __next__(self):
        if self._parent is None:
            iter(self)
        if self._num_batches is not None and self._emitted >= self._num_batches:
            raise StopIteration
        child = self._parent.spawn(1)[0]
        self._emitted += 1
        batch = bgskit.make_batch(
            self._samples, self._donors, self._cfg, child, self._batch_size
        )
        return [_from_triplet(t) for t in batch]
