"""Dataset ingestion: directory layouts, label decoding, and the 4-fold split.

Supports the public change-detection layout (per-video ``input/`` and
``groundtruth/`` directories, a ROI image, and a two-integer temporal ROI
text file) plus a simplified indoor/outdoor layout that differs only in its
binary ground-truth encoding and its whole-video-median empty background.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import (
    CorruptImageError,
    InconsistentFrameCountError,
    MissingDirectoryError,
    UnknownFoldError,
)
from .model import ForegroundMask, MultiChannelImage

FRAME_EXTENSIONS = (".jpg", ".jpeg", ".png", ".bmp")


class PixelLabel(enum.IntEnum):
    BACKGROUND = 0
    FOREGROUND = 1
    HARD_SHADOW = 2
    UNKNOWN_MOTION = 3
    OUT_OF_ROI = 4


# Community gray-level encodings; decoding any level outside the table is an
# error rather than a guess.
CDNET_GRAY_LEVELS = {
    0: PixelLabel.BACKGROUND,
    50: PixelLabel.HARD_SHADOW,
    85: PixelLabel.OUT_OF_ROI,
    170: PixelLabel.UNKNOWN_MOTION,
    255: PixelLabel.FOREGROUND,
}
LASIESTA_GRAY_LEVELS = {
    0: PixelLabel.BACKGROUND,
    255: PixelLabel.FOREGROUND,
}


@dataclass(frozen=True)
class GroundTruthMask:
    """H x W field of :class:`PixelLabel` codes."""

    data: np.ndarray  # (H, W) uint8 of PixelLabel values

    def __post_init__(self) -> None:
        arr = np.asarray(self.data, dtype=np.uint8)
        if arr.ndim != 2:
            raise ValueError(f"ground truth must be 2-dimensional, got shape {arr.shape}")
        view = arr.view()
        view.setflags(write=False)
        object.__setattr__(self, "data", view)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]


def decode_ground_truth(gray: np.ndarray, table: dict[int, PixelLabel]) -> GroundTruthMask:
    """Map gray levels to labels via the table; unknown levels raise."""
    levels = np.unique(gray)
    unknown = [int(v) for v in levels if int(v) not in table]
    if unknown:
        raise CorruptImageError(f"unknown ground-truth gray levels {unknown}")
    out = np.zeros(gray.shape, dtype=np.uint8)
    for level, label in table.items():
        out[gray == level] = int(label)
    return GroundTruthMask(out)


def _load_gray(path: Path) -> np.ndarray:
    try:
        with Image.open(path) as img:
            return np.asarray(img.convert("L"))
    except (UnidentifiedImageError, OSError) as exc:
        raise CorruptImageError(f"cannot decode {path}: {exc}") from exc


def _load_rgb(path: Path) -> np.ndarray:
    try:
        with Image.open(path) as img:
            return np.asarray(img.convert("RGB"), dtype=np.float32) / np.float32(255.0)
    except (UnidentifiedImageError, OSError) as exc:
        raise CorruptImageError(f"cannot decode {path}: {exc}") from exc


@dataclass(frozen=True)
class VideoDescriptor:
    """Everything needed to iterate one video lazily."""

    dataset: str  # "cdnet" | "lasiesta"
    category: str
    name: str
    frame_count: int
    height: int
    width: int
    temporal_roi: tuple[int, int]  # first/last evaluated frame, 1-based inclusive
    empty_strategy: str  # "manual" | "global-median"
    empty_frame_id: int | None
    frame_paths: tuple[Path, ...]
    gt_paths: tuple[Path, ...]
    roi_path: Path | None
    fpm_paths: tuple[Path, ...] = field(default=())
    gray_table: dict[int, PixelLabel] = field(default_factory=lambda: dict(CDNET_GRAY_LEVELS))

    def frames(self) -> Iterator[MultiChannelImage]:
        """Decode frames in index order; the probability plane is appended when present."""
        for i, path in enumerate(self.frame_paths):
            rgb = _load_rgb(path)
            if self.fpm_paths:
                fpm = _load_gray(self.fpm_paths[i]).astype(np.float32) / np.float32(255.0)
                rgb = np.concatenate([rgb, fpm[:, :, None]], axis=2)
            yield MultiChannelImage(rgb)

    def ground_truth(self) -> Iterator[GroundTruthMask]:
        for path in self.gt_paths:
            yield decode_ground_truth(_load_gray(path), self.gray_table)

    def roi(self) -> ForegroundMask:
        """Spatial region of interest; all-ones when the video ships none."""
        if self.roi_path is None:
            return ForegroundMask(np.ones((self.height, self.width), dtype=np.float32))
        gray = _load_gray(self.roi_path)
        return ForegroundMask((gray >= 128).astype(np.float32))

    def is_evaluated(self, frame_index: int) -> bool:
        """1-based frame index inside the temporal region of interest."""
        first, last = self.temporal_roi
        return first <= frame_index <= last


def _sorted_frames(directory: Path, prefix: str) -> tuple[Path, ...]:
    paths = sorted(
        p
        for p in directory.iterdir()
        if p.suffix.lower() in FRAME_EXTENSIONS and p.name.startswith(prefix)
    )
    return tuple(paths)


def _probe_resolution(path: Path) -> tuple[int, int]:
    try:
        with Image.open(path) as img:
            return img.height, img.width
    except (UnidentifiedImageError, OSError) as exc:
        raise CorruptImageError(f"cannot decode {path}: {exc}") from exc


def _read_temporal_roi(path: Path, frame_count: int) -> tuple[int, int]:
    if not path.is_file():
        return 1, frame_count
    parts = path.read_text().split()
    if len(parts) < 2:
        raise CorruptImageError(f"temporal ROI file {path} needs two integers")
    return int(parts[0]), int(parts[1])


def _find_roi(video_dir: Path) -> Path | None:
    for name in ("ROI.bmp", "ROI.png", "ROI.jpg"):
        candidate = video_dir / name
        if candidate.is_file():
            return candidate
    return None


def _load_video(
    root,
    category: str,
    video: str,
    dataset: str,
    gray_table: dict[int, PixelLabel],
    empty_strategy: str,
    empty_frame_id: int | None,
) -> VideoDescriptor:
    video_dir = Path(root) / category / video
    frames_dir = video_dir / "input"
    gt_dir = video_dir / "groundtruth"
    for directory in (video_dir, frames_dir, gt_dir):
        if not directory.is_dir():
            raise MissingDirectoryError(f"missing directory {directory}")

    frame_paths = _sorted_frames(frames_dir, "in")
    gt_paths = _sorted_frames(gt_dir, "gt")
    if not frame_paths:
        raise MissingDirectoryError(f"no frames under {frames_dir}")
    if len(frame_paths) != len(gt_paths):
        raise InconsistentFrameCountError(
            f"{len(frame_paths)} frames vs {len(gt_paths)} ground-truth files in {video_dir}"
        )

    fpm_dir = video_dir / "fpm"
    fpm_paths: tuple[Path, ...] = ()
    if fpm_dir.is_dir():
        fpm_paths = _sorted_frames(fpm_dir, "")
        if len(fpm_paths) != len(frame_paths):
            raise InconsistentFrameCountError(
                f"{len(fpm_paths)} probability maps vs {len(frame_paths)} frames in {video_dir}"
            )

    height, width = _probe_resolution(frame_paths[0])
    return VideoDescriptor(
        dataset=dataset,
        category=category,
        name=video,
        frame_count=len(frame_paths),
        height=height,
        width=width,
        temporal_roi=_read_temporal_roi(video_dir / "temporalROI.txt", len(frame_paths)),
        empty_strategy=empty_strategy,
        empty_frame_id=empty_frame_id,
        frame_paths=frame_paths,
        gt_paths=gt_paths,
        roi_path=_find_roi(video_dir),
        fpm_paths=fpm_paths,
        gray_table=dict(gray_table),
    )


def load_cdnet_video(root, category: str, video: str, empty_frame_id: int = 0) -> VideoDescriptor:
    """Open one change-detection video; the empty background is a designated frame."""
    return _load_video(
        root,
        category,
        video,
        dataset="cdnet",
        gray_table=CDNET_GRAY_LEVELS,
        empty_strategy="manual",
        empty_frame_id=empty_frame_id,
    )


def load_lasiesta_video(root, category: str, video: str) -> VideoDescriptor:
    """Open one indoor/outdoor video; the empty background is the whole-video median."""
    return _load_video(
        root,
        category,
        video,
        dataset="lasiesta",
        gray_table=LASIESTA_GRAY_LEVELS,
        empty_strategy="global-median",
        empty_frame_id=None,
    )


def write_image_png(path, image: MultiChannelImage) -> None:
    """Write the RGB channels as an 8-bit PNG (round(v * 255))."""
    arr = np.clip(np.rint(image.data[:, :, :3] * 255.0), 0, 255).astype(np.uint8)
    Image.fromarray(arr, mode="RGB").save(path)


def write_mask_png(path, mask: ForegroundMask) -> None:
    """Write a binary mask as an 8-bit PNG with foreground at 255."""
    arr = (mask.data != 0).astype(np.uint8) * 255
    Image.fromarray(arr, mode="L").save(path)


def read_mask_png(path) -> ForegroundMask:
    """Read a binary mask PNG; gray levels >= 128 count as foreground."""
    gray = _load_gray(Path(path))
    return ForegroundMask((gray >= 128).astype(np.float32))


FOLDS = ("S1", "S2", "S3", "S4")


@dataclass(frozen=True)
class SplitEntry:
    category: str
    video: str
    fold: str


@dataclass(frozen=True)
class SplitManifest:
    entries: tuple[SplitEntry, ...]

    @property
    def categories(self) -> tuple[str, ...]:
        seen: list[str] = []
        for entry in self.entries:
            if entry.category not in seen:
                seen.append(entry.category)
        return tuple(seen)

    def fold_sizes(self) -> dict[str, int]:
        sizes = {fold: 0 for fold in FOLDS}
        for entry in self.entries:
            sizes[entry.fold] += 1
        return sizes


# 4-fold cross-validation assignment over the 53 change-detection videos,
# using the on-disk category and video directory names.
_SPLIT_ROWS = (
    ("baseline", "highway", "S1"),
    ("baseline", "pedestrians", "S2"),
    ("baseline", "office", "S3"),
    ("baseline", "PETS2006", "S4"),
    ("badWeather", "blizzard", "S1"),
    ("badWeather", "skating", "S2"),
    ("badWeather", "wetSnow", "S3"),
    ("badWeather", "snowFall", "S4"),
    ("intermittentObjectMotion", "sofa", "S1"),
    ("intermittentObjectMotion", "winterDriveway", "S2"),
    ("intermittentObjectMotion", "parking", "S3"),
    ("intermittentObjectMotion", "abandonedBox", "S3"),
    ("intermittentObjectMotion", "streetLight", "S4"),
    ("intermittentObjectMotion", "tramstop", "S4"),
    ("lowFramerate", "port_0_17fps", "S1"),
    ("lowFramerate", "tramCrossroad_1fps", "S2"),
    ("lowFramerate", "tunnelExit_0_35fps", "S3"),
    ("lowFramerate", "turnpike_0_5fps", "S4"),
    ("PTZ", "continuousPan", "S1"),
    ("PTZ", "intermittentPan", "S2"),
    ("PTZ", "zoomInZoomOut", "S3"),
    ("PTZ", "twoPositionPTZCam", "S4"),
    ("thermal", "corridor", "S1"),
    ("thermal", "lakeSide", "S1"),
    ("thermal", "library", "S2"),
    ("thermal", "diningRoom", "S3"),
    ("thermal", "park", "S4"),
    ("cameraJitter", "badminton", "S1"),
    ("cameraJitter", "traffic", "S2"),
    ("cameraJitter", "boulevard", "S3"),
    ("cameraJitter", "sidewalk", "S4"),
    ("shadow", "copyMachine", "S1"),
    ("shadow", "busStation", "S2"),
    ("shadow", "cubicle", "S3"),
    ("shadow", "peopleInShade", "S3"),
    ("shadow", "bungalows", "S4"),
    ("shadow", "backdoor", "S4"),
    ("dynamicBackground", "overpass", "S1"),
    ("dynamicBackground", "fountain02", "S1"),
    ("dynamicBackground", "fountain01", "S2"),
    ("dynamicBackground", "boats", "S2"),
    ("dynamicBackground", "canoe", "S3"),
    ("dynamicBackground", "fall", "S4"),
    ("nightVideos", "bridgeEntry", "S1"),
    ("nightVideos", "busyBoulvard", "S1"),
    ("nightVideos", "tramStation", "S2"),
    ("nightVideos", "winterStreet", "S2"),
    ("nightVideos", "fluidHighway", "S3"),
    ("nightVideos", "streetCornerAtNight", "S4"),
    ("turbulence", "turbulence0", "S1"),
    ("turbulence", "turbulence1", "S2"),
    ("turbulence", "turbulence2", "S3"),
    ("turbulence", "turbulence3", "S4"),
)


def builtin_split() -> SplitManifest:
    """The built-in 4-fold assignment: 53 videos, 11 categories, folds 14/13/13/13."""
    return SplitManifest(tuple(SplitEntry(*row) for row in _SPLIT_ROWS))


def fold_plan(
    manifest: SplitManifest, test_fold: str
) -> tuple[tuple[SplitEntry, ...], tuple[SplitEntry, ...]]:
    """Train on three folds, test on the remaining one."""
    if test_fold not in FOLDS:
        raise UnknownFoldError(f"fold {test_fold!r} not one of {FOLDS}")
    train = tuple(e for e in manifest.entries if e.fold != test_fold)
    test = tuple(e for e in manifest.entries if e.fold == test_fold)
    return train, test
