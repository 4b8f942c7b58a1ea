"""Relaxed Jaccard loss, segmentation metrics, aggregation and ranking.

Metric formulas over confusion counts (tp, fp, fn, tn):

    re  = tp / (tp + fn)          sp  = tn / (tn + fp)
    fpr = 1 - sp                  fnr = 1 - re
    pwc = 100 (fp + fn) / (tp + tn + fp + fn)
    pr  = tp / (tp + fp)          f1  = 2 pr re / (pr + re)

A ratio with a zero denominator evaluates to 0 and flags the report as
degenerate, so aggregation stays total. Thresholding maps ties to foreground.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    DimensionMismatchError,
    EmptyInputError,
    MismatchedCategoriesError,
    NonPositiveSmoothingError,
)
from .model import ForegroundMask
from .datasets import GroundTruthMask, PixelLabel

METRIC_FIELDS = ("re", "sp", "fpr", "fnr", "pwc", "pr", "f1")
HIGHER_BETTER = frozenset({"re", "sp", "pr", "f1"})


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0

    def __post_init__(self) -> None:
        if min(self.tp, self.fp, self.fn, self.tn) < 0:
            raise ValueError("confusion counts must be non-negative")

    def __add__(self, other: "ConfusionCounts") -> "ConfusionCounts":
        return ConfusionCounts(
            self.tp + other.tp,
            self.fp + other.fp,
            self.fn + other.fn,
            self.tn + other.tn,
        )

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


@dataclass(frozen=True)
class MetricsReport:
    counts: ConfusionCounts
    re: float
    sp: float
    fpr: float
    fnr: float
    pwc: float
    pr: float
    f1: float
    scope: str  # "video" | "category" | "overall"
    degenerate: bool = False

    def values(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in METRIC_FIELDS}


def relaxed_jaccard(
    y: ForegroundMask, yhat: np.ndarray, smoothing: float
) -> tuple[float, np.ndarray]:
    """Smoothed intersection-over-union between a binary label and a probability map.

        J = (T + sum(y * yhat)) / (T + sum(y + yhat - y * yhat))

    Returns the value and its closed-form gradient with respect to yhat.
    Training code maximizes J (equivalently minimizes 1 - J).
    """
    if smoothing <= 0:
        raise NonPositiveSmoothingError(f"smoothing must be > 0, got {smoothing}")
    pred = np.asarray(yhat, dtype=np.float64)
    truth = y.data.astype(np.float64)
    if pred.shape != truth.shape:
        raise DimensionMismatchError(
            f"prediction shape {pred.shape} does not match label shape {truth.shape}"
        )
    prod = truth * pred
    numerator = smoothing + prod.sum()
    denominator = smoothing + (truth + pred - prod).sum()
    value = numerator / denominator
    gradient = (truth * denominator - numerator * (1.0 - truth)) / denominator**2
    return value, gradient


def threshold(yhat: np.ndarray, theta: float) -> ForegroundMask:
    """Binarize a probability map; values equal to theta count as foreground."""
    pred = np.asarray(yhat, dtype=np.float64)
    return ForegroundMask((pred >= theta).astype(np.float32))


def accumulate_confusion(
    pred: ForegroundMask, gt: GroundTruthMask, roi: ForegroundMask
) -> ConfusionCounts:
    """Count tp/fp/fn/tn over evaluated pixels.

    Pixels outside the ROI or labeled unknown-motion/out-of-ROI are excluded;
    hard-shadow pixels count as background ground truth.
    """
    if pred.data.shape != gt.data.shape or pred.data.shape != roi.data.shape:
        raise DimensionMismatchError(
            f"prediction {pred.data.shape}, ground truth {gt.data.shape} and "
            f"roi {roi.data.shape} must share a shape"
        )
    labels = gt.data
    evaluated = (
        (roi.data != 0)
        & (labels != int(PixelLabel.UNKNOWN_MOTION))
        & (labels != int(PixelLabel.OUT_OF_ROI))
    )
    truth_fg = labels == int(PixelLabel.FOREGROUND)
    pred_fg = pred.data != 0
    return ConfusionCounts(
        tp=int(np.count_nonzero(evaluated & pred_fg & truth_fg)),
        fp=int(np.count_nonzero(evaluated & pred_fg & ~truth_fg)),
        fn=int(np.count_nonzero(evaluated & ~pred_fg & truth_fg)),
        tn=int(np.count_nonzero(evaluated & ~pred_fg & ~truth_fg)),
    )


def compute_metrics(c: ConfusionCounts, scope: str = "video") -> MetricsReport:
    """Derive the seven metrics from counts, with the defined-0 convention."""
    degenerate = False

    def ratio(num: int, den: int) -> float:
        nonlocal degenerate
        if den == 0:
            degenerate = True
            return 0.0
        return num / den

    re = ratio(c.tp, c.tp + c.fn)
    sp = ratio(c.tn, c.tn + c.fp)
    pwc = 100.0 * ratio(c.fp + c.fn, c.total)
    pr = ratio(c.tp, c.tp + c.fp)
    if pr + re > 0:
        f1 = 2.0 * pr * re / (pr + re)
    else:
        degenerate = True
        f1 = 0.0
    return MetricsReport(
        counts=c,
        re=re,
        sp=sp,
        fpr=1.0 - sp,
        fnr=1.0 - re,
        pwc=pwc,
        pr=pr,
        f1=f1,
        scope=scope,
        degenerate=degenerate,
    )


@dataclass(frozen=True)
class ReportTree:
    """Per-video reports plus their category and overall means."""

    videos: dict[str, dict[str, MetricsReport]]  # category -> video -> report
    categories: dict[str, MetricsReport]
    overall: MetricsReport


def _mean_report(reports: Sequence[MetricsReport], scope: str) -> MetricsReport:
    if not reports:
        raise EmptyInputError("cannot aggregate zero reports")
    counts = ConfusionCounts()
    for report in reports:
        counts = counts + report.counts
    n = len(reports)
    re = sum(r.re for r in reports) / n
    sp = sum(r.sp for r in reports) / n
    return MetricsReport(
        counts=counts,
        re=re,
        sp=sp,
        fpr=1.0 - sp,
        fnr=1.0 - re,
        pwc=sum(r.pwc for r in reports) / n,
        pr=sum(r.pr for r in reports) / n,
        f1=sum(r.f1 for r in reports) / n,
        scope=scope,
        degenerate=any(r.degenerate for r in reports),
    )


def aggregate(per_video: Mapping[str, Mapping[str, MetricsReport]]) -> ReportTree:
    """Unweighted means: videos into categories, categories into the overall row.

    Counts are summed along the way for provenance; the aggregated metric
    values are means of child metrics, not recomputed from pooled counts.
    """
    if not per_video:
        raise EmptyInputError("no videos to aggregate")
    videos = {cat: dict(vids) for cat, vids in per_video.items()}
    categories = {}
    for cat, vids in videos.items():
        if not vids:
            raise EmptyInputError(f"category {cat!r} has no videos")
        categories[cat] = _mean_report(list(vids.values()), scope="category")
    overall = _mean_report(list(categories.values()), scope="overall")
    return ReportTree(videos=videos, categories=categories, overall=overall)


@dataclass(frozen=True)
class RankingTable:
    """Mean ranks per method: R over overall metrics, R_cat over per-category ranks."""

    methods: tuple[str, ...]
    overall_ranks: dict[str, dict[str, float]]  # metric -> method -> rank
    mean_rank: dict[str, float]  # R
    mean_rank_categories: dict[str, float]  # R_cat


def _mean_ranks(scores: Sequence[float], higher_better: bool) -> list[float]:
    # Rank 1 is best; tied scores share the mean of their positions.
    keyed = sorted(range(len(scores)), key=lambda i: -scores[i] if higher_better else scores[i])
    ranks = [0.0] * len(scores)
    pos = 0
    while pos < len(keyed):
        end = pos
        while end + 1 < len(keyed) and scores[keyed[end + 1]] == scores[keyed[pos]]:
            end += 1
        mean_position = (pos + end) / 2 + 1
        for i in range(pos, end + 1):
            ranks[keyed[i]] = mean_position
        pos = end + 1
    return ranks


def _rank_block(
    per_method: Mapping[str, MetricsReport], methods: Sequence[str]
) -> dict[str, dict[str, float]]:
    out: dict[str, dict[str, float]] = {}
    for metric in METRIC_FIELDS:
        scores = [per_method[m].values()[metric] for m in methods]
        ranks = _mean_ranks(scores, metric in HIGHER_BETTER)
        out[metric] = dict(zip(methods, ranks))
    return out


def rank_methods(method_trees: Mapping[str, ReportTree]) -> RankingTable:
    """Rank methods per metric and average the ranks.

    R averages each method's seven overall-metric ranks. R_cat first averages
    the seven ranks within each category, then averages those over categories.
    """
    if not method_trees:
        raise EmptyInputError("no methods to rank")
    methods = tuple(method_trees)
    category_sets = {m: tuple(sorted(t.categories)) for m, t in method_trees.items()}
    reference = category_sets[methods[0]]
    for method, cats in category_sets.items():
        if cats != reference:
            raise MismatchedCategoriesError(
                f"method {method!r} reports categories {cats}, expected {reference}"
            )

    overall_ranks = _rank_block(
        {m: t.overall for m, t in method_trees.items()}, methods
    )
    mean_rank = {
        m: sum(overall_ranks[metric][m] for metric in METRIC_FIELDS) / len(METRIC_FIELDS)
        for m in methods
    }

    per_category_means: dict[str, list[float]] = {m: [] for m in methods}
    for category in reference:
        block = _rank_block(
            {m: method_trees[m].categories[category] for m in methods}, methods
        )
        for m in methods:
            per_category_means[m].append(
                sum(block[metric][m] for metric in METRIC_FIELDS) / len(METRIC_FIELDS)
            )
    mean_rank_categories = {
        m: sum(values) / len(values) for m, values in per_category_means.items()
    }
    return RankingTable(
        methods=methods,
        overall_ranks=overall_ranks,
        mean_rank=mean_rank,
        mean_rank_categories=mean_rank_categories,
    )


REPORT_COLUMNS = (
    "scope",
    "category",
    "video",
    "tp",
    "fp",
    "fn",
    "tn",
    "re",
    "sp",
    "fpr",
    "fnr",
    "pwc",
    "pr",
    "f1",
    "degenerate",
)


def _report_row(report: MetricsReport, category: str, video: str) -> list[str]:
    c = report.counts
    row = [report.scope, category, video, str(c.tp), str(c.fp), str(c.fn), str(c.tn)]
    row += [f"{report.values()[m]:.6f}" for m in METRIC_FIELDS]
    row.append("1" if report.degenerate else "0")
    return row


def write_report_csv(tree: ReportTree, path, scope: str = "video") -> None:
    """Fixed-decimal CSV down to the requested granularity.

    scope "video" writes video, category and overall rows; "category" drops
    the video rows; "overall" keeps only the overall mean.
    """
    if scope not in ("video", "category", "overall"):
        raise ValueError(f"unknown report scope {scope!r}")
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(REPORT_COLUMNS)
        if scope == "video":
            for category in sorted(tree.videos):
                for video in sorted(tree.videos[category]):
                    writer.writerow(_report_row(tree.videos[category][video], category, video))
        if scope in ("video", "category"):
            for category in sorted(tree.categories):
                writer.writerow(_report_row(tree.categories[category], category, ""))
        writer.writerow(_report_row(tree.overall, "", ""))


def _report_dict(report: MetricsReport) -> dict:
    payload = {
        "counts": {
            "tp": report.counts.tp,
            "fp": report.counts.fp,
            "fn": report.counts.fn,
            "tn": report.counts.tn,
        },
        "degenerate": report.degenerate,
    }
    payload.update({m: round(report.values()[m], 10) for m in METRIC_FIELDS})
    return payload


def write_report_json(tree: ReportTree, path) -> None:
    """Structured variant of the CSV report."""
    payload = {
        "videos": {
            category: {
                video: _report_dict(report)
                for video, report in sorted(tree.videos[category].items())
            }
            for category in sorted(tree.videos)
        },
        "categories": {
            category: _report_dict(report)
            for category, report in sorted(tree.categories.items())
        },
        "overall": _report_dict(tree.overall),
    }
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def read_report_csv(path) -> ReportTree:
    """Rebuild a report tree from :func:`write_report_csv` output."""
    videos: dict[str, dict[str, MetricsReport]] = {}
    categories: dict[str, MetricsReport] = {}
    overall: MetricsReport | None = None
    with open(path, newline="") as handle:
        for row in csv.DictReader(handle):
            counts = ConfusionCounts(
                int(row["tp"]), int(row["fp"]), int(row["fn"]), int(row["tn"])
            )
            report = MetricsReport(
                counts=counts,
                re=float(row["re"]),
                sp=float(row["sp"]),
                fpr=float(row["fpr"]),
                fnr=float(row["fnr"]),
                pwc=float(row["pwc"]),
                pr=float(row["pr"]),
                f1=float(row["f1"]),
                scope=row["scope"],
                degenerate=row["degenerate"] == "1",
            )
            if report.scope == "video":
                videos.setdefault(row["category"], {})[row["video"]] = report
            elif report.scope == "category":
                categories[row["category"]] = report
            elif report.scope == "overall":
                overall = report
            else:
                raise ValueError(f"unknown scope {report.scope!r} in {path}")
    if overall is None or not categories:
        raise EmptyInputError(f"report {path} is missing category or overall rows")
    return ReportTree(videos=videos, categories=categories, overall=overall)
