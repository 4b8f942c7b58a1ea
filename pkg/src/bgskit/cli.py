"""Command-line front end.

Exit codes: 0 success, 1 data error, 2 usage error. All randomness flows from
the --seed flag; given identical inputs and seed, the file-writing
subcommands produce byte-identical output regardless of --workers. The
report-writing subcommands (eval, rank, and bench with --out) also render a
PNG figure next to each delimited output file.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, replace
from pathlib import Path

import numpy as np

from .background import MedianWindow, empty_background
from .container import read_tensor, write_tensor
from .datasets import (
    FOLDS,
    VideoDescriptor,
    builtin_split,
    fold_plan,
    load_cdnet_video,
    load_lasiesta_video,
    read_mask_png,
    write_image_png,
)
from .errors import (
    CorruptImageError,
    EmptyInputError,
    MissingDirectoryError,
    ToolkitError,
)
from .figures import save_bench_figure, save_metrics_figure, save_ranking_figure
from .metrics import (
    METRIC_FIELDS,
    accumulate_confusion,
    aggregate,
    compute_metrics,
    rank_methods,
    read_report_csv,
    write_report_csv,
    write_report_json,
)
from .model import MultiChannelImage, SampleTriplet
from .pipeline import (
    AugmentationConfig,
    load_config,
    plan_batch,
    apply_plan,
    sample_augmentation,
    synthetic_ramp_triplet,
    timed_apply_plan,
)

DATASET_ROOT_ENV = "BGSKIT_DATASET_ROOT"
BENCH_CROP_RATIO = 0.375  # keeps every default-parameter window feasible
STAGE_NAMES = ("crop", "illumination", "object_addition", "noise")


def _load_frames(frames_dir: Path) -> list[MultiChannelImage]:
    from .datasets import FRAME_EXTENSIONS, _load_rgb

    paths = sorted(
        p for p in frames_dir.iterdir() if p.suffix.lower() in FRAME_EXTENSIONS
    )
    if not paths:
        raise MissingDirectoryError(f"no frames under {frames_dir}")
    return [MultiChannelImage(_load_rgb(p)) for p in paths]


def cmd_split(args) -> int:
    manifest = builtin_split()
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    lines = ["category,video,fold"]
    lines += [f"{e.category},{e.video},{e.fold}" for e in manifest.entries]
    out.write_text("\n".join(lines) + "\n")
    for fold in FOLDS:
        train, test = fold_plan(manifest, fold)
        (out.parent / f"{fold}_train.txt").write_text(
            "\n".join(f"{e.category}/{e.video}" for e in train) + "\n"
        )
        (out.parent / f"{fold}_test.txt").write_text(
            "\n".join(f"{e.category}/{e.video}" for e in test) + "\n"
        )
    print(f"wrote {out} and per-fold lists for {len(manifest.entries)} videos")
    return 0


def cmd_bgmodel(args) -> int:
    video_dir = Path(args.video)
    frames_dir = video_dir / "input" if (video_dir / "input").is_dir() else video_dir
    if not frames_dir.is_dir():
        raise MissingDirectoryError(f"missing directory {frames_dir}")
    # TODO: bucket-accumulated global median to bound memory on long videos.
    frames = _load_frames(frames_dir)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    window = MedianWindow(args.window)
    for index, frame in enumerate(frames):
        if index > 0:
            write_image_png(out / f"recent{index:06d}.png", window.median())
        window.push(frame)

    if args.strategy == "manual":
        empty = empty_background(frames, "manual", frame_id=args.manual_frame)
    else:
        empty = empty_background(frames, "global-median")
    write_image_png(out / "empty.png", empty)
    print(f"wrote {len(frames) - 1} recent backgrounds and empty.png to {out}")
    return 0


def _read_triplets(paths: list[Path]) -> list[SampleTriplet]:
    triplets = []
    for path in paths:
        value = read_tensor(path)
        if not isinstance(value, SampleTriplet):
            raise EmptyInputError(f"{path} does not contain a triplet")
        triplets.append(value)
    return triplets


def cmd_augment(args) -> int:
    cfg = load_config(args.config) if args.config else AugmentationConfig()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    input_paths = sorted(Path(args.inputs).glob("*.bsvt")) if args.inputs else []
    if args.count > 0 and not input_paths:
        raise EmptyInputError("augmentation needs at least one input triplet")
    triplets = _read_triplets(input_paths)

    if args.donors:
        donor_paths = sorted(Path(args.donors).glob("*.bsvt"))
        donors = _read_triplets(donor_paths)
    else:
        donor_paths, donors = input_paths, triplets

    sizes = [(t.height, t.width) for t in triplets] or [(0, 0)]
    plans = plan_batch(cfg, args.seed, args.count, sizes, len(donors))

    def job(item: tuple[int, tuple]) -> None:
        index, (plan, donor_index) = item
        sample = triplets[index % len(triplets)]
        donor = donors[donor_index] if donor_index is not None else None
        write_tensor(out / f"aug_{index:06d}.bsvt", apply_plan(sample, donor, plan))

    with ThreadPoolExecutor(max_workers=args.workers) as pool:
        list(pool.map(job, enumerate(plans)))

    config_payload = asdict(cfg)
    config_payload["enabled_crops"] = list(cfg.enabled_crops)
    with open(out / "plans.jsonl", "w") as log:
        log.write(
            json.dumps(
                {"kind": "header", "seed": args.seed, "count": args.count, "config": config_payload},
                sort_keys=True,
            )
            + "\n"
        )
        for index, (plan, donor_index) in enumerate(plans):
            log.write(
                json.dumps(
                    {
                        "kind": "plan",
                        "index": index,
                        "input": input_paths[index % len(input_paths)].name,
                        "donor": donor_paths[donor_index].name if donor_index is not None else None,
                        "plan": plan.to_dict(),
                    },
                    sort_keys=True,
                )
                + "\n"
            )
    print(f"wrote {len(plans)} augmented triplets and plans.jsonl to {out}")
    return 0


def _discover_videos(root: Path) -> list[tuple[str, str]]:
    found = []
    for category in sorted(p for p in root.iterdir() if p.is_dir()):
        for video in sorted(p for p in category.iterdir() if p.is_dir()):
            if (video / "input").is_dir() and (video / "groundtruth").is_dir():
                found.append((category.name, video.name))
    if not found:
        raise MissingDirectoryError(f"no videos found under {root}")
    return found


def _index_of(path: Path) -> int:
    digits = "".join(ch for ch in path.stem if ch.isdigit())
    if not digits:
        raise CorruptImageError(f"cannot read a frame index from {path.name}")
    return int(digits)


def _evaluate_video(desc: VideoDescriptor, pred_root: Path):
    pred_dir = pred_root / desc.category / desc.name
    if not pred_dir.is_dir():
        raise MissingDirectoryError(f"missing predictions directory {pred_dir}")
    by_index = {}
    for path in pred_dir.iterdir():
        if path.suffix.lower() in (".png", ".bmp", ".jpg", ".jpeg"):
            by_index[_index_of(path)] = path
    roi = desc.roi()
    counts = None
    for frame_index, gt in enumerate(desc.ground_truth(), start=1):
        if not desc.is_evaluated(frame_index):
            continue
        pred_path = by_index.get(frame_index)
        if pred_path is None:
            raise MissingDirectoryError(
                f"no prediction for frame {frame_index} of {desc.category}/{desc.name}"
            )
        frame_counts = accumulate_confusion(read_mask_png(pred_path), gt, roi)
        counts = frame_counts if counts is None else counts + frame_counts
    if counts is None:
        raise EmptyInputError(f"{desc.category}/{desc.name} has no evaluated frames")
    return compute_metrics(counts, scope="video")


def cmd_eval(args) -> int:
    root = Path(args.dataset) if args.dataset else None
    if root is None:
        raise MissingDirectoryError(
            f"no dataset root given; pass --dataset or set {DATASET_ROOT_ENV}"
        )
    if not root.is_dir():
        raise MissingDirectoryError(f"dataset root {root} does not exist")
    pred_root = Path(args.pred)
    loader = load_cdnet_video if args.dataset_kind == "cdnet" else load_lasiesta_video

    videos = _discover_videos(root)

    def job(entry: tuple[str, str]):
        category, video = entry
        desc = loader(root, category, video)
        return category, video, _evaluate_video(desc, pred_root)

    with ThreadPoolExecutor(max_workers=args.workers) as pool:
        results = list(pool.map(job, videos))

    per_video: dict[str, dict[str, object]] = {}
    for category, video, report in results:
        per_video.setdefault(category, {})[video] = report
    tree = aggregate(per_video)

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_report_csv(tree, out, scope=args.scope)
    write_report_json(tree, out.with_suffix(".json"))
    save_metrics_figure(tree, out.with_suffix(".png"))
    print(f"evaluated {len(results)} videos; overall F-score {tree.overall.f1:.4f}")
    return 0


def cmd_rank(args) -> int:
    trees = {}
    for report_path in args.reports:
        path = Path(report_path)
        if not path.is_file():
            raise MissingDirectoryError(f"missing report {path}")
        trees[path.stem] = read_report_csv(path)
    table = rank_methods(trees)

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    ordered = sorted(table.methods, key=lambda m: (table.mean_rank[m], m))
    with open(out, "w", newline="") as handle:
        header = ["method", "R", "R_cat"] + [f"rank_{m}" for m in METRIC_FIELDS]
        handle.write(",".join(header) + "\n")
        for method in ordered:
            row = [
                method,
                f"{table.mean_rank[method]:.4f}",
                f"{table.mean_rank_categories[method]:.4f}",
            ]
            row += [f"{table.overall_ranks[m][method]:.4f}" for m in METRIC_FIELDS]
            handle.write(",".join(row) + "\n")
    save_ranking_figure(table, out.with_suffix(".png"))
    for method in ordered:
        print(
            f"{method}: R={table.mean_rank[method]:.2f} "
            f"R_cat={table.mean_rank_categories[method]:.2f}"
        )
    return 0


def _parse_resolutions(text: str) -> list[tuple[int, int]]:
    resolutions = []
    for part in text.split(","):
        token = part.strip().lower()
        try:
            w_text, h_text = token.split("x")
            resolutions.append((int(w_text), int(h_text)))
        except ValueError:
            raise argparse.ArgumentTypeError(
                f"resolution {part!r} is not of the form WIDTHxHEIGHT"
            ) from None
    return resolutions


def bench_once(
    cfg: AugmentationConfig, width: int, height: int, seconds: float
) -> tuple[int, float, dict[str, float]]:
    """Run augmentation on a synthetic triplet until the deadline.

    Returns samples completed, elapsed seconds, and per-stage seconds.
    """
    out_h = max(1, int(height * BENCH_CROP_RATIO))
    out_w = max(1, int(width * BENCH_CROP_RATIO))
    cfg = replace(cfg, out_height=out_h, out_width=out_w)
    triplet = synthetic_ramp_triplet(height, width, 4)
    seeds = np.random.SeedSequence(0)
    stage_totals = {name: 0.0 for name in STAGE_NAMES}
    count = 0
    start = time.perf_counter()
    deadline = start + seconds
    while time.perf_counter() < deadline:
        plan = sample_augmentation(cfg, seeds.spawn(1)[0], height, width)
        donor = triplet if plan.ioa else None
        _, timings = timed_apply_plan(triplet, donor, plan)
        for name, value in timings.items():
            stage_totals[name] += value
        count += 1
    return count, time.perf_counter() - start, stage_totals


def cmd_bench(args) -> int:
    cfg = load_config(args.config) if args.config else AugmentationConfig()
    results = []
    for width, height in args.resolution:
        count, elapsed, stages = bench_once(cfg, width, height, args.seconds)
        throughput = count / elapsed if elapsed > 0 and count > 0 else 0.0
        label = f"{width}x{height}"
        results.append((label, throughput, count, elapsed, stages))
        print(f"{label}: {count} triplets in {elapsed:.2f} s ({throughput:.1f}/s)")
        stage_sum = sum(stages.values())
        for name in STAGE_NAMES:
            share = stages[name] / stage_sum * 100.0 if stage_sum > 0 else 0.0
            print(f"  {name:<16} {stages[name]:.3f} s ({share:.1f}%)")
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        with open(out, "w", newline="") as handle:
            handle.write("resolution,triplets,seconds,throughput," + ",".join(STAGE_NAMES) + "\n")
            for label, throughput, count, elapsed, stages in results:
                row = [label, str(count), f"{elapsed:.4f}", f"{throughput:.4f}"]
                row += [f"{stages[name]:.4f}" for name in STAGE_NAMES]
                handle.write(",".join(row) + "\n")
        save_bench_figure([(label, tp) for label, tp, *_ in results], out.with_suffix(".png"))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bgskit",
        description="Spatio-temporal augmentation, background modeling and "
        "evaluation for background subtraction datasets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("split", help="write the 4-fold cross-validation manifest")
    p.add_argument("--out", required=True, help="manifest CSV path; fold lists go next to it")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("bgmodel", help="compute recent and empty background images")
    p.add_argument("--video", required=True, help="video directory (with or without input/)")
    p.add_argument("--window", type=int, default=100, help="recent-background window length")
    p.add_argument(
        "--strategy",
        choices=("median", "manual"),
        default="median",
        help="empty background: whole-video median or a designated frame",
    )
    p.add_argument("--manual-frame", type=int, default=0, help="frame id for --strategy manual")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_bgmodel)

    p = sub.add_parser("augment", help="write augmented triplets plus a plan log")
    p.add_argument("--config", help="key = value config file; defaults when omitted")
    p.add_argument("--seed", type=int, required=True, help="master seed")
    p.add_argument("--count", type=int, required=True, help="number of augmented samples")
    p.add_argument("--inputs", help="directory of input .bsvt triplets")
    p.add_argument("--donors", help="donor triplet directory (defaults to --inputs)")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--workers", type=int, default=1, help="parallel workers")
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("eval", help="score predictions against a dataset")
    p.add_argument("--pred", required=True, help="predictions root (category/video/*.png)")
    p.add_argument(
        "--dataset",
        default=os.environ.get(DATASET_ROOT_ENV),
        help=f"dataset root (defaults to ${DATASET_ROOT_ENV})",
    )
    p.add_argument(
        "--dataset-kind", choices=("cdnet", "lasiesta"), default="cdnet", help="layout/labels"
    )
    p.add_argument(
        "--scope",
        choices=("video", "category", "overall"),
        default="video",
        help="finest granularity to include in the CSV",
    )
    p.add_argument("--out", required=True, help="report CSV path (JSON and PNG go next to it)")
    p.add_argument("--workers", type=int, default=1, help="parallel workers")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("rank", help="rank methods from eval reports")
    p.add_argument("--reports", nargs="+", required=True, help="eval CSVs, one per method")
    p.add_argument("--out", required=True, help="ranking CSV path")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("bench", help="measure augmentation throughput")
    p.add_argument("--config", help="key = value config file; defaults when omitted")
    p.add_argument(
        "--resolution",
        type=_parse_resolutions,
        default=[(320, 240)],
        help="comma-separated WIDTHxHEIGHT list (default 320x240)",
    )
    p.add_argument("--seconds", type=float, default=2.0, help="measurement duration per resolution")
    p.add_argument("--out", help="optional CSV path (figure goes next to it)")
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ToolkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
