import numpy as np
import pytest

from bgskit.datasets import GroundTruthMask, PixelLabel
from bgskit.errors import (
    DimensionMismatchError,
    EmptyInputError,
    MismatchedCategoriesError,
    NonPositiveSmoothingError,
)
from bgskit.metrics import (
    METRIC_FIELDS,
    ConfusionCounts,
    MetricsReport,
    accumulate_confusion,
    aggregate,
    compute_metrics,
    rank_methods,
    read_report_csv,
    relaxed_jaccard,
    threshold,
    write_report_csv,
    write_report_json,
    ReportTree,
)
from bgskit.model import ForegroundMask


def mask(array) -> ForegroundMask:
    return ForegroundMask(np.asarray(array, dtype=np.float32))


def gt(array) -> GroundTruthMask:
    return GroundTruthMask(np.asarray(array, dtype=np.uint8))


def full_roi(shape) -> ForegroundMask:
    return ForegroundMask(np.ones(shape, dtype=np.float32))


class TestRelaxedJaccard:
    def test_identical_binary_maps_score_one(self, rng):
        for _ in range(5):
            y = (rng.random((8, 8)) < 0.4).astype(np.float32)
            for t in (0.5, 1.0, 10.0):
                value, _ = relaxed_jaccard(mask(y), y.astype(np.float64), t)
                assert value == 1.0

    def test_empty_against_empty_scores_one(self):
        value, _ = relaxed_jaccard(mask(np.zeros((4, 4))), np.zeros((4, 4)), 1.0)
        assert value == 1.0

    def test_hand_case(self):
        value, _ = relaxed_jaccard(mask([[1.0, 0.0]]), np.array([[0.5, 0.5]]), 1.0)
        assert value == 0.6

    def test_gradient_matches_central_differences(self, rng):
        for smoothing in (1.0, 10.0):
            for _ in range(10):
                h, w = int(rng.integers(2, 32)), int(rng.integers(2, 32))
                y = (rng.random((h, w)) < 0.5).astype(np.float32)
                yhat = rng.uniform(0.05, 0.95, size=(h, w))
                _, grad = relaxed_jaccard(mask(y), yhat, smoothing)
                eps = 1e-6
                for _ in range(4):
                    i, j = int(rng.integers(h)), int(rng.integers(w))
                    up, down = yhat.copy(), yhat.copy()
                    up[i, j] += eps
                    down[i, j] -= eps
                    v_up, _ = relaxed_jaccard(mask(y), up, smoothing)
                    v_down, _ = relaxed_jaccard(mask(y), down, smoothing)
                    numeric = (v_up - v_down) / (2 * eps)
                    assert abs(grad[i, j] - numeric) <= 1e-5 * max(abs(numeric), 1e-12)

    def test_gradient_signs(self, rng):
        y = (rng.random((6, 6)) < 0.5).astype(np.float32)
        yhat = rng.uniform(0.1, 0.9, size=(6, 6))
        _, grad = relaxed_jaccard(mask(y), yhat, 1.0)
        assert np.all(grad[y == 1.0] > 0)
        assert np.all(grad[y == 0.0] < 0)

    def test_value_stays_in_half_open_unit_interval(self, rng):
        for _ in range(50):
            h, w = int(rng.integers(1, 20)), int(rng.integers(1, 20))
            y = (rng.random((h, w)) < 0.5).astype(np.float32)
            yhat = rng.uniform(0.0, 1.0, size=(h, w))
            value, _ = relaxed_jaccard(mask(y), yhat, float(rng.choice([0.1, 1.0, 10.0])))
            assert 0.0 < value <= 1.0

    def test_errors(self):
        with pytest.raises(NonPositiveSmoothingError):
            relaxed_jaccard(mask(np.zeros((2, 2))), np.zeros((2, 2)), 0.0)
        with pytest.raises(DimensionMismatchError):
            relaxed_jaccard(mask(np.zeros((2, 2))), np.zeros((2, 3)), 1.0)


class TestThreshold:
    def test_extremes(self):
        assert np.all(threshold(np.ones((3, 3)), 0.5).data == 1.0)
        assert np.all(threshold(np.zeros((3, 3)), 0.5).data == 0.0)

    def test_tie_maps_to_foreground(self):
        out = threshold(np.full((2, 2), 0.5), 0.5)
        assert np.all(out.data == 1.0)


class TestAccumulateConfusion:
    def test_perfect_prediction_has_no_errors(self, rng):
        truth = (rng.random((10, 10)) < 0.5).astype(np.uint8)  # fg=1, bg=0 codes
        counts = accumulate_confusion(mask(truth), gt(truth), full_roi((10, 10)))
        assert counts.fp == 0 and counts.fn == 0
        assert counts.tp == int(truth.sum())
        assert counts.total == 100

    def test_unknown_motion_is_ignored(self):
        labels = np.full((4, 4), int(PixelLabel.UNKNOWN_MOTION), dtype=np.uint8)
        counts = accumulate_confusion(mask(np.ones((4, 4))), gt(labels), full_roi((4, 4)))
        assert counts.total == 0

    def test_hard_shadow_counts_as_background(self):
        labels = np.full((2, 2), int(PixelLabel.HARD_SHADOW), dtype=np.uint8)
        counts = accumulate_confusion(mask(np.ones((2, 2))), gt(labels), full_roi((2, 2)))
        assert counts.fp == 4 and counts.tp == 0
        counts = accumulate_confusion(mask(np.zeros((2, 2))), gt(labels), full_roi((2, 2)))
        assert counts.tn == 4

    def test_out_of_roi_label_is_ignored(self):
        labels = np.zeros((2, 2), dtype=np.uint8)
        labels[0, 0] = int(PixelLabel.OUT_OF_ROI)
        counts = accumulate_confusion(mask(np.zeros((2, 2))), gt(labels), full_roi((2, 2)))
        assert counts.total == 3

    def test_spatial_roi_excludes_pixels(self):
        labels = np.ones((2, 2), dtype=np.uint8)
        roi = mask([[1.0, 0.0], [0.0, 0.0]])
        counts = accumulate_confusion(mask(np.ones((2, 2))), gt(labels), roi)
        assert counts.tp == 1 and counts.total == 1

    def test_additive_over_frames(self, rng):
        frames = []
        for _ in range(4):
            pred = (rng.random((6, 6)) < 0.5).astype(np.float32)
            labels = rng.integers(0, 2, size=(6, 6)).astype(np.uint8)
            frames.append((mask(pred), gt(labels)))
        total = ConfusionCounts()
        for pred, labels in frames:
            total = total + accumulate_confusion(pred, labels, full_roi((6, 6)))
        stacked_pred = np.concatenate([p.data for p, _ in frames], axis=0)
        stacked_gt = np.concatenate([g.data for _, g in frames], axis=0)
        pooled = accumulate_confusion(mask(stacked_pred), gt(stacked_gt), full_roi(stacked_pred.shape))
        assert total == pooled

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            accumulate_confusion(mask(np.zeros((2, 2))), gt(np.zeros((2, 3))), full_roi((2, 2)))


class TestComputeMetrics:
    def test_reference_counts(self):
        report = compute_metrics(ConfusionCounts(tp=50, fp=10, fn=10, tn=930))
        assert abs(report.re - 0.8333333333333334) < 1e-12
        assert report.re == report.pr == report.f1
        assert report.pwc == 2.0
        assert not report.degenerate

    def test_perfect_prediction(self):
        report = compute_metrics(ConfusionCounts(tp=40, fp=0, fn=0, tn=60))
        assert report.re == report.sp == report.pr == report.f1 == 1.0
        assert report.fpr == report.fnr == report.pwc == 0.0

    def test_all_background_prediction_is_degenerate_zero(self):
        report = compute_metrics(ConfusionCounts(tp=0, fp=0, fn=25, tn=75))
        assert report.re == 0.0 and report.f1 == 0.0
        assert report.degenerate

    def test_zero_counts_flagged(self):
        report = compute_metrics(ConfusionCounts())
        assert report.degenerate
        assert report.re == report.sp == report.pr == report.f1 == 0.0

    def test_complement_identities_hold_exactly(self, rng):
        for _ in range(1000):
            tp, fp, fn, tn = (int(v) for v in rng.integers(0, 5000, size=4))
            report = compute_metrics(ConfusionCounts(tp, fp, fn, tn))
            assert report.re + report.fnr == 1.0
            assert report.sp + report.fpr == 1.0

    def test_negative_counts_rejected(self):
        with pytest.raises(ValueError):
            ConfusionCounts(tp=-1)


def video_report(f1_target: float) -> MetricsReport:
    # tp/(tp+fn) tuned so that re = pr = f1 = f1_target
    tp = int(round(f1_target * 1000))
    return compute_metrics(ConfusionCounts(tp=tp, fp=1000 - tp, fn=1000 - tp, tn=8000))


class TestAggregate:
    def test_single_video_category_equals_video(self):
        report = video_report(0.8)
        tree = aggregate({"catA": {"vid1": report}})
        assert tree.categories["catA"].f1 == report.f1
        assert tree.overall.f1 == report.f1
        assert tree.overall.scope == "overall"

    def test_category_mean_of_two_videos(self):
        tree = aggregate({"catA": {"v1": video_report(0.8), "v2": video_report(0.6)}})
        assert abs(tree.categories["catA"].f1 - 0.7) < 1e-12

    def test_overall_is_mean_of_categories(self):
        per_video = {
            "catA": {"v1": video_report(0.9)},
            "catB": {"v1": video_report(0.5), "v2": video_report(0.7)},
        }
        tree = aggregate(per_video)
        assert abs(tree.overall.f1 - (0.9 + 0.6) / 2) < 1e-12
        assert tree.overall.counts.tp == sum(
            r.counts.tp for vids in per_video.values() for r in vids.values()
        )

    def test_eleven_category_structure(self):
        per_video = {f"cat{i:02d}": {"v": video_report(0.5 + 0.04 * i)} for i in range(11)}
        tree = aggregate(per_video)
        expected = sum(0.5 + 0.04 * i for i in range(11)) / 11
        assert abs(tree.overall.f1 - expected) < 1e-12

    def test_empty_input_rejected(self):
        with pytest.raises(EmptyInputError):
            aggregate({})


def tree_from_values(values: dict[str, dict[str, float]]) -> ReportTree:
    """Build a report tree with prescribed per-category metric values."""
    def report(vals: dict[str, float], scope: str) -> MetricsReport:
        return MetricsReport(
            counts=ConfusionCounts(1, 1, 1, 1),
            re=vals.get("re", 0.5),
            sp=vals.get("sp", 0.5),
            fpr=vals.get("fpr", 0.5),
            fnr=vals.get("fnr", 0.5),
            pwc=vals.get("pwc", 1.0),
            pr=vals.get("pr", 0.5),
            f1=vals.get("f1", 0.5),
            scope=scope,
        )

    categories = {cat: report(vals, "category") for cat, vals in values.items()}
    overall_vals = {
        m: sum(vals.get(m, 0.5) for vals in values.values()) / len(values)
        for m in METRIC_FIELDS
    }
    return ReportTree(videos={}, categories=categories, overall=report(overall_vals, "overall"))


def brute_force_ranks(scores: list[float], higher_better: bool) -> list[float]:
    ranks = []
    for score in scores:
        if higher_better:
            better = sum(1 for other in scores if other > score)
        else:
            better = sum(1 for other in scores if other < score)
        ties = sum(1 for other in scores if other == score)
        ranks.append(better + (ties + 1) / 2)
    return ranks


class TestRankMethods:
    def test_single_method_rank_one(self):
        tree = tree_from_values({"catA": {"f1": 0.8}})
        table = rank_methods({"only": tree})
        assert table.mean_rank["only"] == 1.0
        assert table.mean_rank_categories["only"] == 1.0

    def test_dominating_method_ranks_first(self):
        better = tree_from_values(
            {"catA": {"re": 0.9, "sp": 0.9, "fpr": 0.1, "fnr": 0.1, "pwc": 1.0, "pr": 0.9, "f1": 0.9}}
        )
        worse = tree_from_values(
            {"catA": {"re": 0.5, "sp": 0.5, "fpr": 0.5, "fnr": 0.5, "pwc": 9.0, "pr": 0.5, "f1": 0.5}}
        )
        table = rank_methods({"better": better, "worse": worse})
        assert table.mean_rank["better"] == 1.0
        assert table.mean_rank["worse"] == 2.0
        assert table.mean_rank_categories["better"] == 1.0

    def test_ties_match_brute_force_oracle(self, rng):
        methods = {}
        scores = {}
        for name in ("m1", "m2", "m3"):
            values = {
                m: float(rng.choice([0.3, 0.5, 0.5, 0.8])) for m in METRIC_FIELDS
            }
            methods[name] = tree_from_values({"catA": values})
            scores[name] = values
        table = rank_methods(methods)
        names = list(methods)
        for metric in METRIC_FIELDS:
            column = [methods[n].overall.values()[metric] for n in names]
            expected = brute_force_ranks(column, metric in ("re", "sp", "pr", "f1"))
            for n, rank in zip(names, expected):
                assert table.overall_ranks[metric][n] == rank

    def test_rank_invariant_under_monotone_rescale(self):
        base = {
            "m1": tree_from_values({"catA": {"f1": 0.9, "re": 0.4}}),
            "m2": tree_from_values({"catA": {"f1": 0.7, "re": 0.6}}),
        }
        rescaled = {
            name: tree_from_values(
                {"catA": {"f1": tree.categories["catA"].f1 ** 3, "re": tree.categories["catA"].re}}
            )
            for name, tree in base.items()
        }
        assert rank_methods(base).mean_rank == rank_methods(rescaled).mean_rank

    def test_mismatched_categories_rejected(self):
        a = tree_from_values({"catA": {"f1": 0.9}})
        b = tree_from_values({"catB": {"f1": 0.7}})
        with pytest.raises(MismatchedCategoriesError):
            rank_methods({"a": a, "b": b})

    def test_no_methods_rejected(self):
        with pytest.raises(EmptyInputError):
            rank_methods({})


class TestReportSerialization:
    def build_tree(self) -> ReportTree:
        return aggregate(
            {
                "catA": {"v1": video_report(0.8), "v2": video_report(0.6)},
                "catB": {"v3": video_report(0.9)},
            }
        )

    def test_csv_round_trip(self, tmp_path):
        tree = self.build_tree()
        path = tmp_path / "report.csv"
        write_report_csv(tree, path)
        loaded = read_report_csv(path)
        assert set(loaded.categories) == {"catA", "catB"}
        assert abs(loaded.overall.f1 - tree.overall.f1) < 1e-6
        assert loaded.videos["catA"]["v1"].counts == tree.videos["catA"]["v1"].counts

    def test_csv_bytes_are_stable(self, tmp_path):
        tree = self.build_tree()
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        write_report_csv(tree, a)
        write_report_csv(tree, b)
        assert a.read_bytes() == b.read_bytes()

    def test_scope_filters_rows(self, tmp_path):
        tree = self.build_tree()
        path = tmp_path / "overall.csv"
        write_report_csv(tree, path, scope="overall")
        lines = path.read_text().strip().splitlines()
        assert len(lines) == 2  # header + overall
        write_report_csv(tree, path, scope="category")
        lines = path.read_text().strip().splitlines()
        assert len(lines) == 4

    def test_json_written(self, tmp_path):
        import json

        tree = self.build_tree()
        path = tmp_path / "report.json"
        write_report_json(tree, path)
        payload = json.loads(path.read_text())
        assert payload["overall"]["f1"] == round(tree.overall.f1, 10)
        assert "catA" in payload["videos"]
