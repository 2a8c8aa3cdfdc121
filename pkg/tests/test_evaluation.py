import math

import numpy as np
import pytest

from fracedge import evaluation
from fracedge.detector import DetectorConfig, detect_edges
from fracedge.evaluation import (
    MatchResult,
    PrPoint,
    detection_error,
    evaluate_image,
    f_measure,
    match_boundaries,
    mse,
    pr_curve,
    psnr,
    score_j,
    summarize_sweep,
)
from fracedge.synthetic import noisy_corpus
from oracles import allpairs_match_counts, elementwise_mse


class TestMse:
    def test_identical_images(self):
        img = np.arange(6.0).reshape(2, 3)
        assert mse(img, img) == 0.0

    def test_direct_arithmetic(self):
        assert mse(np.array([[0.0, 0.0]]), np.array([[3.0, 4.0]])) == 12.5

    def test_matches_elementwise_oracle(self, rng):
        a, b = rng.random((8, 8)) * 255, rng.random((8, 8)) * 255
        assert abs(mse(a, b) - elementwise_mse(a, b)) < 1e-9

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            mse(np.zeros((2, 2)), np.zeros((2, 3)))


class TestPsnr:
    def test_one_gray_level_apart(self):
        value = psnr(np.full((4, 4), 255.0), np.full((4, 4), 254.0))
        assert abs(value - 48.1308) < 1e-3

    def test_identical_images_signal_infinite(self):
        assert math.isinf(psnr(np.zeros((2, 2)), np.zeros((2, 2))))

    def test_zero_db_at_peak_squared_mse(self):
        assert psnr(np.full((3, 3), 0.0), np.full((3, 3), 255.0)) == 0.0

    def test_strictly_decreasing_with_noise_variance(self):
        rng = np.random.default_rng(7)
        img = np.full((64, 64), 128.0)
        values = [psnr(img, img + rng.normal(0, s, img.shape)) for s in (5.0, 15.0, 40.0)]
        assert values[0] > values[1] > values[2]


class TestMatchBoundaries:
    def test_exact_match_tol_zero(self, rng):
        truth = (rng.random((9, 9)) < 0.2).astype(np.uint8)
        m = match_boundaries(truth, truth, tol=0.0)
        assert (m.tp, m.fp, m.fn) == (int(truth.sum()), 0, 0)

    def test_empty_prediction(self):
        truth = np.zeros((5, 5), np.uint8)
        truth[2, 1:4] = 1
        m = match_boundaries(np.zeros((5, 5), np.uint8), truth, tol=2.0)
        assert (m.tp, m.fp, m.fn) == (0, 0, 3)

    def test_empty_truth(self):
        pred = np.zeros((5, 5), np.uint8)
        pred[1, 1] = 1
        m = match_boundaries(pred, np.zeros((5, 5), np.uint8), tol=2.0)
        assert (m.tp, m.fp, m.fn, m.truth_count) == (0, 1, 0, 0)

    def test_shifted_line_within_tolerance(self):
        truth = np.zeros((5, 5), np.uint8)
        truth[:, 2] = 1
        pred = np.zeros((5, 5), np.uint8)
        pred[:, 3] = 1  # one pixel to the right
        m = match_boundaries(pred, truth, tol=1.5)
        assert m.fp == 0 and m.fn == 0 and m.tp == 5

    def test_tol_zero_is_set_intersection(self, rng):
        pred = (rng.random((10, 10)) < 0.3).astype(np.uint8)
        truth = (rng.random((10, 10)) < 0.3).astype(np.uint8)
        m = match_boundaries(pred, truth, tol=0.0)
        inter = int((pred & truth).sum())
        assert m.tp == inter
        assert m.fp == int(pred.sum()) - inter
        assert m.fn == int(truth.sum()) - inter

    def test_matches_allpairs_oracle(self, rng):
        for tol in (0.0, 1.0, 1.5, 3.0):
            pred = (rng.random((8, 8)) < 0.25).astype(np.uint8)
            truth = (rng.random((8, 8)) < 0.25).astype(np.uint8)
            m = match_boundaries(pred, truth, tol=tol)
            tp, fp, fn, total = allpairs_match_counts(pred, truth, tol)
            assert (m.tp, m.fp, m.fn, m.truth_count) == (tp, fp, fn, total)

    def test_multiple_annotators_any_match_and_pooled_recall(self):
        t1 = np.zeros((1, 7), np.uint8)
        t1[0, 2] = 1
        t2 = np.zeros((1, 7), np.uint8)
        t2[0, 5] = 1
        pred = np.zeros((1, 7), np.uint8)
        pred[0, 2] = 1
        m = match_boundaries(pred, [t1, t2], tol=0.0)
        assert (m.tp, m.fp, m.fn, m.truth_count) == (1, 0, 1, 2)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            match_boundaries(np.zeros((2, 2)), np.zeros((3, 3)), tol=1.0)

    def test_negative_tolerance(self):
        with pytest.raises(ValueError):
            match_boundaries(np.zeros((2, 2)), np.zeros((2, 2)), tol=-1.0)


class TestDetectionError:
    def test_product_definition(self):
        # Pm = 0.1, Pf = 0.2 by construction
        m = MatchResult(tp=8, fp=2, fn=1, truth_count=10)
        pm, pf, de = detection_error(m)
        assert (pm, pf) == (0.1, 0.2)
        assert abs(de - 0.02) < 1e-15

    def test_perfect_detection_clamps_to_floor(self):
        m = MatchResult(tp=5, fp=0, fn=0, truth_count=5)
        _, _, de = detection_error(m)
        assert de == evaluation.DE_FLOOR

    def test_direct_ratios(self):
        m = MatchResult(tp=6, fp=2, fn=5, truth_count=10)
        pm, pf, de = detection_error(m)
        assert (pm, pf, de) == (0.5, 0.25, 0.125)

    def test_empty_counts_use_unit_denominators(self):
        pm, pf, de = detection_error(MatchResult(tp=0, fp=0, fn=0, truth_count=0))
        assert (pm, pf, de) == (0.0, 0.0, evaluation.DE_FLOOR)


class TestScoreJ:
    def test_division(self):
        assert score_j(30.0, 0.1) == 300.0

    def test_zero_psnr(self):
        assert score_j(0.0, 0.5) == 0.0

    def test_floor_de_case(self):
        assert abs(score_j(48.13, 1e-6) - 4.813e7) < 1e1

    def test_monotone_in_both_arguments(self):
        assert score_j(31.0, 0.1) > score_j(30.0, 0.1)
        assert score_j(30.0, 0.05) > score_j(30.0, 0.1)

    def test_rejects_nonpositive_de(self):
        with pytest.raises(ValueError):
            score_j(30.0, 0.0)


class TestPrCurve:
    def test_perfect_detector(self):
        truth = np.zeros((8, 8), np.uint8)
        truth[3, 2:6] = 1
        points = pr_curve(truth.astype(np.float64), truth, levels=9, tol=0.0)
        for p in points:
            assert p.precision == 1.0 and p.recall == 1.0 and p.f_measure == 1.0

    def test_all_zero_map_has_zero_recall(self):
        truth = np.zeros((6, 6), np.uint8)
        truth[2, 2] = 1
        points = pr_curve(np.zeros((6, 6)), truth, levels=5, tol=1.0)
        assert all(p.recall == 0.0 for p in points)
        assert all(p.precision == 1.0 for p in points)  # no predictions convention

    def test_matches_brute_force_enumeration(self, rng):
        edges = np.round(rng.random((8, 8)), 1)
        truth = (rng.random((8, 8)) < 0.2).astype(np.uint8)
        levels, tol = 10, 1.2
        points = pr_curve(edges, truth, levels=levels, tol=tol)
        assert len(points) == levels
        for i, p in enumerate(points):
            t = i / levels
            assert p.threshold == t
            tp, fp, fn, _ = allpairs_match_counts(edges > t, truth, tol)
            precision = tp / (tp + fp) if tp + fp else 1.0
            recall = tp / (tp + fn) if tp + fn else 1.0
            assert (p.tp, p.fp, p.fn) == (tp, fp, fn)
            assert p.precision == precision and p.recall == recall
            assert p.f_measure == f_measure(precision, recall)

    def test_recall_antitone_in_threshold(self, rng):
        edges = rng.random((12, 12))
        truth = (rng.random((12, 12)) < 0.2).astype(np.uint8)
        points = pr_curve(edges, truth, levels=8, tol=1.5)
        recalls = [p.recall for p in points]
        assert all(a >= b - 1e-12 for a, b in zip(recalls, recalls[1:]))

    def test_values_in_unit_interval(self, rng):
        edges = rng.random((10, 10))
        truth = (rng.random((10, 10)) < 0.3).astype(np.uint8)
        for p in pr_curve(edges, truth, levels=6, tol=1.0):
            assert 0.0 <= p.precision <= 1.0
            assert 0.0 <= p.recall <= 1.0
            assert 0.0 <= p.f_measure <= 1.0

    def test_rejects_tiny_level_count(self):
        with pytest.raises(ValueError):
            pr_curve(np.zeros((4, 4)), np.zeros((4, 4), np.uint8), levels=1)


class TestSummarizeSweep:
    def _perfect_curve(self, levels=5):
        truth = np.zeros((8, 8), np.uint8)
        truth[4, 1:7] = 1
        return pr_curve(truth.astype(np.float64), truth, levels=levels, tol=0.0)

    def test_perfect_detector_summary(self):
        summary = summarize_sweep([self._perfect_curve()])
        assert summary.ods == 1.0 and summary.ois == 1.0 and summary.ap == 1.0

    def test_identical_images_keep_single_image_ods(self):
        curve = self._perfect_curve()
        summary = summarize_sweep([curve, curve])
        assert summary.ods == max(p.f_measure for p in curve)

    def test_mismatched_grids_rejected(self):
        with pytest.raises(ValueError):
            summarize_sweep([self._perfect_curve(levels=5), self._perfect_curve(levels=7)])

    def test_ods_at_most_ois_on_detector_output(self):
        corpus = noisy_corpus(count=5, size=48, noise_sigma=15.0, seed=5)
        curves = []
        for img, truth in corpus:
            edges = detect_edges(img, DetectorConfig(order=0.8, sigma=1.5))
            curves.append(pr_curve(edges, truth, levels=17, tol=2.0))
        summary = summarize_sweep(curves)
        assert summary.ods <= summary.ois + 1e-12
        assert 0.0 <= summary.ods <= 1.0
        assert 0.0 <= summary.ois <= 1.0
        assert 0.0 <= summary.ap <= 1.0
        assert len(summary.per_image_best) == len(corpus)

    def test_aggregate_counts_are_sums(self):
        a = [PrPoint(0.0, 1.0, 1.0, 1.0, tp=3, fp=0, fn=0),
             PrPoint(0.5, 1.0, 0.5, 2 / 3, tp=2, fp=0, fn=2)]
        b = [PrPoint(0.0, 0.5, 1.0, 2 / 3, tp=3, fp=3, fn=0),
             PrPoint(0.5, 1.0, 1.0, 1.0, tp=3, fp=0, fn=0)]
        summary = summarize_sweep([a, b])
        p0 = summary.points[0]
        assert (p0.tp, p0.fp, p0.fn) == (6, 3, 0)
        # OIS: image a best at t=0 (3,0,0), image b best at t=0.5 (3,0,0)
        assert summary.ois == 1.0


class TestEvaluateImage:
    def test_perfect_step_detection(self):
        img = np.zeros((16, 16))
        img[:, 8:] = 255.0
        edges = detect_edges(img, DetectorConfig(order=1.0, sigma=1.0))
        truth = np.zeros((16, 16), np.uint8)
        truth[:, 8] = 1
        report = evaluate_image(img, edges, truth, levels=9, tol=0.0)
        assert report.pm == 0.0 and report.pf == 0.0
        assert report.de == evaluation.DE_FLOOR
        assert math.isfinite(report.j) and report.j > 0
        assert max(p.recall for p in report.points) == 1.0

    def test_report_dict_schema(self, rng):
        img = rng.random((10, 10)) * 255
        edges = detect_edges(img, DetectorConfig())
        truth = (rng.random((10, 10)) < 0.2).astype(np.uint8)
        report = evaluate_image(img, edges, truth, levels=5, tol=1.5)
        d = report.to_dict(order=0.6, sigma=2.0)
        assert set(d) == {"order", "sigma", "psnr_db", "pm", "pf", "de", "j", "pr"}
        assert len(d["pr"]) == 5
        assert set(d["pr"][0]) == {"t", "p", "r", "f"}


class TestCsv:
    def test_round_trip_precision(self):
        points = [PrPoint(1 / 3, 0.1234567890123, 0.9876543210987, 0.5, 1, 2, 3)]
        text = evaluation.pr_points_csv(points)
        lines = text.strip().splitlines()
        assert lines[0] == "threshold,precision,recall,f"
        t, p, r, f = (float(tok) for tok in lines[1].split(","))
        assert abs(t - 1 / 3) < 1e-9 and p == 0.1234567890123 and r == 0.9876543210987


class TestDefaultTolerance:
    def test_diagonal_fraction(self):
        tol = evaluation.default_match_tolerance((321, 481))
        assert abs(tol - 0.0075 * math.hypot(321, 481)) < 1e-12
        assert abs(tol - 4.336) < 5e-3
