"""Detection-quality evaluation: PSNR, detection error, PR curves, summaries.

Boundary matching uses distance-transform tolerance matching: a predicted
pixel counts as a true positive when it lies within ``tol`` pixels of any
ground-truth pixel, and a ground-truth pixel is covered when a prediction
lies within ``tol`` of it.  Each side is matched independently (no
bipartite assignment), which is deterministic and linear in image size.
With several annotator maps a prediction may match any of them, while
recall pools the per-annotator ground-truth pixels.

The scalar score for order selection is J = PSNR / DE, where PSNR compares
the original image against the edge-strength map rescaled to [0, 255] and
DE averages the product of the missed-detection and false-positive
probabilities over the threshold levels of the PR sweep.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import distance_transform_edt

from fracedge.detector import threshold_map
from fracedge.image import as_image

#: DE is clamped to this floor when it would be exactly zero, so J stays finite.
DE_FLOOR = 1e-6

#: Match tolerance as a fraction of the image diagonal (about 4.3 px at 321x481).
TOLERANCE_DIAGONAL_FRACTION = 0.0075

#: Default number of threshold levels in a PR sweep.
DEFAULT_LEVELS = 33


@dataclass(frozen=True)
class MatchResult:
    """Tolerance-matched boundary counts.

    ``tp``/``fp`` partition the predicted pixels; ``fn`` counts ground-truth
    pixels (pooled over annotators) not covered by any prediction.
    """

    tp: int
    fp: int
    fn: int
    truth_count: int

    @property
    def pred_count(self):
        return self.tp + self.fp


@dataclass(frozen=True)
class PrPoint:
    """One operating point of a PR sweep, with the raw counts kept for
    dataset-level aggregation."""

    threshold: float
    precision: float
    recall: float
    f_measure: float
    tp: int = 0
    fp: int = 0
    fn: int = 0


@dataclass(frozen=True)
class SweepSummary:
    """Dataset-level summary of per-image PR curves."""

    ods: float
    ois: float
    ap: float
    points: tuple  # dataset-aggregated PrPoints, one per threshold
    per_image_best: tuple  # (best threshold, best F) per image


@dataclass(frozen=True)
class ImageEvalReport:
    """Full evaluation of one edge map against ground truth."""

    psnr_db: float
    pm: float
    pf: float
    de: float
    j: float
    best_threshold: float
    points: tuple

    def to_dict(self, order=None, sigma=None):
        return {
            "order": order,
            "sigma": sigma,
            "psnr_db": self.psnr_db,
            "pm": self.pm,
            "pf": self.pf,
            "de": self.de,
            "j": self.j,
            "pr": [
                {"t": p.threshold, "p": p.precision, "r": p.recall, "f": p.f_measure}
                for p in self.points
            ],
        }


def mse(reference, processed):
    """Mean squared error between two equal-size images."""
    reference = np.asarray(reference, dtype=np.float64)
    processed = np.asarray(processed, dtype=np.float64)
    if reference.shape != processed.shape:
        raise ValueError(f"shape mismatch {reference.shape} vs {processed.shape}")
    diff = processed - reference
    return float(np.mean(diff * diff))


def psnr(reference, processed, peak=255.0):
    """Peak signal-to-noise ratio 10 log10(peak^2 / MSE) in dB.

    Identical images have zero MSE; that case returns math.inf as the
    distinguished infinite-PSNR signal.
    """
    err = mse(reference, processed)
    if err == 0.0:
        return math.inf
    return 10.0 * math.log10(peak * peak / err)


def default_match_tolerance(shape):
    """Match tolerance in pixels: a fixed fraction of the image diagonal."""
    h, w = shape
    return TOLERANCE_DIAGONAL_FRACTION * math.hypot(h, w)


def _distance_to(mask):
    """Euclidean distance from every pixel to the nearest set pixel.

    An empty mask yields +inf everywhere (scipy's EDT is undefined there).
    """
    mask = np.asarray(mask) > 0
    if not mask.any():
        return np.full(mask.shape, np.inf)
    return distance_transform_edt(~mask)


def _as_truth_list(truth):
    if isinstance(truth, (list, tuple)):
        truths = [np.asarray(t) > 0 for t in truth]
    else:
        truths = [np.asarray(truth) > 0]
    if not truths:
        raise ValueError("need at least one ground-truth map")
    return truths


def match_boundaries(predicted, truth, tol):
    """Tolerance-match a predicted boundary map against ground truth.

    ``truth`` may be a single binary map or a sequence of annotator maps;
    see the module docstring for the multi-annotator convention.
    """
    if tol < 0:
        raise ValueError(f"tolerance must be >= 0, got {tol}")
    pred = np.asarray(predicted) > 0
    truths = _as_truth_list(truth)
    for t in truths:
        if t.shape != pred.shape:
            raise ValueError(f"shape mismatch {t.shape} vs {pred.shape}")

    union = np.logical_or.reduce(truths)
    tp = int((pred & (_distance_to(union) <= tol)).sum())
    fp = int(pred.sum()) - tp

    dist_to_pred = _distance_to(pred)
    fn = 0
    truth_count = 0
    for t in truths:
        n = int(t.sum())
        covered = int((t & (dist_to_pred <= tol)).sum())
        fn += n - covered
        truth_count += n
    return MatchResult(tp=tp, fp=fp, fn=fn, truth_count=truth_count)


def detection_error(m):
    """Missed and false detection probabilities and their product DE.

    Pm = FN / truth count, Pf = FP / predicted count (each denominator
    floored at 1), DE = Pm * Pf clamped to DE_FLOOR when it would be zero.
    """
    pm = m.fn / max(1, m.truth_count)
    pf = m.fp / max(1, m.pred_count)
    de = pm * pf
    if de == 0.0:
        de = DE_FLOOR
    return pm, pf, de


def score_j(psnr_db, de):
    """Order-selection score J = PSNR / DE (maximize)."""
    if de <= 0:
        raise ValueError(f"DE must be positive, got {de}")
    return psnr_db / de


def f_measure(precision, recall):
    """Harmonic mean of precision and recall; 0 when both vanish."""
    if precision + recall == 0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def _match_to_point(threshold, m):
    precision = m.tp / m.pred_count if m.pred_count > 0 else 1.0
    recall = m.tp / (m.tp + m.fn) if (m.tp + m.fn) > 0 else 1.0
    return PrPoint(
        threshold=threshold,
        precision=precision,
        recall=recall,
        f_measure=f_measure(precision, recall),
        tp=m.tp,
        fp=m.fp,
        fn=m.fn,
    )


def _threshold_grid(levels):
    if levels < 2:
        raise ValueError(f"need at least 2 threshold levels, got {levels}")
    return [i / levels for i in range(levels)]


def _curve_matches(edges, truths, levels, tol):
    """MatchResults for the full threshold grid i/levels, i = 0..levels-1."""
    thresholds = _threshold_grid(levels)
    union = np.logical_or.reduce(truths)
    dist_to_truth = _distance_to(union)
    counts = [int(t.sum()) for t in truths]
    total_truth = sum(counts)

    out = []
    for t in thresholds:
        pred = threshold_map(edges, t) > 0
        npred = int(pred.sum())
        tp = int((pred & (dist_to_truth <= tol)).sum())
        dist_to_pred = _distance_to(pred)
        fn = 0
        for tm, n in zip(truths, counts):
            covered = int((tm & (dist_to_pred <= tol)).sum())
            fn += n - covered
        out.append((t, MatchResult(tp=tp, fp=npred - tp, fn=fn, truth_count=total_truth)))
    return out


def pr_curve(edges, truth, levels=DEFAULT_LEVELS, tol=None):
    """Precision-recall points at thresholds i/levels for i = 0..levels-1."""
    edges = np.asarray(edges, dtype=np.float64)
    truths = _as_truth_list(truth)
    if tol is None:
        tol = default_match_tolerance(edges.shape)
    return [_match_to_point(t, m) for t, m in _curve_matches(edges, truths, levels, tol)]


def evaluate_image(img, edges, truth, levels=DEFAULT_LEVELS, tol=None):
    """Evaluate one edge map: PR curve plus PSNR, DE, and J.

    PSNR compares the original image against the strength map rescaled to
    [0, 255].  The scalar detection error averages the per-threshold
    products Pm(t)*Pf(t) over the same threshold grid as the PR sweep
    (clamped to DE_FLOOR when the average would be zero), so no operating
    point has to be chosen; the reported ``pm`` and ``pf`` are likewise
    threshold averages, which means ``de`` is the mean product rather than
    ``pm * pf``.
    """
    img = as_image(img)
    edges = np.asarray(edges, dtype=np.float64)
    truths = _as_truth_list(truth)
    if tol is None:
        tol = default_match_tolerance(edges.shape)

    matches = _curve_matches(edges, truths, levels, tol)
    points = tuple(_match_to_point(t, m) for t, m in matches)
    best = max(range(len(points)), key=lambda i: (points[i].f_measure, -i))
    per_threshold = [detection_error(m) for _, m in matches]
    pm = float(np.mean([e[0] for e in per_threshold]))
    pf = float(np.mean([e[1] for e in per_threshold]))
    de = float(np.mean([e[0] * e[1] for e in per_threshold]))
    if de == 0.0:
        de = DE_FLOOR
    psnr_db = psnr(img, edges * 255.0)
    return ImageEvalReport(
        psnr_db=psnr_db,
        pm=pm,
        pf=pf,
        de=de,
        j=score_j(psnr_db, de),
        best_threshold=points[best].threshold,
        points=points,
    )


def _aggregate_f(tp, fp, fn):
    precision = tp / (tp + fp) if (tp + fp) > 0 else 1.0
    recall = tp / (tp + fn) if (tp + fn) > 0 else 1.0
    return precision, recall, f_measure(precision, recall)


def summarize_sweep(per_image_curves):
    """Aggregate per-image PR curves into ODS, OIS, and AP.

    ODS: best F over thresholds, computed from dataset-pooled counts.
    OIS: each image contributes its counts at its own best-F threshold;
    the pooled counts give the F (the usual boundary-benchmark convention).
    AP: trapezoidal area under the pooled PR curve sorted by recall,
    anchored at recall 0 with the lowest-recall precision.
    """
    curves = [list(c) for c in per_image_curves]
    if not curves or any(not c for c in curves):
        raise ValueError("need at least one non-empty PR curve per image")
    thresholds = [p.threshold for p in curves[0]]
    for c in curves[1:]:
        if [p.threshold for p in c] != thresholds:
            raise ValueError("per-image curves must share one threshold grid")

    aggregated = []
    for i, t in enumerate(thresholds):
        tp = sum(c[i].tp for c in curves)
        fp = sum(c[i].fp for c in curves)
        fn = sum(c[i].fn for c in curves)
        precision, recall, f = _aggregate_f(tp, fp, fn)
        aggregated.append(
            PrPoint(threshold=t, precision=precision, recall=recall, f_measure=f,
                    tp=tp, fp=fp, fn=fn)
        )
    ods = max(p.f_measure for p in aggregated)

    per_image_best = []
    tp = fp = fn = 0
    for c in curves:
        best = max(range(len(c)), key=lambda i: (c[i].f_measure, -i))
        per_image_best.append((c[best].threshold, c[best].f_measure))
        tp += c[best].tp
        fp += c[best].fp
        fn += c[best].fn
    _, _, ois = _aggregate_f(tp, fp, fn)

    ap = _average_precision(aggregated)
    return SweepSummary(
        ods=ods,
        ois=ois,
        ap=ap,
        points=tuple(aggregated),
        per_image_best=tuple(per_image_best),
    )


def _average_precision(points):
    """Trapezoid over recall of the curve sorted by recall, anchored at 0."""
    curve = sorted(((p.recall, p.precision) for p in points), key=lambda rp: (rp[0], -rp[1]))
    if curve[0][0] > 0.0:
        curve.insert(0, (0.0, curve[0][1]))
    area = 0.0
    for (r0, p0), (r1, p1) in zip(curve, curve[1:]):
        area += (r1 - r0) * (p0 + p1) / 2.0
    return area


def pr_points_csv(points):
    """CSV text for PR points: columns threshold,precision,recall,f."""
    lines = ["threshold,precision,recall,f"]
    for p in points:
        lines.append(f"{p.threshold!r},{p.precision!r},{p.recall!r},{p.f_measure!r}")
    return "\n".join(lines) + "\n"
