"""Grid search for the gradient order that maximizes the dataset-mean score J."""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from fracedge.detector import DetectorConfig, detect_edges
from fracedge.evaluation import DEFAULT_LEVELS, evaluate_image

log = logging.getLogger("fracedge")


@dataclass(frozen=True)
class OrderSweepResult:
    grid: tuple
    mean_j: tuple
    best_order: float
    per_image_j: tuple  # per order, one J per image (math.nan where skipped)
    curves: tuple = None  # optional: per order, per image PR point lists


def default_order_grid(lo=0.1, hi=2.0, step=0.1):
    """Orders lo, lo+step, ..., hi (inclusive), rounded to the step grid."""
    n = int(round((hi - lo) / step))
    grid = [round(lo + k * step, 10) for k in range(n + 1)]
    if not grid or grid[-1] > hi + 1e-9:
        raise ValueError(f"empty or inconsistent grid spec {lo}:{hi}:{step}")
    return grid


def sweep_orders(dataset, grid=None, config=None, levels=DEFAULT_LEVELS, tol=None,
                 jobs=1, names=None, keep_curves=False):
    """Evaluate every order in ``grid`` over ``dataset`` and pick the best.

    ``dataset`` is a sequence of (image, truth) pairs, where truth is a
    binary map or a list of annotator maps.  Per image and order, J comes
    from :func:`fracedge.evaluation.evaluate_image`; the order's score is
    the mean J over the dataset.  Images whose J is not finite are skipped
    with a warning.  Ties in the mean break toward the smaller order.
    """
    dataset = list(dataset)
    if not dataset:
        raise ValueError("empty dataset")
    if grid is None:
        grid = default_order_grid()
    grid = [float(v) for v in grid]
    if not grid:
        raise ValueError("empty order grid")
    if any(v <= 0 for v in grid):
        raise ValueError("all orders must be positive")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("order grid must be strictly increasing")
    config = config or DetectorConfig()
    if names is None:
        names = [f"image[{i}]" for i in range(len(dataset))]

    def eval_one(order, item):
        img, truth = item
        edges = detect_edges(img, replace(config, order=order))
        return evaluate_image(img, edges, truth, levels=levels, tol=tol)

    mean_j = []
    per_image = []
    all_curves = []
    for order in grid:
        if jobs > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                reports = list(pool.map(lambda it: eval_one(order, it), dataset))
        else:
            reports = [eval_one(order, item) for item in dataset]

        scores = []
        for name, report in zip(names, reports):
            if math.isfinite(report.j):
                scores.append(report.j)
            else:
                scores.append(math.nan)
                log.warning("order %.3g: skipping %s (non-finite J)", order, name)
        finite = [s for s in scores if math.isfinite(s)]
        # Reduction in ascending image order, independent of jobs.
        mean_j.append(float(np.mean(finite)) if finite else math.nan)
        per_image.append(tuple(scores))
        if keep_curves:
            all_curves.append(tuple(r.points for r in reports))

    best_order = None
    best_score = -math.inf
    for order, score in zip(grid, mean_j):
        if math.isfinite(score) and score > best_score:
            best_order = order
            best_score = score
    if best_order is None:
        raise RuntimeError("every image was skipped at every order")

    return OrderSweepResult(
        grid=tuple(grid),
        mean_j=tuple(mean_j),
        best_order=best_order,
        per_image_j=tuple(per_image),
        curves=tuple(all_curves) if keep_curves else None,
    )


def sweep_report(result):
    """CSV text of the order-vs-score table: columns order,mean_j."""
    lines = ["order,mean_j"]
    for order, score in zip(result.grid, result.mean_j):
        lines.append(f"{order!r},{score!r}")
    return "\n".join(lines) + "\n"


def sweep_to_dict(result):
    """JSON-ready mirror of an OrderSweepResult (curves omitted)."""
    return {
        "grid": list(result.grid),
        "mean_j": [s if math.isfinite(s) else None for s in result.mean_j],
        "best_order": result.best_order,
        "per_image_j": [
            [s if math.isfinite(s) else None for s in row] for row in result.per_image_j
        ],
    }
