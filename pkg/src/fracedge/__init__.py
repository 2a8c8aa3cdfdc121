"""Fractional-order derivative-of-Gaussian edge detection and benchmarking.

The pipeline smooths an image with a Gaussian, applies truncated
fractional-order backward differences along each axis, combines the
directional responses, thins them with non-max suppression, and rescales
to a [0, 1] edge map.  Evaluation tooling covers PSNR, detection-error
products, precision-recall sweeps with ODS/OIS/AP summaries, and a grid
search for the best gradient order.
"""

from fracedge.detector import (
    DetectorConfig,
    detect_edges,
    load_edge_float,
    save_edge_float,
    suppress_nonmaxima,
    threshold_map,
)
from fracedge.evaluation import (
    MatchResult,
    PrPoint,
    SweepSummary,
    detection_error,
    evaluate_image,
    match_boundaries,
    mse,
    pr_curve,
    psnr,
    score_j,
    summarize_sweep,
)
from fracedge.gradient import (
    FractionalKernel,
    GaussianKernel,
    GradientField,
    combine_gradient,
    convolve_separable,
    fractional_gradient,
    gaussian_kernel,
    gaussian_smooth,
    gl_coefficients,
)
from fracedge.hog import HogDescriptor, descriptor_flatten, hog_features
from fracedge.image import (
    UNLABELED,
    ImageFormatError,
    ImageHeaderError,
    consensus_boundaries,
    label_boundaries,
    load_boundary_map,
    load_image,
    load_label_map,
    normalize,
    save_image,
)
from fracedge.ordersweep import OrderSweepResult, default_order_grid, sweep_orders, sweep_report

__version__ = "0.1.0"

__all__ = [
    "DetectorConfig",
    "FractionalKernel",
    "GaussianKernel",
    "GradientField",
    "HogDescriptor",
    "ImageFormatError",
    "ImageHeaderError",
    "MatchResult",
    "OrderSweepResult",
    "PrPoint",
    "SweepSummary",
    "UNLABELED",
    "combine_gradient",
    "consensus_boundaries",
    "convolve_separable",
    "default_order_grid",
    "descriptor_flatten",
    "detect_edges",
    "detection_error",
    "evaluate_image",
    "fractional_gradient",
    "gaussian_kernel",
    "gaussian_smooth",
    "gl_coefficients",
    "hog_features",
    "label_boundaries",
    "load_boundary_map",
    "load_edge_float",
    "load_image",
    "load_label_map",
    "match_boundaries",
    "mse",
    "normalize",
    "pr_curve",
    "psnr",
    "save_edge_float",
    "save_image",
    "score_j",
    "summarize_sweep",
    "suppress_nonmaxima",
    "sweep_orders",
    "sweep_report",
    "threshold_map",
]
