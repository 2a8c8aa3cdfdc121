"""End-to-end edge detection: smooth, fractional gradient, NMS, normalize.

The edge map is the absolute combined gradient response, optionally thinned
by directional non-max suppression, then affinely rescaled to [0, 1]
(normalization happens after NMS).
"""

import struct
import time
from dataclasses import dataclass

import numpy as np

from fracedge import kernels
from fracedge.gradient import (
    combine_gradient,
    fractional_gradient,
    gaussian_smooth,
    gl_coefficients,
)
from fracedge.image import ImageFormatError, ImageHeaderError, as_image, atomic_write, normalize

_FLOAT_MAGIC = b"FEDG"


@dataclass(frozen=True)
class DetectorConfig:
    """Detector parameters.

    Defaults: order 0.6, three-term truncation, sigma 2 smoothing, sum
    combination, NMS on.
    """

    order: float = 0.6
    terms: int = 3
    sigma: float = 2.0
    combine: str = "sum"
    nms: bool = True

    def __post_init__(self):
        if self.order <= 0:
            raise ValueError(f"order must be positive, got {self.order}")
        if self.terms < 2:
            raise ValueError(f"terms must be >= 2, got {self.terms}")
        if self.sigma < 0:
            raise ValueError(f"sigma must be >= 0, got {self.sigma}")
        if self.combine not in ("sum", "magnitude"):
            raise ValueError(f"combine must be 'sum' or 'magnitude', got {self.combine!r}")


def suppress_nonmaxima(strength, gx, gy):
    """Directional NMS of a non-negative strength map (ties kept).

    Orientation comes from atan2(gy, gx) quantized to 0/45/90/135 degrees;
    a pixel survives iff its strength is >= both neighbors along that
    direction.  The output is a masked copy of the input.
    """
    return kernels.suppress_nonmax(strength, gx, gy)


def detect_edges(img, cfg=None, timings=None):
    """Run the full pipeline and return an edge-strength map in [0, 1].

    If ``timings`` is a dict it receives per-stage wall times in seconds
    under keys 'smooth', 'gradient', 'nms', 'normalize'.
    """
    cfg = cfg or DetectorConfig()
    img = as_image(img)
    kern = gl_coefficients(cfg.order, cfg.terms)

    t0 = time.perf_counter()
    smoothed = gaussian_smooth(img, cfg.sigma)
    t1 = time.perf_counter()
    fld = fractional_gradient(smoothed, kern, sigma=0.0)
    strength = np.abs(combine_gradient(fld, cfg.combine))
    t2 = time.perf_counter()
    if cfg.nms:
        strength = kernels.suppress_nonmax(strength, fld.gx, fld.gy)
    t3 = time.perf_counter()
    edges = normalize(strength, 0.0, 1.0)
    t4 = time.perf_counter()

    if timings is not None:
        timings["smooth"] = t1 - t0
        timings["gradient"] = t2 - t1
        timings["nms"] = t3 - t2
        timings["normalize"] = t4 - t3
    return edges


def threshold_map(edges, t):
    """Binary boundary map: pixels with strength strictly greater than t.

    Strict comparison makes t=1 the empty map, so a precision-recall sweep
    has a defined recall-to-zero endpoint.
    """
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"threshold must be in [0, 1], got {t}")
    return (np.asarray(edges) > t).astype(np.uint8)


def save_edge_float(path, edges):
    """Write an edge map losslessly: 16-byte header + row-major float32.

    Header: magic ``FEDG``, then little-endian u32 width, height, reserved.
    """
    edges = as_image(edges)
    h, w = edges.shape
    header = _FLOAT_MAGIC + struct.pack("<III", w, h, 0)
    atomic_write(path, header + edges.astype("<f4").tobytes())


def load_edge_float(path):
    """Read an edge map written by :func:`save_edge_float`."""
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 16 or data[:4] != _FLOAT_MAGIC:
        raise ImageFormatError(f"{path}: missing FEDG magic")
    w, h, _reserved = struct.unpack("<III", data[4:16])
    raster = np.frombuffer(data[16:], dtype="<f4")
    if raster.size != w * h:
        raise ImageHeaderError(f"{path}: raster size does not match header")
    return raster.reshape(h, w).astype(np.float64)
