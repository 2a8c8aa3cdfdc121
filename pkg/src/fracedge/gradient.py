"""Fractional-order directional gradients via truncated backward differences.

The discrete fractional derivative of order v along an axis is the
Grünwald–Letnikov backward difference

    d^v s(x) = c0*s(x) + c1*s(x-1) + c2*s(x-2) + ...

with generalized binomial coefficients c_j = (-1)^j * C(v, j), truncated to
a fixed number of terms.  Integer orders reduce to the ordinary
signed-binomial rows ([1, -1] for v=1, [1, -2, 1] for v=2), so the classic
derivative-of-Gaussian and Laplacian-of-Gaussian detectors are the v=1 and
v=2 special cases of this family.
"""

import math
from dataclasses import dataclass

import numpy as np

from fracedge import kernels
from fracedge.image import as_image


@dataclass(frozen=True)
class FractionalKernel:
    """Truncated fractional-difference coefficient sequence of order ``order``."""

    order: float
    coefficients: np.ndarray
    terms: int

    def to_dict(self):
        return {
            "order": self.order,
            "terms": self.terms,
            "coefficients": [float(c) for c in self.coefficients],
        }


@dataclass(frozen=True)
class GaussianKernel:
    """Normalized 1-D Gaussian taps, radius = ceil(3*sigma)."""

    sigma: float
    radius: int
    weights: np.ndarray


@dataclass(frozen=True)
class GradientField:
    """Per-pixel directional responses along x (columns) and y (rows)."""

    gx: np.ndarray
    gy: np.ndarray

    @property
    def height(self):
        return self.gx.shape[0]

    @property
    def width(self):
        return self.gx.shape[1]


def gl_coefficients(order, terms=3):
    """Generalized binomial coefficients c_j = (-1)^j C(order, j), j < terms.

    Generated by the multiplicative recurrence c_j = c_{j-1} (j-1-order)/j,
    which is exact for integer orders (the tail is exactly zero, with no
    gamma-function poles to dodge) and numerically stable otherwise.
    """
    order = float(order)
    terms = int(terms)
    if order <= 0:
        raise ValueError(f"order must be positive, got {order}")
    if terms < 2:
        raise ValueError(f"need at least 2 terms, got {terms}")
    coeffs = np.empty(terms, dtype=np.float64)
    coeffs[0] = 1.0
    for j in range(1, terms):
        coeffs[j] = coeffs[j - 1] * (j - 1 - order) / j
    coeffs.setflags(write=False)
    return FractionalKernel(order=order, coefficients=coeffs, terms=terms)


def gaussian_kernel(sigma):
    """Sampled Gaussian taps exp(-i^2 / (2 sigma^2)), renormalized to sum 1."""
    sigma = float(sigma)
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    radius = math.ceil(3 * sigma)
    offsets = np.arange(-radius, radius + 1, dtype=np.float64)
    weights = np.exp(-(offsets**2) / (2 * sigma * sigma))
    weights /= weights.sum()
    weights.setflags(write=False)
    return GaussianKernel(sigma=sigma, radius=radius, weights=weights)


def convolve_separable(img, horizontal, vertical):
    """Separable 2-D convolution with replicate (clamp-to-edge) borders.

    out[y][x] = sum_i sum_j v[j] h[i] img[clamp(y-j+cv)][clamp(x-i+ch)],
    with anchors at the sequence centers (index len//2).
    """
    img = as_image(img)
    horizontal = np.asarray(horizontal, dtype=np.float64)
    vertical = np.asarray(vertical, dtype=np.float64)
    if horizontal.size == 0 or vertical.size == 0:
        raise ValueError("empty convolution weights")
    out = kernels.correlate_axis(img, horizontal, horizontal.size // 2, axis=1)
    return kernels.correlate_axis(out, vertical, vertical.size // 2, axis=0)


def gaussian_smooth(img, sigma):
    """Separable Gaussian pre-smoothing; sigma = 0 returns the input as-is."""
    if sigma == 0:
        return as_image(img)
    g = gaussian_kernel(sigma)
    return convolve_separable(img, g.weights, g.weights)


def fractional_gradient(img, kernel, sigma=0.0):
    """Directional fractional derivatives of an (optionally smoothed) image.

    Each directional response applies the truncated coefficient sequence as
    a backward difference (mask anchored at offset 0, replicate borders):
    gx[y][x] = sum_j c_j s(x-j, y), and likewise along y.
    """
    if sigma < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    smoothed = gaussian_smooth(img, sigma)
    coeffs = kernel.coefficients
    gx = kernels.correlate_axis(smoothed, coeffs, 0, axis=1)
    gy = kernels.correlate_axis(smoothed, coeffs, 0, axis=0)
    return GradientField(gx=gx, gy=gy)


def combine_gradient(fld, mode="sum"):
    """Combine directional responses: plain sum, or Euclidean magnitude.

    The sum is the definitional combination for this detector family; the
    magnitude is a conventional alternative that avoids sign cancellation
    on diagonal edges.
    """
    if mode == "sum":
        return fld.gx + fld.gy
    if mode == "magnitude":
        return np.hypot(fld.gx, fld.gy)
    raise ValueError(f"unknown combine mode {mode!r} (use 'sum' or 'magnitude')")
