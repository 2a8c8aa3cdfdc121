"""Histogram-of-oriented-gradients descriptors over fractional-order gradients.

Orientations are unsigned (taken modulo pi) with bin centers at k*pi/bins,
and each pixel's magnitude is split between the two nearest bin centers by
linear interpolation (wrapping, so the space stays circular).  Gradients
default to the three-term fractional difference with no pre-smoothing.
"""

import json
import struct
from dataclasses import dataclass

import numpy as np

from fracedge.gradient import fractional_gradient, gl_coefficients
from fracedge.image import as_image, atomic_write


@dataclass(frozen=True)
class HogDescriptor:
    """Per-cell orientation histograms: grid has shape (cells_y, cells_x, bins)."""

    cell_size: int
    bins: int
    grid: np.ndarray
    normalization: str = "none"

    @property
    def cells_y(self):
        return self.grid.shape[0]

    @property
    def cells_x(self):
        return self.grid.shape[1]


def hog_features(img, order=0.6, cell_size=8, bins=9, terms=3, sigma=0.0,
                 normalization="none"):
    """Oriented-gradient histograms on a cell grid; partial border cells count.

    ``normalization`` is "none" or "cell_l2" (each nonzero cell's bin vector
    rescaled to unit L2 norm).
    """
    img = as_image(img)
    if cell_size < 2:
        raise ValueError(f"cell_size must be >= 2, got {cell_size}")
    if bins < 2:
        raise ValueError(f"bins must be >= 2, got {bins}")
    if normalization not in ("none", "cell_l2"):
        raise ValueError(f"unknown normalization {normalization!r}")
    h, w = img.shape
    if h < cell_size or w < cell_size:
        raise ValueError(f"image {h}x{w} smaller than one {cell_size}px cell")

    fld = fractional_gradient(img, gl_coefficients(order, terms), sigma=sigma)
    magnitude = np.hypot(fld.gx, fld.gy)
    theta = np.mod(np.arctan2(fld.gy, fld.gx), np.pi)

    # Fractional bin position; mod(pi) can round to pi exactly, so the low
    # bin index is wrapped rather than assumed < bins.
    pos = theta * (bins / np.pi)
    low = np.floor(pos).astype(np.intp)
    frac = pos - low
    low %= bins
    high = (low + 1) % bins

    ys, xs = np.indices(img.shape)
    cy = ys // cell_size
    cx = xs // cell_size
    cells_y = -(-h // cell_size)
    cells_x = -(-w // cell_size)

    grid = np.zeros((cells_y, cells_x, bins), dtype=np.float64)
    np.add.at(grid, (cy, cx, low), magnitude * (1.0 - frac))
    np.add.at(grid, (cy, cx, high), magnitude * frac)

    if normalization == "cell_l2":
        norms = np.sqrt((grid * grid).sum(axis=2, keepdims=True))
        grid = np.divide(grid, norms, out=np.zeros_like(grid), where=norms > 0)

    grid.setflags(write=False)
    return HogDescriptor(cell_size=cell_size, bins=bins, grid=grid,
                         normalization=normalization)


def descriptor_flatten(descriptor):
    """Row-major (cell_y, cell_x, bin) flattening of the histogram grid."""
    return descriptor.grid.reshape(-1).copy()


def descriptor_to_json(descriptor):
    return json.dumps(
        {
            "cell_size": descriptor.cell_size,
            "bins": descriptor.bins,
            "cells_y": descriptor.cells_y,
            "cells_x": descriptor.cells_x,
            "normalization": descriptor.normalization,
            "values": [float(v) for v in descriptor_flatten(descriptor)],
        },
        sort_keys=True,
    )


def save_descriptor_float(path, descriptor):
    """Raw float32 export: u32 cells_y, cells_x, bins header, then values."""
    header = struct.pack("<III", descriptor.cells_y, descriptor.cells_x, descriptor.bins)
    atomic_write(path, header + descriptor_flatten(descriptor).astype("<f4").tobytes())


def load_descriptor_float(path):
    with open(path, "rb") as fh:
        data = fh.read()
    cells_y, cells_x, bins = struct.unpack("<III", data[:12])
    values = np.frombuffer(data[12:], dtype="<f4").astype(np.float64)
    if values.size != cells_y * cells_x * bins:
        raise ValueError(f"{path}: descriptor size does not match header")
    return values.reshape(cells_y, cells_x, bins)
