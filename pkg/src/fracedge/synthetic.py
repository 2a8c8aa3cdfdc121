"""Synthetic step/ramp test images with exact boundary ground truth.

Each generator returns (image, truth): a float64 intensity grid and the
boundary mask derived from the underlying two-region layout with
:func:`fracedge.image.label_boundaries` (both sides of the region change
are marked, matching the library's ground-truth convention).

Edges can fade in contrast along their length.  A fading edge keeps the
detection problem honest under noise: the faint end is genuinely missable,
so no threshold reaches perfect recall, and evaluation never degenerates
into the zero-detection-error corner.
"""

import numpy as np

from fracedge.image import label_boundaries


def _cross_profile(n, position, ramp_width):
    """Transition from 0 to 1 at ``position``: hard step or linear ramp."""
    x = np.arange(n, dtype=np.float64)
    if ramp_width == 0:
        return (x >= position).astype(np.float64)
    return np.clip((x - (position - ramp_width / 2.0)) / ramp_width, 0.0, 1.0)


def edge_image(shape, position, lo=40.0, contrast=170.0, ramp_width=0,
               horizontal=False, fade_to=1.0):
    """Two-region image split at ``position`` along one axis.

    ``ramp_width`` = 0 gives a hard step, otherwise intensities ramp over
    that many pixels centered on the split.  ``fade_to`` scales the
    contrast linearly along the edge from full strength at one end to
    ``fade_to`` of it at the other (1.0 means uniform contrast).  Ground
    truth marks both sides of the split regardless of ramp or fade.
    """
    h, w = shape
    n = w if not horizontal else h
    m = h if not horizontal else w
    if not 1 <= position < n:
        raise ValueError(f"position {position} outside (0, {n})")
    across = _cross_profile(n, position, ramp_width)
    along = 1.0 - (1.0 - fade_to) * np.arange(m, dtype=np.float64) / max(1, m - 1)
    img = lo + contrast * np.outer(along, across)
    labels_1d = (np.arange(n) >= position).astype(np.int32)
    labels = np.tile(labels_1d[None, :], (m, 1))
    if horizontal:
        img = img.T
        labels = labels.T
    return img, label_boundaries(labels)


def noisy_corpus(count=20, size=64, noise_sigma=25.0, seed=1234, fade_to=0.05):
    """Seeded corpus of fading step and ramp edges with Gaussian noise.

    Alternates hard steps and 6px ramps, vertical and horizontal, varying
    the split position and contrast deterministically.  Noise comes from
    one generator seeded once; intensities are clipped to [0, 255].
    """
    rng = np.random.default_rng(seed)
    corpus = []
    for i in range(count):
        ramp_width = 0 if i % 2 == 0 else 6
        horizontal = (i // 2) % 2 == 1
        position = size // 3 + (i * 5) % (size // 3)
        lo = 20.0 + (i * 7) % 30
        contrast = 150.0 + (i * 13) % 60
        img, truth = edge_image((size, size), position, lo=lo, contrast=contrast,
                                ramp_width=ramp_width, horizontal=horizontal,
                                fade_to=fade_to)
        noisy = np.clip(img + rng.normal(0.0, noise_sigma, img.shape), 0.0, 255.0)
        corpus.append((noisy, truth))
    return corpus
