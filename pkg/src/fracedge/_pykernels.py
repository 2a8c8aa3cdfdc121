"""Pure-numpy implementations of the hot-loop kernels.

These mirror :mod:`fracedge._native` operation for operation: same
clamp-to-edge border rule, same per-pixel accumulation order over filter
taps, same orientation-binning comparisons.  On FMA-free code paths the two
backends therefore agree bit for bit, and both are exercised by the same
oracle tests.
"""

import math

import numpy as np

# Orientation bin boundaries at 22.5 and 67.5 degrees.
_TAN_LO = math.tan(math.pi / 8)
_TAN_HI = math.tan(3 * math.pi / 8)


def correlate_axis(src, weights, anchor, axis):
    """1-D weighted pass along ``axis`` with replicate (clamp-to-edge) borders.

    out[p] = sum_k weights[k] * src[clamp(p - k + anchor)], positions taken
    along the chosen axis.  ``anchor`` is the tap index aligned with the
    output position (len(weights)//2 for a centered kernel, 0 for a backward
    difference).
    """
    n = src.shape[axis]
    out = np.zeros_like(src)
    pos = np.arange(n)
    # Tap-order accumulation; per output pixel this is the same FP sequence
    # as the compiled kernel's inner loop.
    for k in range(weights.shape[0]):
        idx = np.clip(pos - k + anchor, 0, n - 1)
        out += weights[k] * np.take(src, idx, axis=axis)
    return out


def suppress_nonmax(strength, gx, gy):
    """Directional non-max suppression of a non-negative response map.

    The orientation at each pixel is atan2(gy, gx) quantized to four bins
    (0, 45, 90, 135 degrees); a pixel survives iff its strength is >= both
    neighbors along the binned direction (ties kept).  Neighbors outside the
    image never suppress (treated as 0).
    """
    h, w = strength.shape
    padded = np.zeros((h + 2, w + 2), dtype=strength.dtype)
    padded[1:-1, 1:-1] = strength

    def shifted(dy, dx):
        return padded[1 + dy : 1 + dy + h, 1 + dx : 1 + dx + w]

    ax = np.abs(gx)
    ay = np.abs(gy)
    horiz = ay <= _TAN_LO * ax
    vert = ~horiz & (ay >= _TAN_HI * ax)
    diag = ~(horiz | vert)
    # In the diagonal band both components are nonzero, so sign comparison
    # is safe (no underflow issue a gx*gy product would have).
    rising = diag & ((gx > 0) == (gy > 0))
    falling = diag & ~rising

    conds = [horiz, rising, vert, falling]
    ahead = np.select(conds, [shifted(0, 1), shifted(1, 1), shifted(1, 0), shifted(1, -1)])
    behind = np.select(conds, [shifted(0, -1), shifted(-1, -1), shifted(-1, 0), shifted(-1, 1)])

    keep = (strength >= ahead) & (strength >= behind)
    return np.where(keep, strength, 0.0)
