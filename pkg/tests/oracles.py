"""Independent brute-force reference implementations used by the tests.

Everything here is deliberately written the slow, obvious way (explicit
loops, gamma-function identities, all-pairs distances) so it shares no code
path with the library it checks.
"""

import math

import numpy as np


def gamma_coefficient(order, j):
    """(-1)^j Gamma(v+1) / (Gamma(j+1) Gamma(v-j+1)); 0 at the gamma poles."""
    tail = order - j + 1
    if tail <= 0 and abs(tail - round(tail)) == 0:
        return 0.0
    return (-1.0) ** j * math.gamma(order + 1) / (math.gamma(j + 1) * math.gamma(tail))


def dense_convolve(img, horizontal, vertical):
    """Direct 2-D sum with per-axis clamped indices and centered anchors."""
    h, w = img.shape
    ch = len(horizontal) // 2
    cv = len(vertical) // 2
    out = np.zeros_like(img, dtype=np.float64)
    for y in range(h):
        for x in range(w):
            acc = 0.0
            for j, vj in enumerate(vertical):
                yy = min(max(y - j + cv, 0), h - 1)
                for i, hi in enumerate(horizontal):
                    xx = min(max(x - i + ch, 0), w - 1)
                    acc += vj * hi * img[yy, xx]
            out[y, x] = acc
    return out


def literal_three_term_gradient(img, order):
    """Per-pixel evaluation of the truncated difference with the written-out
    coefficients 1, -v, v(v-1)/2 and clamped backward indices."""
    h, w = img.shape
    gx = np.zeros_like(img, dtype=np.float64)
    gy = np.zeros_like(img, dtype=np.float64)
    c = [1.0, -order, order * (order - 1.0) / 2.0]
    for y in range(h):
        for x in range(w):
            sx = sy = 0.0
            for j, cj in enumerate(c):
                sx += cj * img[y, max(x - j, 0)]
                sy += cj * img[max(y - j, 0), x]
            gx[y, x] = sx
            gy[y, x] = sy
    return gx, gy


def allpairs_match_counts(pred, truth, tol):
    """Distance matching by explicit all-pairs search (no distance transform)."""
    pred_pts = list(zip(*np.nonzero(np.asarray(pred) > 0)))
    truth_pts = list(zip(*np.nonzero(np.asarray(truth) > 0)))

    def within(p, points):
        return any(math.hypot(p[0] - q[0], p[1] - q[1]) <= tol for q in points)

    tp = sum(1 for p in pred_pts if within(p, truth_pts))
    covered = sum(1 for q in truth_pts if within(q, pred_pts))
    return tp, len(pred_pts) - tp, len(truth_pts) - covered, len(truth_pts)


def elementwise_mse(a, b):
    total = 0.0
    h, w = a.shape
    for y in range(h):
        for x in range(w):
            d = b[y, x] - a[y, x]
            total += d * d
    return total / (h * w)
