"""Compare the compiled kernels against the pure-numpy fallback.

Times the two hot kernels (separable correlation passes, directional NMS)
and the full detection pipeline on a 481x321 image, for every backend that
imported successfully.  Also reports image-level thread scaling for the
active backend.

Usage: python benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from fracedge import kernels
from fracedge.detector import DetectorConfig, detect_edges
from fracedge.gradient import gaussian_kernel, gl_coefficients


def best_of(fn, repeats):
    fn()  # warm-up
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench_backend(name, img, repeats):
    mod = kernels.get_backend(name)
    gauss = np.ascontiguousarray(gaussian_kernel(2.0).weights)
    diff = np.ascontiguousarray(gl_coefficients(0.6, 3).coefficients)

    smooth = mod.correlate_axis(mod.correlate_axis(img, gauss, 6, 1), gauss, 6, 0)
    gx = mod.correlate_axis(smooth, diff, 0, 1)
    gy = mod.correlate_axis(smooth, diff, 0, 0)
    strength = np.ascontiguousarray(np.abs(gx + gy))

    rows = {
        "gaussian pass (13 taps, both axes)": lambda: mod.correlate_axis(
            mod.correlate_axis(img, gauss, 6, 1), gauss, 6, 0
        ),
        "difference pass (3 taps, both axes)": lambda: (
            mod.correlate_axis(smooth, diff, 0, 1),
            mod.correlate_axis(smooth, diff, 0, 0),
        ),
        "non-max suppression": lambda: mod.suppress_nonmax(strength, gx, gy),
    }
    timings = {label: best_of(fn, repeats) for label, fn in rows.items()}

    previous = kernels.backend_name()
    kernels.set_backend(name)
    try:
        cfg = DetectorConfig()
        timings["full detect_edges"] = best_of(lambda: detect_edges(img, cfg), repeats)
    finally:
        kernels.set_backend(previous)
    return timings


def bench_thread_scaling(img, repeats):
    cfg = DetectorConfig()
    batch = [img + i for i in range(16)]
    results = {}
    for jobs in (1, 2, 4):
        def run():
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                list(pool.map(lambda im: detect_edges(im, cfg), batch))
        results[jobs] = best_of(run, repeats)
    return results


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=7)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    img = np.ascontiguousarray(rng.random((321, 481)) * 255)

    backends = kernels.available_backends()
    print(f"image 481x321 float64, best of {args.repeats} runs")
    print(f"backends: {', '.join(backends)} (active: {kernels.backend_name()})\n")

    results = {name: bench_backend(name, img, args.repeats) for name in backends}
    labels = list(next(iter(results.values())))
    width = max(len(label) for label in labels)
    header = f"{'kernel':<{width}}  " + "  ".join(f"{name:>10}" for name in backends)
    if len(backends) == 2:
        header += f"  {'speedup':>8}"
    print(header)
    for label in labels:
        row = f"{label:<{width}}  "
        row += "  ".join(f"{results[name][label] * 1e3:>8.2f}ms" for name in backends)
        if len(backends) == 2:
            ratio = results["python"][label] / results["native"][label]
            row += f"  {ratio:>7.1f}x"
        print(row)

    print(f"\nthread scaling of detect_edges on the active backend "
          f"({kernels.backend_name()}), 16-image batch:")
    scaling = bench_thread_scaling(img, max(3, args.repeats // 2))
    base = scaling[1]
    for jobs, secs in scaling.items():
        print(f"  jobs={jobs}: {secs * 1e3:8.1f} ms  ({base / secs:.2f}x)")


if __name__ == "__main__":
    main()
