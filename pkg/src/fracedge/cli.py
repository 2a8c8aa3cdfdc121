"""Batch command-line front-end.

Subcommands: detect (edge maps from images), evaluate (score detections
against ground truth), sweep (grid-search the gradient order), addnoise
(seeded Gaussian corruption for robustness experiments).

Dataset layout for evaluate/sweep: a root directory with ``images/NAME.png``
or ``images/NAME.pgm``, paired with ``truth/NAME.pgm`` (or multi-annotator
``truth/NAME.K.pgm``), or with ``labels/NAME.pgm`` when --labels-as-gt is
given.  Exit codes: 0 success, 1 runtime/I-O failure, 2 bad arguments.
"""

import argparse
import glob
import json
import logging
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from fracedge import evaluation, image, ordersweep
from fracedge.detector import DetectorConfig, detect_edges, save_edge_float
from fracedge.gradient import gl_coefficients

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2

log = logging.getLogger("fracedge")


class UsageError(Exception):
    """Invalid arguments or dataset layout (exit code 2)."""


def _setup_logging():
    level = os.environ.get("FRACEDGE_LOG", "warning").upper()
    if level not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
        level = "WARNING"
    logging.basicConfig(level=getattr(logging, level), format="%(levelname)s %(message)s")


def _detector_flags(parser):
    parser.add_argument("--order", type=float, default=0.6, help="gradient order (default 0.6)")
    parser.add_argument("--terms", type=int, default=3, help="difference terms (default 3)")
    parser.add_argument("--sigma", type=float, default=2.0,
                        help="Gaussian pre-smoothing sigma, 0 disables (default 2)")
    parser.add_argument("--combine", choices=("sum", "magnitude"), default="sum")
    parser.add_argument("--no-nms", action="store_true", help="skip non-max suppression")


def _eval_flags(parser):
    parser.add_argument("--levels", type=int, default=evaluation.DEFAULT_LEVELS,
                        help="PR threshold levels (default 33)")
    parser.add_argument("--tol", type=float, default=None,
                        help="match tolerance in px (default 0.0075 x diagonal)")
    parser.add_argument("--labels-as-gt", action="store_true",
                        help="derive ground truth from labels/NAME.pgm label maps")


def build_parser():
    parser = argparse.ArgumentParser(prog="fracedge",
                                     description="Fractional-order edge detection toolchain")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("detect", help="write edge maps for images")
    p.add_argument("images", nargs="*", help="input images (PGM or PNG)")
    _detector_flags(p)
    p.add_argument("--format", choices=("pgm", "float", "both"), default="pgm",
                   help="edge-map output format (default pgm)")
    p.add_argument("--dump-kernel", action="store_true",
                   help="print the difference kernel as JSON")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("-o", "--out", default=".", help="output directory")

    p = sub.add_parser("evaluate", help="evaluate detections against ground truth")
    p.add_argument("dataset", help="dataset root (images/ plus truth/ or labels/)")
    _detector_flags(p)
    _eval_flags(p)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("-o", "--out", default=".", help="output directory")

    p = sub.add_parser("sweep", help="grid-search the gradient order")
    p.add_argument("dataset", help="dataset root (images/ plus truth/ or labels/)")
    _detector_flags(p)
    _eval_flags(p)
    p.add_argument("--grid", default="0.1:2.0:0.1", help="order grid lo:hi:step")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("-o", "--out", default=".", help="output directory")

    p = sub.add_parser("addnoise", help="add seeded Gaussian white noise")
    p.add_argument("images", nargs="+", help="input images")
    p.add_argument("--sigma", type=float, required=True, help="noise standard deviation")
    p.add_argument("--seed", type=int, required=True, help="RNG seed")
    p.add_argument("-o", "--out", default=".", help="output directory")
    return parser


def _config_from(args):
    try:
        return DetectorConfig(order=args.order, terms=args.terms, sigma=args.sigma,
                              combine=args.combine, nms=not args.no_nms)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _sanitize(obj):
    """JSON has no inf/nan; map non-finite floats to null."""
    if isinstance(obj, dict):
        return {k: _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def _write_json(path, payload):
    text = json.dumps(_sanitize(payload), sort_keys=True, indent=2)
    image.atomic_write(path, text.encode() + b"\n")


def _out_dir(args):
    os.makedirs(args.out, exist_ok=True)
    return args.out


def _parallel_map(fn, items, jobs):
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


# ---------------------------------------------------------------- detect


def cmd_detect(args):
    cfg = _config_from(args)
    if args.dump_kernel:
        print(json.dumps(gl_coefficients(cfg.order, cfg.terms).to_dict()))
        if not args.images:
            return EXIT_OK
    if not args.images:
        raise UsageError("no input images given")
    out = _out_dir(args)

    def run(path):
        img = image.load_image(path)
        timings = {}
        edges = detect_edges(img, cfg, timings=timings)
        stem = os.path.splitext(os.path.basename(path))[0]
        if args.format in ("pgm", "both"):
            image.save_image(os.path.join(out, stem + ".pgm"), edges * 255.0)
        if args.format in ("float", "both"):
            save_edge_float(os.path.join(out, stem + ".fedg"), edges)
        return path, timings

    for path, timings in _parallel_map(run, args.images, args.jobs):
        total = sum(timings.values())
        stages = ", ".join(f"{k} {v * 1e3:.2f}" for k, v in timings.items())
        print(f"{path}: {total * 1e3:.2f} ms ({stages})")
    return EXIT_OK


# ---------------------------------------------------------------- datasets


def _discover_dataset(root, labels_as_gt):
    """Pair images with ground truth; every image must pair (else usage error)."""
    images_dir = os.path.join(root, "images")
    if not os.path.isdir(images_dir):
        raise UsageError(f"{root}: missing images/ directory")
    paths = sorted(
        p for p in glob.glob(os.path.join(images_dir, "*"))
        if p.lower().endswith((".png", ".pgm"))
    )
    if not paths:
        raise UsageError(f"{images_dir}: no .png or .pgm images")

    pairs = []
    for path in paths:
        stem = os.path.splitext(os.path.basename(path))[0]
        if labels_as_gt:
            label_path = os.path.join(root, "labels", stem + ".pgm")
            if not os.path.exists(label_path):
                raise UsageError(f"no label map for {stem} (expected {label_path})")
            truth = [image.label_boundaries(image.load_label_map(label_path))]
        else:
            single = os.path.join(root, "truth", stem + ".pgm")
            multi = sorted(glob.glob(os.path.join(root, "truth", stem + ".*.pgm")))
            truth_paths = [single] if os.path.exists(single) else multi
            if not truth_paths:
                raise UsageError(f"no ground truth for {stem} (expected {single})")
            truth = [image.load_boundary_map(p) for p in truth_paths]
        pairs.append((stem, image.load_image(path), truth))
    return pairs


# ---------------------------------------------------------------- evaluate


def _validate_eval_args(args):
    if args.levels < 2:
        raise UsageError("--levels must be >= 2")
    if args.tol is not None and args.tol < 0:
        raise UsageError("--tol must be >= 0")


def cmd_evaluate(args):
    cfg = _config_from(args)
    _validate_eval_args(args)
    out = _out_dir(args)
    pairs = _discover_dataset(args.dataset, args.labels_as_gt)

    def run(pair):
        name, img, truth = pair
        t0 = time.perf_counter()
        edges = detect_edges(img, cfg)
        report = evaluation.evaluate_image(img, edges, truth,
                                           levels=args.levels, tol=args.tol)
        log.info("evaluated %s in %.1f ms", name, (time.perf_counter() - t0) * 1e3)
        return name, report

    results = _parallel_map(run, pairs, args.jobs)
    summary = evaluation.summarize_sweep([r.points for _, r in results])

    def finite_mean(values):
        finite = [v for v in values if math.isfinite(v)]
        return float(np.mean(finite)) if finite else math.nan

    payload = {
        "order": cfg.order,
        "sigma": cfg.sigma,
        "psnr_db": finite_mean([r.psnr_db for _, r in results]),
        "pm": finite_mean([r.pm for _, r in results]),
        "pf": finite_mean([r.pf for _, r in results]),
        "de": finite_mean([r.de for _, r in results]),
        "j": finite_mean([r.j for _, r in results]),
        "pr": [{"t": p.threshold, "p": p.precision, "r": p.recall, "f": p.f_measure}
               for p in summary.points],
        "ods": summary.ods,
        "ois": summary.ois,
        "ap": summary.ap,
        "images": [dict(r.to_dict(order=cfg.order, sigma=cfg.sigma), name=name)
                   for name, r in results],
    }
    _write_json(os.path.join(out, "report.json"), payload)
    image.atomic_write(os.path.join(out, "pr.csv"),
                       evaluation.pr_points_csv(summary.points).encode())
    print(f"images {len(results)}  ODS {summary.ods:.4f}  OIS {summary.ois:.4f}  "
          f"AP {summary.ap:.4f}  mean J {payload['j']:.4g}")
    return EXIT_OK


# ---------------------------------------------------------------- sweep


def _parse_grid(spec):
    try:
        lo, hi, step = (float(tok) for tok in spec.split(":"))
        grid = ordersweep.default_order_grid(lo, hi, step)
    except (ValueError, OverflowError, ZeroDivisionError) as exc:
        raise UsageError(f"bad --grid {spec!r}: {exc}") from exc
    if any(v <= 0 for v in grid):
        raise UsageError("--grid orders must be positive")
    return grid


def cmd_sweep(args):
    cfg = _config_from(args)
    _validate_eval_args(args)
    grid = _parse_grid(args.grid)
    out = _out_dir(args)
    pairs = _discover_dataset(args.dataset, args.labels_as_gt)

    result = ordersweep.sweep_orders(
        [(img, truth) for _, img, truth in pairs],
        grid=grid,
        config=cfg,
        levels=args.levels,
        tol=args.tol,
        jobs=args.jobs,
        names=[name for name, _, _ in pairs],
        keep_curves=True,
    )

    image.atomic_write(os.path.join(out, "sweep.csv"),
                       ordersweep.sweep_report(result).encode())
    per_order = []
    for order, curves in zip(result.grid, result.curves):
        summary = evaluation.summarize_sweep(curves)
        per_order.append({"order": order, "ods": summary.ods, "ois": summary.ois,
                          "ap": summary.ap})
        image.atomic_write(os.path.join(out, f"pr_order_{order:g}.csv"),
                           evaluation.pr_points_csv(summary.points).encode())
    payload = dict(ordersweep.sweep_to_dict(result), per_order=per_order)
    _write_json(os.path.join(out, "summary.json"), payload)
    print(f"best order {result.best_order:g} over {len(pairs)} images "
          f"(grid {grid[0]:g}..{grid[-1]:g})")
    return EXIT_OK


# ---------------------------------------------------------------- addnoise


def cmd_addnoise(args):
    if args.sigma < 0:
        raise UsageError("--sigma must be >= 0")
    out = _out_dir(args)
    rng = np.random.default_rng(args.seed)
    for path in args.images:
        img = image.load_image(path)
        noisy = np.clip(img + rng.normal(0.0, args.sigma, img.shape), 0.0, 255.0)
        image.save_image(os.path.join(out, os.path.basename(path)), noisy)
    return EXIT_OK


# ---------------------------------------------------------------- entry


_COMMANDS = {
    "detect": cmd_detect,
    "evaluate": cmd_evaluate,
    "sweep": cmd_sweep,
    "addnoise": cmd_addnoise,
}


def main(argv=None):
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"fracedge {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (image.ImageFormatError, image.ImageHeaderError, FileNotFoundError, OSError) as exc:
        print(f"fracedge {args.command}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
