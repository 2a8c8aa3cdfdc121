"""Grayscale image representation and file I/O.

Images are 2-D float64 numpy arrays in row-major (height, width) order with
intensities kept as reals throughout; quantization to 8-bit happens only
when writing files.  Supported formats: binary PGM (P5, maxval up to 255)
and 8-bit PNG (grayscale or RGB read, grayscale write).  Label maps are PGM
files whose pixel values are class IDs, with 255 reserved as the unlabeled
sentinel.
"""

import io
import os
import tempfile

import numpy as np
from PIL import Image as PILImage

#: Sentinel class ID meaning "no label" in label maps.
UNLABELED = 255

# Rec.601 luma weights for RGB -> grayscale.
_LUMA = np.array([0.299, 0.587, 0.114])

_PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


class ImageFormatError(ValueError):
    """File is not in a supported image format."""


class ImageHeaderError(ValueError):
    """File claims a supported format but its header/payload is corrupt."""


def as_image(arr):
    """Validate and coerce to the canonical float64 (H, W) image layout."""
    img = np.ascontiguousarray(arr, dtype=np.float64)
    if img.ndim != 2 or img.shape[0] < 1 or img.shape[1] < 1:
        raise ValueError(f"expected a 2-D image, got shape {np.shape(arr)}")
    if not np.isfinite(img).all():
        raise ValueError("image contains NaN or Inf intensities")
    return img


def quantize(img):
    """Clamp to [0, 255] and round half away from zero to uint8."""
    return np.floor(np.clip(img, 0.0, 255.0) + 0.5).astype(np.uint8)


def load_image(path):
    """Load a PGM (binary P5) or PNG file as float64 intensities in [0, 255].

    RGB inputs are converted with Rec.601 luma (0.299 R + 0.587 G + 0.114 B).
    Raises FileNotFoundError, ImageFormatError, or ImageHeaderError.
    """
    with open(path, "rb") as fh:
        data = fh.read()
    if data.startswith(b"P5"):
        arr, _ = _decode_pgm(data)
        return arr.astype(np.float64)
    if data.startswith(_PNG_MAGIC):
        return _decode_png(data, path)
    raise ImageFormatError(f"{path}: not a binary PGM (P5) or PNG file")


def save_image(path, img):
    """Write an image as 8-bit PGM or PNG depending on the file extension.

    Intensities are clamped to [0, 255] and rounded half away from zero.
    The file is written atomically (temp file + rename).
    """
    img = as_image(img)
    ext = os.path.splitext(str(path))[1].lower()
    if ext == ".pgm":
        payload = encode_pgm(quantize(img))
    elif ext == ".png":
        buf = io.BytesIO()
        PILImage.fromarray(quantize(img), mode="L").save(buf, format="PNG")
        payload = buf.getvalue()
    else:
        raise ImageFormatError(f"{path}: unsupported output extension {ext!r}")
    atomic_write(path, payload)


def atomic_write(path, payload):
    """Write bytes via a temp file in the target directory, then rename."""
    directory = os.path.dirname(os.path.abspath(str(path)))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def encode_pgm(values):
    """Binary P5 bytes (maxval 255) for a uint8 (H, W) array."""
    values = np.ascontiguousarray(values, dtype=np.uint8)
    h, w = values.shape
    return b"P5\n%d %d\n255\n" % (w, h) + values.tobytes()


def _decode_pgm(data):
    """Parse binary P5 bytes; returns (uint8 array, maxval)."""
    pos = 2  # past "P5"
    fields = []
    while len(fields) < 3:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos] != 0x0A:
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        token = data[start:pos]
        if not token.isdigit():
            raise ImageHeaderError(f"corrupt PGM header near byte {start}")
        fields.append(int(token))
    width, height, maxval = fields
    if maxval > 255:
        raise ImageFormatError("16-bit PGM (maxval > 255) is not supported")
    if width < 1 or height < 1 or maxval < 1:
        raise ImageHeaderError(f"invalid PGM dimensions {width}x{height} maxval {maxval}")
    if pos >= len(data) or not data[pos : pos + 1].isspace():
        raise ImageHeaderError("PGM header not terminated by whitespace")
    pos += 1
    raster = data[pos : pos + width * height]
    if len(raster) != width * height:
        raise ImageHeaderError("PGM raster shorter than header promises")
    arr = np.frombuffer(raster, dtype=np.uint8).reshape(height, width)
    return arr.copy(), maxval


def _decode_png(data, path):
    pil = PILImage.open(io.BytesIO(data))
    if pil.mode == "L":
        return np.asarray(pil, dtype=np.float64)
    if pil.mode == "RGB":
        rgb = np.asarray(pil, dtype=np.float64)
        return rgb @ _LUMA
    raise ImageFormatError(f"{path}: PNG mode {pil.mode!r} not supported (8-bit L or RGB only)")


def normalize(img, lo=0.0, hi=1.0):
    """Affine rescale so the minimum maps to ``lo`` and the maximum to ``hi``.

    A constant image maps every pixel to ``lo``.
    """
    if not hi > lo:
        raise ValueError(f"normalize needs hi > lo, got ({lo}, {hi})")
    img = np.asarray(img, dtype=np.float64)
    mn = img.min()
    mx = img.max()
    if mx == mn:
        return np.full_like(img, lo)
    return (img - mn) / (mx - mn) * (hi - lo) + lo


def load_label_map(path):
    """Load a label map (PGM, pixel value = class ID, 255 = unlabeled)."""
    with open(path, "rb") as fh:
        data = fh.read()
    if not data.startswith(b"P5"):
        raise ImageFormatError(f"{path}: label maps must be binary PGM files")
    arr, _ = _decode_pgm(data)
    return arr.astype(np.int32)


def save_label_map(path, labels):
    labels = np.asarray(labels)
    if labels.min() < 0 or labels.max() > 255:
        raise ValueError("label IDs must fit in a byte")
    atomic_write(path, encode_pgm(labels.astype(np.uint8)))


def label_boundaries(labels, unlabeled=UNLABELED):
    """Boundary mask from a label map: both sides of every label change.

    A pixel is a boundary iff some 4-neighbor carries a different label,
    both labels being real classes; pixels that are unlabeled or touch an
    unlabeled pixel are never boundaries.
    """
    labels = np.asarray(labels)
    if labels.ndim != 2:
        raise ValueError("label map must be 2-D")
    valid = labels != unlabeled
    mask = np.zeros(labels.shape, dtype=bool)

    change = (labels[:, 1:] != labels[:, :-1]) & valid[:, 1:] & valid[:, :-1]
    mask[:, 1:] |= change
    mask[:, :-1] |= change
    change = (labels[1:, :] != labels[:-1, :]) & valid[1:, :] & valid[:-1, :]
    mask[1:, :] |= change
    mask[:-1, :] |= change

    touches_sentinel = np.zeros(labels.shape, dtype=bool)
    touches_sentinel[:, 1:] |= ~valid[:, :-1]
    touches_sentinel[:, :-1] |= ~valid[:, 1:]
    touches_sentinel[1:, :] |= ~valid[:-1, :]
    touches_sentinel[:-1, :] |= ~valid[1:, :]

    mask &= valid & ~touches_sentinel
    return mask.astype(np.uint8)


def load_boundary_map(path):
    """Load a binary boundary map from PGM/PNG; any nonzero pixel is boundary."""
    return (load_image(path) > 0).astype(np.uint8)


def save_boundary_map(path, mask):
    mask = np.asarray(mask)
    atomic_write(path, encode_pgm((mask > 0).astype(np.uint8) * 255))


def consensus_boundaries(masks, min_fraction=0.5):
    """Merge several annotators' boundary maps by vote fraction.

    A pixel is boundary in the consensus iff at least ``min_fraction`` of
    the maps mark it.  This is one documented merge convention; evaluation
    against multiple annotators does not use it (each map is matched
    individually there).
    """
    if not masks:
        raise ValueError("need at least one boundary map")
    stack = np.stack([np.asarray(m) > 0 for m in masks])
    votes = stack.mean(axis=0)
    return (votes >= min_fraction).astype(np.uint8)
