"""Raster carriers, validation helpers, and file I/O.

Rasters are plain numpy arrays throughout the package:

* float raster  -- ``(H, W)`` or ``(H, W, 3)`` float64 in [0, 1]; images,
  probability maps, heatmaps, alpha mattes.
* binary mask   -- ``(H, W)`` uint8 with values in {0, 1}.
* trimap        -- ``(H, W)`` float64 with values in {0.0, 0.5, 1.0}
  (background / unknown / foreground).

``check_*`` helpers validate and coerce caller input the way sklearn's
``check_array`` does; every compute function in the package goes through
them. On disk, exact float data uses the WFR format (see ``write_wfr``),
8-bit previews use PNG or PGM.
"""

import struct
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import InvariantViolation, MalformedHeader, UnreadableFile

WFR_MAGIC = b"WFR1"

# disk sentinels for trimaps; +-2 gray levels survive image-tool round-trips
TRIMAP_SNAP_TOL = 2.0 / 255.0

__all__ = [
    "check_float_raster",
    "check_image",
    "check_prob_map",
    "check_binary_mask",
    "check_trimap",
    "to_grayscale",
    "load_raster",
    "save_raster",
    "read_wfr",
    "write_wfr",
]


# ---------------------------------------------------------------------
# Validation helpers
# ---------------------------------------------------------------------

def check_float_raster(arr, name="raster", channels=(1, 3), unit_range=True):
    """Coerce to float64 and validate shape/finiteness/range.

    Returns a C-contiguous float64 array of shape (H, W) or (H, W, 3).
    """
    a = np.asarray(arr, dtype=np.float64)
    if a.ndim == 3 and a.shape[2] == 1:
        a = a[:, :, 0]
    if a.ndim == 2:
        nch = 1
    elif a.ndim == 3 and a.shape[2] == 3:
        nch = 3
    else:
        raise InvariantViolation(
            f"{name}: expected (H, W) or (H, W, 3) array, got shape {np.shape(arr)}"
        )
    if nch not in channels:
        raise InvariantViolation(f"{name}: {nch}-channel input not allowed here")
    if a.size == 0:
        raise InvariantViolation(f"{name}: empty raster")
    if not np.isfinite(a).all():
        raise InvariantViolation(f"{name}: non-finite values")
    if unit_range and (a.min() < 0.0 or a.max() > 1.0):
        raise InvariantViolation(
            f"{name}: values outside [0, 1] (min {a.min():.6g}, max {a.max():.6g})"
        )
    return np.ascontiguousarray(a)


def check_image(arr, name="image"):
    """Validate an image raster: 1 or 3 channels, values in [0, 1]."""
    return check_float_raster(arr, name=name, channels=(1, 3))


def check_prob_map(arr, name="prob"):
    """Validate a single-channel probability map in [0, 1]."""
    return check_float_raster(arr, name=name, channels=(1,))


def check_binary_mask(arr, name="mask"):
    """Validate a binary mask; returns (H, W) uint8 with values in {0, 1}."""
    a = np.asarray(arr)
    if a.ndim == 3 and a.shape[2] == 1:
        a = a[:, :, 0]
    if a.ndim != 2 or a.size == 0:
        raise InvariantViolation(f"{name}: expected non-empty (H, W) array")
    af = np.asarray(a, dtype=np.float64)
    if not np.isin(af, (0.0, 1.0)).all():
        raise InvariantViolation(f"{name}: values other than 0 and 1")
    return np.ascontiguousarray(af.astype(np.uint8))


def check_trimap(arr, name="trimap"):
    """Validate a trimap; returns (H, W) float64 with values in {0, 0.5, 1}."""
    a = np.asarray(arr, dtype=np.float64)
    if a.ndim == 3 and a.shape[2] == 1:
        a = a[:, :, 0]
    if a.ndim != 2 or a.size == 0:
        raise InvariantViolation(f"{name}: expected non-empty (H, W) array")
    if not np.isin(a, (0.0, 0.5, 1.0)).all():
        raise InvariantViolation(f"{name}: values other than 0, 0.5, 1")
    return np.ascontiguousarray(a)


def _snap_trimap(values, targets, name):
    """Snap values near the disk sentinels onto {0, 0.5, 1}."""
    out = np.full(values.shape, np.nan)
    for target, level in zip(targets, (0.0, 0.5, 1.0)):
        out[np.abs(values - target) <= TRIMAP_SNAP_TOL] = level
    if np.isnan(out).any():
        bad = values[np.isnan(out)]
        raise InvariantViolation(
            f"{name}: {bad.size} trimap pixels outside snap tolerance "
            f"(e.g. {bad.flat[0]:.6g})"
        )
    return out


# ---------------------------------------------------------------------
# Grayscale conversion
# ---------------------------------------------------------------------

def to_grayscale(img):
    """Collapse an RGB raster to one channel with BT.601 luma weights.

    Single-channel input is returned unchanged. The result is pinned to
    the per-pixel [min(R,G,B), max(R,G,B)] interval so that gray pixels
    stay fixed points despite the weights not summing to 1.0 in float64.
    """
    img = check_image(img)
    if img.ndim == 2:
        return img
    luma = 0.299 * img[:, :, 0] + 0.587 * img[:, :, 1] + 0.114 * img[:, :, 2]
    lo = img.min(axis=2)
    hi = img.max(axis=2)
    return np.minimum(np.maximum(luma, lo), hi)


# ---------------------------------------------------------------------
# WFR: exact little-endian float32 raster file
# ---------------------------------------------------------------------
# Layout: magic "WFR1", u32 width, u32 height, u32 channels, then
# width*height*channels float32, row-major, channel-interleaved.

def write_wfr(path, arr):
    """Write a float raster (or mask/trimap) as a WFR file."""
    a = np.asarray(arr, dtype=np.float64)
    if a.ndim == 2:
        h, w, c = a.shape[0], a.shape[1], 1
    elif a.ndim == 3 and a.shape[2] in (1, 3):
        h, w, c = a.shape
    else:
        raise InvariantViolation(f"cannot write shape {a.shape} as WFR")
    payload = np.ascontiguousarray(a, dtype="<f4").tobytes()
    with open(path, "wb") as fh:
        fh.write(WFR_MAGIC)
        fh.write(struct.pack("<III", w, h, c))
        fh.write(payload)


def read_wfr(path):
    """Read a WFR file; returns a float64 array (H, W) or (H, W, C)."""
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise UnreadableFile(f"cannot read {path}: {exc}") from exc
    if len(raw) < 16 or raw[:4] != WFR_MAGIC:
        raise MalformedHeader(f"{path}: not a WFR file")
    w, h, c = struct.unpack("<III", raw[4:16])
    if c not in (1, 3) or w == 0 or h == 0:
        raise MalformedHeader(f"{path}: bad dimensions {w}x{h}x{c}")
    expected = 16 + 4 * w * h * c
    if len(raw) != expected:
        raise MalformedHeader(
            f"{path}: declared {w}x{h}x{c} needs {expected} bytes, file has {len(raw)}"
        )
    data = np.frombuffer(raw, dtype="<f4", count=w * h * c, offset=16)
    data = data.astype(np.float64).reshape((h, w) if c == 1 else (h, w, c))
    return data


# ---------------------------------------------------------------------
# Load / save front door
# ---------------------------------------------------------------------

_PIL_GRAY_MODES = {"1", "L"}


def _load_pixels(path):
    """Decode PNG/PGM/WFR into a float64 array scaled to [0, 1]-ish."""
    try:
        with open(path, "rb") as fh:
            head = fh.read(4)
    except OSError as exc:
        raise UnreadableFile(f"cannot read {path}: {exc}") from exc
    if head == WFR_MAGIC:
        return read_wfr(path)
    if not (head.startswith(b"\x89PNG") or head[:2] in (b"P5", b"P2")):
        raise UnreadableFile(f"{path}: not PNG, PGM, or WFR")
    try:
        with Image.open(path) as im:
            im.load()
            if im.mode == "P":
                im = im.convert("RGB")
            if im.mode == "1":
                im = im.convert("L")
            if im.mode not in ("L", "RGB"):
                raise UnreadableFile(f"{path}: unsupported pixel mode {im.mode}")
            arr = np.asarray(im, dtype=np.float64) / 255.0
    except UnidentifiedImageError as exc:
        raise MalformedHeader(f"{path}: {exc}") from exc
    except OSError as exc:
        raise MalformedHeader(f"{path}: truncated or corrupt ({exc})") from exc
    return arr


def load_raster(path, kind):
    """Load a raster file and validate it for its role.

    Parameters
    ----------
    path : str or Path
        PNG, PGM, or WFR file.
    kind : {"image", "prob", "mask", "trimap"}
        Which invariants to enforce. 8-bit pixel data is scaled by 1/255;
        trimap values are snapped onto {0, 0.5, 1} with a +-2/255
        tolerance around the 8-bit sentinels {0, 128, 255}.

    Returns
    -------
    ndarray
        float64 raster, or uint8 for ``kind="mask"``. Read-only.
    """
    if kind not in ("image", "prob", "mask", "trimap"):
        raise ValueError(f"unknown raster kind {kind!r}")
    arr = _load_pixels(path)
    if kind in ("mask", "trimap") and arr.ndim == 3:
        raise InvariantViolation(f"{path}: 3-channel input cannot be a {kind}")

    if kind == "image":
        out = check_image(arr, name=str(path))
    elif kind == "prob":
        out = check_prob_map(arr, name=str(path))
    elif kind == "mask":
        ok = np.isin(arr, (0.0, 1.0))
        if not ok.all():
            raise InvariantViolation(
                f"{path}: mask pixels must be 0 or 255 on disk (0.0/1.0 in WFR)"
            )
        out = arr.astype(np.uint8)
    else:
        out = _snap_trimap(arr, targets=(0.0, 128.0 / 255.0, 1.0), name=str(path))
    out.flags.writeable = False
    return out


def save_raster(path, arr):
    """Write a raster; format chosen by suffix (.wfr exact, .png/.pgm 8-bit).

    8-bit output stores round(v * 255); binary masks therefore hit exactly
    {0, 255} and trimaps {0, 128, 255}.
    """
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix == ".wfr":
        write_wfr(path, arr)
        return
    if suffix not in (".png", ".pgm"):
        raise ValueError(f"unsupported output format {suffix!r}")
    a = np.asarray(arr, dtype=np.float64)
    if a.ndim not in (2, 3):
        raise InvariantViolation(f"cannot write shape {a.shape} as {suffix}")
    q = np.clip(np.rint(a * 255.0), 0, 255).astype(np.uint8)
    if q.ndim == 3 and q.shape[2] == 1:
        q = q[:, :, 0]
    if suffix == ".pgm" and q.ndim == 3:
        raise InvariantViolation("PGM holds a single channel")
    Image.fromarray(q).save(path)
