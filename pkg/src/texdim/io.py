"""Image ingestion (PGM, PNG, MNIST IDX), quantization, sliding windows and
CSV point clouds."""

from __future__ import annotations

import csv
import gzip
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from texdim.errors import DomainError
from texdim.texture import GrayImage

IDX_UBYTE_MAGIC = 0x00000803
LUMA = np.array([0.299, 0.587, 0.114])
METADATA_COLUMNS = ("dataset", "image", "row", "col")
IMAGE_SUFFIXES = (".pgm", ".png", ".idx", ".gz", ".ubyte", "-ubyte")


def to_grayscale(arr: np.ndarray) -> np.ndarray:
    """RGB(A) -> luminance, rounded to the nearest integer; 2-D input passes through."""
    arr = np.asarray(arr)
    if arr.ndim == 2:
        return arr
    if arr.ndim == 3 and arr.shape[2] in (3, 4):
        return np.rint(arr[..., :3].astype(float) @ LUMA).astype(np.int64)
    raise DomainError(f"cannot convert array of shape {arr.shape} to grayscale")


def quantize(arr: np.ndarray, maxval: int, kappa: int) -> np.ndarray:
    """Uniformly bin values in [0, maxval] into kappa levels."""
    arr = np.asarray(arr, dtype=np.int64)
    if kappa < 2:
        raise DomainError(f"kappa must be >= 2, got {kappa}")
    if arr.size and (arr.min() < 0 or arr.max() > maxval):
        raise DomainError(f"pixel values outside [0, {maxval}]")
    if maxval + 1 <= kappa:
        return arr
    return arr * kappa // (maxval + 1)


def _pgm_tokens(data: bytes, count: int, pos: int):
    """Read ``count`` whitespace-separated header tokens, skipping # comments."""
    tokens = []
    while len(tokens) < count:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise DomainError("truncated PGM header")
        tokens.append(data[start:pos])
    return tokens, pos


def read_pgm(path) -> tuple[np.ndarray, int]:
    data = Path(path).read_bytes()
    magic = data[:2]
    if magic not in (b"P2", b"P5"):
        raise DomainError(f"{path}: not a P2/P5 PGM file")
    (w, h, maxval), pos = _pgm_tokens(data, 3, 2)
    w, h, maxval = int(w), int(h), int(maxval)
    if not 0 < maxval <= 65535:
        raise DomainError(f"{path}: PGM maxval {maxval} outside 1..65535")
    if magic == b"P5":
        pos += 1  # single whitespace byte after maxval
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        need = w * h * dtype.itemsize
        raster = data[pos : pos + need]
        if len(raster) < need:
            raise DomainError(f"{path}: truncated PGM raster")
        arr = np.frombuffer(raster, dtype=dtype).reshape(h, w)
    else:
        values, _ = _pgm_tokens(data, w * h, pos)
        arr = np.array([int(v) for v in values]).reshape(h, w)
    arr = arr.astype(np.int64)
    if arr.max(initial=0) > maxval:
        raise DomainError(f"{path}: pixel value exceeds maxval {maxval}")
    return arr, maxval


def write_pgm(path, arr: np.ndarray, maxval: int = 255, binary: bool = True):
    arr = np.asarray(arr)
    h, w = arr.shape
    magic = "P5" if binary else "P2"
    header = f"{magic}\n{w} {h}\n{maxval}\n".encode()
    if binary:
        dtype = ">u2" if maxval > 255 else "u1"
        body = arr.astype(dtype).tobytes()
    else:
        body = "\n".join(" ".join(str(int(v)) for v in row) for row in arr).encode() + b"\n"
    Path(path).write_bytes(header + body)


def read_png(path) -> tuple[np.ndarray, int]:
    from PIL import Image

    with Image.open(path) as im:
        if im.mode in ("I;16", "I;16B", "I"):
            return np.asarray(im, dtype=np.int64), 65535
        if im.mode not in ("L", "RGB", "RGBA"):
            im = im.convert("RGBA" if "A" in im.mode else "RGB")
        return to_grayscale(np.asarray(im)), 255


def _open_maybe_gz(path):
    path = Path(path)
    with open(path, "rb") as fh:
        gz = fh.read(2) == b"\x1f\x8b"
    return gzip.open(path, "rb") if gz else open(path, "rb")


def read_idx(path) -> np.ndarray:
    """Unsigned-byte IDX archive (MNIST image layout) -> (count, rows, cols)."""
    with _open_maybe_gz(path) as fh:
        head = fh.read(16)
        if len(head) < 16:
            raise DomainError(f"{path}: truncated IDX header")
        magic, count, rows, cols = struct.unpack(">IIII", head)
        if magic != IDX_UBYTE_MAGIC:
            raise DomainError(f"{path}: IDX magic 0x{magic:08x}, expected 0x{IDX_UBYTE_MAGIC:08x}")
        body = fh.read()
    if len(body) < count * rows * cols:
        raise DomainError(f"{path}: truncated IDX body")
    return np.frombuffer(body[: count * rows * cols], dtype=np.uint8).reshape(count, rows, cols)


def write_idx(path, images: np.ndarray):
    images = np.asarray(images, dtype=np.uint8)
    count, rows, cols = images.shape
    Path(path).write_bytes(struct.pack(">IIII", IDX_UBYTE_MAGIC, count, rows, cols) + images.tobytes())


@dataclass
class IngestResult:
    images: list[tuple[str, GrayImage]] = field(default_factory=list)
    errors: list[tuple[str, str]] = field(default_factory=list)


def _is_image_file(p: Path) -> bool:
    name = p.name.lower()
    return any(name.endswith(s) for s in IMAGE_SUFFIXES)


def _load_one(path: Path, kappa: int):
    name = path.name.lower()
    if name.endswith(".pgm"):
        arr, maxval = read_pgm(path)
        return [(path.name, GrayImage(quantize(arr, maxval, kappa), kappa))]
    if name.endswith(".png"):
        arr, maxval = read_png(path)
        return [(path.name, GrayImage(quantize(arr, maxval, kappa), kappa))]
    stack = read_idx(path)
    return [(f"{path.name}#{i}", GrayImage(quantize(a, 255, kappa), kappa)) for i, a in enumerate(stack)]


def ingest_images(path, kappa: int = 256, strict: bool = False) -> IngestResult:
    """Load every supported image under ``path`` (file or directory, sorted by name).

    Unreadable files are collected in ``errors``; with ``strict`` the first one raises.
    """
    path = Path(path)
    if not path.exists():
        raise DomainError(f"{path}: no such file or directory")
    files = sorted(p for p in path.iterdir() if p.is_file() and _is_image_file(p)) if path.is_dir() else [path]
    result = IngestResult()
    for f in files:
        try:
            result.images.extend(_load_one(f, kappa))
        except (DomainError, OSError, ValueError, struct.error) as exc:
            if strict:
                raise DomainError(f"{f}: {exc}") from exc
            result.errors.append((str(f), str(exc)))
    return result


@dataclass
class PatchSet:
    origins: list[tuple[int, int]]
    patches: list[GrayImage]

    def __len__(self):
        return len(self.patches)


def extract_windows(img: GrayImage, n: int, stride: int = 1) -> PatchSet:
    """All n x n windows on the stride grid, row-major."""
    if stride < 1:
        raise DomainError(f"stride must be >= 1, got {stride}")
    if n < 1 or n > min(img.width, img.height):
        raise DomainError(f"window {n} does not fit a {img.height}x{img.width} image")
    origins, patches = [], []
    for r in range(0, img.height - n + 1, stride):
        for c in range(0, img.width - n + 1, stride):
            origins.append((r, c))
            patches.append(GrayImage(img.pixels[r : r + n, c : c + n], img.levels))
    return PatchSet(origins, patches)


def load_point_cloud_csv(path) -> np.ndarray:
    """One point per row. A header row is detected and, if it names feature-CSV
    metadata or ``flag_`` columns, those columns are skipped."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    rows = [r for r in rows if r]
    if not rows:
        raise DomainError(f"{path}: empty CSV")
    try:
        [float(v) for v in rows[0]]
        header = None
    except ValueError:
        header, rows = rows[0], rows[1:]
    cols = range(len(rows[0])) if rows else []
    if header is not None:
        cols = [i for i, h in enumerate(header) if h not in METADATA_COLUMNS and not h.startswith("flag_")]
    try:
        return np.array([[float(r[i]) for i in cols] for r in rows], dtype=float)
    except (ValueError, IndexError) as exc:
        raise DomainError(f"{path}: malformed point-cloud CSV ({exc})") from exc
