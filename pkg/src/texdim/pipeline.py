"""Dataset-level glue: window features, raw-vector clouds and intrinsic-dimension runs."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from texdim.errors import DomainError
from texdim.idim import IdimConfig, IdimEstimate, generate_embedded_cube, mle_intrinsic_dimension
from texdim.io import METADATA_COLUMNS, IngestResult, extract_windows
from texdim.texture import (
    STANDARD_OFFSETS,
    GlcmOffset,
    aggregate,
    feature_names,
    haralick_for_offsets,
)

FLAG_COLUMNS = ("flag_correlation_degenerate", "flag_info_correlation_1_degenerate")


@dataclass(frozen=True)
class FeatureConfig:
    window: int = 28
    stride: int = 1
    kappa: int = 256
    offsets: tuple[GlcmOffset, ...] = STANDARD_OFFSETS
    agg: str = "avg"


def parse_offsets(text: str) -> tuple[GlcmOffset, ...]:
    """``"0,1;1,0"`` -> offsets; a trailing ``s`` (``"0,1s"``) marks a symmetric offset."""
    out = []
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        symmetric = part.endswith("s")
        part = part.rstrip("s")
        try:
            dr, dc = (int(v) for v in part.split(","))
        except ValueError as exc:
            raise DomainError(f"bad offset {part!r}; expected 'dr,dc'") from exc
        out.append(GlcmOffset(dr, dc, symmetric))
    if not out:
        raise DomainError("no offsets given")
    return tuple(out)


def format_offsets(offsets) -> str:
    return ";".join(f"{o.dr},{o.dc}{'s' if o.symmetric else ''}" for o in offsets)


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("TEXDIM_THREADS", "1")))
    except ValueError:
        return 1


def _ordered_map(fn, items):
    workers = _workers()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def feature_columns(cfg: FeatureConfig) -> list[str]:
    return [*METADATA_COLUMNS, *feature_names(len(cfg.offsets), cfg.agg), *FLAG_COLUMNS]


def feature_rows(ingest: IngestResult, dataset: str, cfg: FeatureConfig) -> list[dict]:
    """One row per window: metadata, features, and degeneracy flag counts."""
    names = feature_names(len(cfg.offsets), cfg.agg)

    def one_image(item):
        image_id, img = item
        rows = []
        windows = extract_windows(img, cfg.window, cfg.stride)
        for (r, c), patch in zip(windows.origins, windows.patches):
            vecs = haralick_for_offsets(patch, cfg.offsets)
            values = aggregate(vecs, cfg.agg)
            row = {"dataset": dataset, "image": image_id, "row": r, "col": c}
            row.update({name: float(v) for name, v in zip(names, values)})
            row[FLAG_COLUMNS[0]] = sum(v.correlation_degenerate for v in vecs)
            row[FLAG_COLUMNS[1]] = sum(v.info_correlation_1_degenerate for v in vecs)
            rows.append(row)
        return rows

    return [row for rows in _ordered_map(one_image, ingest.images) for row in rows]


def feature_matrix(rows: list[dict], cfg: FeatureConfig) -> np.ndarray:
    names = feature_names(len(cfg.offsets), cfg.agg)
    return np.array([[row[n] for n in names] for row in rows], dtype=float)


def raw_window_vectors(ingest: IngestResult, cfg: FeatureConfig) -> np.ndarray:
    vecs = []
    for _, img in ingest.images:
        for patch in extract_windows(img, cfg.window, cfg.stride).patches:
            vecs.append(patch.pixels.ravel().astype(float))
    if not vecs:
        raise DomainError("no windows extracted from the input")
    return np.stack(vecs)


def subsample(X: np.ndarray, limit: int | None, seed: int) -> np.ndarray:
    if limit is None or X.shape[0] <= limit:
        return X
    idx = np.sort(np.random.default_rng(seed).choice(X.shape[0], size=limit, replace=False))
    return X[idx]


def parse_fixture(text: str) -> tuple[int, int, int]:
    """``"cube:P:D:N"`` -> (intrinsic p, ambient D, N)."""
    parts = text.split(":")
    if len(parts) != 4 or parts[0] != "cube":
        raise DomainError(f"bad fixture {text!r}; expected 'cube:P:D:N'")
    p, d, n = (int(v) for v in parts[1:])
    return p, d, n


def fixture_estimate(p: int, d: int, n: int, config: IdimConfig, seed: int) -> IdimEstimate:
    return mle_intrinsic_dimension(generate_embedded_cube(n, p, d, seed=seed), config)
