"""HoG view descriptors and per-part light-field descriptors.

Each silhouette view yields a 2610-vector (9 orientation bins over a 17x17
mid grid plus a 1x1 low grid); the 20 views concatenate to the 52200-vector
part descriptor.  Shape distance is plain L2 between these vectors, and an
absent part is the all-zero descriptor (the HoG of an empty image).
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass

import numpy as np

from .errors import ArityError, GridError
from .rasterizer import N_VIEWS, SilhouetteImage

VIEW_LENGTH = 2610
FULL_LENGTH = N_VIEWS * VIEW_LENGTH  # 52200


@dataclass(frozen=True)
class HogConfig:
    """HoG layout; defaults give the 2610-per-view two-level descriptor."""

    orientation_bins: int = 9
    mid_grid: tuple = (17, 17)
    low_grid: tuple = (1, 1)
    high_grid: tuple | None = None  # (34, 34) for the three-level variant
    clip: float = 0.2
    eps: float = 1e-6

    @classmethod
    def three_level(cls) -> "HogConfig":
        """Full HoG pyramid variant with an extra high-frequency level."""
        return cls(high_grid=(34, 34))

    @property
    def grids(self) -> tuple:
        levels = [] if self.high_grid is None else [self.high_grid]
        return tuple(levels + [self.mid_grid, self.low_grid])

    @property
    def view_length(self) -> int:
        return self.orientation_bins * sum(gh * gw for gh, gw in self.grids)

    @property
    def full_length(self) -> int:
        return N_VIEWS * self.view_length

    def fingerprint(self) -> str:
        return (
            f"hog:bins={self.orientation_bins},grids={self.grids},"
            f"clip={self.clip},eps={self.eps}"
        )


@dataclass(frozen=True)
class ViewDescriptor:
    values: np.ndarray

    def __post_init__(self):
        v = np.ascontiguousarray(np.asarray(self.values, dtype=np.float64).ravel())
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        assert (v >= 0).all()


@dataclass(frozen=True)
class LightFieldDescriptor:
    values: np.ndarray

    def __post_init__(self):
        v = np.ascontiguousarray(np.asarray(self.values, dtype=np.float64).ravel())
        v.setflags(write=False)
        object.__setattr__(self, "values", v)


def _gradient_votes(bits: np.ndarray, bins: int):
    """Per-pixel magnitude-weighted orientation votes.

    Centered-difference gradients; unsigned orientation over [0, 180) split
    linearly between the two nearest bin centers (centers at b*180/bins,
    circular).  Returns (lo_bin, hi_bin, lo_weight, hi_weight) flattened.
    """
    gy, gx = np.gradient(bits.astype(np.float64))
    mag = np.hypot(gx, gy).ravel()
    ori = np.degrees(np.arctan2(gy, gx)).ravel() % 180.0
    pos = ori / (180.0 / bins)
    lo = np.floor(pos).astype(np.int64) % bins
    frac = pos - np.floor(pos)
    return lo, (lo + 1) % bins, mag * (1.0 - frac), mag * frac


def _accumulate_cells(shape, grid, bins, votes, clip, eps) -> np.ndarray:
    h, w = shape
    gh, gw = grid
    lo, hi, wlo, whi = votes
    ch, cw = h // gh, w // gw
    rows = np.minimum(np.arange(h) // ch, gh - 1)
    cols = np.minimum(np.arange(w) // cw, gw - 1)
    cell = (rows[:, None] * gw + cols[None, :]).ravel()

    n = gh * gw * bins
    hist = np.bincount(cell * bins + lo, weights=wlo, minlength=n)
    hist += np.bincount(cell * bins + hi, weights=whi, minlength=n)
    hist = hist.reshape(gh * gw, bins)

    norms = np.sqrt((hist * hist).sum(axis=1) + eps * eps)
    hist = hist / norms[:, None]
    np.minimum(hist, clip, out=hist)
    norms = np.sqrt((hist * hist).sum(axis=1) + eps * eps)
    hist /= norms[:, None]
    return hist.ravel()


def hog_cells(
    img: SilhouetteImage, grid: tuple, bins: int, clip: float = 0.2, eps: float = 1e-6
) -> np.ndarray:
    """Per-cell orientation histograms, concatenated row-major.

    Each cell is L2-normalized, clipped and renormalized (Dalal-Triggs).
    Cell boundaries use floor division; the last row/column of cells absorbs
    any remainder.
    """
    gh, gw = grid
    h, w = img.bits.shape
    if gh > h or gw > w:
        raise GridError(f"grid {grid} larger than image {(h, w)}")
    votes = _gradient_votes(img.bits, bins)
    return _accumulate_cells((h, w), grid, bins, votes, clip, eps)


def view_descriptor(img: SilhouetteImage, cfg: HogConfig = HogConfig()) -> ViewDescriptor:
    """HoG pyramid levels for one view, coarse levels last."""
    shape = img.bits.shape
    for gh, gw in cfg.grids:
        if gh > shape[0] or gw > shape[1]:
            raise GridError(f"grid {(gh, gw)} larger than image {shape}")
    if not img.bits.any():
        # no gradients anywhere: the descriptor of an empty image is zero
        return ViewDescriptor(np.zeros(cfg.view_length))
    votes = _gradient_votes(img.bits, cfg.orientation_bins)
    parts = [
        _accumulate_cells(shape, grid, cfg.orientation_bins, votes, cfg.clip, cfg.eps)
        for grid in cfg.grids
    ]
    return ViewDescriptor(np.concatenate(parts))


def part_descriptor(
    silhouettes: list, cfg: HogConfig = HogConfig()
) -> LightFieldDescriptor:
    """Concatenate the 20 per-view descriptors in viewpoint order."""
    if len(silhouettes) != N_VIEWS:
        raise ArityError(f"expected {N_VIEWS} views, got {len(silhouettes)}")
    return LightFieldDescriptor(
        np.concatenate([view_descriptor(s, cfg).values for s in silhouettes])
    )


def shape_distance(a, b) -> float:
    """L2 distance between two light-field descriptors."""
    av = a.values if isinstance(a, LightFieldDescriptor) else np.asarray(a)
    bv = b.values if isinstance(b, LightFieldDescriptor) else np.asarray(b)
    return float(np.linalg.norm(av - bv))


MAGIC = b"LFD1"


def save_descriptors(vectors: list, path) -> None:
    """Binary descriptor file: magic, u32 part count, per part u32 len + f32."""
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", len(vectors)))
        for v in vectors:
            arr = np.asarray(
                v.values if isinstance(v, LightFieldDescriptor) else v,
                dtype=np.float32,
            )
            fh.write(struct.pack("<I", arr.size))
            fh.write(arr.astype("<f4").tobytes())


def load_descriptors(path) -> list:
    with open(path, "rb") as fh:
        if fh.read(4) != MAGIC:
            raise ValueError(f"{path}: not a descriptor file")
        (count,) = struct.unpack("<I", fh.read(4))
        out = []
        for _ in range(count):
            (n,) = struct.unpack("<I", fh.read(4))
            out.append(np.frombuffer(fh.read(4 * n), dtype="<f4").astype(np.float64))
    return out


def save_descriptors_json(named: dict, path) -> None:
    """JSON debug form: {part: [values...]}."""
    with open(path, "w") as fh:
        json.dump(
            {
                k: np.asarray(
                    v.values if isinstance(v, LightFieldDescriptor) else v
                ).tolist()
                for k, v in named.items()
            },
            fh,
        )
