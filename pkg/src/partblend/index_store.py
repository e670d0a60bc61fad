"""Immutable shape index: build pipeline, binary persistence, external embeddings.

File layout (little-endian): magic "PMIX", u32 version, then length-prefixed
blocks each followed by its CRC32.  Block order: config fingerprint, shape
table, then per part a descriptor block (f32) and a manifold block (f64).
Bit-exact round trips are part of the contract, hence binary rather than JSON.
"""

from __future__ import annotations

import struct
import zlib
from dataclasses import dataclass, field

import numpy as np

from . import geometry, manifold, rasterizer
from .descriptor import HogConfig, part_descriptor
from .errors import (
    ConfigError,
    CorruptionError,
    DimensionError,
    DuplicateIdError,
    SizeError,
    VersionError,
)
from .manifold import DistanceMatrix, PartManifold, SammonConfig

MAGIC = b"PMIX"
VERSION = 1


@dataclass(frozen=True)
class IndexConfig:
    resolution: int = rasterizer.DEFAULT_RESOLUTION
    hog: HogConfig = field(default_factory=HogConfig)
    sammon: SammonConfig = field(default_factory=lambda: SammonConfig(dim=16))

    def fingerprint(self) -> str:
        return (
            f"pmix/v{VERSION};res={self.resolution};"
            f"{self.hog.fingerprint()};{self.sammon.fingerprint()}"
        )


@dataclass(frozen=True)
class ShapeRecord:
    id: int
    name: str
    source_path: str = ""


@dataclass(frozen=True)
class ShapeIndex:
    label_set: tuple
    shapes: tuple  # ShapeRecord
    descriptors: dict  # part -> (n, L) float32 array
    manifolds: dict  # part -> PartManifold
    absent_coords: dict  # part -> (dim,) float64 array
    fingerprint: str

    @property
    def n_shapes(self) -> int:
        return len(self.shapes)

    def shape_by_name(self, name: str):
        for s in self.shapes:
            if s.name == name:
                return s
        return None


@dataclass(frozen=True)
class ExternalEmbedding:
    id: str
    parts: dict  # part -> coordinate vector
    note: str = ""


class ExternalTable:
    """Session-scoped table of ingested external embeddings."""

    def __init__(self, index: ShapeIndex):
        self._index = index
        self._records: dict[str, ExternalEmbedding] = {}

    def register(self, rec: ExternalEmbedding):
        if rec.id in self._records:
            raise DuplicateIdError(f"external id {rec.id!r} already registered")
        parts = {}
        for part, coords in rec.parts.items():
            if part not in self._index.label_set:
                raise DimensionError(f"unknown part {part!r}")
            v = np.asarray(coords, dtype=np.float64).ravel()
            dim = self._index.manifolds[part].dim
            if v.size != dim:
                raise DimensionError(
                    f"part {part!r}: got {v.size} coordinates, manifold dim is {dim}"
                )
            parts[part] = v
        self._records[rec.id] = ExternalEmbedding(rec.id, parts, rec.note)

    def get(self, ext_id: str):
        return self._records.get(ext_id)

    def ids(self):
        return list(self._records)


def compute_shape_descriptors(mesh, cfg: IndexConfig, viewpoints=None) -> dict:
    """normalize -> split -> render 20 views per part -> HoG descriptors."""
    normalized, _tf = geometry.normalize(mesh)
    parts = geometry.split_parts(normalized)
    images = rasterizer.render_all(parts, cfg.resolution, viewpoints)
    return {
        label: part_descriptor(views, cfg.hog).values
        for label, views in images.items()
    }


def build_index(corpus, cfg: IndexConfig = IndexConfig(), names=None, paths=None) -> ShapeIndex:
    """Build the full index over a corpus of PartLabeledMesh.

    Deterministic for a fixed corpus order and configuration.
    """
    corpus = list(corpus)
    if not corpus:
        raise SizeError("empty corpus")
    label_set = corpus[0].label_set
    if any(m.label_set != label_set for m in corpus):
        raise ConfigError("inconsistent label sets across corpus")
    names = names or [f"shape_{i:04d}" for i in range(len(corpus))]
    paths = paths or [""] * len(corpus)
    viewpoints = rasterizer.dodecahedron_viewpoints()

    per_part = {label: [] for label in label_set}
    for mesh in corpus:
        descs = compute_shape_descriptors(mesh, cfg, viewpoints)
        for label in label_set:
            per_part[label].append(descs[label])

    descriptors = {}
    manifolds = {}
    absent = {}
    for label in label_set:
        X = np.stack(per_part[label])
        descriptors[label] = X.astype(np.float32)
        D = manifold.build_distance_matrix(per_part[label])
        M = manifold.build_manifold(D, cfg.sammon, part=label)
        manifolds[label] = M
        absent[label] = _absent_coords(M, per_part[label], cfg.sammon)

    shapes = tuple(
        ShapeRecord(i, names[i], paths[i]) for i in range(len(corpus))
    )
    return ShapeIndex(
        label_set=label_set,
        shapes=shapes,
        descriptors=descriptors,
        manifolds=manifolds,
        absent_coords=absent,
        fingerprint=cfg.fingerprint(),
    )


def _absent_coords(M: PartManifold, descs, cfg: SammonConfig) -> np.ndarray:
    """Coordinates representing a missing part (all-zero descriptor)."""
    norms = np.array([float(np.linalg.norm(d)) for d in descs])
    zero = np.where(norms == 0.0)[0]
    if zero.size:
        return M.coords[zero[0]].copy()
    return manifold.out_of_sample_embed(M, norms, cfg)


# --- persistence -----------------------------------------------------------


def _pack_str(s: str) -> bytes:
    b = s.encode("utf-8")
    return struct.pack("<I", len(b)) + b


class _Reader:
    def __init__(self, data: bytes, path: str):
        self.data = data
        self.off = 0
        self.path = path

    def take(self, n: int) -> bytes:
        if self.off + n > len(self.data):
            raise CorruptionError(f"{self.path}: truncated file")
        out = self.data[self.off : self.off + n]
        self.off += n
        return out

    def u32(self) -> int:
        return struct.unpack("<I", self.take(4))[0]

    def block(self) -> bytes:
        n = self.u32()
        payload = self.take(n)
        crc = self.u32()
        if zlib.crc32(payload) != crc:
            raise CorruptionError(f"{self.path}: block checksum mismatch")
        return payload


class _BlockReader:
    def __init__(self, payload: bytes, path: str):
        self.r = _Reader(payload, path)

    def u32(self):
        return self.r.u32()

    def f64(self):
        return struct.unpack("<d", self.r.take(8))[0]

    def string(self):
        return self.r.take(self.r.u32()).decode("utf-8")

    def array(self, count, dtype):
        item = np.dtype(dtype).itemsize
        return np.frombuffer(self.r.take(count * item), dtype=dtype).copy()


def _write_block(fh, payload: bytes):
    fh.write(struct.pack("<I", len(payload)))
    fh.write(payload)
    fh.write(struct.pack("<I", zlib.crc32(payload)))


def save_index(index: ShapeIndex, path) -> None:
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", VERSION))
        _write_block(fh, _pack_str(index.fingerprint))

        shape_block = struct.pack("<I", len(index.label_set))
        for label in index.label_set:
            shape_block += _pack_str(label)
        shape_block += struct.pack("<I", index.n_shapes)
        for s in index.shapes:
            shape_block += struct.pack("<I", s.id) + _pack_str(s.name) + _pack_str(
                s.source_path
            )
        _write_block(fh, shape_block)

        for label in index.label_set:
            X = np.ascontiguousarray(index.descriptors[label], dtype="<f4")
            _write_block(
                fh,
                struct.pack("<II", X.shape[0], X.shape[1]) + X.tobytes(),
            )
            M = index.manifolds[label]
            payload = struct.pack("<II", M.n, M.dim)
            payload += struct.pack("<dd", M.scale, M.stress)
            payload += np.ascontiguousarray(M.coords, dtype="<f8").tobytes()
            payload += struct.pack("<I", len(M.duplicate_map))
            for i in sorted(M.duplicate_map):
                payload += struct.pack("<II", i, M.duplicate_map[i])
            payload += np.ascontiguousarray(
                index.absent_coords[label], dtype="<f8"
            ).tobytes()
            _write_block(fh, payload)


def load_index(path, expected_fingerprint: str | None = None) -> ShapeIndex:
    """Load and validate an index file.

    Raises VersionError / CorruptionError on bad files, ConfigError when
    `expected_fingerprint` is given and does not match.
    """
    with open(path, "rb") as fh:
        data = fh.read()
    r = _Reader(data, str(path))
    if r.take(4) != MAGIC:
        raise CorruptionError(f"{path}: bad magic")
    version = r.u32()
    if version != VERSION:
        raise VersionError(f"{path}: unsupported version {version}")

    cfg_b = _BlockReader(r.block(), str(path))
    fingerprint = cfg_b.string()
    if expected_fingerprint is not None and fingerprint != expected_fingerprint:
        raise ConfigError(
            f"{path}: index fingerprint {fingerprint!r} does not match "
            f"expected {expected_fingerprint!r}"
        )

    sb = _BlockReader(r.block(), str(path))
    label_set = tuple(sb.string() for _ in range(sb.u32()))
    shapes = []
    for _ in range(sb.u32()):
        sid = sb.u32()
        name = sb.string()
        src = sb.string()
        shapes.append(ShapeRecord(sid, name, src))

    descriptors = {}
    manifolds = {}
    absent = {}
    for label in label_set:
        db = _BlockReader(r.block(), str(path))
        n, L = db.u32(), db.u32()
        descriptors[label] = db.array(n * L, "<f4").reshape(n, L)
        mb = _BlockReader(r.block(), str(path))
        n, dim = mb.u32(), mb.u32()
        scale = mb.f64()
        stress = mb.f64()
        coords = mb.array(n * dim, "<f8").reshape(n, dim)
        dup = {}
        for _ in range(mb.u32()):
            i = mb.u32()
            dup[i] = mb.u32()
        absent[label] = mb.array(dim, "<f8")
        manifolds[label] = PartManifold(label, dim, coords, scale, dup, stress)
        if n != len(shapes):
            raise CorruptionError(f"{path}: manifold rows != shape count")

    if r.off != len(data):
        raise CorruptionError(f"{path}: trailing bytes")
    return ShapeIndex(
        label_set=label_set,
        shapes=tuple(shapes),
        descriptors=descriptors,
        manifolds=manifolds,
        absent_coords=absent,
        fingerprint=fingerprint,
    )


def ingest_external(index: ShapeIndex, path, table: ExternalTable | None = None) -> ExternalTable:
    """Load external embedding records (JSON) into a session table.

    The index itself is never mutated; records become addressable as pick
    sources "ext:<id>".
    """
    import json

    table = table if table is not None else ExternalTable(index)
    with open(path) as fh:
        records = json.load(fh)
    for rec in records:
        table.register(
            ExternalEmbedding(rec["id"], rec["parts"], rec.get("note", ""))
        )
    return table
