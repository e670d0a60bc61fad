"""Part-labeled triangle meshes: loading, validation, normalization, splitting.

All vertex data is float64, all index data int64.  Meshes are treated as
immutable after construction; the arrays are flagged read-only so accidental
mutation fails loudly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateError,
    EmptyMeshError,
    LabelError,
    ParseError,
)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Mesh:
    """Triangle mesh: (n, 3) vertices and (m, 3) vertex-index triples."""

    vertices: np.ndarray
    triangles: np.ndarray

    def __post_init__(self):
        v = _frozen(np.asarray(self.vertices, dtype=np.float64).reshape(-1, 3))
        t = _frozen(np.asarray(self.triangles, dtype=np.int64).reshape(-1, 3))
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "triangles", t)
        if t.size:
            if t.min() < 0 or t.max() >= len(v):
                raise ParseError("triangle index out of range")
            if (
                (t[:, 0] == t[:, 1]) | (t[:, 1] == t[:, 2]) | (t[:, 0] == t[:, 2])
            ).any():
                raise ParseError("triangle with repeated vertex index")

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    def is_empty(self) -> bool:
        return len(self.triangles) == 0


EMPTY_MESH = Mesh(np.zeros((0, 3)), np.zeros((0, 3), dtype=np.int64))

#: Part taxonomy used for chairs throughout; configurable per corpus.
CHAIR_LABELS = ("backrest", "seat", "armrests", "legs")


@dataclass(frozen=True)
class PartLabeledMesh:
    """A mesh plus one part-label index per face.

    ``face_labels[i]`` indexes into ``label_set`` for triangle ``i``.
    """

    mesh: Mesh
    face_labels: np.ndarray
    label_set: tuple = field(default=CHAIR_LABELS)

    def __post_init__(self):
        fl = _frozen(np.asarray(self.face_labels, dtype=np.int64).ravel())
        object.__setattr__(self, "face_labels", fl)
        object.__setattr__(self, "label_set", tuple(self.label_set))
        if len(fl) != self.mesh.n_triangles:
            raise LabelError(
                f"{len(fl)} face labels for {self.mesh.n_triangles} triangles"
            )
        if fl.size and (fl.min() < 0 or fl.max() >= len(self.label_set)):
            raise LabelError("face label outside label_set")


@dataclass(frozen=True)
class NormalizationTransform:
    """Similarity transform ``v -> (v + translation) * scale``.

    Maps the mesh's bounding-sphere center to the origin and its radius to 1.
    """

    translation: np.ndarray
    scale: float

    def __post_init__(self):
        t = _frozen(np.asarray(self.translation, dtype=np.float64).reshape(3))
        object.__setattr__(self, "translation", t)
        if not self.scale > 0:
            raise DegenerateError("non-positive normalization scale")

    def apply_points(self, points: np.ndarray) -> np.ndarray:
        return (np.asarray(points, dtype=np.float64) + self.translation) * self.scale


def load_mesh(path, fmt: str | None = None, label_set=None) -> PartLabeledMesh:
    """Load a part-labeled mesh from OBJ (group labels) or internal JSON.

    Args:
        path: input file.
        fmt: "obj" or "json"; inferred from the extension when None.
        label_set: optional full ordered label set; labels found in the file
            must be a subset.  When None, the label set is the labels found,
            in order of first appearance.

    Raises:
        ParseError, LabelError, EmptyMeshError.
    """
    path = str(path)
    if fmt is None:
        fmt = "json" if path.endswith(".json") else "obj"
    if fmt == "obj":
        return _load_obj(path, label_set)
    if fmt == "json":
        return _load_json(path, label_set)
    raise ParseError(f"unknown mesh format {fmt!r}")


def _finish_labels(names_per_face, found_order, label_set):
    if label_set is None:
        label_set = tuple(found_order)
    else:
        label_set = tuple(label_set)
        unknown = [n for n in found_order if n not in label_set]
        if unknown:
            raise LabelError(f"unknown part labels {unknown}")
    lut = {name: i for i, name in enumerate(label_set)}
    return np.array([lut[n] for n in names_per_face], dtype=np.int64), label_set


def _load_obj(path: str, label_set) -> PartLabeledMesh:
    vertices = []
    faces = []
    face_names = []
    found_order = []
    current = None
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ParseError(str(exc)) from exc
    for lineno, line in enumerate(lines, 1):
        parts = line.split("#", 1)[0].split()
        if not parts:
            continue
        tag = parts[0]
        if tag == "v":
            if len(parts) < 4:
                raise ParseError(f"{path}:{lineno}: short vertex record")
            try:
                vertices.append([float(x) for x in parts[1:4]])
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: {exc}") from exc
        elif tag == "g":
            current = parts[1] if len(parts) > 1 else None
            if current is not None and current not in found_order:
                found_order.append(current)
        elif tag == "f":
            if current is None:
                raise LabelError(f"{path}:{lineno}: face outside any group")
            try:
                idx = [int(p.split("/")[0]) for p in parts[1:]]
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: {exc}") from exc
            if len(idx) < 3:
                raise ParseError(f"{path}:{lineno}: face with <3 vertices")
            if any(i <= 0 for i in idx):
                raise ParseError(f"{path}:{lineno}: only 1-based positive indices supported")
            idx = [i - 1 for i in idx]
            # deterministic fan triangulation from the first vertex
            for a, b in zip(idx[1:-1], idx[2:]):
                faces.append([idx[0], a, b])
                face_names.append(current)
    if not faces:
        raise EmptyMeshError(f"{path}: no faces")
    face_labels, label_set = _finish_labels(face_names, found_order, label_set)
    return PartLabeledMesh(Mesh(np.array(vertices), np.array(faces)), face_labels, label_set)


def _load_json(path: str, label_set) -> PartLabeledMesh:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"{path}: {exc}") from exc
    try:
        verts = np.asarray(doc["vertices"], dtype=np.float64)
        tris = np.asarray(doc["triangles"], dtype=np.int64)
        fl = np.asarray(doc["face_labels"], dtype=np.int64)
        labels = tuple(doc["label_set"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{path}: bad mesh document: {exc}") from exc
    if len(tris) == 0:
        raise EmptyMeshError(f"{path}: no faces")
    if label_set is not None:
        label_set = tuple(label_set)
        if any(n not in label_set for n in labels):
            raise LabelError(f"unknown part labels in {path}")
        remap = np.array([label_set.index(n) for n in labels], dtype=np.int64)
        fl = remap[fl]
        labels = label_set
    return PartLabeledMesh(Mesh(verts, tris), fl, labels)


def save_mesh_json(m: PartLabeledMesh, path) -> None:
    """Write the internal JSON mesh format (lossless for float64 via repr)."""
    doc = {
        "vertices": [[float(x) for x in v] for v in m.mesh.vertices],
        "triangles": [[int(i) for i in t] for t in m.mesh.triangles],
        "face_labels": [int(i) for i in m.face_labels],
        "label_set": list(m.label_set),
    }
    with open(path, "w") as fh:
        json.dump(doc, fh)


def bounding_sphere(vertices: np.ndarray):
    """Deterministic enclosing sphere: box center, exact max vertex distance.

    Center is the axis-aligned bounding-box center; radius is re-measured as
    the true maximum vertex distance from it, so the radius-1 contract after
    normalization holds exactly.  Both quantities are similarity-equivariant,
    which makes normalization idempotent and scale-consistent.
    """
    v = np.asarray(vertices, dtype=np.float64)
    if len(v) == 0:
        raise EmptyMeshError("no vertices")
    center = (v.min(axis=0) + v.max(axis=0)) / 2.0
    radius = float(np.sqrt(((v - center) ** 2).sum(axis=1).max()))
    return center, radius


def normalize(m: PartLabeledMesh):
    """Center the whole object at the origin with bounding-sphere radius 1.

    One joint transform over all parts, so relative part placement survives.

    Returns:
        (normalized PartLabeledMesh, NormalizationTransform)
    """
    if m.mesh.is_empty():
        raise EmptyMeshError("cannot normalize an empty mesh")
    center, radius = bounding_sphere(m.mesh.vertices)
    if radius <= 0:
        raise DegenerateError("all vertices coincident")
    tf = NormalizationTransform(-center, 1.0 / radius)
    mesh = Mesh(tf.apply_points(m.mesh.vertices), m.mesh.triangles)
    return PartLabeledMesh(mesh, m.face_labels, m.label_set), tf


def split_parts(m: PartLabeledMesh) -> dict:
    """Split into one Mesh per label; labels with no faces map to an empty Mesh.

    Vertex arrays are compacted per part; the triangle partition is exact.
    """
    out = {}
    for li, name in enumerate(m.label_set):
        tris = m.mesh.triangles[m.face_labels == li]
        if len(tris) == 0:
            out[name] = EMPTY_MESH
            continue
        used, inverse = np.unique(tris.ravel(), return_inverse=True)
        out[name] = Mesh(m.mesh.vertices[used], inverse.reshape(-1, 3))
    return out
