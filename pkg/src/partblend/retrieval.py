"""Blend queries: rank indexed shapes by summed per-part manifold distances.

A query picks coordinates on a subset of the part manifolds (from indexed
shapes, ingested external embeddings, literal vectors, or the reserved
"absent" source) and scores every indexed shape by the weighted sum of
Euclidean distances in normalized manifold coordinates; results come back
ascending by total cost with ties broken by shape id.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionError,
    EmptyIndexError,
    UnknownPartError,
    UnknownSourceError,
)

ABSENT = "absent"


@dataclass(frozen=True)
class PartPick:
    """One (source, part) selection.

    source: int shape id, "shape:<id>", "ext:<id>", "absent", or a literal
    coordinate vector of the part manifold's dimension.
    """

    source: object
    part: str
    weight: float = 1.0

    def __post_init__(self):
        if not self.weight > 0:
            raise ValueError(f"weight must be positive, got {self.weight}")


@dataclass(frozen=True)
class BlendQuery:
    picks: tuple
    k: int = 5

    def __post_init__(self):
        object.__setattr__(self, "picks", tuple(self.picks))
        if not self.picks:
            raise ValueError("query needs at least one pick")
        parts = [p.part for p in self.picks]
        if len(set(parts)) != len(parts):
            raise ValueError(f"duplicate part labels in query: {parts}")
        if self.k < 1:
            raise ValueError("k must be >= 1")


@dataclass(frozen=True)
class RankedResult:
    shape_id: int
    name: str
    total_cost: float
    per_part_costs: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "shape_id": self.shape_id,
            "name": self.name,
            "total_cost": self.total_cost,
            "per_part_costs": dict(self.per_part_costs),
        }


def resolve_pick(index, pick: PartPick, externals=None) -> np.ndarray:
    """Coordinates of a pick on its part's normalized manifold."""
    if pick.part not in index.label_set:
        raise UnknownPartError(f"unknown part {pick.part!r}")
    M = index.manifolds[pick.part]
    src = pick.source
    if isinstance(src, str):
        if src == ABSENT:
            return index.absent_coords[pick.part]
        if src.startswith("shape:"):
            src = int(src.split(":", 1)[1])
        elif src.startswith("ext:"):
            ext_id = src.split(":", 1)[1]
            rec = externals.get(ext_id) if externals is not None else None
            if rec is None:
                raise UnknownSourceError(f"unknown external embedding {ext_id!r}")
            if pick.part not in rec.parts:
                raise UnknownSourceError(
                    f"external embedding {ext_id!r} has no coordinates for "
                    f"part {pick.part!r}"
                )
            return rec.parts[pick.part]
        else:
            raise UnknownSourceError(f"unresolvable source {pick.source!r}")
    if isinstance(src, (int, np.integer)):
        if not 0 <= src < index.n_shapes:
            raise UnknownSourceError(f"unknown shape id {src}")
        return M.coords[src]
    coords = np.asarray(src, dtype=np.float64).ravel()
    if coords.size != M.dim:
        raise DimensionError(
            f"literal pick for part {pick.part!r} has {coords.size} values, "
            f"manifold dim is {M.dim}"
        )
    return coords


def blend_retrieve(index, q: BlendQuery, externals=None) -> list:
    """Exhaustive scan minimizing the summed per-part manifold distances."""
    if index.n_shapes == 0:
        raise EmptyIndexError("index has no shapes")
    n = index.n_shapes
    total = np.zeros(n)
    per_part = {}
    for pick in q.picks:
        b = resolve_pick(index, pick, externals)
        coords = index.manifolds[pick.part].coords
        dists = np.linalg.norm(coords - b, axis=1)
        per_part[pick.part] = dists
        total = total + pick.weight * dists
    order = np.argsort(total, kind="stable")[: q.k]
    return [
        RankedResult(
            shape_id=int(i),
            name=index.shapes[int(i)].name,
            total_cost=float(total[i]),
            per_part_costs={p: float(d[i]) for p, d in per_part.items()},
        )
        for i in order
    ]


def knn_part(index, part: str, coords, k: int) -> list:
    """k nearest indexed shapes on a single part manifold."""
    return blend_retrieve(
        index, BlendQuery(picks=(PartPick(source=np.asarray(coords), part=part),), k=k)
    )


def query_from_json(doc: dict) -> BlendQuery:
    """Parse the shared query JSON: {"picks": [{source, part, weight}], "k": n}."""
    picks = []
    for p in doc["picks"]:
        src = p["source"]
        if isinstance(src, list):
            src = np.asarray(src, dtype=np.float64)
        picks.append(PartPick(source=src, part=p["part"], weight=p.get("weight", 1.0)))
    return BlendQuery(picks=tuple(picks), k=int(doc.get("k", 5)))
