"""Procedural part-labeled chair generation and retrieval evaluation.

Chairs live in a canonical frame chosen so that, for grid corpora sharing one
seat and one back height, the whole-object bounding sphere is bit-identical
across the corpus: the seat spans x, y in [-0.5, 0.5] and always carries the
farthest vertices from the bounding-box center, while legs, backrest and
armrests stay strictly inside that envelope.  Identical joint normalization
is what makes part descriptors exactly shareable across grid cells.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import MissingGroundTruthError, ParamError
from .geometry import CHAIR_LABELS, Mesh, PartLabeledMesh

LEG_STYLES = ("four_straight", "four_splayed", "sled", "swivel5")
BACK_STYLES = ("solid_panel", "n_bars", "round_top_panel")
SEAT_SHAPES = ("square", "round")
ARM_STYLES = ("none", "box", "loop")

# canonical frame constants (model units)
SEAT_HALF = 0.5
SEAT_Z = 0.0
LEG_TOP = -0.04
LEG_BOTTOM = -0.45
LEG_REACH = 0.36  # max planar half-extent of any leg geometry
BACK_Y0, BACK_Y1 = 0.40, 0.46
BACK_HALF_W = 0.32
BACK_Z0 = 0.04


@dataclass(frozen=True)
class ChairParams:
    leg_style: str = "four_straight"
    leg_thickness: float = 0.05
    back_style: str = "solid_panel"
    back_bars: int = 3
    back_bar_width: float = 0.04
    back_height: float = 0.36
    seat_shape: str = "square"
    seat_thickness: float = 0.08
    armrests: str = "none"
    seed: int = 0

    def validate(self):
        if self.leg_style not in LEG_STYLES:
            raise ParamError(f"unknown leg style {self.leg_style!r}")
        if self.back_style not in BACK_STYLES:
            raise ParamError(f"unknown back style {self.back_style!r}")
        if self.seat_shape not in SEAT_SHAPES:
            raise ParamError(f"unknown seat shape {self.seat_shape!r}")
        if self.armrests not in ARM_STYLES:
            raise ParamError(f"unknown armrest style {self.armrests!r}")
        if not 0.02 <= self.leg_thickness <= 0.08:
            raise ParamError(f"leg_thickness {self.leg_thickness} outside [0.02, 0.08]")
        if not 0.2 <= self.back_height <= 0.38:
            raise ParamError(f"back_height {self.back_height} outside [0.2, 0.38]")
        if not 0.05 <= self.seat_thickness <= 0.12:
            raise ParamError(
                f"seat_thickness {self.seat_thickness} outside [0.05, 0.12]"
            )
        if self.back_style == "n_bars" and not 2 <= self.back_bars <= 6:
            raise ParamError(f"back_bars {self.back_bars} outside 2..6")
        if not 0.02 <= self.back_bar_width <= 0.08:
            raise ParamError(
                f"back_bar_width {self.back_bar_width} outside [0.02, 0.08]"
            )

    def to_dict(self) -> dict:
        return {
            "leg_style": self.leg_style,
            "leg_thickness": self.leg_thickness,
            "back_style": self.back_style,
            "back_bars": self.back_bars,
            "back_bar_width": self.back_bar_width,
            "back_height": self.back_height,
            "seat_shape": self.seat_shape,
            "seat_thickness": self.seat_thickness,
            "armrests": self.armrests,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ChairParams":
        return cls(**d)


class _Builder:
    """Accumulates labeled mesh pieces."""

    def __init__(self, label_set=CHAIR_LABELS):
        self.label_set = tuple(label_set)
        self.vertices = []
        self.triangles = []
        self.labels = []

    def _add(self, verts, tris, label):
        base = len(self.vertices)
        li = self.label_set.index(label)
        self.vertices.extend(verts)
        for t in tris:
            self.triangles.append([base + t[0], base + t[1], base + t[2]])
            self.labels.append(li)

    def add_box(self, center, half, label):
        cx, cy, cz = center
        hx, hy, hz = half
        verts = [
            (cx + sx * hx, cy + sy * hy, cz + sz * hz)
            for sz in (-1, 1)
            for sy in (-1, 1)
            for sx in (-1, 1)
        ]
        self._add(verts, _BOX_TRIS, label)

    def add_frustum(self, bottom_center, bottom_half, top_center, top_half, label):
        """Axis-aligned tapered box (square cross-sections at two heights)."""
        bx, by, bz = bottom_center
        tx, ty, tz = top_center
        verts = [
            (bx + sx * bottom_half, by + sy * bottom_half, bz)
            for sy in (-1, 1)
            for sx in (-1, 1)
        ] + [
            (tx + sx * top_half, ty + sy * top_half, tz)
            for sy in (-1, 1)
            for sx in (-1, 1)
        ]
        self._add(verts, _BOX_TRIS, label)

    def add_oriented_box(self, angle, r0, r1, half_w, z0, z1, label):
        """Box along direction `angle` in the xy-plane from radius r0 to r1."""
        u = np.array([np.cos(angle), np.sin(angle), 0.0])
        v = np.array([-np.sin(angle), np.cos(angle), 0.0])
        verts = []
        for z in (z0, z1):
            for r in (r0, r1):
                for s in (-1, 1):
                    p = u * r + v * (s * half_w)
                    verts.append((p[0], p[1], z))
        self._add(verts, _BOX_TRIS, label)

    def add_cylinder(self, center, radius, z0, z1, label, segments=16):
        cx, cy = center
        ang = 2.0 * np.pi * np.arange(segments) / segments
        ring = [(cx + radius * np.cos(a), cy + radius * np.sin(a)) for a in ang]
        verts = [(x, y, z0) for x, y in ring] + [(x, y, z1) for x, y in ring]
        verts.append((cx, cy, z0))
        verts.append((cx, cy, z1))
        c0, c1 = 2 * segments, 2 * segments + 1
        tris = []
        for i in range(segments):
            j = (i + 1) % segments
            tris += [
                (i, j, segments + i),
                (j, segments + j, segments + i),
                (c0, j, i),
                (c1, segments + i, segments + j),
            ]
        self._add(verts, tris, label)

    def add_extrusion(self, profile_xz, y0, y1, label):
        """Extrude a convex (x, z) polygon along y; caps fan-triangulated."""
        m = len(profile_xz)
        verts = [(x, y0, z) for x, z in profile_xz] + [
            (x, y1, z) for x, z in profile_xz
        ]
        tris = []
        for i in range(1, m - 1):
            tris.append((0, i, i + 1))
            tris.append((m, m + i + 1, m + i))
        for i in range(m):
            j = (i + 1) % m
            tris.append((i, j, m + i))
            tris.append((j, m + j, m + i))
        self._add(verts, tris, label)

    def build(self) -> PartLabeledMesh:
        mesh = Mesh(np.array(self.vertices), np.array(self.triangles))
        return PartLabeledMesh(mesh, np.array(self.labels), self.label_set)


_BOX_TRIS = [
    (0, 2, 1), (1, 2, 3),  # bottom
    (4, 5, 6), (5, 7, 6),  # top
    (0, 1, 4), (1, 5, 4),  # front
    (2, 6, 3), (3, 6, 7),  # back
    (0, 4, 2), (2, 4, 6),  # left
    (1, 3, 5), (3, 7, 5),  # right
]


def _build_seat(b: _Builder, p: ChairParams):
    hz = p.seat_thickness / 2.0
    if p.seat_shape == "square":
        b.add_box((0.0, 0.0, SEAT_Z), (SEAT_HALF, SEAT_HALF, hz), "seat")
    else:
        b.add_cylinder((0.0, 0.0), SEAT_HALF, SEAT_Z - hz, SEAT_Z + hz, "seat")


def _build_legs(b: _Builder, p: ChairParams):
    t = p.leg_thickness
    h = t / 2.0
    if p.leg_style == "four_straight":
        a = 0.34 - h
        for sx in (-1, 1):
            for sy in (-1, 1):
                b.add_box(
                    (sx * a, sy * a, (LEG_TOP + LEG_BOTTOM) / 2.0),
                    (h, h, (LEG_TOP - LEG_BOTTOM) / 2.0),
                    "legs",
                )
    elif p.leg_style == "four_splayed":
        top_a = 0.24
        bot_a = LEG_REACH - h
        for sx in (-1, 1):
            for sy in (-1, 1):
                b.add_frustum(
                    (sx * bot_a, sy * bot_a, LEG_BOTTOM),
                    h,
                    (sx * top_a, sy * top_a, LEG_TOP),
                    h,
                    "legs",
                )
    elif p.leg_style == "sled":
        runner_z1 = LEG_BOTTOM + 2.0 * t
        for sx in (-1, 1):
            b.add_box(
                (sx * 0.30, 0.0, (LEG_BOTTOM + runner_z1) / 2.0),
                (h, 0.36, (runner_z1 - LEG_BOTTOM) / 2.0),
                "legs",
            )
            for sy in (-1, 1):
                b.add_box(
                    (sx * 0.30, sy * 0.28, (runner_z1 + LEG_TOP) / 2.0),
                    (h, h, (LEG_TOP - runner_z1) / 2.0),
                    "legs",
                )
    else:  # swivel5
        spoke_z1 = LEG_BOTTOM + 2.0 * t
        b.add_cylinder((0.0, 0.0), 2.0 * t, LEG_BOTTOM, LEG_TOP, "legs")
        for k in range(5):
            angle = np.pi / 2.0 + 2.0 * np.pi * k / 5.0
            b.add_oriented_box(angle, 0.0, 0.45, h, LEG_BOTTOM, spoke_z1, "legs")


def _build_back(b: _Builder, p: ChairParams):
    top = BACK_Z0 + p.back_height
    if p.back_style == "solid_panel":
        b.add_box(
            (0.0, (BACK_Y0 + BACK_Y1) / 2.0, (BACK_Z0 + top) / 2.0),
            (BACK_HALF_W, (BACK_Y1 - BACK_Y0) / 2.0, (top - BACK_Z0) / 2.0),
            "backrest",
        )
    elif p.back_style == "n_bars":
        yc = (BACK_Y0 + BACK_Y1) / 2.0
        hy = (BACK_Y1 - BACK_Y0) / 2.0
        rail = 0.04
        b.add_box((0.0, yc, top - rail / 2.0), (BACK_HALF_W, hy, rail / 2.0), "backrest")
        b.add_box((0.0, yc, BACK_Z0 + rail / 2.0), (BACK_HALF_W, hy, rail / 2.0), "backrest")
        w = p.back_bar_width / 2.0
        xs = np.linspace(-BACK_HALF_W + w, BACK_HALF_W - w, p.back_bars)
        zc = (BACK_Z0 + top) / 2.0
        hz = (top - BACK_Z0 - 2.0 * rail) / 2.0
        for x in xs:
            b.add_box((float(x), yc, zc), (w, hy, hz), "backrest")
    else:  # round_top_panel: panel with a circular-arc top, apex exactly at `top`
        arc_h = 0.12
        z1 = top - arc_h
        profile = [(-BACK_HALF_W, BACK_Z0), (BACK_HALF_W, BACK_Z0), (BACK_HALF_W, z1)]
        angles = np.linspace(0.0, np.pi, 13)[1:-1]
        for k, a in enumerate(angles):
            if k == len(angles) // 2:
                profile.append((0.0, top))  # apex exactly at the shared top height
            else:
                z = min(z1 + arc_h * np.sin(a), top)
                profile.append((BACK_HALF_W * np.cos(a), z))
        profile.append((-BACK_HALF_W, z1))
        b.add_extrusion(profile, BACK_Y0, BACK_Y1, "backrest")


def _build_armrests(b: _Builder, p: ChairParams):
    if p.armrests == "none":
        return
    z_top = 0.22
    for sx in (-1, 1):
        b.add_box((sx * 0.42, 0.08, z_top), (0.03, 0.30, 0.025), "armrests")
        if p.armrests == "box":
            b.add_box((sx * 0.42, 0.08, 0.13), (0.03, 0.03, 0.09), "armrests")
        else:  # loop: posts at both ends of the rest
            for y in (-0.18, 0.34):
                b.add_box((sx * 0.42, y, 0.13), (0.03, 0.03, 0.09), "armrests")


def generate_chair(p: ChairParams) -> PartLabeledMesh:
    """Deterministic part-labeled chair mesh for the given parameters."""
    p.validate()
    b = _Builder()
    _build_seat(b, p)
    _build_legs(b, p)
    _build_back(b, p)
    _build_armrests(b, p)
    return b.build()


def default_leg_styles(count: int = 10) -> list:
    """Distinct leg variants: style x thickness combinations."""
    combos = [
        ("four_straight", 0.03), ("four_straight", 0.05), ("four_straight", 0.07),
        ("four_splayed", 0.03), ("four_splayed", 0.05), ("four_splayed", 0.07),
        ("sled", 0.04), ("sled", 0.06),
        ("swivel5", 0.04), ("swivel5", 0.06),
    ]
    if count > len(combos):
        raise ParamError(f"at most {len(combos)} built-in leg styles")
    return [
        ChairParams(leg_style=s, leg_thickness=t) for s, t in combos[:count]
    ]


def default_back_styles(count: int = 10) -> list:
    combos = [
        ("solid_panel", 3, 0.04),
        ("round_top_panel", 3, 0.04),
        ("n_bars", 2, 0.03), ("n_bars", 3, 0.03), ("n_bars", 4, 0.03),
        ("n_bars", 5, 0.03), ("n_bars", 6, 0.03),
        ("n_bars", 2, 0.07), ("n_bars", 3, 0.07), ("n_bars", 5, 0.07),
    ]
    if count > len(combos):
        raise ParamError(f"at most {len(combos)} built-in back styles")
    return [
        ChairParams(back_style=s, back_bars=k, back_bar_width=w)
        for s, k, w in combos[:count]
    ]


def generate_grid(leg_styles, back_styles, base: ChairParams = ChairParams()):
    """L x B corpus: chair (i, j) takes legs from style i and back from style j.

    All chairs share the base seat, armrests and back height, so the joint
    normalization transform is identical across the grid.

    Returns:
        list of (name, ChairParams, PartLabeledMesh) with names "grid_{i}_{j}".
    """
    if len(leg_styles) < 2 or len(back_styles) < 2:
        raise ParamError("need at least 2 leg styles and 2 back styles")
    out = []
    for i, leg in enumerate(leg_styles):
        for j, back in enumerate(back_styles):
            p = replace(
                base,
                leg_style=leg.leg_style,
                leg_thickness=leg.leg_thickness,
                back_style=back.back_style,
                back_bars=back.back_bars,
                back_bar_width=back.back_bar_width,
            )
            out.append((f"grid_{i}_{j}", p, generate_chair(p)))
    return out


def random_chair_params(rng: np.random.Generator) -> ChairParams:
    back_style = BACK_STYLES[rng.integers(len(BACK_STYLES))]
    return ChairParams(
        leg_style=LEG_STYLES[rng.integers(len(LEG_STYLES))],
        leg_thickness=float(rng.uniform(0.02, 0.08)),
        back_style=back_style,
        back_bars=int(rng.integers(2, 7)),
        back_bar_width=float(rng.uniform(0.02, 0.08)),
        back_height=float(rng.uniform(0.2, 0.38)),
        seat_shape=SEAT_SHAPES[rng.integers(len(SEAT_SHAPES))],
        seat_thickness=float(rng.uniform(0.05, 0.12)),
        armrests=ARM_STYLES[rng.integers(len(ARM_STYLES))],
    )


def generate_random(count: int, seed: int):
    """Random corpus; deterministic for a fixed seed."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        p = replace(random_chair_params(rng), seed=seed)
        out.append((f"chair_{i:04d}", p, generate_chair(p)))
    return out


def write_corpus(items, out_dir) -> Path:
    """Write meshes (internal JSON) plus a manifest.json; returns manifest path."""
    from .geometry import save_mesh_json

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = []
    for idx, (name, params, mesh) in enumerate(items):
        fname = f"{name}.json"
        save_mesh_json(mesh, out_dir / fname)
        manifest.append({"id": idx, "name": name, "params": params.to_dict(), "file": fname})
    path = out_dir / "manifest.json"
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=1)
    return path


def load_corpus(corpus_dir):
    """Read a corpus directory back as (name, params, mesh, path) records."""
    from .geometry import load_mesh

    corpus_dir = Path(corpus_dir)
    with open(corpus_dir / "manifest.json") as fh:
        manifest = json.load(fh)
    out = []
    for rec in manifest:
        path = corpus_dir / rec["file"]
        mesh = load_mesh(path, fmt="json")
        out.append((rec["name"], ChairParams.from_dict(rec["params"]), mesh, str(path)))
    return out


@dataclass(frozen=True)
class EvalCase:
    picks: tuple  # ((shape_id, part), ...)
    ground_truth: int


@dataclass(frozen=True)
class EvalReport:
    top1: float
    top5: float
    ranks: tuple
    runtime_seconds: float
    n_cases: int = 0

    def to_dict(self) -> dict:
        return {
            "top1": self.top1,
            "top5": self.top5,
            "ranks": list(self.ranks),
            "runtime_seconds": self.runtime_seconds,
            "n_cases": self.n_cases,
        }

    def table(self) -> str:
        lines = [
            f"cases: {self.n_cases}",
            f"top-1 accuracy: {self.top1:.3f}",
            f"top-5 accuracy: {self.top5:.3f}",
            f"runtime: {self.runtime_seconds:.2f}s",
        ]
        return "\n".join(lines)


def grid_eval_cases(items, L: int, B: int) -> list:
    """Dense leg x back combination protocol over a grid corpus.

    Case (i, j): legs picked from diagonal shape (i, i), backrest from (j, j);
    ground truth is shape (i, j).
    """
    ids = {name: idx for idx, (name, _p, _m) in enumerate(items)}
    cases = []
    for i in range(L):
        for j in range(B):
            cases.append(
                EvalCase(
                    picks=(
                        (ids[f"grid_{i}_{i}"], "legs"),
                        (ids[f"grid_{j}_{j}"], "backrest"),
                    ),
                    ground_truth=ids[f"grid_{i}_{j}"],
                )
            )
    return cases


def run_blend_eval(index, cases, k: int = 5) -> EvalReport:
    """Rank the ground truth for each case; aggregate top-1/top-k accuracy."""
    from .retrieval import BlendQuery, PartPick, blend_retrieve

    known = {s.id for s in index.shapes}
    t0 = time.perf_counter()
    ranks = []
    for case in cases:
        if case.ground_truth not in known:
            raise MissingGroundTruthError(f"shape {case.ground_truth} not indexed")
        q = BlendQuery(
            picks=tuple(PartPick(source=sid, part=part) for sid, part in case.picks),
            k=len(known),
        )
        results = blend_retrieve(index, q)
        rank = next(
            i for i, r in enumerate(results, 1) if r.shape_id == case.ground_truth
        )
        ranks.append(rank)
    dt = time.perf_counter() - t0
    ranks_a = np.array(ranks)
    return EvalReport(
        top1=float((ranks_a == 1).mean()),
        top5=float((ranks_a <= k).mean()),
        ranks=tuple(ranks),
        runtime_seconds=dt,
        n_cases=len(cases),
    )
