"""Per-part shape manifolds via Sammon-stress nonlinear MDS.

Pipeline: pairwise descriptor distances -> duplicate collapse (the stress is
singular at zero distances) -> classical-MDS initialization -> gradient
descent with backtracking line search on the Sammon error -> duplicate
re-expansion -> RMS-pairwise-distance normalization.

The stress of an embedding ``coords`` against a distance matrix ``D`` is

    E = (1 / sum_{i<j} D_ij) * sum_{i<j} (D_ij - D'_ij)^2 / D_ij

with ``D'`` the embedded Euclidean distances.  E is invariant under joint
scaling of D and coords.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .errors import (
    ConvergenceWarning,
    DegenerateError,
    EmptyManifoldError,
    SingularError,
    SizeError,
)

MAX_HALVINGS = 20


@dataclass(frozen=True)
class DistanceMatrix:
    d: np.ndarray

    def __post_init__(self):
        d = np.ascontiguousarray(np.asarray(self.d, dtype=np.float64))
        d.setflags(write=False)
        object.__setattr__(self, "d", d)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise SizeError("distance matrix must be square")
        if not np.array_equal(d, d.T):
            raise SizeError("distance matrix must be symmetric")
        if np.diagonal(d).any():
            raise SizeError("distance matrix diagonal must be zero")
        if (d < 0).any():
            raise SizeError("negative distances")

    @property
    def n(self) -> int:
        return self.d.shape[0]


@dataclass(frozen=True)
class SammonConfig:
    dim: int = 128
    max_iters: int = 500
    step_factor: float = 0.3  # Sammon's magic factor as the initial trial step
    rel_tol: float = 1e-7
    dup_floor_factor: float = 1e-9  # floor = factor * median positive distance
    seed: int = 0

    def __post_init__(self):
        if min(self.dim, self.max_iters) < 1 or min(
            self.step_factor, self.rel_tol, self.dup_floor_factor
        ) <= 0:
            raise ValueError("all SammonConfig values must be positive")

    def fingerprint(self) -> str:
        return (
            f"sammon:dim={self.dim},iters={self.max_iters},"
            f"step={self.step_factor},tol={self.rel_tol},"
            f"floor={self.dup_floor_factor}"
        )


@dataclass(frozen=True)
class PartManifold:
    """Normalized embedding of all shapes for one part."""

    part: str
    dim: int
    coords: np.ndarray  # (n, dim)
    scale: float  # divide original-space distances by this to compare
    duplicate_map: dict  # shape index -> representative shape index
    stress: float
    stress_trace: tuple = field(default=())

    def __post_init__(self):
        c = np.ascontiguousarray(np.asarray(self.coords, dtype=np.float64))
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)
        object.__setattr__(self, "stress_trace", tuple(self.stress_trace))

    @property
    def n(self) -> int:
        return self.coords.shape[0]


def build_distance_matrix(descriptors) -> DistanceMatrix:
    """Pairwise L2 distances between part descriptors (computed once per pair)."""
    if len(descriptors) < 2:
        raise SizeError(f"need at least 2 descriptors, got {len(descriptors)}")
    X = np.stack([getattr(d, "values", d) for d in descriptors]).astype(np.float64)
    return DistanceMatrix(squareform(pdist(X)))


def duplicate_floor(D: DistanceMatrix, factor: float = 1e-9) -> float:
    pos = D.d[np.triu_indices(D.n, 1)]
    pos = pos[pos > 0]
    return factor * float(np.median(pos)) if pos.size else factor


def collapse_duplicates(D: DistanceMatrix, floor: float):
    """Merge points with pairwise distance below `floor` (union-find closure).

    Returns:
        (reduced DistanceMatrix or None when a single group remains,
         representative indices, duplicate_map index -> representative index)
    """
    n = D.n
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if D.d[i, j] < floor:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)
    dup_map = {i: find(i) for i in range(n)}
    reps = sorted(set(dup_map.values()))
    if len(reps) < 2:
        return None, reps, dup_map
    idx = np.array(reps)
    return DistanceMatrix(D.d[np.ix_(idx, idx)]), reps, dup_map


def _check_offdiag(d: np.ndarray):
    off = d[np.triu_indices(d.shape[0], 1)]
    if (off == 0).any():
        raise SingularError("zero off-diagonal distance; collapse duplicates first")


def sammon_stress(D: DistanceMatrix, coords: np.ndarray) -> float:
    """Sammon mapping error of `coords` against `D`."""
    _check_offdiag(D.d)
    iu = np.triu_indices(D.n, 1)
    d = D.d[iu]
    dp = pdist(np.asarray(coords, dtype=np.float64))
    return float((((d - dp) ** 2) / d).sum() / d.sum())


def sammon_gradient(D: DistanceMatrix, coords: np.ndarray) -> np.ndarray:
    """Exact gradient of sammon_stress with respect to the coordinates."""
    _check_offdiag(D.d)
    X = np.asarray(coords, dtype=np.float64)
    dp = squareform(pdist(X))
    if (dp + np.eye(D.n) == 0).any():
        raise SingularError("coincident embedded points")
    c = D.d[np.triu_indices(D.n, 1)].sum()
    with np.errstate(divide="ignore", invalid="ignore"):
        w = (dp - D.d) / (D.d * dp)
    np.fill_diagonal(w, 0.0)
    diff = X[:, None, :] - X[None, :, :]
    return (2.0 / c) * (w[:, :, None] * diff).sum(axis=1)


def classical_mds(D: DistanceMatrix, dim: int) -> np.ndarray:
    """Classical MDS: eigendecompose the double-centered squared distances.

    Negative eigenvalues are truncated to zero; exact for Euclidean-realizable
    distance matrices of intrinsic dimension <= dim.
    """
    n = D.n
    d2 = D.d**2
    J = np.eye(n) - np.full((n, n), 1.0 / n)
    B = -0.5 * J @ d2 @ J
    vals, vecs = np.linalg.eigh(B)
    order = np.argsort(vals)[::-1][:dim]
    vals = np.clip(vals[order], 0.0, None)
    X = vecs[:, order] * np.sqrt(vals)
    if X.shape[1] < dim:
        X = np.hstack([X, np.zeros((n, dim - X.shape[1]))])
    return X


def _separate_coincident(X: np.ndarray) -> np.ndarray:
    """Deterministic jitter on axis 0 so the stress gradient stays defined."""
    if X.ndim != 2:
        return X
    dp = squareform(pdist(X))
    np.fill_diagonal(dp, np.inf)
    if dp.min() > 0:
        return X
    rms = float(np.sqrt((X**2).mean())) or 1.0
    X = X.copy()
    seen = {}
    for i in range(len(X)):
        key = X[i].tobytes()
        count = seen.get(key)
        if count is None:
            seen[key] = 1
        else:
            X[i, 0] += 1e-9 * rms * count
            seen[key] = count + 1
    return X


def _descend(objective, gradient, X0, max_iters, step_factor, rel_tol):
    """Monotone gradient descent with backtracking; returns (X, trace)."""
    X = X0
    f = objective(X)
    trace = [f]
    for _ in range(max_iters):
        G = gradient(X)
        gnorm = float(np.linalg.norm(G))
        if gnorm == 0.0:
            break
        step = step_factor
        accepted = False
        for _ in range(MAX_HALVINGS + 1):
            trial = _separate_coincident(X - step * G)
            try:
                ft = objective(trial)
            except SingularError:
                ft = np.inf
            if ft < f:
                X, prev, f = trial, f, ft
                trace.append(f)
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break
        if prev - f <= rel_tol * max(prev, np.finfo(float).tiny):
            break
    else:
        warnings.warn("stopped at the iteration cap", ConvergenceWarning)
    return X, trace


def build_manifold(
    D: DistanceMatrix, cfg: SammonConfig, part: str = ""
) -> PartManifold:
    """Embed a distance matrix into `cfg.dim` dimensions (normalized output)."""
    if D.n < 2:
        raise SizeError("need at least 2 points")
    floor = duplicate_floor(D, cfg.dup_floor_factor)
    reduced, reps, dup_map = collapse_duplicates(D, floor)
    if reduced is None:
        # every shape identical for this part: a single collapsed point
        coords = np.zeros((D.n, cfg.dim))
        return PartManifold(part, cfg.dim, coords, 1.0, dup_map, 0.0, (0.0,))

    X0 = _separate_coincident(classical_mds(reduced, cfg.dim))
    X, trace = _descend(
        lambda Y: sammon_stress(reduced, Y),
        lambda Y: sammon_gradient(reduced, Y),
        X0,
        cfg.max_iters,
        cfg.step_factor,
        cfg.rel_tol,
    )
    rep_row = {r: k for k, r in enumerate(reps)}
    coords = X[[rep_row[dup_map[i]] for i in range(D.n)]]
    raw = PartManifold(part, cfg.dim, coords, 1.0, dup_map, trace[-1], trace)
    return normalize_manifold(raw)


def normalize_manifold(M: PartManifold) -> PartManifold:
    """Rescale so the RMS of all pairwise embedded distances is 1.

    The divisor accumulates into `scale`, which maps original descriptor-space
    distances into normalized manifold units.
    """
    if M.n < 2:
        raise SizeError("need at least 2 points")
    dp = pdist(M.coords)
    rms = float(np.sqrt((dp**2).mean()))
    if rms == 0.0:
        raise DegenerateError("all embedded points coincident")
    return replace(M, coords=M.coords / rms, scale=M.scale * rms)


def out_of_sample_embed(
    M: PartManifold, dists: np.ndarray, cfg: SammonConfig, anchor_indices=None
) -> np.ndarray:
    """Place one new point on an existing manifold from its distance row.

    `dists` are original descriptor-space distances to the anchor shapes
    (all shapes in manifold order, or `anchor_indices` when given); they are
    divided by the manifold scale internally.  Minimizes the Sammon-weighted
    squared distance mismatch, initialized at the nearest anchor.
    """
    if M.n == 0:
        raise EmptyManifoldError("manifold has no points")
    anchors = M.coords if anchor_indices is None else M.coords[list(anchor_indices)]
    d = np.asarray(dists, dtype=np.float64).ravel() / M.scale
    if len(d) != len(anchors):
        raise SizeError(f"{len(d)} distances for {len(anchors)} anchors")
    pos = d[d > 0]
    floor = 1e-9 * float(np.median(pos)) if pos.size else 1e-9
    w = 1.0 / np.maximum(d, floor)
    rms = float(np.sqrt((anchors**2).mean())) or 1.0

    def residuals(x):
        return np.linalg.norm(anchors - x, axis=1)

    def objective(x):
        return float((w * (d - residuals(x)) ** 2).sum())

    def gradient(x):
        r = residuals(x)
        safe = np.maximum(r, 1e-30)
        coef = 2.0 * w * (r - d) / safe
        return (coef[:, None] * (x - anchors)).sum(axis=0)

    x0 = anchors[int(np.argmin(d))].copy()
    x0[0] += 1e-9 * rms  # leave the singular point at the nearest anchor
    x, _ = _descend(
        objective, gradient, x0, cfg.max_iters, cfg.step_factor, cfg.rel_tol
    )
    return x


def project_2d(M: PartManifold) -> np.ndarray:
    """Mean-centered PCA to 2 components with a deterministic sign convention."""
    if M.n < 3:
        raise SizeError("need at least 3 points")
    X = M.coords - M.coords.mean(axis=0)
    _, _, vt = np.linalg.svd(X, full_matrices=False)
    comps = vt[:2]
    if comps.shape[0] < 2:
        comps = np.vstack([comps, np.zeros((2 - comps.shape[0], X.shape[1]))])
    for k in range(2):
        j = int(np.argmax(np.abs(comps[k])))
        if comps[k, j] < 0:
            comps[k] = -comps[k]
    return X @ comps.T


class SammonEmbedding:
    """Minimal sklearn-style estimator over `build_manifold`.

    fit(X) accepts a precomputed square distance matrix (metric="precomputed")
    or a feature matrix reduced with Euclidean distances; transform(D_new)
    embeds new points out-of-sample from their distance rows to the training
    points (original-space distances).
    """

    def __init__(self, dim=2, max_iters=500, step_factor=0.3, rel_tol=1e-7,
                 metric="precomputed"):
        self.dim = dim
        self.max_iters = max_iters
        self.step_factor = step_factor
        self.rel_tol = rel_tol
        self.metric = metric

    def get_params(self, deep=True):
        return {
            "dim": self.dim,
            "max_iters": self.max_iters,
            "step_factor": self.step_factor,
            "rel_tol": self.rel_tol,
            "metric": self.metric,
        }

    def set_params(self, **params):
        for k, v in params.items():
            if k not in self.get_params():
                raise ValueError(f"unknown parameter {k!r}")
            setattr(self, k, v)
        return self

    def _config(self):
        return SammonConfig(
            dim=self.dim,
            max_iters=self.max_iters,
            step_factor=self.step_factor,
            rel_tol=self.rel_tol,
        )

    def fit(self, X, y=None):
        X = np.asarray(X, dtype=np.float64)
        if self.metric == "precomputed":
            D = DistanceMatrix(X)
        else:
            D = DistanceMatrix(squareform(pdist(X)))
        self.manifold_ = build_manifold(D, self._config())
        self.embedding_ = self.manifold_.coords
        self.stress_ = self.manifold_.stress
        return self

    def fit_transform(self, X, y=None):
        return self.fit(X).embedding_

    def transform(self, D_new):
        rows = np.atleast_2d(np.asarray(D_new, dtype=np.float64))
        cfg = self._config()
        return np.stack(
            [out_of_sample_embed(self.manifold_, row, cfg) for row in rows]
        )
