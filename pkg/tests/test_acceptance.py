"""Acceptance suite: one test per release criterion, one printed line each.

Run with `pytest tests/test_acceptance.py -s` to see the per-criterion
PASS/FAIL lines as they complete.  Heavy corpora (50 random chairs, the
10x10 leg-by-back grid) are built once per session at full 256^2 resolution
and shared across criteria; each criterion checks its own runtime budget,
counting the shared build time where the criterion is end-to-end.
"""

import sys
import time

import numpy as np
import pytest
from scipy.spatial.distance import pdist, squareform

from partblend import dataset, index_store, manifold
from partblend.errors import CorruptionError
from partblend.index_store import IndexConfig, load_index, save_index
from partblend.manifold import (
    DistanceMatrix,
    SammonConfig,
    build_manifold,
    out_of_sample_embed,
    sammon_gradient,
    sammon_stress,
)
from partblend.retrieval import BlendQuery, PartPick, blend_retrieve, resolve_pick

FULL_CFG = IndexConfig(resolution=256, sammon=SammonConfig(dim=16))

# stress traces of every manifold built anywhere in this suite (criterion:
# zero descent violations across all builds)
ALL_TRACES = []


def _criterion(name, ok, elapsed, budget):
    status = "PASS" if (ok and elapsed < budget) else "FAIL"
    print(
        f"[{status}] {name}: {elapsed:.1f}s (budget {budget:.0f}s)",
        file=sys.stderr,
        flush=True,
    )
    assert ok, name
    assert elapsed < budget, f"{name}: {elapsed:.1f}s over budget {budget}s"


def _collect_traces(index):
    for label in index.label_set:
        ALL_TRACES.append(index.manifolds[label].stress_trace)


@pytest.fixture(scope="session")
def chairs50():
    """50 random procedural chairs indexed at 256^2, dim 16."""
    items = dataset.generate_random(50, seed=7)
    t0 = time.perf_counter()
    index = index_store.build_index(
        [m for _, _, m in items], FULL_CFG, names=[n for n, _, _ in items]
    )
    build_seconds = time.perf_counter() - t0
    _collect_traces(index)
    return index, items, build_seconds


@pytest.fixture(scope="session")
def grid100():
    """Dense 10x10 leg-by-back style grid indexed at 256^2, dim 16."""
    items = dataset.generate_grid(
        dataset.default_leg_styles(10), dataset.default_back_styles(10)
    )
    t0 = time.perf_counter()
    index = index_store.build_index(
        [m for _, _, m in items], FULL_CFG, names=[n for n, _, _ in items]
    )
    build_seconds = time.perf_counter() - t0
    _collect_traces(index)
    return index, items, build_seconds


def brute_force_stress(D, X):
    """Independent oracle: literal triple-loop transcription of the error."""
    n = len(X)
    total = 0.0
    denom = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            dij = D[i][j]
            dpij = 0.0
            for k in range(len(X[i])):
                dpij += (X[i][k] - X[j][k]) ** 2
            dpij = dpij**0.5
            total += (dij - dpij) ** 2 / dij
            denom += dij
    return total / denom


def test_criterion_01_stress_oracle_equivalence():
    rng = np.random.default_rng(100)
    t0 = time.perf_counter()
    ok = True
    for _ in range(200):
        n = int(rng.integers(3, 9))
        dim = int(rng.integers(1, 4))
        pts = rng.normal(size=(n, dim + 1))
        D = DistanceMatrix(squareform(pdist(pts)))
        X = rng.normal(size=(n, dim))
        ours = sammon_stress(D, X)
        oracle = brute_force_stress(D.d.tolist(), X.tolist())
        ok &= abs(ours - oracle) <= 1e-12 * abs(oracle)
    _criterion("stress-oracle (200 instances, 1e-12 rel)", ok,
               time.perf_counter() - t0, 5.0)


def test_criterion_02_gradient_vs_finite_differences():
    rng = np.random.default_rng(101)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(50):
        n = int(rng.integers(5, 11))
        dim = int(rng.integers(1, 4))
        pts = rng.normal(size=(n, dim + 1))
        D = DistanceMatrix(squareform(pdist(pts)))
        X = rng.normal(size=(n, dim))
        G = sammon_gradient(D, X)
        h = 1e-6 * float(np.abs(X).max())
        fd = np.zeros_like(G)
        for i in range(n):
            for k in range(dim):
                Xp, Xm = X.copy(), X.copy()
                Xp[i, k] += h
                Xm[i, k] -= h
                fd[i, k] = (sammon_stress(D, Xp) - sammon_stress(D, Xm)) / (2 * h)
        scale = np.maximum(np.abs(fd), 1e-4 * np.abs(fd).max())
        worst = max(worst, float((np.abs(G - fd) / scale).max()))
    _criterion(f"sammon-gradient-vs-fd (max rel err {worst:.2e})", worst <= 1e-5,
               time.perf_counter() - t0, 10.0)


def test_criterion_03_mds_exact_recovery():
    rng = np.random.default_rng(102)
    t0 = time.perf_counter()
    pts = rng.normal(size=(50, 8))
    true_d = pdist(pts)
    D = DistanceMatrix(squareform(true_d))
    M = build_manifold(D, SammonConfig(dim=8, max_iters=500))
    ALL_TRACES.append(M.stress_trace)
    dp = pdist(M.coords) * M.scale
    rms_rel = float(np.sqrt((((dp - true_d) / true_d) ** 2).mean()))
    ok = M.stress <= 1e-4 and rms_rel <= 0.01
    _criterion(
        f"mds-exact-recovery (stress {M.stress:.2e}, rms rel {rms_rel:.2e})",
        ok, time.perf_counter() - t0, 30.0,
    )


def test_criterion_04_descent_invariant(chairs50, grid100):
    # extra random builds beyond the corpus fixtures
    rng = np.random.default_rng(103)
    t0 = time.perf_counter()
    for _ in range(5):
        n = int(rng.integers(10, 30))
        pts = rng.normal(size=(n, 5))
        M = build_manifold(
            DistanceMatrix(squareform(pdist(pts))), SammonConfig(dim=3, max_iters=200)
        )
        ALL_TRACES.append(M.stress_trace)
    violations = sum(
        1 for trace in ALL_TRACES if (np.diff(np.asarray(trace)) > 0).any()
    )
    _criterion(
        f"descent-invariant ({len(ALL_TRACES)} builds, {violations} violations)",
        violations == 0, time.perf_counter() - t0, 60.0,
    )


def test_criterion_05_descriptor_contract():
    from partblend.descriptor import FULL_LENGTH, VIEW_LENGTH, HogConfig, view_descriptor
    from partblend.geometry import Mesh, PartLabeledMesh
    from partblend.rasterizer import SilhouetteImage

    t0 = time.perf_counter()
    items = dataset.generate_random(10, seed=11)
    descs = [
        index_store.compute_shape_descriptors(m, FULL_CFG) for _, _, m in items
    ]
    ok = all(
        d[label].shape == (FULL_LENGTH,) for d in descs for label in d
    )
    vd = view_descriptor(SilhouetteImage(np.zeros((256, 256), bool)), HogConfig())
    ok &= vd.values.shape == (VIEW_LENGTH,) and VIEW_LENGTH == 2610
    ok &= FULL_LENGTH == 52200

    # absent parts carry the all-zero descriptor
    armless = [i for i, (_, p, _) in enumerate(items) if p.armrests == "none"]
    ok &= bool(armless)
    ok &= all(not descs[i]["armrests"].any() for i in armless)

    # translation / uniform-scale invariance, bit-exact after normalization
    for _, _, chair in items[:2]:
        moved = PartLabeledMesh(
            Mesh(chair.mesh.vertices * 5.0 + np.array([2.0, -7.0, 3.0]),
                 chair.mesh.triangles),
            chair.face_labels,
            chair.label_set,
        )
        a = index_store.compute_shape_descriptors(chair, FULL_CFG)
        b = index_store.compute_shape_descriptors(moved, FULL_CFG)
        ok &= all(np.array_equal(a[label], b[label]) for label in chair.label_set)
    _criterion("descriptor-contract (10 shapes at 256^2)", bool(ok),
               time.perf_counter() - t0, 20.0)


def test_criterion_06_self_retrieval(chairs50):
    index, _items, build_seconds = chairs50
    t0 = time.perf_counter()
    hits = 0
    for sid in range(index.n_shapes):
        q = BlendQuery(
            picks=tuple(PartPick(source=sid, part=p) for p in index.label_set), k=1
        )
        (top,) = blend_retrieve(index, q)
        hits += top.shape_id == sid and top.total_cost == 0.0
    elapsed = build_seconds + (time.perf_counter() - t0)
    _criterion(f"self-retrieval ({hits}/50 exact)", hits == 50, elapsed, 180.0)


def test_criterion_07_grid_combination(grid100):
    index, items, build_seconds = grid100
    t0 = time.perf_counter()
    cases = dataset.grid_eval_cases(items, 10, 10)
    report = dataset.run_blend_eval(index, cases, k=5)
    elapsed = build_seconds + (time.perf_counter() - t0)
    ok = report.top1 >= 0.90 and report.top5 >= 0.99
    _criterion(
        f"grid-combination (top1 {report.top1:.2f}, top5 {report.top5:.2f})",
        ok, elapsed, 600.0,
    )


def test_criterion_08_out_of_sample_consistency(chairs50):
    # near-isometric precondition: embed at dim = n - 1 so the legs distance
    # matrix is exactly realizable, then re-embed held-out shapes from their
    # original-space distance rows to the remaining anchors
    index, _items, _bs = chairs50
    t0 = time.perf_counter()
    X = index.descriptors["legs"].astype(np.float64)
    n = len(X)
    D = DistanceMatrix(squareform(pdist(X)))
    cfg = SammonConfig(dim=n - 1, max_iters=5000, rel_tol=1e-12)
    M = build_manifold(D, cfg, part="legs")
    ALL_TRACES.append(M.stress_trace)
    hits = 0
    for i in range(10):
        others = [j for j in range(n) if j != i]
        x = out_of_sample_embed(M, D.d[i, others], cfg, anchor_indices=others)
        # normalized manifold: RMS pairwise distance is 1 by construction
        hits += float(np.linalg.norm(x - M.coords[i])) <= 0.01
    _criterion(f"out-of-sample-consistency ({hits}/10 within 1%)", hits >= 9,
               time.perf_counter() - t0, 60.0)


def test_criterion_09_persistence(chairs50, tmp_path):
    index, _items, _bs = chairs50
    t0 = time.perf_counter()
    p1 = tmp_path / "one.pmix"
    p2 = tmp_path / "two.pmix"
    save_index(index, p1)
    save_index(load_index(p1), p2)
    ok = p1.read_bytes() == p2.read_bytes()

    data = bytearray(p1.read_bytes())
    data[len(data) // 2] ^= 0xFF
    corrupt = tmp_path / "corrupt.pmix"
    corrupt.write_bytes(bytes(data))
    try:
        load_index(corrupt)
        ok = False
    except CorruptionError:
        pass
    truncated = tmp_path / "truncated.pmix"
    truncated.write_bytes(p1.read_bytes()[: len(data) // 3])
    try:
        load_index(truncated)
        ok = False
    except CorruptionError:
        pass
    _criterion("persistence (byte-identical round trip, corruption rejected)",
               ok, time.perf_counter() - t0, 60.0)


def test_criterion_10_retrieval_oracle(chairs50):
    index, _items, _bs = chairs50
    rng = np.random.default_rng(104)
    t0 = time.perf_counter()
    ok = True
    for _ in range(100):
        parts = list(index.label_set)
        rng.shuffle(parts)
        picks = tuple(
            PartPick(
                source=int(rng.integers(index.n_shapes)),
                part=p,
                weight=float(rng.uniform(0.1, 3.0)),
            )
            for p in parts[: rng.integers(1, len(parts) + 1)]
        )
        # naive oracle: one shape at a time, plain python accumulation
        costs = []
        for s in index.shapes:
            total = 0.0
            for pick in picks:
                b = resolve_pick(index, pick)
                a = index.manifolds[pick.part].coords[s.id]
                total += pick.weight * float(np.sqrt(((a - b) ** 2).sum()))
            costs.append(total)
        order = np.argsort(np.asarray(costs), kind="stable")
        results = blend_retrieve(index, BlendQuery(picks=picks, k=index.n_shapes))
        ok &= [r.shape_id for r in results] == list(order)
        ok &= all(r.total_cost == costs[r.shape_id] for r in results)
    _criterion("retrieval-oracle (100 queries, exact)", bool(ok),
               time.perf_counter() - t0, 30.0)
