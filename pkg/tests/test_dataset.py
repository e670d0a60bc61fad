import numpy as np
import pytest

from partblend import dataset, geometry, index_store
from partblend.dataset import ChairParams, EvalCase, generate_chair, generate_grid
from partblend.descriptor import shape_distance
from partblend.errors import MissingGroundTruthError, ParamError


def part_desc(mesh, label, resolution=64):
    cfg = index_store.IndexConfig(resolution=resolution)
    return index_store.compute_shape_descriptors(mesh, cfg)[label]


class TestGenerateChair:
    def test_no_armrests_no_faces(self):
        m = generate_chair(ChairParams(armrests="none"))
        arm_idx = m.label_set.index("armrests")
        assert (m.face_labels != arm_idx).all()

    def test_deterministic(self):
        p = ChairParams(leg_style="sled", back_style="n_bars", back_bars=4)
        a = generate_chair(p)
        b = generate_chair(p)
        assert np.array_equal(a.mesh.vertices, b.mesh.vertices)
        assert np.array_equal(a.mesh.triangles, b.mesh.triangles)
        assert np.array_equal(a.face_labels, b.face_labels)

    def test_all_parts_present_with_arms(self):
        m = generate_chair(ChairParams(armrests="loop"))
        present = {m.label_set[i] for i in set(m.face_labels.tolist())}
        assert present == {"backrest", "seat", "armrests", "legs"}

    def test_param_validation(self):
        with pytest.raises(ParamError):
            generate_chair(ChairParams(leg_thickness=0.5))
        with pytest.raises(ParamError):
            generate_chair(ChairParams(leg_style="tripod"))
        with pytest.raises(ParamError):
            generate_chair(ChairParams(back_style="n_bars", back_bars=9))

    def test_style_distance_dominates_thickness_delta(self):
        """Cross-style legs distance exceeds a 10% within-style thickness change."""
        base = ChairParams(leg_style="four_straight", leg_thickness=0.05)
        thicker = ChairParams(leg_style="four_straight", leg_thickness=0.055)
        swivel = ChairParams(leg_style="swivel5", leg_thickness=0.05)
        d_base = part_desc(generate_chair(base), "legs")
        d_thick = part_desc(generate_chair(thicker), "legs")
        d_swivel = part_desc(generate_chair(swivel), "legs")
        assert shape_distance(d_base, d_swivel) > shape_distance(d_base, d_thick)


class TestGenerateGrid:
    def test_counts_and_names(self):
        items = generate_grid(
            dataset.default_leg_styles(2), dataset.default_back_styles(3)
        )
        assert len(items) == 6
        assert items[0][0] == "grid_0_0" and items[-1][0] == "grid_1_2"

    def test_requires_two_styles(self):
        with pytest.raises(ParamError):
            generate_grid(dataset.default_leg_styles(1), dataset.default_back_styles(5))

    def test_legs_descriptor_shared_across_row(self):
        items = generate_grid(
            dataset.default_leg_styles(2), dataset.default_back_styles(2)
        )
        by_name = {n: m for n, _, m in items}
        d00 = part_desc(by_name["grid_0_0"], "legs")
        d01 = part_desc(by_name["grid_0_1"], "legs")
        assert np.array_equal(d00, d01)

    def test_back_descriptor_shared_across_column(self):
        items = generate_grid(
            dataset.default_leg_styles(2), dataset.default_back_styles(2)
        )
        by_name = {n: m for n, _, m in items}
        d01 = part_desc(by_name["grid_0_1"], "backrest")
        d11 = part_desc(by_name["grid_1_1"], "backrest")
        assert np.array_equal(d01, d11)

    def test_whole_object_descriptors_distinct(self):
        items = generate_grid(
            dataset.default_leg_styles(2), dataset.default_back_styles(2)
        )
        cfg = index_store.IndexConfig(resolution=64)
        full = [
            np.concatenate(
                [
                    index_store.compute_shape_descriptors(m, cfg)[p]
                    for p in m.label_set
                ]
            )
            for _, _, m in items
        ]
        for i in range(4):
            for j in range(i + 1, 4):
                assert shape_distance(full[i], full[j]) > 0


class TestRandomCorpus:
    def test_seeded_determinism(self):
        a = dataset.generate_random(5, seed=1)
        b = dataset.generate_random(5, seed=1)
        for (na, _, ma), (nb, _, mb) in zip(a, b):
            assert na == nb
            assert np.array_equal(ma.mesh.vertices, mb.mesh.vertices)

    def test_different_seeds_differ(self):
        a = dataset.generate_random(3, seed=1)
        b = dataset.generate_random(3, seed=2)
        assert any(
            not np.array_equal(ma.mesh.vertices, mb.mesh.vertices)
            or ma.mesh.vertices.shape != mb.mesh.vertices.shape
            for (_, _, ma), (_, _, mb) in zip(a, b)
        )


class TestCorpusIo:
    def test_write_load_round_trip(self, tmp_path):
        items = dataset.generate_random(4, seed=3)
        dataset.write_corpus(items, tmp_path)
        back = dataset.load_corpus(tmp_path)
        assert len(back) == 4
        for (name, params, mesh), (name2, params2, mesh2, path) in zip(items, back):
            assert name == name2
            assert params == params2
            assert np.array_equal(mesh.mesh.vertices, mesh2.mesh.vertices)
            assert path.endswith(f"{name}.json")


class TestBlendEval:
    def test_self_retrieval_cases_perfect(self, grid_index):
        cases = [
            EvalCase(
                picks=tuple((sid, p) for p in grid_index.label_set),
                ground_truth=sid,
            )
            for sid in range(grid_index.n_shapes)
        ]
        report = dataset.run_blend_eval(grid_index, cases)
        assert report.top1 == 1.0
        assert report.top5 == 1.0
        assert report.runtime_seconds >= 0.0

    def test_grid_cross_cases(self, grid_items, grid_index):
        cases = dataset.grid_eval_cases(grid_items, 3, 3)
        report = dataset.run_blend_eval(grid_index, cases)
        assert report.top1 >= 0.9
        assert report.n_cases == 9
        assert report.top1 <= report.top5

    def test_shuffled_ground_truth_near_chance(self, grid_items, grid_index):
        rng = np.random.default_rng(0)
        cases = dataset.grid_eval_cases(grid_items, 3, 3)
        shuffled = [
            EvalCase(picks=c.picks, ground_truth=int(rng.integers(9))) for c in cases
        ]
        report = dataset.run_blend_eval(grid_index, shuffled)
        # expectation 1/n; with 9 cases just bound it loosely away from 1
        assert report.top1 <= 0.5

    def test_missing_ground_truth(self, grid_index):
        case = EvalCase(picks=((0, "legs"),), ground_truth=999)
        with pytest.raises(MissingGroundTruthError):
            dataset.run_blend_eval(grid_index, [case])

    def test_report_serialization(self, grid_items, grid_index):
        report = dataset.run_blend_eval(
            grid_index, dataset.grid_eval_cases(grid_items, 2, 2)
        )
        d = report.to_dict()
        assert set(d) == {"top1", "top5", "ranks", "runtime_seconds", "n_cases"}
        assert "top-1" in report.table()


class TestNormalizationSharing:
    def test_grid_normalization_transform_identical(self):
        items = generate_grid(
            dataset.default_leg_styles(3), dataset.default_back_styles(3)
        )
        tfs = [geometry.normalize(m)[1] for _, _, m in items]
        t0 = tfs[0]
        for tf in tfs[1:]:
            assert np.array_equal(tf.translation, t0.translation)
            assert tf.scale == t0.scale
