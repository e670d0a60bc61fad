import csv
import json

import numpy as np
import pytest

from partblend import manifold
from partblend.cli import main


@pytest.fixture(scope="module")
def corpus_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("corpus")
    rc = main(["generate", "--grid", "3x3", "--out", str(out)])
    assert rc == 0
    return out


@pytest.fixture(scope="module")
def index_file(corpus_dir, tmp_path_factory):
    out = tmp_path_factory.mktemp("idx") / "grid.pmix"
    rc = main(
        [
            "build",
            "--corpus", str(corpus_dir),
            "--out", str(out),
            "--dim", "8",
            "--resolution", "64",
        ]
    )
    assert rc == 0
    return out


class TestGenerate:
    def test_grid_writes_manifest(self, corpus_dir, capsys):
        manifest = json.loads((corpus_dir / "manifest.json").read_text())
        assert len(manifest) == 9
        assert all((corpus_dir / rec["file"]).exists() for rec in manifest)

    def test_random_deterministic(self, tmp_path, capsys):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            assert main(["generate", "--random", "5", "--seed", "1", "--out", str(out)]) == 0
        assert (a / "manifest.json").read_text() == (b / "manifest.json").read_text()
        for rec in json.loads((a / "manifest.json").read_text()):
            assert (a / rec["file"]).read_text() == (b / rec["file"]).read_text()

    def test_degenerate_grid_rejected(self, tmp_path):
        assert main(["generate", "--grid", "1x5", "--out", str(tmp_path / "c")]) == 2


class TestBuild:
    def test_reports_per_part_stress(self, corpus_dir, tmp_path, capsys):
        out = tmp_path / "i.pmix"
        assert main([
            "build", "--corpus", str(corpus_dir), "--out", str(out),
            "--dim", "8", "--resolution", "64",
        ]) == 0
        captured = capsys.readouterr()
        assert out.exists()
        for part in ("legs", "seat", "backrest", "armrests"):
            assert f"part {part}: stress=" in captured.err
        assert json.loads(captured.out)["shapes"] == 9

    def test_refuses_overwrite_without_force(self, corpus_dir, index_file, capsys):
        rc = main([
            "build", "--corpus", str(corpus_dir), "--out", str(index_file),
            "--dim", "8", "--resolution", "64",
        ])
        assert rc == 1
        assert "--force" in capsys.readouterr().err


class TestQuery:
    def test_self_retrieval(self, index_file, tmp_path, capsys):
        q = tmp_path / "q.json"
        q.write_text(json.dumps({
            "picks": [
                {"source": 4, "part": p}
                for p in ("legs", "seat", "backrest", "armrests")
            ],
            "k": 3,
        }))
        assert main(["query", "--index", str(index_file), "--query", str(q)]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["results"][0]["shape_id"] == 4
        assert doc["results"][0]["total_cost"] == 0.0
        assert "per_part_costs" not in doc["results"][0]

    def test_explain_adds_per_part_costs(self, index_file, tmp_path, capsys):
        q = tmp_path / "q.json"
        q.write_text(json.dumps({"picks": [{"source": 0, "part": "legs"}], "k": 2}))
        assert main([
            "query", "--index", str(index_file), "--query", str(q), "--explain"
        ]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert "legs" in doc["results"][0]["per_part_costs"]

    def test_malformed_query_exits_2(self, index_file, tmp_path, capsys):
        q = tmp_path / "bad.json"
        q.write_text("{not json")
        assert main(["query", "--index", str(index_file), "--query", str(q)]) == 2
        assert "error" in capsys.readouterr().err


class TestEval:
    def test_grid_eval_report(self, index_file, corpus_dir, tmp_path, capsys):
        manifest = json.loads((corpus_dir / "manifest.json").read_text())
        ids = {rec["name"]: rec["id"] for rec in manifest}
        cases = [
            {
                "picks": [
                    {"source": ids[f"grid_{i}_{i}"], "part": "legs"},
                    {"source": ids[f"grid_{j}_{j}"], "part": "backrest"},
                ],
                "ground_truth": ids[f"grid_{i}_{j}"],
            }
            for i in range(3)
            for j in range(3)
        ]
        c = tmp_path / "cases.json"
        c.write_text(json.dumps(cases))
        assert main(["eval", "--index", str(index_file), "--cases", str(c), "--k", "5"]) == 0
        captured = capsys.readouterr()
        report = json.loads(captured.out)
        assert report["n_cases"] == 9
        assert report["top1"] <= report["top5"]
        assert report["runtime_seconds"] > 0
        assert "top-1 accuracy" in captured.err


class TestProject:
    def test_csv_layout(self, index_file, tmp_path):
        out = tmp_path / "legs.csv"
        assert main(["project", "--index", str(index_file), "--part", "legs", "--out", str(out)]) == 0
        rows = list(csv.reader(out.open()))
        assert rows[0] == ["id", "x", "y"]
        assert len(rows) == 10

    def test_matches_project_2d(self, index_file, tmp_path):
        from partblend.index_store import load_index

        out = tmp_path / "legs.csv"
        main(["project", "--index", str(index_file), "--part", "legs", "--out", str(out)])
        rows = list(csv.reader(out.open()))[1:]
        got = np.array([[float(x), float(y)] for _id, x, y in rows])
        expected = manifold.project_2d(load_index(index_file).manifolds["legs"])
        assert np.allclose(got, expected, atol=1e-9)

    def test_unknown_part_exits_2(self, index_file, tmp_path):
        assert main([
            "project", "--index", str(index_file), "--part", "wheels",
            "--out", str(tmp_path / "w.csv"),
        ]) == 2
