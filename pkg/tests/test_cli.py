import json
import os

import numpy as np
import pytest

import hclocal as hc
from hclocal.cli import main

from .conftest import dataset_path, i4_values


@pytest.fixture
def i4_file(tmp_path):
    path = tmp_path / "i4.hcsim"
    hc.save_matrix(hc.SimilarityMatrix(i4_values()), str(path))
    return str(path)


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestKernel:
    def test_iris_kernel(self, tmp_path, capsys):
        out = tmp_path / "iris.hcsim"
        code, stdout, _ = run_cli(capsys, "kernel", "-i",
                                  dataset_path("iris.csv"), "-o", str(out))
        assert code == 0
        info = json.loads(stdout)
        assert info["n"] == 150
        assert hc.load_matrix(str(out)).n == 150

    def test_sigma_zero_rejected(self, tmp_path, capsys):
        code, _, stderr = run_cli(
            capsys, "kernel", "-i", dataset_path("iris.csv"),
            "-o", str(tmp_path / "x"), "--sigma", "0")
        assert code == 1
        assert json.loads(stderr)["kind"] == "validation"

    def test_two_point_file(self, tmp_path, capsys):
        src = tmp_path / "two.csv"
        src.write_text("0.0\n2.0\n")
        out = tmp_path / "two.hcsim"
        code, stdout, _ = run_cli(capsys, "kernel", "-i", str(src),
                                  "-o", str(out))
        assert code == 0
        w = hc.load_matrix(str(out))
        assert w.n == 2
        assert w.values[0, 1] == pytest.approx(np.exp(-2.0))


class TestBuild:
    def test_average_on_i4(self, tmp_path, capsys, i4_file):
        out = tmp_path / "t.tree"
        code, stdout, _ = run_cli(capsys, "build", "--sim", i4_file,
                                  "--kind", "average", "--out", str(out))
        assert code == 0
        assert out.read_text().strip() == "((1,2),(3,4));"
        assert json.loads(stdout)["normalized"] == pytest.approx(0.6)

    def test_single_on_i4(self, tmp_path, capsys, i4_file):
        out = tmp_path / "t.tree"
        code, _, _ = run_cli(capsys, "build", "--sim", i4_file,
                             "--kind", "single", "--out", str(out))
        assert code == 0
        assert hc.parse(out.read_text()).validate()

    def test_ward_requires_data(self, tmp_path, capsys, i4_file):
        code, _, stderr = run_cli(capsys, "build", "--sim", i4_file,
                                  "--kind", "ward",
                                  "--out", str(tmp_path / "t"))
        assert code == 1
        assert "ward" in json.loads(stderr)["error"]


class TestRandomTree:
    def test_deterministic(self, tmp_path, capsys):
        a, b = tmp_path / "a.tree", tmp_path / "b.tree"
        run_cli(capsys, "random-tree", "--n", "12", "--seed", "3",
                "--out", str(a))
        run_cli(capsys, "random-tree", "--n", "12", "--seed", "3",
                "--out", str(b))
        assert a.read_text() == b.read_text()

    def test_env_seed_default(self, tmp_path, capsys, monkeypatch):
        a, b = tmp_path / "a.tree", tmp_path / "b.tree"
        monkeypatch.setenv("HC_SEED", "77")
        run_cli(capsys, "random-tree", "--n", "10", "--out", str(a))
        monkeypatch.delenv("HC_SEED")
        run_cli(capsys, "random-tree", "--n", "10", "--seed", "77",
                "--out", str(b))
        assert a.read_text() == b.read_text()


class TestSearchCommand:
    def test_greedy_from_random(self, tmp_path, capsys, i4_file):
        out = tmp_path / "final.tree"
        report = tmp_path / "report.json"
        log = tmp_path / "steps.tsv"
        code, stdout, _ = run_cli(
            capsys, "search", "--sim", i4_file, "--init", "random",
            "--variant", "greedy", "--seed", "1", "--out", str(out),
            "--report", str(report), "--log", str(log))
        assert code == 0
        brief = json.loads(stdout)
        assert brief["converged"]
        assert brief["final_revenue"] == pytest.approx(12.0)
        full = json.loads(report.read_text())
        assert full["certificate"]["locally_optimal"]
        header = log.read_text().splitlines()[0]
        assert header.split("\t") == ["step", "node_x", "variant", "gain",
                                      "revenue"]

    def test_average_link_init_converges_immediately(self, tmp_path, capsys,
                                                     i4_file):
        tree_file = tmp_path / "al.tree"
        run_cli(capsys, "build", "--sim", i4_file, "--kind", "average",
                "--out", str(tree_file))
        code, stdout, _ = run_cli(capsys, "search", "--sim", i4_file,
                                  "--init", str(tree_file), "--seed", "0")
        assert code == 0
        assert json.loads(stdout)["steps"] == 0

    def test_max_steps_cap_not_converged(self, tmp_path, capsys):
        rng = np.random.default_rng(60)
        v = rng.uniform(0, 1, (30, 30))
        v = (v + v.T) / 2
        np.fill_diagonal(v, 0.0)
        sim_file = tmp_path / "r.hcsim"
        hc.save_matrix(hc.SimilarityMatrix(v), str(sim_file))
        code, stdout, _ = run_cli(capsys, "search", "--sim", str(sim_file),
                                  "--init", "random", "--seed", "0",
                                  "--max-steps", "2")
        assert code == 0
        assert json.loads(stdout)["converged"] is False


class TestEvalCheck:
    def test_eval_i4_optimum(self, tmp_path, capsys, i4_file):
        tree_file = tmp_path / "t.tree"
        tree_file.write_text("((1,2),(3,4));\n")
        code, stdout, _ = run_cli(capsys, "eval", "--sim", i4_file,
                                  "--tree", str(tree_file))
        assert code == 0
        payload = json.loads(stdout)
        assert payload == {"revenue": 12.0, "cost": 28.0, "normalized": 0.6,
                           "duality_ok": True}

    def test_check_reports_margin(self, tmp_path, capsys, i4_file):
        tree_file = tmp_path / "t.tree"
        tree_file.write_text("((1,2),(3,4));\n")
        code, stdout, _ = run_cli(capsys, "check", "--sim", i4_file,
                                  "--tree", str(tree_file))
        assert code == 0
        cert = json.loads(stdout)
        assert cert["locally_optimal"]
        assert cert["bound_margin"] == pytest.approx(0.6 - 1 / 3)

    def test_size_mismatch_structured_error(self, tmp_path, capsys, i4_file):
        tree_file = tmp_path / "t.tree"
        tree_file.write_text("((1,2),3);\n")
        code, _, stderr = run_cli(capsys, "eval", "--sim", i4_file,
                                  "--tree", str(tree_file))
        assert code == 1
        assert json.loads(stderr)["kind"] == "validation"


class TestOracleCommand:
    def test_enumerate(self, capsys):
        code, stdout, _ = run_cli(capsys, "oracle", "enumerate", "--n", "4")
        assert code == 0
        assert json.loads(stdout)["count"] == 15

    def test_optimum(self, capsys, i4_file):
        code, stdout, _ = run_cli(capsys, "oracle", "optimum", "--sim",
                                  i4_file)
        assert code == 0
        payload = json.loads(stdout)
        assert payload["tree"] == "((1,2),(3,4));"
        assert payload["revenue"] == pytest.approx(12.0)

    def test_idist(self, tmp_path, capsys):
        a, b = tmp_path / "a.tree", tmp_path / "b.tree"
        a.write_text("((1,3),(2,4));")
        b.write_text("((1,(2,4)),3);")
        code, stdout, _ = run_cli(capsys, "oracle", "idist", "--tree1",
                                  str(a), "--tree2", str(b))
        assert code == 0
        assert json.loads(stdout)["idist"] == 1


class TestBench:
    def _write_config(self, tmp_path, runs=2):
        cfg = tmp_path / "bench.cfg"
        cfg.write_text(
            f"# tiny benchmark\n"
            f"runs = {runs}\n"
            f"seed = 1\n"
            f"sigma = auto\n"
            f"variants = greedy\n"
            f"linkages = single, complete, ward\n"
            f"output = {tmp_path / 'out'}\n"
            f"dataset = iris: {dataset_path('iris.csv')}\n")
        return str(cfg)

    @pytest.mark.slow
    def test_bench_end_to_end(self, tmp_path, capsys):
        cfg = self._write_config(tmp_path)
        code, stdout, _ = run_cli(capsys, "bench", "--config", cfg)
        assert code == 0
        assert "| Dataset |" in stdout
        records = (tmp_path / "out" / "records.tsv").read_text().splitlines()
        assert records[0].startswith("dataset\tmethod\tseed")
        assert len(records) > 3
        assert (tmp_path / "out" / "tables.md").exists()

    @pytest.mark.slow
    def test_bench_rerun_reproduces_cells(self, tmp_path, capsys):
        cfg = self._write_config(tmp_path)
        code1, out1, _ = run_cli(capsys, "bench", "--config", cfg)
        code2, out2, _ = run_cli(capsys, "bench", "--config", cfg)
        assert code1 == code2 == 0
        assert out1 == out2  # identical numeric cells
        # records file appended twice, numeric columns identical
        lines = (tmp_path / "out" / "records.tsv").read_text().splitlines()
        body = lines[1:]
        half = len(body) // 2
        strip = lambda row: [c for k, c in enumerate(row.split("\t"))
                             if k != 5]  # drop wall_time
        assert [strip(r) for r in body[:half]] == \
            [strip(r) for r in body[half:]]

    def test_empty_dataset_list_rejected(self, tmp_path, capsys):
        cfg = tmp_path / "bench.cfg"
        cfg.write_text("runs = 2\n")
        code, _, stderr = run_cli(capsys, "bench", "--config", str(cfg))
        assert code == 1
        assert "dataset" in json.loads(stderr)["error"]

    def test_unknown_key_rejected(self, tmp_path, capsys):
        cfg = tmp_path / "bench.cfg"
        cfg.write_text("bogus = 1\n")
        code, _, _ = run_cli(capsys, "bench", "--config", str(cfg))
        assert code == 1

    def test_missing_file_rejected(self, tmp_path, capsys):
        cfg = tmp_path / "bench.cfg"
        cfg.write_text("dataset = x: /nonexistent.csv\n")
        code, _, _ = run_cli(capsys, "bench", "--config", str(cfg))
        assert code == 1
