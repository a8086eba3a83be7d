import json

import numpy as np
import pytest

from pava.cli import main
from pava.dataset import generate_synthetic, save_labels_csv, save_points_csv
from pava.metrics import adjusted_rand_index

from oracles import euclidean_matrix


@pytest.fixture
def moons_files(tmp_path):
    points, labels = generate_synthetic("twomoons", 600, seed=1)
    pf = tmp_path / "tm.points.csv"
    lf = tmp_path / "tm.labels.csv"
    save_points_csv(pf, points)
    save_labels_csv(lf, labels)
    return pf, lf


class TestGenerate:
    def test_writes_both_files(self, tmp_path, capsys):
        out = tmp_path / "tm"
        code = main(["generate", "--shape", "twomoons", "--n", "600",
                     "--seed", "1", "--out", str(out)])
        assert code == 0
        points = (tmp_path / "tm.points.csv").read_text().strip().splitlines()
        labels = (tmp_path / "tm.labels.csv").read_text().strip().splitlines()
        assert len(points) == 600
        assert len(labels) == 600
        assert "twomoons" in capsys.readouterr().out

    def test_noise_shape_row_count(self, tmp_path):
        out = tmp_path / "tmn"
        assert main(["generate", "--shape", "twomoons_noise", "--n", "700",
                     "--seed", "1", "--out", str(out)]) == 0
        assert len((tmp_path / "tmn.points.csv").read_text().strip().splitlines()) == 700

    def test_unknown_shape_usage_error(self, tmp_path, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["generate", "--shape", "hexagon", "--n", "10", "--out", str(tmp_path / "x")])
        assert exc.value.code == 2
        assert "usage" in capsys.readouterr().err.lower()


class TestCluster:
    def test_end_to_end_twomoons(self, moons_files, tmp_path, capsys):
        pf, lf = moons_files
        labels_out = tmp_path / "pred.csv"
        report_out = tmp_path / "report.json"
        code = main(["cluster", str(pf), "--labels-out", str(labels_out),
                     "--report-out", str(report_out)])
        assert code == 0
        pred = np.loadtxt(labels_out, dtype=int)
        assert set(np.unique(pred)) == {1, 2}
        truth = np.loadtxt(lf, dtype=int)
        assert adjusted_rand_index(truth, pred) >= 0.99
        report = json.loads(report_out.read_text())
        assert report["schema"] == 1
        assert report["m"] == 2
        assert report["n"] == 600
        assert len(report["rounds"]) == report["m"]

    def test_default_output_paths(self, moons_files, tmp_path):
        pf, _ = moons_files
        assert main(["cluster", str(pf)]) == 0
        assert (tmp_path / "tm.pred.csv").exists()
        assert (tmp_path / "tm.report.json").exists()

    def test_metrics_in_report(self, moons_files, tmp_path):
        pf, lf = moons_files
        report_out = tmp_path / "r.json"
        assert main(["cluster", str(pf), "--labels-true", str(lf),
                     "--report-out", str(report_out),
                     "--labels-out", str(tmp_path / "p.csv")]) == 0
        metrics = json.loads(report_out.read_text())["metrics"]
        assert metrics["ari"] >= 0.99
        assert 0.0 <= metrics["ri"] <= 1.0

    def test_matrix_mode(self, tmp_path):
        points, truth = generate_synthetic("blobs", 120, seed=3)
        mf = tmp_path / "dist.csv"
        np.savetxt(mf, euclidean_matrix(points.coords), fmt="%.17g", delimiter=",")
        labels_out = tmp_path / "pred.csv"
        code = main(["cluster", "--matrix", str(mf), "--labels-out", str(labels_out),
                     "--report-out", str(tmp_path / "r.json")])
        assert code == 0
        pred = np.loadtxt(labels_out, dtype=int)
        assert adjusted_rand_index(truth.labels, pred) == 1.0

    def test_k_too_large_exit_2(self, moons_files, capsys):
        pf, _ = moons_files
        assert main(["cluster", str(pf), "--k", "600"]) == 2
        assert "k must be < N" in capsys.readouterr().err

    def test_missing_file_exit_2(self, tmp_path):
        assert main(["cluster", str(tmp_path / "nope.csv")]) == 2

    def test_corrupt_file_exit_1(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("1,2\n3,oops\n")
        assert main(["cluster", str(bad)]) == 1

    def test_emit_artifacts(self, moons_files, tmp_path):
        pf, _ = moons_files
        prefix = tmp_path / "dump"
        code = main([
            "cluster", str(pf),
            "--labels-out", str(tmp_path / "p.csv"),
            "--report-out", str(tmp_path / "r.json"),
            "--emit-mst", str(prefix),
            "--emit-kdist", str(tmp_path / "kdist.csv"),
            "--emit-histogram", str(prefix),
        ])
        assert code == 0
        raw_edges = (tmp_path / "dump.mst_raw.csv").read_text().splitlines()
        adj_edges = (tmp_path / "dump.mst_adjusted.csv").read_text().splitlines()
        assert raw_edges[0] == "u,v,weight"
        assert len(raw_edges) == 600  # header + 599 edges
        assert len(adj_edges) == 600
        kdist = np.loadtxt(tmp_path / "kdist.csv")
        assert kdist.shape == (600,)
        hist1 = (tmp_path / "dump.round1.csv").read_text().splitlines()
        assert hist1[0] == "bin_center,raw_freq,shifted_freq,smoothed_freq,radius"
        assert len(hist1) == 201

    def test_no_adjust_flag(self, tmp_path):
        points, truth = generate_synthetic("spiral", 300, seed=2)
        pf = tmp_path / "sp.points.csv"
        save_points_csv(pf, points)
        labels_out = tmp_path / "pred.csv"
        assert main(["cluster", str(pf), "--no-adjust",
                     "--labels-out", str(labels_out),
                     "--report-out", str(tmp_path / "r.json")]) == 0
        pred = np.loadtxt(labels_out, dtype=int)
        assert adjusted_rand_index(truth.labels, pred) == 1.0


class TestEvaluate:
    def test_identical_files(self, tmp_path, capsys):
        f = tmp_path / "l.csv"
        save_labels_csv(f, np.array([1, 1, 2, 2]))
        assert main(["evaluate", str(f), str(f)]) == 0
        assert capsys.readouterr().out.strip() == "1.0,1.0,1.0"

    def test_crossed_pair(self, tmp_path, capsys):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        save_labels_csv(a, np.array([1, 2, 1, 2]))
        save_labels_csv(b, np.array([1, 1, 2, 2]))
        assert main(["evaluate", str(a), str(b)]) == 0
        ri = float(capsys.readouterr().out.split(",")[0])
        assert ri == pytest.approx(1 / 3)

    def test_length_mismatch_exit_2(self, tmp_path):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        save_labels_csv(a, np.array([1, 2]))
        save_labels_csv(b, np.array([1, 2, 3]))
        assert main(["evaluate", str(a), str(b)]) == 2

    def test_missing_file_exit_2(self, tmp_path, capsys):
        a = tmp_path / "a.csv"
        save_labels_csv(a, np.array([1, 2]))
        assert main(["evaluate", str(a), str(tmp_path / "gone.csv")]) == 2
        assert "gone.csv" in capsys.readouterr().err


class TestSweep:
    def test_rows_and_stability(self, tmp_path, capsys):
        points, labels = generate_synthetic("twomoons_noise", 700, seed=1)
        pf = tmp_path / "tmn.points.csv"
        lf = tmp_path / "tmn.labels.csv"
        save_points_csv(pf, points)
        save_labels_csv(lf, labels)
        code = main(["sweep", str(pf), "--k-values", "5,6,7,8",
                     "--labels-true", str(lf)])
        assert code == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0].startswith("dataset,k,repeat,seed,RI,ARI,FS,M")
        assert len(lines) == 5
        aris = [float(line.split(",")[5]) for line in lines[1:]]
        assert max(aris) - min(aris) <= 0.10

    def test_single_k_matches_cluster(self, moons_files, tmp_path, capsys):
        pf, lf = moons_files
        labels_out = tmp_path / "pred.csv"
        main(["cluster", str(pf), "--k", "7", "--labels-out", str(labels_out),
              "--report-out", str(tmp_path / "r.json"), "--labels-true", str(lf)])
        report = json.loads((tmp_path / "r.json").read_text())
        capsys.readouterr()
        main(["sweep", str(pf), "--k-values", "7", "--labels-true", str(lf)])
        row = capsys.readouterr().out.strip().splitlines()[1].split(",")
        assert float(row[5]) == pytest.approx(report["metrics"]["ari"], abs=1e-12)
        assert int(row[7]) == report["m"]

    def test_empty_k_list_exit_2(self, moons_files):
        pf, _ = moons_files
        assert main(["sweep", str(pf), "--k-values", ","]) == 2

    def test_repeats_row_count(self, moons_files, capsys):
        pf, _ = moons_files
        assert main(["sweep", str(pf), "--k-values", "6,7", "--repeats", "2"]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 5  # header + 2 k values x 2 repeats

    def test_output_file(self, moons_files, tmp_path):
        pf, _ = moons_files
        out = tmp_path / "sweep.csv"
        assert main(["sweep", str(pf), "--k-values", "7", "--out", str(out)]) == 0
        assert out.read_text().startswith("dataset,")


class TestDeterminism:
    def test_repeated_cluster_runs_byte_identical(self, moons_files, tmp_path):
        pf, _ = moons_files
        outputs = []
        for i in range(3):
            labels_out = tmp_path / f"pred{i}.csv"
            main(["cluster", str(pf), "--labels-out", str(labels_out),
                  "--report-out", str(tmp_path / f"r{i}.json")])
            outputs.append(labels_out.read_bytes())
        assert outputs[0] == outputs[1] == outputs[2]

    def test_generate_deterministic(self, tmp_path):
        a = tmp_path / "a"
        b = tmp_path / "b"
        main(["generate", "--shape", "spiral", "--n", "90", "--seed", "4", "--out", str(a)])
        main(["generate", "--shape", "spiral", "--n", "90", "--seed", "4", "--out", str(b)])
        assert (tmp_path / "a.points.csv").read_bytes() == (tmp_path / "b.points.csv").read_bytes()
