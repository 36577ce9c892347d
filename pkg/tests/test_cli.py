import json
import os

import numpy as np
import pytest

from threshnet.cli import main, parse_args
from threshnet.specfun import norm_cdf_inv

DATA = os.path.join(os.path.dirname(__file__), "data")
TINY_NET = os.path.join(DATA, "tiny_net.txt")


class TestParseArgs:
    def test_mean_degree_resolved_at_parse(self):
        ns = parse_args(["sample", "--n", "1000", "--rho", "0.3",
                         "--mean-degree", "4", "--seed", "7", "--out", "g.txt"])
        assert ns.t == pytest.approx(norm_cdf_inv(1 - 4 / 999), abs=1e-12)
        assert ns.seed == 7

    def test_t_and_mean_degree_conflict_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            parse_args(["sample", "--n", "10", "--rho", "0", "--t", "1",
                        "--mean-degree", "4"])
        assert exc.value.code == 2

    def test_missing_required_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            parse_args(["sample", "--rho", "0.3", "--t", "1"])
        assert exc.value.code == 2

    def test_unknown_flag_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            parse_args(["analytic", "--n", "10", "--rho", "0", "--t", "1",
                        "--frobnicate"])
        assert exc.value.code == 2

    def test_env_seed_fallback(self, monkeypatch):
        monkeypatch.setenv("THRESHNET_SEED", "321")
        ns = parse_args(["sample", "--n", "10", "--rho", "0", "--t", "1"])
        assert ns.seed == 321


class TestSample:
    def test_writes_edge_list(self, tmp_path):
        out = tmp_path / "g.txt"
        rc = main(["sample", "--n", "50", "--rho", "0.2", "--mean-degree", "4",
                   "--seed", "3", "--out", str(out)])
        assert rc == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "# n=50"
        assert all(len(l.split()) == 2 for l in lines[1:])

    def test_repeat_runs_byte_identical(self, tmp_path):
        a, b = tmp_path / "a.txt", tmp_path / "b.txt"
        args = ["sample", "--n", "60", "--rho", "0.3", "--t", "1.5", "--seed", "9"]
        assert main(args + ["--out", str(a)]) == 0
        assert main(args + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_stdout_mode(self, capsys):
        assert main(["sample", "--n", "20", "--rho", "0", "--t", "2.0",
                     "--seed", "1"]) == 0
        assert capsys.readouterr().out.startswith("# n=20")


class TestAnalytic:
    def test_json_fields(self, capsys):
        rc = main(["analytic", "--n", "500", "--rho", "0.3", "--mean-degree", "4"])
        assert rc == 0
        data = json.loads(capsys.readouterr().out)
        for key in ("n", "t", "rho", "edge_density", "mean_degree",
                    "two_star_prob", "triangle_prob", "clustering",
                    "triangles_per_node", "degree_variance"):
            assert key in data
        assert data["mean_degree"] == pytest.approx(4.0, rel=1e-9)


class TestDegreeDist:
    def test_quadrature_csv(self, tmp_path):
        out = tmp_path / "dd.csv"
        rc = main(["degree-dist", "--n", "200", "--rho", "0.25",
                   "--mean-degree", "10", "--method", "quadrature",
                   "--order", "40", "--out", str(out)])
        assert rc == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "k,p_k"
        probs = np.array([float(l.split(",")[1]) for l in lines[1:]])
        assert probs.sum() == pytest.approx(1.0, abs=1e-6)

    def test_laplace_csv(self, capsys):
        rc = main(["degree-dist", "--n", "100", "--rho", "0.3",
                   "--mean-degree", "5", "--method", "laplace"])
        assert rc == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "k,p_k"
        assert len(lines) == 101


class TestFit:
    def test_fit_json(self, capsys):
        rc = main(["fit", "--edges", TINY_NET])
        assert rc == 0
        data = json.loads(capsys.readouterr().out)
        assert 0.0 <= data["rho"] <= 0.5
        assert data["target_mean"] == pytest.approx(4.7)

    def test_missing_file_is_runtime_error(self, capsys):
        rc = main(["fit", "--edges", "/nonexistent/net.txt"])
        assert rc == 1
        assert "error" in capsys.readouterr().err


class TestSweepGc:
    def test_end_to_end(self, tmp_path, capsys):
        out = tmp_path / "sweep.csv"
        rc = main(["sweep-gc", "--n", "150", "--rho", "0", "--k-min", "0.6",
                   "--k-max", "1.6", "--k-step", "0.2", "--samples", "6",
                   "--seed", "1", "--workers", "1", "--out", str(out)])
        assert rc == 0
        transition = json.loads(capsys.readouterr().out)
        assert 0.6 <= transition["k_critical"] <= 1.6
        assert transition["k_grid_step"] == pytest.approx(0.2)
        assert out.exists()

    def test_worker_independence_byte_identical(self, tmp_path, capsys):
        args = ["sweep-gc", "--n", "120", "--rho", "0.1", "--k-min", "0.8",
                "--k-max", "1.2", "--k-step", "0.2", "--samples", "5",
                "--seed", "2"]
        a, b = tmp_path / "w1.csv", tmp_path / "w8.csv"
        assert main(args + ["--workers", "1", "--out", str(a)]) == 0
        assert main(args + ["--workers", "8", "--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()


class TestPaths:
    def test_end_to_end(self, tmp_path):
        out = tmp_path / "paths.csv"
        rc = main(["paths", "--n-grid", "80,160", "--rho-grid", "0,0.3",
                   "--mean-degree", "5", "--samples", "4", "--seed", "5",
                   "--workers", "1", "--out", str(out)])
        assert rc == 0
        lines = [l for l in out.read_text().splitlines() if not l.startswith("#")]
        assert len(lines) == 5  # header + 4 grid points
        vals = [float(l.split(",")[4]) for l in lines[1:]]
        assert all(v >= 1.0 for v in vals)


class TestDisparity:
    def test_solve_only(self, capsys):
        rc = main(["disparity", "--n", "500", "--rho", "0.3",
                   "--mean-degree", "4"])
        assert rc == 0
        data = json.loads(capsys.readouterr().out)
        assert 0.0 < data["alpha"] < 1.0
        assert data["meanfield_mean_degree"] == pytest.approx(4.0, rel=1e-8)

    def test_with_simulation(self, tmp_path, capsys):
        out = tmp_path / "hist.csv"
        rc = main(["disparity", "--n", "120", "--rho", "0.3",
                   "--mean-degree", "4", "--samples", "3", "--seed", "11",
                   "--out", str(out)])
        assert rc == 0
        data = json.loads(capsys.readouterr().out)
        assert data["samples"] == 3
        assert data["realized_mean_degree"] > 0
        lines = [l for l in out.read_text().splitlines() if not l.startswith("#")]
        assert lines[0] == "k,count"
        assert sum(int(l.split(",")[1]) for l in lines[1:]) == 3 * 120


class TestFigure:
    def test_fig2_with_params(self, tmp_path):
        out = tmp_path / "fig2.csv"
        rc = main(["figure", "--id", "fig2", "--out", str(out), "--param",
                   "n=400", "--param", "grid=[0.0,0.3]", "--param",
                   "mean_degree=4.0"])
        assert rc == 0
        assert "rho,clustering,triangles_per_node" in out.read_text()

    def test_fig5_maps_to_sweep(self, tmp_path):
        out = tmp_path / "fig5.csv"
        rc = main(["figure", "--id", "fig5", "--out", str(out), "--seed", "3",
                   "--workers", "1", "--param", "n=100", "--param", "samples=4",
                   "--param", "k_min=0.5", "--param", "k_max=1.5",
                   "--param", "k_step=0.5"])
        assert rc == 0
        assert "second_largest_component" in out.read_text()

    def test_fig6_maps_to_paths(self, tmp_path):
        out = tmp_path / "fig6.csv"
        rc = main(["figure", "--id", "fig6", "--out", str(out), "--seed", "4",
                   "--workers", "1", "--param", "n_grid=[60,120]",
                   "--param", "rho_grid=[0.0]", "--param", "samples=3"])
        assert rc == 0
        assert "mean_shortest_path" in out.read_text()

    def test_unknown_figure_runtime_error(self, tmp_path, capsys):
        rc = main(["figure", "--id", "fig99", "--out", str(tmp_path / "x.csv")])
        assert rc == 1
        assert "unknown figure" in capsys.readouterr().err
