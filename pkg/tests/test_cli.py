import csv
import json
from pathlib import Path

import pytest

from herzlab.cli import (
    EXIT_CHECK,
    EXIT_CONFIG,
    EXIT_DIVERGENCE,
    EXIT_OK,
    ExperimentConfig,
    main,
)
from herzlab.analyticity import CSV_COLUMNS
from herzlab.initial_data import x3_imaginary, x2_gaussian
from herzlab.spectral import FrequencyGrid, save_field

ORACLE = Path(__file__).parent / "data" / "shell_indicator_oracle.json"
FAST = ["--N", "4", "--h", "0.5", "--set", "simulate.n_times=8"]


def run(capsys, *argv):
    code = main(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def read_csv(path):
    with open(path) as fh:
        return list(csv.reader(fh))


class TestConfig:
    def test_default_round_trip(self):
        cfg = ExperimentConfig()
        assert ExperimentConfig.from_dict(json.loads(cfg.to_json())) == cfg

    def test_dump_config_reflects_overrides(self, capsys):
        code, out, _ = run(capsys, "simulate", "--N", "5", "--set", "simulate.herz.q=4", "--dump-config")
        d = json.loads(out)
        assert code == EXIT_OK and d["grid"]["N"] == 5 and d["simulate"]["herz"]["q"] == 4

    def test_config_file(self, capsys, tmp_path):
        path = tmp_path / "c.json"
        path.write_text(json.dumps({"grid": {"N": 6}, "convolution": {"trials": 5}}))
        code, out, _ = run(capsys, "convolution-test", "--config", str(path), "--dump-config")
        d = json.loads(out)
        assert code == EXIT_OK and d["grid"]["N"] == 6 and d["convolution"]["trials"] == 5
        assert d["grid"]["h"] == 0.25

    @pytest.mark.parametrize(
        "argv",
        [
            ["simulate", "--set", "grid.N=-1"],
            ["simulate", "--set", "simulate.nope=1"],
            ["simulate", "--set", "bogus"],
            ["simulate", "--set", "simulate.herz.p=0.5"],
            ["simulate", "--config", "/nonexistent.json"],
            ["convolution-test", "--set", "convolution.lam=5"],
            ["convolution-test", "--set", "convolution.herz.j_max=4"],
            ["convolution-test", "--set", 'convolution.mode="other"'],
            ["simulate", "--set", 'simulate.family="vortex"'],
            ["nonsense"],
        ],
    )
    def test_config_errors_exit_2(self, capsys, argv):
        code, _, err = run(capsys, *argv)
        assert code == EXIT_CONFIG
        if argv[0] != "nonsense":
            assert json.loads(err)["error"] == "config"

    def test_unknown_key_in_file(self, capsys, tmp_path):
        path = tmp_path / "c.json"
        path.write_text(json.dumps({"grid": {"M": 3}}))
        assert run(capsys, "simulate", "--config", str(path))[0] == EXIT_CONFIG


class TestSimulate:
    def test_artifacts(self, capsys, tmp_path):
        code, out, _ = run(capsys, "simulate", *FAST, "--out", str(tmp_path))
        assert code == EXIT_OK
        s = json.loads(out)
        assert s["converged"] and s["schema_version"] == 1 and s["max_x2_residual"] <= 1e-10
        for name in ("residuals.csv", "times.csv", "symmetry.csv", "norms.csv", "summary.json"):
            assert (tmp_path / name).exists()
        norms = read_csv(tmp_path / "norms.csv")
        assert norms[0] == ["quantity", "alpha", "p", "q", "j_min", "j_max", "norm"]
        assert [r[0] for r in norms[1:]] == ["u0", "U", "U_e"]

    def test_byte_identical_reports(self, capsys, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        run(capsys, "simulate", *FAST, "--out", str(a))
        run(capsys, "simulate", *FAST, "--out", str(b))
        for f in a.iterdir():
            assert f.read_bytes() == (b / f.name).read_bytes()

    def test_zero_data(self, capsys):
        code, out, _ = run(capsys, "simulate", *FAST, "--family", "zero")
        s = json.loads(out)
        assert code == EXIT_OK and s["iterations"] == 1 and s["U_e_herz_norm"] == 0

    def test_large_data_exit_3(self, capsys):
        code, _, err = run(capsys, "simulate", *FAST, "--eps", "10")
        assert code == EXIT_DIVERGENCE
        assert "smallness" in json.loads(err)["message"]

    def test_reduction(self, capsys):
        code, out, _ = run(capsys, "simulate", *FAST, "--family", "x3_imaginary", "--reduction", "X3-imaginary")
        s = json.loads(out)
        assert code == EXIT_OK and s["real_unknowns_per_mode"] == 1 and s["converged"]

    def test_reduction_precondition_exit_4(self, capsys):
        code, _, err = run(capsys, "simulate", *FAST, "--reduction", "X3-imaginary")
        assert code == EXIT_CHECK

    def test_init_path(self, capsys, tmp_path):
        g = FrequencyGrid(4, 0.5)
        save_field(x3_imaginary(g), tmp_path / "u0.npz")
        code, out, _ = run(capsys, "simulate", *FAST, "--set", f'simulate.init_path="{tmp_path / "u0.npz"}"')
        assert code == EXIT_OK and json.loads(out)["family"] is None

    def test_init_path_grid_mismatch(self, capsys, tmp_path):
        save_field(x2_gaussian(FrequencyGrid(3, 0.5)), tmp_path / "u0.json")
        code, _, _ = run(capsys, "simulate", *FAST, "--set", f'simulate.init_path="{tmp_path / "u0.json"}"')
        assert code == EXIT_CONFIG


class TestSymmetrySearch:
    def test_closure_table(self, capsys, tmp_path):
        code, out, _ = run(capsys, "symmetry-search", "--out", str(tmp_path))
        s = json.loads(out)
        assert code == EXIT_OK and s["x2_present"]
        rows = read_csv(tmp_path / "closure.csv")
        assert len(rows) == 1 + 64 * 64
        assert sum(r[4] == "True" for r in rows[1:]) == 8


class TestConvolution:
    def test_random_report(self, capsys, tmp_path):
        code, out, _ = run(capsys, "convolution-test", "--trials", "3", "--out", str(tmp_path))
        assert code == EXIT_OK
        rows = read_csv(tmp_path / "report.csv")
        assert tuple(rows[0]) == CSV_COLUMNS and len(rows) == 4
        assert json.loads(out)["decomposition_ok"] is True

    def test_zero_trials_header_only(self, capsys, tmp_path):
        code, _, _ = run(capsys, "convolution-test", "--trials", "0", "--out", str(tmp_path))
        assert code == EXIT_OK
        assert (tmp_path / "report.csv").read_text() == ",".join(CSV_COLUMNS) + "\n"

    def test_seeded_csv_bit_identical(self, capsys, tmp_path):
        for d in ("a", "b"):
            run(capsys, "convolution-test", "--trials", "2", "--seed", "9", "--out", str(tmp_path / d))
        assert (tmp_path / "a" / "report.csv").read_bytes() == (tmp_path / "b" / "report.csv").read_bytes()

    def test_shell_indicator_matches_committed_oracle(self, capsys):
        code, out, _ = run(capsys, "convolution-test", "--mode", "shell_indicator", "--oracle", str(ORACLE))
        s = json.loads(out)
        assert code == EXIT_OK and s["oracle_max_rel_error"] <= 1e-10

    def test_shell_indicator_mismatch_exit_4(self, capsys, tmp_path):
        bad = json.loads(ORACLE.read_text())
        bad["values"]["lhs"] *= 1.001
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(bad))
        code, _, _ = run(capsys, "convolution-test", "--mode", "shell_indicator", "--oracle", str(path))
        assert code == EXIT_CHECK


class TestAnalyticity:
    def test_checks_pass(self, capsys, tmp_path):
        code, out, _ = run(capsys, "analyticity-check", "--N", "4", "--h", "0.5", "--samples", "2000",
                           "--set", "simulate.n_times=8", "--out", str(tmp_path))
        s = json.loads(out)
        assert code == EXIT_OK
        assert s["heat_flow_U_e_rel_dev"] <= 1e-12 and s["exponential_bound_violations"] == 0
        assert all(r <= s["majorant_constant"] for r in s["majorant_ratios"])
