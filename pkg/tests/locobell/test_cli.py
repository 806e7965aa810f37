
import subprocess
import sys

import pytest
import numpy as np
import pandas as pd

from numpy.testing import assert_allclose

import locobell
from locobell.cli import (
    EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_PASS, EXIT_USAGE,
    UsageError, main, parse_boundary_data, parse_key_values, parse_points, parse_window,
)

STRIP = ["--preset", "bmo", "--epsilon", "0.5"]


def run_locobell(*args):
    return subprocess.run(
        [sys.executable, "-m", "locobell", *args],
        capture_output=True,
        text=True,
    )


class TestParsers:

    def test_key_values(self):

        text = "preset=ap p1=1  # the A_2 class\np2=-1\n\nQ=2\n"

        reference = {"preset": "ap", "p1": "1", "p2": "-1", "Q": "2"}

        assert parse_key_values(text) == reference

    def test_key_values_malformed(self):
        with pytest.raises(UsageError, match="expected 'key=value', got 'preset'"):
            parse_key_values("preset bmo")

    def test_boundary_data(self):

        assert parse_boundary_data("exp") == ("exp", {})
        assert parse_boundary_data("power p=4 sign=-1") == ("power", {"p": "4", "sign": "-1"})

        with pytest.raises(UsageError):
            parse_boundary_data("  ")

    def test_window(self):

        assert parse_window("-1,2") == (-1.0, 2.0)
        assert parse_window("0, 1, -1, 3") == ((0.0, 1.0), (-1.0, 3.0))

        with pytest.raises(UsageError, match="'--window' must have 2 or 4 values"):
            parse_window("1,2,3")
        with pytest.raises(UsageError, match="comma separated numbers"):
            parse_window("a,b")

    def test_points(self):

        assert_allclose(parse_points("0,0.1;0.3,0.2"), [[0.0, 0.1], [0.3, 0.2]])

        with pytest.raises(UsageError):
            parse_points("0,0.1,0.2")


class TestUsageErrors:

    def test_resolution(self, tmp_path):
        argv = ["solve", *STRIP, "--f", "exp", "--resolution", "0", "--out-dir", str(tmp_path)]
        assert main(argv) == EXIT_USAGE

    def test_malformed_domain_file(self, tmp_path):

        domain_file = tmp_path / "domain.txt"
        domain_file.write_text("preset bmo\n")

        argv = ["solve", "--domain-file", str(domain_file), "--f", "exp", "--out-dir", str(tmp_path)]
        assert main(argv) == EXIT_USAGE

    def test_domain_file_without_preset(self, tmp_path):

        domain_file = tmp_path / "domain.txt"
        domain_file.write_text("epsilon=0.5\n")

        argv = ["solve", "--domain-file", str(domain_file), "--f", "exp", "--out-dir", str(tmp_path)]
        assert main(argv) == EXIT_USAGE

    def test_missing_domain_file(self, tmp_path):
        argv = ["solve", "--domain-file", str(tmp_path / "nowhere.txt"), "--f", "exp", "--out-dir", str(tmp_path)]
        assert main(argv) == EXIT_USAGE

    def test_unknown_config_key(self, tmp_path):

        config = tmp_path / "config.txt"
        config.write_text("tolerance=1e-8\nspeed=fast\n")

        argv = ["solve", *STRIP, "--f", "exp", "--config", str(config), "--out-dir", str(tmp_path)]
        assert main(argv) == EXIT_USAGE

    def test_unknown_boundary_data(self, tmp_path):
        argv = ["solve", *STRIP, "--f", "gamma", "--out-dir", str(tmp_path)]
        assert main(argv) == EXIT_USAGE

    def test_missing_parameter(self, tmp_path):
        argv = ["solve", "--preset", "bmo", "--f", "exp", "--out-dir", str(tmp_path)]
        assert main(argv) == EXIT_USAGE

    def test_argparse_error(self):

        with pytest.raises(SystemExit) as error:
            main(["solve", *STRIP])

        assert error.value.code == EXIT_USAGE

    def test_point_outside(self, tmp_path):
        argv = [
            "gap", *STRIP, "--f", "affine", "--window=-1,1", "--resolution", "0.25",
            "--points", "0,3", "--out-dir", str(tmp_path),
        ]
        assert main(argv) == EXIT_USAGE


class TestFailures:

    def test_invalid_exponents(self, tmp_path):
        argv = ["diagnose", "--preset", "ap", "--p1", "1", "--p2", "2", "--Q", "2", "--f", "exp",
                "--out-dir", str(tmp_path)]
        assert main(argv) == EXIT_FAIL

    def test_empty_mesh(self, tmp_path):
        argv = ["solve", *STRIP, "--f", "exp", "--window=10,11,0,1", "--out-dir", str(tmp_path)]
        assert main(argv) == EXIT_FAIL

    def test_cups_of_data_that_is_not_smooth(self, tmp_path):
        argv = ["cups", *STRIP, "--f", "indicator", "--out-dir", str(tmp_path)]
        assert main(argv) == EXIT_FAIL


class TestDiagnose:

    def test_strip(self, tmp_path):

        argv = ["diagnose", *STRIP, "--f", "exp", "--directions", "36", "--out-dir", str(tmp_path)]
        code = main(argv)

        assert code in (EXIT_PASS, EXIT_INCONCLUSIVE)

        verdicts = pd.read_csv(tmp_path / "verdicts.csv")
        assert list(verdicts.columns) == ["condition", "verdict", "details"]
        assert "torsion" in set(verdicts["condition"])
        assert {"force right", "force left"} <= set(verdicts["condition"])
        assert (tmp_path / "domain.svg").exists()

    def test_domain_file(self, tmp_path):

        domain_file = tmp_path / "strip.txt"
        domain_file.write_text("# exponential strip\npreset=reverse_jensen phi=exp Q=2\n")

        argv = ["diagnose", "--domain-file", str(domain_file), "--f", "exp lambda=0.5", "--directions", "36",
                "--out-dir", str(tmp_path)]

        assert main(argv) in (EXIT_PASS, EXIT_INCONCLUSIVE)
        assert (tmp_path / "verdicts.csv").exists()


class TestSolve:

    def test_affine_data(self, tmp_path):

        argv = ["solve", *STRIP, "--f", "affine", "--window=-1,1", "--resolution", "0.25",
                "--out-dir", str(tmp_path)]

        assert main(argv) == EXIT_PASS

        for name in ("field.csv", "nodes.csv", "edges.csv", "convergence.csv", "field.svg"):
            assert (tmp_path / name).exists()

        field = pd.read_csv(tmp_path / "field.csv")
        assert list(field.columns) == ["x1", "x2", "value", "pinned_at_ceiling", "kind"]
        assert_allclose(field["value"], field["x2"], atol=1e-8)

    def test_config_and_flags(self, tmp_path):

        config = tmp_path / "config.txt"
        config.write_text("resolution=0.25\nmax_iters=1\n")
        argv = ["solve", *STRIP, "--f", "exp", "--window=-1,1", "--config", str(config), "--out-dir", str(tmp_path)]

        # a single sweep does not converge
        assert main(argv) == EXIT_INCONCLUSIVE

        # flags take precedence over the configuration file
        assert main(argv + ["--max-iters", "100000"]) == EXIT_PASS


class TestGap:

    def test_affine_data(self, tmp_path):

        argv = ["gap", *STRIP, "--f", "affine", "--window=-1,1", "--resolution", "0.25",
                "--points", "0,0.1;0.3,0.2", "--budget", "6", "--out-dir", str(tmp_path)]

        assert main(argv) == EXIT_PASS

        gap = pd.read_csv(tmp_path / "gap.csv")
        assert list(gap.columns) == ["x1", "x2", "lower", "upper", "gap", "rel_gap", "status"]
        assert list(gap["status"]) == ["ok", "ok", "max"]
        assert abs(gap["gap"].iloc[-1]) < 1e-8

    def test_square_data(self, tmp_path):

        # t^2 on the parabola is x2, so both bounds equal x2 on the inner and outer boundary
        argv = ["gap", "--preset", "bmo", "--epsilon", "1", "--f", "square", "--window=-1,1", "--resolution", "0.25",
                "--points", "0,1;0.5,0.25", "--budget", "10", "--out-dir", str(tmp_path)]

        assert main(argv) == EXIT_PASS

        gap = pd.read_csv(tmp_path / "gap.csv").iloc[:2]
        assert_allclose(gap["lower"], [1.0, 0.25], rtol=1e-9)
        assert_allclose(gap["upper"], [1.0, 0.25], atol=1e-8)


class TestCups:

    def test_single_cup(self, tmp_path):

        argv = ["cups", "--preset", "bmo", "--epsilon", "1", "--f", "power p=4 sign=-1", "--window=-3,3",
                "--out-dir", str(tmp_path)]

        assert main(argv) == EXIT_PASS

        chords = pd.read_csv(tmp_path / "chords.csv")
        assert len(chords) > 10
        assert_allclose(chords["cup"], 0.0, atol=1e-9)
        assert_allclose(chords["a"], -chords["b"], atol=1e-6)
        assert (tmp_path / "chords.svg").exists()

    def test_sin_cups(self, tmp_path):

        argv = ["cups", *STRIP, "--f", "sin", "--window=-3,6", "--out-dir", str(tmp_path)]

        assert main(argv) == EXIT_PASS

        chords = pd.read_csv(tmp_path / "chords.csv")
        assert_allclose(sorted(chords["cup"].unique()), [-np.pi / 2, 3 * np.pi / 2], atol=1e-8)

        for cup, family in chords.groupby("cup"):
            assert_allclose(family["a"] + family["b"], 2 * cup, atol=1e-6)
            assert family["admissible"].iloc[5:].all()
            last = family.iloc[-1]
            assert last["b"] - last["a"] == pytest.approx(1.0, abs=1e-3)

    def test_no_cup(self, tmp_path):

        argv = ["cups", *STRIP, "--f", "linear", "--window=-3,3", "--out-dir", str(tmp_path)]

        assert main(argv) == EXIT_PASS

        chords = pd.read_csv(tmp_path / "chords.csv")
        assert len(chords) == 0
        assert list(chords.columns) == ["cup", "a", "b", "residual", "diff_ineq_a", "diff_ineq_b", "admissible"]


class TestModule:

    def test_version(self):

        result = run_locobell("--version")

        assert result.returncode == 0
        assert f"locobell {locobell.__version__}" in result.stdout

    def test_usage_exit_code(self, tmp_path):
        result = run_locobell("solve", *STRIP, "--f", "exp", "--resolution", "-1", "--out-dir", str(tmp_path))
        assert result.returncode == EXIT_USAGE
        assert "'resolution' must be greater than 0" in result.stderr

    def test_deterministic_output(self, tmp_path):

        outputs = []
        for run in ("first", "second"):
            out = tmp_path / run
            result = run_locobell(
                "solve", *STRIP, "--f", "exp", "--window=-1,1", "--resolution", "0.25", "--out-dir", str(out)
            )
            assert result.returncode == EXIT_PASS
            outputs.append(out)

        for name in ("field.csv", "nodes.csv", "edges.csv", "convergence.csv", "field.svg"):
            assert (outputs[0] / name).read_bytes() == (outputs[1] / name).read_bytes()

        field = pd.read_csv(outputs[0] / "field.csv")
        assert np.all(np.isfinite(field["value"]))
