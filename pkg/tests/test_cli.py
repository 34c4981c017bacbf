"""
Command-line surface: output formats, exit codes and agreement with the
library calls behind each command.
"""

import csv
import io
import logging
import math

import numpy as np
import pytest

import cli
from interval import summarize_sample, t_test_power_ci
from power import TwoSidedTSpec

SEED = 20070101


def run(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def rows(text):
    return list(csv.reader(io.StringIO(text)))


def write_lines(path, lines):
    path.write_text("\n".join(lines) + "\n")
    return str(path)


class TestFormat:
    def test_significant_digits(self):
        assert cli.fmt(0.05) == "0.05"
        assert cli.fmt(1 / 3) == "0.3333333333"
        assert cli.fmt(12345678901.0) == "1.23456789e+10"
        assert cli.fmt(7) == "7"

    def test_read_observations(self, tmp_path):
        path = write_lines(tmp_path / "y.txt", ["1.5", "", "  -2e-1 ", "3"])
        assert cli.read_observations(path) == [1.5, -0.2, 3.0]


class TestPower:
    def test_size(self, capsys):
        code, out, _ = run(capsys, "power", "--u", "1", "--v", "9", "--alpha", "0.05", "--delta", "0")
        assert code == 0
        assert out == "0.05\n"

    def test_sigma_and_lambda(self, capsys):
        _, by_delta, _ = run(capsys, "power", "--u", "2", "--v", "12", "--alpha", "0.05", "--delta", "3")
        _, by_sigma, _ = run(
            capsys, "power", "--u", "2", "--v", "12", "--alpha", "0.05", "--sigma", "2", "--lambda", "6"
        )
        assert by_delta == by_sigma
        assert 0.05 < float(by_delta) < 1.0

    @pytest.mark.parametrize(
        "extra",
        [
            [],
            ["--delta", "1", "--sigma", "1", "--lambda", "1"],
            ["--sigma", "1"],
        ],
    )
    def test_flag_combinations(self, capsys, extra):
        code, out, err = run(capsys, "power", "--u", "1", "--v", "9", "--alpha", "0.05", *extra)
        assert code == 2
        assert out == ""
        assert "error" in err

    def test_missing_required_flag(self, capsys):
        with pytest.raises(SystemExit) as exc:
            cli.main(["power", "--u", "1", "--alpha", "0.05", "--delta", "1"])
        assert exc.value.code == 2

    def test_invalid_value(self, capsys):
        code, _, _ = run(capsys, "power", "--u", "1", "--v", "9", "--alpha", "1.5", "--delta", "1")
        assert code == 2

    def test_out_file(self, capsys, tmp_path):
        out_path = tmp_path / "power.txt"
        code, out, _ = run(
            capsys, "power", "--u", "1", "--v", "9", "--alpha", "0.05", "--delta", "0", "--out", str(out_path)
        )
        assert code == 0 and out == ""
        assert out_path.read_text() == "0.05\n"


class TestCi:
    def test_matches_library(self, capsys, tmp_path):
        y = np.random.default_rng(SEED).normal(0.7, 1.2, 12)
        path = write_lines(tmp_path / "y.txt", [repr(float(v)) for v in y])
        code, out, _ = run(capsys, "ci", "--mu", "1", "--mu0", "0", "--data", path)
        assert code == 0

        spec = TwoSidedTSpec(n=12, mu0=0.0, mu=1.0, alpha=0.05)
        sigma_iv, power_iv, mle = t_test_power_ci(spec, summarize_sample(y), 0.05)
        expected = [cli.fmt(v) for v in (sigma_iv.a, sigma_iv.b, power_iv.lo, power_iv.hi, mle)]
        assert rows(out) == [["a", "b", "power_lo", "power_hi", "power_mle"], expected]

    def test_precomputed_q(self, capsys):
        code, out, _ = run(capsys, "ci", "--n", "10", "--q", "9", "--mu", "1", "--mu0", "0")
        assert code == 0
        a, b = (float(v) for v in rows(out)[1][:2])
        assert abs(a - 0.6878) <= 1e-3 and abs(b - 1.8256) <= 1e-3

    def test_null_mean(self, capsys):
        code, out, _ = run(capsys, "ci", "--n", "10", "--q", "9", "--mu", "2", "--mu0", "2")
        assert code == 0
        assert rows(out)[1][2:] == ["0.05", "0.05", "0.05"]

    def test_constant_data(self, capsys, caplog, tmp_path):
        path = write_lines(tmp_path / "y.txt", ["4.2"] * 6)
        code, out, _ = run(capsys, "ci", "--mu", "1", "--mu0", "0", "--data", path)
        assert code == 1
        assert out == ""
        assert any(r.name == "cli" and r.levelno == logging.ERROR for r in caplog.records)

    def test_non_numeric_line(self, capsys, tmp_path):
        path = write_lines(tmp_path / "y.txt", ["1.0", "2.0", "abc", "4.0"])
        code, _, err = run(capsys, "ci", "--mu", "1", "--mu0", "0", "--data", path)
        assert code == 2
        assert ":3:" in err

    def test_missing_and_empty_files(self, capsys, tmp_path):
        code, _, _ = run(capsys, "ci", "--mu", "1", "--mu0", "0", "--data", str(tmp_path / "nope.txt"))
        assert code == 2
        empty = write_lines(tmp_path / "empty.txt", [""])
        code, _, _ = run(capsys, "ci", "--mu", "1", "--mu0", "0", "--data", empty)
        assert code == 2

    def test_data_or_q_required(self, capsys):
        code, _, _ = run(capsys, "ci", "--n", "10", "--mu", "1", "--mu0", "0")
        assert code == 2

    def test_min_length_warns(self, capsys, caplog):
        code, out, _ = run(
            capsys, "ci", "--n", "10", "--q", "9", "--mu", "1", "--mu0", "0", "--rule", "min_length"
        )
        assert code == 0
        assert len(rows(out)) == 2
        assert "not shown" in caplog.text


class TestFigure1:
    @pytest.fixture
    def table(self, capsys):
        code, out, _ = run(capsys, "figure1")
        assert code == 0
        body = rows(out)
        assert body[0] == ["effect", "power_mle", "ci_lo", "ci_hi"]
        return np.array([[float(v) for v in row] for row in body[1:]])

    def test_grid(self, table):
        assert table.shape == (81, 4)
        assert table[0, 0] == -2.0 and table[-1, 0] == 2.0

    def test_center_row(self, table):
        centre = table[np.argmin(np.abs(table[:, 0]))]
        assert np.allclose(centre, [0.0, 0.05, 0.05, 0.05], atol=1e-9), f"{centre}"

    def test_symmetric(self, table):
        assert np.allclose(table[:, 1:], table[::-1, 1:], rtol=0.0, atol=1e-9)

    def test_mle_increasing_in_effect_size(self, table):
        right = table[table[:, 0] > 1e-12]
        assert np.all(np.diff(right[:, 1]) > 0), "power_mle not increasing in |e|"

    def test_mle_inside_interval(self, table):
        lo, mle, hi = table[:, 2], table[:, 1], table[:, 3]
        assert np.all(lo <= mle) and np.all(mle <= hi)

    def test_deterministic_file(self, capsys, tmp_path):
        first, second = tmp_path / "a.csv", tmp_path / "b.csv"
        for path in (first, second):
            assert cli.main(["figure1", "--grid-steps", "9", "--out", str(path)]) == 0
        assert first.read_bytes() == second.read_bytes()
        assert b"\r" not in first.read_bytes()

    def test_too_few_steps(self, capsys):
        code, _, _ = run(capsys, "figure1", "--grid-steps", "1")
        assert code == 2

    def test_unwritable_path(self, capsys, tmp_path):
        code, _, _ = run(capsys, "figure1", "--grid-steps", "3", "--out", str(tmp_path / "missing" / "f.csv"))
        assert code == 2


class TestCoverage:
    ARGS = ("coverage", "--replicates", "300", "--n", "5", "--seed", str(SEED))

    def test_report(self, capsys):
        code, out, _ = run(capsys, *self.ARGS)
        assert code == 0
        table = rows(out)
        assert table[0] == [
            "interval", "rule", "hits", "replicates", "coverage", "std_err", "nominal", "optimizer_failures",
        ]
        assert [r[0] for r in table[1:]] == ["sigma", "power"]
        assert table[1][2:4] == table[2][2:4]
        assert table[1][3] == "300"
        assert table[1][6] == "0.95"

    def test_byte_identical(self, capsys):
        _, first, _ = run(capsys, *self.ARGS)
        _, second, _ = run(capsys, *self.ARGS)
        assert first == second

    def test_bad_flags(self, capsys):
        code, _, _ = run(capsys, "coverage", "--replicates", "0")
        assert code == 2


class TestMinlen:
    def test_report(self, capsys, caplog):
        code, out, _ = run(capsys, "minlen", "--q", "9", "--v", "9", "--u", "1", "--lambda", str(math.sqrt(10)))
        assert code == 0
        header, values = rows(out)
        assert header == ["A", "B", "a", "b", "power_lo", "power_hi", "L", "L_equal_tail"]
        record = dict(zip(header, map(float, values)))
        assert record["L"] <= record["L_equal_tail"]
        assert "not shown" in caplog.text

    def test_zero_lambda(self, capsys):
        code, out, _ = run(capsys, "minlen", "--q", "9", "--v", "9", "--u", "1", "--lambda", "0")
        assert code == 2
        assert out == ""
