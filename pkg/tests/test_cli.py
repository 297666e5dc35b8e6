"""Command-line interface: JSON output, determinism, exit codes, plots."""

import json
import subprocess
import sys

import pytest

from seqstop.cli import (
    EXIT_BAD_OBS,
    EXIT_INFEASIBLE,
    EXIT_OK,
    EXIT_USAGE,
    main,
    parse_observations,
)
from seqstop.spec import TestSpec
from conftest import ONE_PROP_DATA, ONE_T_DATA, ONE_Z_DATA, TWO_Z_DATA

ONE_Z_FLAGS = ["--test", "one-z", "--null", "3", "--sigma0", "1.5",
               "--alpha", "0.005", "--beta", "0.2", "--n-max", "30"]


def run_cli(args, capsys, stdin=None):
    """Invoke main() in-process and return (exit_code, parsed_json_or_None)."""
    if stdin is not None:
        old = sys.stdin
        sys.stdin = stdin
    try:
        code = main(args)
    finally:
        if stdin is not None:
            sys.stdin = old
    out = capsys.readouterr().out
    doc = json.loads(out) if out.strip() else None
    return code, doc, out


@pytest.fixture
def obs_file(tmp_path):
    def make(values, name="obs.txt"):
        path = tmp_path / name
        lines = []
        for v in values:
            lines.append(",".join(map(str, v)) if isinstance(v, tuple) else str(v))
        path.write_text("\n".join(lines) + "\n")
        return str(path)
    return make


class TestDesignCommand:
    def test_exact_prop_design(self, capsys):
        code, doc, _ = run_cli(
            ["design", "--test", "one-prop", "--null", "0.2", "--n-max", "30",
             "--exact"], capsys)
        assert code == EXIT_OK
        assert doc["gamma"] == pytest.approx(22.63, abs=0.01)
        assert doc["method"] == "exact_dp"
        assert doc["type1_est"] <= 0.005

    def test_byte_identical_reruns(self, capsys):
        args = ["design", *ONE_Z_FLAGS, "--reps", "20000", "--seed", "11",
                "--threads", "2"]
        _, _, out1 = run_cli(args, capsys)
        _, _, out2 = run_cli(args, capsys)
        assert out1 == out2

    def test_out_file_matches_stdout(self, capsys, tmp_path):
        target = tmp_path / "design.json"
        _, _, out = run_cli(
            ["design", "--test", "one-prop", "--null", "0.2", "--n-max", "20",
             "--exact", "--out", str(target)], capsys)
        assert target.read_text() == out

    def test_console_script_installed(self):
        r = subprocess.run(["seqstop", "--help"], capture_output=True, text=True)
        assert r.returncode == 0
        assert "design" in r.stdout


class TestRunCommand:
    def test_golden_replay(self, capsys, obs_file):
        path = obs_file(ONE_Z_DATA)
        code, doc, _ = run_cli(
            ["run", *ONE_Z_FLAGS, "--gamma", "27.856", "--obs", path], capsys)
        assert code == EXIT_OK
        assert doc["decision"] == "reject_null"
        assert doc["cause"] == "crossed_A"
        assert doc["n_used"] == 9
        assert doc["n_parsed"] == len(ONE_Z_DATA)
        assert len(doc["trajectory"]) == 9

    def test_interactive_equals_file(self, capsys, obs_file, monkeypatch):
        import io
        path = obs_file(ONE_T_DATA)
        flags = ["--test", "one-t", "--null", "3", "--n-max", "30",
                 "--gamma", "33.152"]
        _, doc_file, _ = run_cli(["run", *flags, "--obs", path], capsys)
        text = "\n".join(str(v) for v in ONE_T_DATA) + "\n"
        _, doc_stdin, _ = run_cli(["run", *flags, "--interactive"], capsys,
                                  stdin=io.StringIO(text))
        assert doc_file == doc_stdin

    def test_two_sample_pairs(self, capsys, obs_file):
        path = obs_file(TWO_Z_DATA)
        code, doc, _ = run_cli(
            ["run", "--test", "two-z", "--sigma0", "1.5", "--n-max", "30",
             "--gamma", "27.928", "--obs", path], capsys)
        assert code == EXIT_OK
        assert doc["decision"] == "accept_null"
        assert doc["n_used"] == 9

    def test_comments_and_blanks_skipped(self, capsys, tmp_path):
        path = tmp_path / "obs.txt"
        path.write_text("# header\n\n1\n0  # trailing note\n1\n")
        code, doc, _ = run_cli(
            ["run", "--test", "one-prop", "--null", "0.2", "--n-max", "30",
             "--gamma", "22.63", "--obs", str(path)], capsys)
        assert code == EXIT_OK
        assert doc["n_parsed"] == 3

    def test_checksum_round_trip(self, capsys, obs_file):
        path = obs_file(ONE_PROP_DATA)
        flags = ["run", "--test", "one-prop", "--null", "0.2", "--n-max", "30",
                 "--gamma", "22.63", "--obs", path]
        _, a, _ = run_cli(flags, capsys)
        _, b, _ = run_cli(flags, capsys)
        assert a["obs_checksum"] == b["obs_checksum"]
        assert len(a["obs_checksum"]) == 16

    def test_plot_csv(self, capsys, obs_file, tmp_path):
        path = obs_file(ONE_Z_DATA)
        plot = tmp_path / "traj.csv"
        run_cli(["run", *ONE_Z_FLAGS, "--gamma", "27.856", "--obs", path,
                 "--plot", str(plot)], capsys)
        lines = plot.read_text().strip().splitlines()
        assert lines[0] == "n,L,A,B,gamma"
        assert len(lines) == 10  # header + 9 evaluable steps
        first = lines[1].split(",")
        assert float(first[2]) == pytest.approx(160.0, abs=1e-4)

    def test_plot_svg(self, capsys, obs_file, tmp_path):
        path = obs_file(ONE_Z_DATA)
        plot = tmp_path / "traj.svg"
        run_cli(["run", *ONE_Z_FLAGS, "--gamma", "27.856", "--obs", path,
                 "--plot", str(plot)], capsys)
        text = plot.read_text()
        assert text.startswith("<svg")
        assert "polyline" in text


class TestOtherCommands:
    def test_umpbt(self, capsys):
        code, doc, _ = run_cli(["umpbt", *ONE_Z_FLAGS], capsys)
        assert code == EXIT_OK
        assert doc["umpbt_alt"]["theta1"] == pytest.approx(3.7054, abs=1e-3)

    def test_umpbt_two_sided_pair(self, capsys):
        code, doc, _ = run_cli(
            ["umpbt", "--test", "one-z", "--side", "two", "--null", "3",
             "--sigma0", "1.5", "--n-max", "30"], capsys)
        assert code == EXIT_OK
        assert doc["umpbt_alt"]["right"]["theta1"] > 3
        assert doc["umpbt_alt"]["left"]["theta1"] < 3

    def test_effective_n(self, capsys):
        code, doc, _ = run_cli(
            ["effective-n", "--n-max", "30", "--null", "0.2",
             "--alpha", "0.005"], capsys)
        assert code == EXIT_OK
        assert doc["effective_n"] == 28

    def test_find_alt(self, capsys):
        code, doc, _ = run_cli(
            ["find-alt", "--test", "one-z", "--null", "0", "--sigma0", "1",
             "--alpha", "0.05", "--n-max", "30"], capsys)
        assert code == EXIT_OK
        assert doc["fixed_design_alt"] == pytest.approx(0.453966, abs=1e-5)

    def test_find_n(self, capsys):
        code, doc, _ = run_cli(
            ["find-n", "--test", "one-z", "--null", "0", "--sigma0", "1",
             "--alpha", "0.05", "--n-max", "30", "--target-alpha", "0.005"],
            capsys)
        assert code == EXIT_OK
        assert doc["n_star"] == 57

    def test_oc_exact(self, capsys):
        code, doc, _ = run_cli(
            ["oc", "--test", "one-prop", "--null", "0.2", "--n-max", "30",
             "--exact", "--theta", "0.3"], capsys)
        assert code == EXIT_OK
        # output is rounded to six significant digits
        assert doc["power"] + doc["type2_est"] == pytest.approx(1.0, abs=1e-5)
        assert 0 < doc["asn"] <= 30


class TestExitCodes:
    def test_usage_error(self, capsys):
        code, _, _ = run_cli(
            ["design", "--test", "one-z", "--null", "0", "--n-max", "30"],
            capsys)  # missing sigma0
        assert code == EXIT_USAGE

    def test_missing_obs_source(self, capsys):
        code, _, _ = run_cli(
            ["run", *ONE_Z_FLAGS, "--gamma", "27.856"], capsys)
        assert code == EXIT_USAGE

    def test_malformed_obs(self, capsys, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("1\nbanana\n")
        code, _, _ = run_cli(
            ["run", *ONE_Z_FLAGS, "--gamma", "27.856", "--obs", str(path)],
            capsys)
        assert code == EXIT_BAD_OBS

    def test_nonbinary_prop_obs(self, capsys, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("0\n0.5\n")
        code, _, _ = run_cli(
            ["run", "--test", "one-prop", "--null", "0.2", "--n-max", "30",
             "--gamma", "22.63", "--obs", str(path)], capsys)
        assert code == EXIT_BAD_OBS

    def test_missing_file(self, capsys):
        code, _, _ = run_cli(
            ["run", *ONE_Z_FLAGS, "--gamma", "27.856", "--obs", "/nope.txt"],
            capsys)
        assert code == EXIT_BAD_OBS

    def test_infeasible_design(self, capsys):
        # no achievable cutoff below n at this size: reported as infeasible
        code, doc, _ = run_cli(
            ["design", "--test", "one-prop", "--null", "0.5",
             "--alpha", "0.0001", "--n-max", "3", "--exact"], capsys)
        assert code == EXIT_INFEASIBLE
        assert doc is None


class TestParseObservations:
    def test_pair_separators(self):
        spec = TestSpec(family="two_z", sigma0=1.0, alpha=0.01, beta=0.2,
                        n1_max=5, n2_max=5)
        obs = parse_observations(["1,2", "3 4", "5,  6"], spec)
        assert obs == [(1.0, 2.0), (3.0, 4.0), (5.0, 6.0)]
