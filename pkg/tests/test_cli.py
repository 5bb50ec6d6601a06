import json
import math
import subprocess
import sys

import numpy as np
import pytest

from thermobound import cli
from thermobound.sampling import random_hermitian
from thermobound.thermal import ThermalSpec


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def csv_body(text):
    lines = [l for l in text.splitlines() if not l.startswith("#")]
    header = lines[0].split(",")
    rows = [[_num(v) for v in l.split(",")] for l in lines[1:]]
    if all(isinstance(v, float) for r in rows for v in r):
        rows = np.array(rows)
    return header, rows


def _num(v):
    try:
        return float(v)
    except ValueError:
        return v


def write_spec(path, spec):
    path.write_text(json.dumps(spec.to_json()))
    return str(path)


@pytest.fixture
def spec_files(tmp_path, rng):
    s1 = ThermalSpec(random_hermitian(rng, 3), 1.3)
    s2 = ThermalSpec(random_hermitian(rng, 3), 2.1)
    return write_spec(tmp_path / "s1.json", s1), write_spec(tmp_path / "s2.json", s2)


class TestGeneric:
    def test_same_spec_gives_zero_row(self, capsys, spec_files):
        code, out, _ = run(capsys, "generic", "--s1", spec_files[0], "--s2", spec_files[0])
        assert code == 0
        header, rows = csv_body(out)
        assert header == ["lower", "exact", "upper", "slack_lower", "slack_upper"]
        assert rows.shape == (1, 5) and np.max(np.abs(rows)) < 1e-12

    @pytest.mark.parametrize("bound", ["entropy", "helmholtz", "logz"])
    def test_sandwich_row(self, capsys, spec_files, bound):
        code, out, _ = run(capsys, "generic", "--s1", spec_files[0], "--s2", spec_files[1], "--bound", bound)
        lo, ex, hi, sl, su = csv_body(out)[1][0]
        assert code == 0 and lo <= ex <= hi and sl >= 0 and su >= 0

    def test_json_round_trip(self, capsys, spec_files):
        code, out, _ = run(capsys, "generic", "--s1", spec_files[0], "--s2", spec_files[1], "--format", "json")
        doc = json.loads(out)
        original = ThermalSpec.from_json(json.load(open(spec_files[0])))
        again = ThermalSpec.from_json(doc["s1"])
        assert np.max(np.abs(again.H.entries - original.H.entries)) <= 1e-15
        assert doc["columns"][0] == "lower" and len(doc["rows"]) == 1

    def test_byte_identical_reruns(self, capsys, spec_files):
        a = run(capsys, "generic", "--s1", spec_files[0], "--s2", spec_files[1])[1]
        b = run(capsys, "generic", "--s1", spec_files[0], "--s2", spec_files[1])[1]
        assert a == b and a.startswith("# thermobound {")

    def test_grand_specs(self, capsys, tmp_path):
        g = {"H": {"dim": 2, "re": [[0, 0], [0, 1]]}, "N": {"dim": 2, "re": [[0, 0], [0, 1]]}, "T": 1.0, "mu": 0.5}
        p = tmp_path / "g.json"
        p.write_text(json.dumps(g))
        code, out, _ = run(capsys, "generic", "--s1", str(p), "--s2", str(p))
        assert code == 0 and np.max(np.abs(csv_body(out)[1])) < 1e-12
        code, _, err = run(capsys, "generic", "--s1", str(p), "--s2", str(p), "--bound", "helmholtz")
        assert code == 3 and json.loads(err)["error"] == "validation"

    def test_missing_file(self, capsys, tmp_path):
        code, _, err = run(capsys, "generic", "--s1", str(tmp_path / "nope.json"), "--s2", "x")
        assert code == 3 and json.loads(err.strip().splitlines()[-1])["error"] == "validation"

    def test_malformed_json(self, capsys, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text('{"T": 1}')
        code, _, err = run(capsys, "generic", "--s1", str(p), "--s2", str(p))
        assert code == 3

    def test_non_hermitian(self, capsys, tmp_path):
        p = tmp_path / "nh.json"
        p.write_text(json.dumps({"H": {"dim": 2, "re": [[0, 1], [0, 0]]}, "T": 1.0}))
        assert run(capsys, "generic", "--s1", str(p), "--s2", str(p))[0] == 3


class TestQubitSweep:
    def test_angle_sweep(self, capsys):
        code, out, _ = run(capsys, "qubit-sweep", "--hnorm", str(math.sqrt(61)), "--gnorm", str(math.sqrt(17)),
                           "--T1", "10", "--T2", "15")
        header, rows = csv_body(out)
        assert code == 0 and header == ["theta", "lower", "exact", "upper"]
        assert rows.shape == (200, 4)
        assert np.argmax(rows[:, 1]) == 0 and np.argmin(rows[:, 1]) == 199

    def test_temperature_sweep(self, capsys):
        code, out, _ = run(capsys, "qubit-sweep", "--hnorm", str(math.sqrt(61)), "--gnorm", str(math.sqrt(17)),
                           "--theta", str(math.pi / 4), "--T2", "15", "--sweep", "T1")
        header, rows = csv_body(out)
        assert header[0] == "T1" and rows[0, 0] == 1 and rows[-1, 0] == 30
        assert np.all(np.diff(rows[:, 3] - rows[:, 1]) < 0)

    def test_component_flags(self, capsys):
        code, out, _ = run(capsys, "qubit-sweep", "--hz", "2", "--gx", "1", "--sweep", "T1", "--T1grid", "1:2:3")
        assert code == 0 and csv_body(out)[1].shape == (3, 4)

    def test_bad_grid(self, capsys):
        code, _, err = run(capsys, "qubit-sweep", "--hz", "1", "--gz", "1", "--sweep", "T1", "--T1grid", "1:2")
        assert code == 2 and json.loads(err)["error"] == "usage"


class TestFC:
    def test_identity_overlap(self, capsys, tmp_path):
        (tmp_path / "l1.txt").write_text("0\n1\n2\n")
        code, out, _ = run(capsys, "fc", "--levels1", str(tmp_path / "l1.txt"), "--levels2", str(tmp_path / "l1.txt"),
                           "--T1", "1", "--T2", "1")
        assert code == 0 and "# mode: complete" in out
        _, rows = csv_body(out)
        assert [r[0] for r in rows] == ["entropy", "helmholtz"]
        assert max(abs(v) for r in rows for v in r[1:4]) < 1e-14

    def test_truncated_overlap(self, capsys, tmp_path):
        (tmp_path / "l1.txt").write_text("0\n1\n2\n")
        (tmp_path / "l2.txt").write_text("0\n1.5\n")
        (tmp_path / "k.csv").write_text("0.7,0.3\n0.4,0.6\n0.1,0.9\n")
        code, out, _ = run(capsys, "fc", "--levels1", str(tmp_path / "l1.txt"), "--levels2", str(tmp_path / "l2.txt"),
                           "--overlap", str(tmp_path / "k.csv"), "--T1", "1", "--T2", "2")
        assert code == 0 and "truncated-overlap" in out

    def test_bad_overlap(self, capsys, tmp_path):
        (tmp_path / "l.txt").write_text("0\n1\n")
        (tmp_path / "k.csv").write_text("0.7,0.7\n0.4,0.6\n")
        code, _, _ = run(capsys, "fc", "--levels1", str(tmp_path / "l.txt"), "--levels2", str(tmp_path / "l.txt"),
                         "--overlap", str(tmp_path / "k.csv"), "--T1", "1", "--T2", "2")
        assert code == 3


class TestOscillatorCommands:
    def test_physical_sign_structure(self, capsys):
        code, out, _ = run(capsys, "osc-physical", "--tprime", "1", "--tmin", "0.1", "--tmax", "3", "--n", "30")
        header, rows = csv_body(out)
        assert code == 0 and header[:4] == ["t", "lower", "exact", "upper"]
        below, above = rows[rows[:, 0] < 1 - 1e-9], rows[rows[:, 0] > 1 + 1e-9]
        assert np.all(below[:, 1:4] < 0) and np.all(above[:, 1:4] > 0)

    def test_exactly_one_fixed_time(self, capsys):
        assert run(capsys, "osc-physical")[0] == 2
        assert run(capsys, "osc-physical", "--t", "1", "--tprime", "2")[0] == 2

    def test_paul_trap(self, capsys):
        code, out, _ = run(capsys, "paul-trap", "--n", "50")
        header, rows = csv_body(out)
        assert code == 0 and rows.shape[0] == 50 and header[0] == "tprime"

    def test_invariant_grid(self, capsys):
        code, out, _ = run(capsys, "osc-invariant", "--t", "5", "--tprime", "10", "--T1grid", "5:20:4", "--T2grid", "5:20:3")
        header, rows = csv_body(out)
        assert code == 0 and rows.shape == (12, len(header))
        i = header.index
        assert np.all(rows[:, i("lower")] <= rows[:, i("exact")]) and np.all(rows[:, i("exact")] <= rows[:, i("upper")])
        assert "# wronskian_drift:" in out

    def test_invariant_needs_values(self, capsys):
        assert run(capsys, "osc-invariant", "--t", "5")[0] == 2

    def test_oracle(self, capsys):
        code, out, _ = run(capsys, "oracle", "--omega-t", "1.732", "--omega-tp", "1.414", "--T", "2.5", "--N", "400")
        header, rows = csv_body(out)
        assert code == 0 and rows[0, header.index("abs_diff")] < 1e-6

    def test_oracle_truncation_is_numerical_error(self, capsys):
        code, _, err = run(capsys, "oracle", "--omega-t", "1", "--omega-tp", "0.5", "--T", "50", "--N", "60")
        assert code == 4 and json.loads(err)["error"] == "numerical"


class TestSweepCheck:
    @pytest.mark.parametrize("suite", ["generic", "grand", "qubit", "fc", "oscillator"])
    def test_suites_pass(self, capsys, suite):
        code, out, _ = run(capsys, "sweep-check", "--suite", suite, "--samples", "20", "--seed", "3")
        assert code == 0
        header, rows = csv_body(out)
        assert header == ["check", "samples", "violations", "max_excess"]
        assert all(r[1] >= 20 and r[2] == 0 for r in rows)

    def test_negative_tolerance_reports_violations(self, capsys):
        code, _, err = run(capsys, "sweep-check", "--suite", "generic", "--samples", "5", "--tol=-1e3")
        assert code == 1 and "violation" in err


class TestCommon:
    def test_gnuplot(self, capsys, tmp_path):
        out = tmp_path / "a.csv"
        gp = tmp_path / "a.gp"
        code, _, _ = run(capsys, "paul-trap", "--n", "5", "--out", str(out), "--gnuplot", str(gp))
        assert code == 0 and out.read_text().count("\n") > 5
        assert "plot" in gp.read_text() and str(out) in gp.read_text()

    def test_gnuplot_needs_file(self, capsys):
        assert run(capsys, "paul-trap", "--n", "5", "--gnuplot", "x.gp")[0] == 2

    @pytest.mark.parametrize("argv", [[], ["bogus"], ["paul-trap", "--n", "0"], ["paul-trap", "--workers", "0"],
                                      ["paul-trap", "--n", "abc"]])
    def test_usage_errors(self, capsys, argv):
        assert run(capsys, *argv)[0] == 2

    def test_workers_do_not_change_output(self, capsys):
        a = run(capsys, "paul-trap", "--n", "40")[1]
        b = run(capsys, "paul-trap", "--n", "40", "--workers", "4")[1]
        assert a.splitlines()[1:] == b.splitlines()[1:]

    def test_module_entry_point(self):
        r = subprocess.run([sys.executable, "-m", "thermobound", "oracle", "--omega-t", "1", "--omega-tp", "1",
                            "--T", "1", "--N", "100", "--format", "json"], capture_output=True, text=True)
        assert r.returncode == 0
        doc = json.loads(r.stdout)
        assert doc["columns"][:3] == ["omega_t", "omega_tp", "T"]
