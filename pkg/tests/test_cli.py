"""End-to-end command-line checks.

Each test drives main() with a real argv and inspects exit code, printed
check lines, and written artifacts.  Golden values were produced by the
library itself and frozen after hand inspection; they guard against
silent drift in either the math or the serialization.
"""

import json

import pytest

from abset.cli import main
from abset.reporting import VERSION

DS = "list:32,64;256,1024"


def run(capsys, *argv):
    rc = main(list(argv))
    captured = capsys.readouterr()
    return rc, captured.out, captured.err


# ---------------------------------------------------------------- katznelson


def test_katznelson_passes_and_writes_report(capsys, tmp_path):
    out = tmp_path / "k.json"
    rc, stdout, stderr = run(
        capsys, "katznelson", "--schedule", DS, "--stages", "2", "--out", str(out)
    )
    assert rc == 0
    assert stderr == ""
    assert stdout.count("PASS ") == 8
    assert "FAIL " not in stdout
    for name in (
        "closure-u-1",
        "closure-v-1",
        "eta-relation-1",
        "closure-u-2",
        "closure-v-2",
        "eta-relation-2",
        "ratio-bound-2",
        "u-drift-2",
    ):
        assert f"PASS {name}" in stdout

    report = json.loads(out.read_text())
    assert report["version"] == VERSION
    assert sorted(report) == [
        "bracket",
        "checks",
        "command",
        "config",
        "gamma",
        "stages",
        "verification",
        "version",
    ]
    assert all(c["ok"] for c in report["checks"])
    assert report["config"] == {"schedule": DS, "stages": 2}
    assert report["bracket"]["lower_str"] == "0.550653319167"
    assert report["bracket"]["upper_str"] == "0.582966013541"
    assert report["bracket"]["point_count"] == 125636


def test_katznelson_paper_schedule_report_only(capsys):
    rc, stdout, stderr = run(capsys, "katznelson", "--schedule", "paper:L=2", "--stages", "2")
    assert rc == 0
    # without --out the canonical report lands on stdout after the check lines
    assert '"version"' in stdout


# ---------------------------------------------------------------- thin-orbit


def test_thin_orbit_desk_defaults(capsys, tmp_path):
    out = tmp_path / "t.json"
    rc, stdout, stderr = run(capsys, "thin-orbit", "--samples", "200", "--out", str(out))
    assert rc == 0
    for name in (
        "landing-exact-1",
        "landing-preserved-1",
        "symbol-balance-1",
        "landing-exact-2",
        "landing-preserved-2",
        "symbol-balance-2",
        "landing-exact-3",
        "symbol-balance-3",
        "deleted-density-decreasing",
    ):
        assert f"PASS {name}" in stdout
    assert "FAIL " not in stdout

    report = json.loads(out.read_text())
    cov = report["covering"]
    # measured covering stats ride along without being asserted
    assert cov["samples_random"] == 200
    assert cov["cell_bound_claimed"] == 20
    assert cov["seed"] == 20260823
    assert report["config"]["m"] == 10
    assert report["config"]["eps1"] == "2^-40"


def test_thin_orbit_deterministic_covering(capsys, tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    assert run(capsys, "thin-orbit", "--samples", "150", "--out", str(a))[0] == 0
    assert run(capsys, "thin-orbit", "--samples", "150", "--out", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_thin_orbit_seed_changes_random_draws(capsys, tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    run(capsys, "thin-orbit", "--samples", "150", "--out", str(a))
    run(capsys, "thin-orbit", "--samples", "150", "--seed", "7", "--out", str(b))
    ca = json.loads(a.read_text())["covering"]
    cb = json.loads(b.read_text())["covering"]
    assert ca["seed"] == 20260823 and cb["seed"] == 7
    # deterministic sample arm is seed-independent
    assert ca["samples_deterministic"] == cb["samples_deterministic"]


# --------------------------------------------------------------------- dioph


def test_dioph_surd_scan_all(capsys, tmp_path):
    out = tmp_path / "d.csv"
    rc, stdout, stderr = run(
        capsys,
        "dioph",
        "--alpha", "sqrt(2) - 1",
        "--beta", "sqrt(3) - 1",
        "--prec", "256",
        "--nmax", "120",
        "--scan", "all",
        "--out", str(out),
    )
    assert rc == 0
    assert "PASS integer-ratio-lemma" in stdout
    assert "PASS orbit-separation" in stdout
    assert "PASS gap-dichotomy" in stdout

    lines = out.read_text().splitlines()
    assert lines[0] == "scan,n,m,a,b,ell,ok,value,detail"
    assert len(lines) > 1
    assert all(line.count(",") >= 8 for line in lines[1:])
    scans = {line.split(",", 1)[0] for line in lines[1:]}
    assert "minima" in scans


def test_dioph_rational_ratio_violation_exits_2(capsys):
    rc, stdout, stderr = run(
        capsys, "dioph", "--alpha", "9/20", "--beta", "1/5", "--nmax", "9", "--scan", "ratio"
    )
    assert rc == 2
    assert "FAIL integer-ratio-lemma" in stdout
    assert "FAILED: integer-ratio-lemma" in stderr


def test_dioph_single_scan_subset(capsys):
    rc, stdout, _ = run(
        capsys, "dioph", "--alpha", "sqrt(2) - 1", "--beta", "sqrt(3) - 1",
        "--nmax", "40", "--scan", "separation",
    )
    assert rc == 0
    assert "PASS orbit-separation" in stdout
    assert "integer-ratio-lemma" not in stdout


# ----------------------------------------------------------------------- dim


def test_dim_inverse_fixture_golden(capsys, tmp_path):
    out = tmp_path / "dim.csv"
    rc, stdout, _ = run(capsys, "dim", "--fixture", "inverse:1000", "--out", str(out))
    assert rc == 0
    assert out.read_text() == (
        "scale_num,scale_den,count,log_ratio_decimal\n"
        "1,256,31,0.619274538798\n"
        "1,1024,63,0.59772799235\n"
        "1,4096,124,0.579516359199\n"
        "1,16384,240,0.564777899686\n"
        "1,65536,447,0.550258188824\n"
    )


def test_dim_grid_fixture_flat(capsys, tmp_path):
    out = tmp_path / "dim.csv"
    rc, _, _ = run(
        capsys, "dim", "--fixture", "grid:64", "--base", "2",
        "--jmin", "2", "--jmax", "4", "--out", str(out),
    )
    assert rc == 0
    rows = out.read_text().splitlines()[1:]
    # a full grid covers like dimension 1 at scales coarser than its pitch
    counts = [int(r.split(",")[2]) for r in rows]
    assert counts == [4, 8, 16]


# ----------------------------------------------------------------- verify-all


def test_verify_all_desk_green_and_deterministic(capsys, tmp_path):
    a = tmp_path / "v1.json"
    b = tmp_path / "v2.json"
    rc1, out1, err1 = run(capsys, "verify-all", "--profile", "desk", "--out", str(a))
    rc2, out2, err2 = run(capsys, "verify-all", "--profile", "desk", "--out", str(b))
    assert rc1 == 0 and rc2 == 0
    assert err1 == "" and err2 == ""
    # stdout differs only in the destination path echoed at the end
    assert out1.splitlines()[:-1] == out2.splitlines()[:-1]
    assert a.read_bytes() == b.read_bytes()
    assert "FAIL " not in out1

    report = json.loads(a.read_text())
    assert sorted(report) == ["checks", "command", "config", "dioph", "katznelson",
                              "thin_orbit", "version"]
    assert report["config"]["profile"] == "desk"
    names = [c["name"] for c in report["checks"]]
    assert "closure-u-2" in names
    assert "landing-exact-3" in names
    assert "gap-dichotomy" in names
    assert all(c["ok"] for c in report["checks"])


# ---------------------------------------------------------------- exit codes


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert VERSION in capsys.readouterr().out


@pytest.mark.parametrize(
    "argv, fragment",
    [
        (["katznelson", "--schedule", "bogus", "--stages", "2"], "bogus"),
        (["katznelson", "--schedule", "list:32;64", "--stages", "1"], "32"),
        (["katznelson", "--schedule", DS], "--stages"),
        (["thin-orbit", "--eps1", "abc"], "abc"),
        (["thin-orbit", "--eps1", "5/4"], "5/4"),
        (["dim", "--fixture", "weird:9"], "weird:9"),
        (["dioph", "--alpha", "sqrt(-2)", "--beta", "1/5"], "sqrt"),
        (["verify-all", "--profile", "metropolis"], "metropolis"),
        (["frobnicate"], "frobnicate"),
    ],
)
def test_usage_errors_exit_1_and_name_the_token(capsys, argv, fragment):
    rc = main(argv)
    captured = capsys.readouterr()
    assert rc == 1
    assert captured.err.startswith("usage error:")
    assert fragment in captured.err


def _write_config(tmp_path, payload):
    path = tmp_path / "run.json"
    path.write_text(json.dumps(payload))
    return str(path)


def test_config_file_run_matches_flag_run(capsys, tmp_path):
    cfg = _write_config(
        tmp_path, {"subcommand": "katznelson", "schedule": DS, "stages": 2}
    )
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    assert run(capsys, "--config", cfg, "--out", str(a))[0] == 0
    assert run(capsys, "katznelson", "--schedule", DS, "--stages", "2",
               "--out", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_config_file_flags_lose_to_command_line(capsys, tmp_path):
    cfg = _write_config(
        tmp_path, {"subcommand": "katznelson", "schedule": DS, "stages": 2}
    )
    out = tmp_path / "r.json"
    rc, _, _ = run(capsys, "--config", cfg, "katznelson", "--stages", "1",
                   "--out", str(out))
    assert rc == 0
    assert json.loads(out.read_text())["config"]["stages"] == 1


def test_config_file_accepts_string_values_for_typed_flags(capsys, tmp_path):
    cfg = _write_config(
        tmp_path,
        {"subcommand": "thin-orbit", "stages": "2", "samples": 100, "seed": "7"},
    )
    out = tmp_path / "r.json"
    rc, _, _ = run(capsys, "--config", cfg, "--out", str(out))
    assert rc == 0
    report = json.loads(out.read_text())
    assert report["config"]["stages"] == 2
    assert report["covering"]["seed"] == 7


@pytest.mark.parametrize(
    "payload, extra_argv, fragment",
    [
        ({"subcommand": "katznelson", "schedule": DS, "stages": 2}, ["dioph"],
         "does not match"),
        ({"subcommand": "katznelson", "schedule": DS, "wibble": 3}, [],
         "wibble"),
        ({"schedule": DS}, [], "names no subcommand"),
        ({"subcommand": "dioph", "scan": "everything"}, [], "everything"),
        ({"subcommand": "thin-orbit", "stages": 2.5}, [], "stages"),
        ({"subcommand": "frobnicate"}, [], "frobnicate"),
    ],
)
def test_config_file_errors_exit_1(capsys, tmp_path, payload, extra_argv, fragment):
    cfg = _write_config(tmp_path, payload)
    rc = main(["--config", cfg] + extra_argv)
    captured = capsys.readouterr()
    assert rc == 1
    assert captured.err.startswith("usage error:")
    assert fragment in captured.err


def test_config_file_missing_exits_1(capsys, tmp_path):
    rc = main(["--config", str(tmp_path / "nope.json")])
    captured = capsys.readouterr()
    assert rc == 1
    assert "cannot read config file" in captured.err


def test_runaway_schedule_is_capped_by_working_precision(capsys):
    # decay large enough that eps_2 alone would need ~1.6e8 bits
    rc, _, stderr = run(capsys, "thin-orbit", "--decay", "4000000", "--stages", "2")
    assert rc == 1
    assert "usage error:" in stderr
    assert "working cap" in stderr
