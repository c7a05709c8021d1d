import json
import subprocess
import sys
from pathlib import Path

import pytest

from cocyclelab import cli
from cocyclelab.spectral_z import edelstein_profile


@pytest.fixture(autouse=True)
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("COCYCLELAB_OUT", raising=False)
    return tmp_path


def run(*argv):
    return cli.main([str(a) for a in argv])


def manifest(outdir):
    return json.loads((Path(outdir) / "manifest.json").read_text())


def error_of(capsys):
    lines = [ln for ln in capsys.readouterr().err.splitlines() if ln.strip()]
    assert len(lines) == 1
    return json.loads(lines[0])


def snapshot(outdir):
    return {p.name: p.read_bytes() for p in sorted(Path(outdir).iterdir())}


SMOKE = [
    ("fox", ["--radius", "2"]),
    ("fox", ["--word", "ss"]),
    ("nullpair", ["--radii", "1,2"]),
    ("amalgam", ["--radius", "3"]),
    ("glue", []),
    ("surface", ["--radius", "2"]),
    ("spectral", ["--nmax", "32"]),
    ("spectral", ["--measure", "lebesgue", "--nmax", "16"]),
    ("spectral", ["--measure", "shift", "--shift", "0:1,2:0.5"]),
    ("edelstein", ["--upto", "120"]),
    ("flow", ["--dim", "8", "--instances", "5", "--tsteps", "10"]),
    ("tree", ["--radius", "4"]),
    ("walls", ["--space", "hypercube:1,1/2"]),
    ("gradient", ["--radius", "5", "--gmax", "2", "--samples", "10"]),
]


@pytest.mark.parametrize("name,args", SMOKE)
def test_subcommands_succeed(name, args, workdir):
    assert run(name, *args, "--out", "o") == 0
    m = manifest("o")
    assert m["subcommand"] == name and m["status"] == "ok"
    for fname, digest in m["files"].items():
        assert (workdir / "o" / fname).exists()
        assert len(digest) == 64


def test_cantor_default(workdir):
    assert run("cantor", "--out", "o") == 0
    assert manifest("o")["status"] == "ok" and manifest("o")["files"]


def test_default_output_directory(workdir):
    assert run("tree", "--radius", "2") == 0
    assert (workdir / "cocyclelab_out" / "tree" / "manifest.json").exists()


def test_env_output_directory(workdir, monkeypatch):
    monkeypatch.setenv("COCYCLELAB_OUT", str(workdir / "env"))
    assert run("tree", "--radius", "2") == 0
    assert (workdir / "env" / "tree.csv").exists()
    assert run("tree", "--radius", "2", "--out", "flag") == 0
    assert (workdir / "flag" / "tree.csv").exists()


def test_config_file_and_precedence(workdir):
    (workdir / "c.cfg").write_text("# tree settings\nradius = 2\np = 3\nout = fromcfg\n")
    assert run("tree", "--config", "c.cfg", "--p", "4") == 0
    cfg = manifest("fromcfg")["config"]
    assert cfg["radius"] == 2 and cfg["p"] == 4.0


def test_unknown_config_key(workdir, capsys):
    (workdir / "c.cfg").write_text("radius=2\nradiuss=3\n")
    assert run("tree", "--config", "c.cfg") == 2
    err = error_of(capsys)
    assert err["exit"] == 2 and "radiuss" in err["message"]


def test_malformed_config_line(workdir, capsys):
    (workdir / "c.cfg").write_text("radius 2\n")
    assert run("tree", "--config", "c.cfg") == 2
    assert error_of(capsys)["exit"] == 2


def test_bad_word_exit_2(capsys):
    assert run("fox", "--word", "sxq", "--out", "o") == 2
    assert error_of(capsys)["error"] == "GeneratorRangeError"


def test_inadmissible_cantor_exit_2(capsys):
    assert run("cantor", "--N", "8,2097152", "--out", "o") == 2
    assert "inadmissible" in error_of(capsys)["message"]


def test_bad_measure_exit_2(capsys):
    assert run("spectral", "--measure", "gauss", "--out", "o") == 2
    error_of(capsys)


def test_single_radius_exit_2(capsys):
    assert run("nullpair", "--radii", "3", "--out", "o") == 2
    error_of(capsys)


def test_failed_check_exit_3(capsys, workdir):
    # a shrinking radius makes the residual grow
    assert run("nullpair", "--radii", "3,1", "--out", "o") == 3
    err = error_of(capsys)
    assert err["error"] == "CheckFailed" and err["exit"] == 3
    assert manifest("o")["status"] == "fail"
    assert (workdir / "o" / "nullpair_residuals.csv").exists()


def test_glue_tolerance_exit_2(capsys):
    assert run("glue", "--word", "stST", "--g_word", "ab", "--g_rank", "2", "--radius", "1", "--out", "o") == 2
    assert "tolerance" in error_of(capsys)["message"]


def test_missing_wall_file(capsys):
    assert run("walls", "--space", "file:/nonexistent/ws.txt", "--out", "o") == 2
    error_of(capsys)


def test_walls_from_file(workdir):
    (workdir / "ws.txt").write_text("point a\npoint b\npoint c\nwall 1 a\nwall 2 a,b\n")
    assert run("walls", "--space", f"file:{workdir / 'ws.txt'}", "--out", "o") == 0
    rows = (workdir / "o" / "walls.csv").read_text().splitlines()
    assert rows[0].startswith("x,y,distance")
    assert "a,c,3" in rows[1:][2]


@pytest.mark.parametrize("name,args", [("spectral", ["--nmax", "40"]), ("fox", ["--radius", "2"]),
                                       ("flow", ["--dim", "6", "--instances", "3", "--tsteps", "8"]),
                                       ("edelstein", ["--upto", "100"])])
def test_reruns_byte_identical(name, args, workdir):
    assert run(name, *args, "--seed", "7", "--out", "o") == 0
    first = snapshot(workdir / "o")
    assert run(name, *args, "--seed", "7", "--out", "o") == 0
    assert snapshot(workdir / "o") == first


def test_seed_changes_output(workdir):
    run("spectral", "--seed", "1", "--out", "a")
    run("spectral", "--seed", "2", "--out", "b")
    assert (workdir / "a" / "curve.csv").read_bytes() != (workdir / "b" / "curve.csv").read_bytes()


def test_manifest_contents(workdir):
    run("tree", "--radius", "2", "--out", "o")
    m = manifest("o")
    assert set(m) == {"subcommand", "status", "config", "versions", "files"}
    assert m["versions"]["kernel_backend"] in {"numba", "numpy"}
    assert "numpy" in m["versions"] and "python" in m["versions"]
    assert not list((workdir / "o").glob("*.tmp*"))


def test_classify(workdir, capsys):
    (workdir / "p.csv").write_text(edelstein_profile(5040).to_csv())
    assert run("classify", "--input", "p.csv", "--out", "o") == 0
    out = capsys.readouterr().out
    assert "NeitherLike" in out and "heuristic=true" in out


def test_classify_needs_input(capsys):
    assert run("classify", "--out", "o") == 2
    error_of(capsys)


def test_module_entry_point(workdir):
    proc = subprocess.run([sys.executable, "-m", "cocyclelab.cli", "tree", "--radius", "2", "--out", "o"],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert "wrote" in proc.stdout


def test_repro_single_criterion(workdir, capsys):
    assert run("repro", "--criterion", "4", "--out", "o") == 0
    out = capsys.readouterr().out
    assert out.startswith("[PASS]  4 ")
    assert "acceptance.csv" in manifest("o")["files"]


def test_repro_unknown_criterion(capsys):
    assert run("repro", "--criterion", "12", "--out", "o") == 2
    error_of(capsys)
