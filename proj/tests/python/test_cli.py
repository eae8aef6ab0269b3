import json
import os
import subprocess
from pathlib import Path

import pytest

CLI = os.environ.get("UAVSCAN_CLI")

pytestmark = pytest.mark.skipif(not CLI, reason="UAVSCAN_CLI not set")


def run(*args):
    return subprocess.run([CLI, *map(str, args)], capture_output=True, text=True)


def test_generate_run_and_edit(tmp_path: Path):
    cloud = tmp_path / "cube.xyz"
    assert run("generate", "cube", "-o", cloud, "--seed", 1).returncode == 0
    out = tmp_path / "out"
    r = run("run", cloud, "-o", out)
    assert r.returncode == 0, r.stderr
    surfaces = json.loads((out / "surfaces.json").read_text())
    assert len(surfaces["planes"]) == 6
    timing = json.loads((out / "timing.json").read_text())
    assert [s["stage"] for s in timing["stages"]] == ["load", "filter", "segment", "cluster", "plan"]

    boundary = tmp_path / "b.json"
    assert run("edit-boundary", "export", out / "surfaces.json", "--index", 0, "-o", boundary).returncode == 0
    edited = tmp_path / "edited.json"
    r = run("edit-boundary", "import", out / "surfaces.json", "--boundary", boundary, "-o", edited)
    assert r.returncode == 0, r.stderr
    assert json.loads(edited.read_text())["planes"] == surfaces["planes"]


def test_crossed_cube_plan_failure(tmp_path: Path):
    cloud = tmp_path / "x.xyz"
    run("generate", "crossed_cube", "-o", cloud)
    r = run("run", cloud, "-o", tmp_path / "out")
    assert r.returncode == 3
    assert "StopPointBlocked" in r.stderr


def test_validation_errors(tmp_path: Path):
    bad = tmp_path / "bad.xyz"
    bad.write_text("3\n# short\n1 2 3\n")
    assert run("filter", bad, "-o", tmp_path / "f.xyz").returncode == 2
    assert run("generate", "no_such_scene", "-o", tmp_path / "x.xyz").returncode == 2
    assert run("bogus-verb").returncode == 2
