import json
import os
import subprocess

import numpy as np
import pytest

import hsmod


def test_surfaces():
    s = hsmod.load_mesh("octmin")
    assert s.genus == 2
    assert (s.num_vertices, s.num_edges, s.num_faces) == (1, 4, 1)
    t = hsmod.load_mesh("torus:3:3")
    assert t.genus == 1
    assert np.allclose(t.J @ t.J, -np.eye(t.num_edges))
    with pytest.raises(hsmod.HsmodError):
        hsmod.load_mesh("torus:0:3")


def test_structures():
    s = hsmod.load_mesh("octmin")
    i = hsmod.structure_matrix(s, 2, "I")
    sm = hsmod.structure_matrix(s, 2, "S")
    t = hsmod.structure_matrix(s, 2, "T")
    eye = np.eye(i.shape[0])
    assert np.abs(i @ i + eye).max() < 1e-11
    assert np.abs(sm @ sm - eye).max() < 1e-11
    assert np.abs(i @ sm - t).max() < 1e-11


def test_flat_seed_and_dimension():
    s = hsmod.load_mesh("octmin")
    u = hsmod.genus2_flat_seed(3)
    assert u.shape == (4, 2, 2)
    assert np.abs(hsmod.curvature(s, u)).max() < 1e-10
    assert hsmod.reducibility(s, u) == 1
    spec = hsmod.deformation_dimension(s, u)
    assert spec["kernel_count"] == 20


def test_harmonic_pipeline():
    s = hsmod.load_mesh("octmin")
    plus = hsmod.genus2_flat_seed(5)
    kicked = hsmod.random_connection(s, 2, 0.02, 7) @ plus
    minus, res, _ = hsmod.find_flat(s, kicked)
    assert res < 1e-10
    u, phi, r = hsmod.harmonic_from_endpoints(s, plus, minus)
    assert max(r["F_plus_norm"], r["F_minus_norm"], r["coclosed_norm"]) < 1e-8
    p, m = hsmod.p_theta(s, u, phi, 0.0)
    assert np.abs(m - minus).max() < 1e-8
    d = hsmod.degeneracy_spectrum(s, u, phi)
    assert not d["is_degenerate"]


def test_run_experiment():
    report, code = hsmod.run({"experiment": "verify-structure", "mesh": "torus:3:3", "rank": 1})
    assert code == 0
    assert report["schema_version"] == "1"
    assert report["status"] == "ok"
    with pytest.raises(hsmod.HsmodError):
        hsmod.run({"experiment": "nope"})
    assert "degeneracy-scan" in hsmod.experiment_names()


@pytest.mark.skipif(not os.environ.get("HSMOD_BIN"), reason="CLI binary not configured")
def test_cli(tmp_path):
    out = tmp_path / "dd.json"
    cmd = [os.environ["HSMOD_BIN"], "deformation-dim", "--mesh", "octmin", "--rank", "2", "--seed", "4",
           "--out", str(out)]
    assert subprocess.run(cmd).returncode == 0
    report = json.loads(out.read_text())
    assert report["metrics"]["deformation.kernel_count"] == 20
    lines = (tmp_path / "dd.csv").read_text().splitlines()
    assert lines[0] == "metric_name,value"
    assert len(lines) == len(report["metrics"]) + 1
    bad = subprocess.run([os.environ["HSMOD_BIN"], "nope", "--out", str(tmp_path / "x.json")])
    assert bad.returncode == 2
