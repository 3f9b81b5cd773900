import json
import os
import subprocess

import pytest

import pmlab


def test_constants():
    k = pmlab.constants(pmlab.NonlinearityProfile.perona_malik(), 1.5)
    assert abs(k.k0 - 0.47140) <= 1e-5
    assert abs(k.G - 1.0) < 1e-12


def test_coefficients():
    pm = pmlab.NonlinearityProfile.perona_malik()
    assert abs(pmlab.coeff_g(pm, 0.25) - pmlab.coeff_g_closed_pm(0.25)) < 1e-8
    assert abs(pmlab.h_inverse(pm, 0.4) - 0.5) < 1e-10
    assert pmlab.hypotheses_hold(pm)


def test_counterexample():
    pm = pmlab.NonlinearityProfile.perona_malik()
    assert pmlab.find_min_n(pm, 50) == 4
    assert pmlab.find_min_n(pm, 3) is None
    assert pmlab.vt_origin(pm, 10) == pytest.approx(1505.1883092036785, rel=1e-12)
    assert pmlab.convexity_margin(10) < 0


def test_errors():
    with pytest.raises(pmlab.ConfigError):
        pmlab.default_config("no-such-scenario")
    with pytest.raises(pmlab.ConfigError):
        pmlab.run_scenario({"scenario": "thm1-1d", "geometry": {"x3": 0.9, "x4": 0.1}})


def test_run_scenario(tmp_path, monkeypatch):
    monkeypatch.setenv("PMLAB_OUTPUT_ROOT", str(tmp_path))
    assert "barrier-verify-1" in pmlab.scenario_names()
    rep = pmlab.run_scenario({"scenario": "barrier-verify-1"})
    assert rep["all_pass"]
    assert [c["name"] for c in rep["criteria"]] == pmlab.criteria_for("barrier-verify-1")
    assert os.path.exists(os.path.join(rep["output_dir"], "report.json"))


@pytest.mark.skipif("PMLAB_CLI" not in os.environ, reason="CLI path not provided")
def test_cli(tmp_path):
    out = subprocess.run([os.environ["PMLAB_CLI"], "counterexample"], capture_output=True, text=True, cwd=tmp_path)
    assert out.returncode == 0
    cert = json.loads(out.stdout[: out.stdout.rindex("}") + 1])
    assert cert["n"] == 4
