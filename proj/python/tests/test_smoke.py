import json

import numpy as np
import pytest

import vortexsim as vs

GRID = vs.GridSpec(512, 512, 4e-6, 4e-6)


def test_lg_mode_is_normalized_and_dark_on_axis():
    f = vs.lg_mode(GRID, 780e-9, l=2)
    assert f.power() == pytest.approx(1.0, rel=1e-12)
    a = f.samples
    assert a.shape == (512, 512)
    assert a[256, 256] == 0


def test_numpy_round_trip():
    rng = np.random.default_rng(0)
    a = rng.normal(size=(32, 48)) + 1j * rng.normal(size=(32, 48))
    g = vs.GridSpec(48, 32, 1e-6, 1e-6)
    f = vs.ScalarField(g, 780e-9, a)
    assert np.array_equal(f.samples, a)
    back = vs.decode_vtxf(vs.encode_vtxf(f))
    assert np.array_equal(back.samples, a)
    with pytest.raises(vs.Error):
        vs.ScalarField(g, 780e-9, a.T)


def test_oam_arithmetic_and_stripes():
    blue = vs.fwm_blue_field(vs.lg_mode(GRID, 780e-9, l=2), vs.lg_mode(GRID, 776e-9, l=1))
    spec = vs.oam_spectrum(blue)
    assert spec["dominant_charge"] == 3
    assert spec["weights"][3] > 0.99
    r = vs.tilted_lens_reading(vs.lg_mode(GRID, 780e-9, l=-1))
    assert (r["count"], r["sign"]) == (1, -1)
    assert r["image"].shape == (1024, 1024)


def test_phase_match():
    cfg = vs.FwmConfig()
    s = vs.phase_match(6e-3, cfg)
    assert s["bl_inside"]
    assert 0 < s["theta_bl"] < 6e-3
    assert s["residual"] <= 1e-9 * 2 * np.pi / cfg.blue_wavelength()


def test_interferograms():
    f = vs.lg_mode(GRID, 780e-9, l=2)
    _, arms = vs.spherical_interferogram(f)
    assert arms == 2
    _, surplus, _ = vs.tilted_interferogram(f, 780e-9 / (8 * 4e-6))
    assert surplus == 2


def test_scenario_from_dict_and_errors(tmp_path):
    doc = {
        "scenario": "py",
        "grid": {"nx": 128, "ny": 128, "dx_m": 8e-6},
        "sources": [{"id": "b", "wavelength_m": 780e-9, "mode": {"l": 1, "waist_m": 100e-6}}],
        "diagnostics": [{"id": "s", "type": "oam_spectrum", "field": "b"}],
        "expectations": [{"name": "one", "diagnostic": "s", "quantity": "dominant_charge", "equals": 1}],
        "outputs": {"fields": ["b"]},
    }
    out = vs.run_scenario(doc, out_dir=str(tmp_path), write_files=True)
    assert out["exit_code"] == 0
    assert out["report"]["expectations"][0]["pass"]
    assert (tmp_path / "py_b.vtxf").exists()
    assert json.loads((tmp_path / "py_report.json").read_text())["scenario"] == "py"

    doc["diagnostics"][0]["field"] = "nope"
    assert vs.run_scenario(doc)["exit_code"] == 2
    with pytest.raises(vs.ParseError):
        vs.run_scenario('{"scenario": }')


def test_figures_listed():
    assert vs.figure_names() == ["fig1e", "fig2", "fig3", "fig4a", "fig4b", "fig4c", "fig5"]
    assert vs.canned_scenario("fig4a")["scenario"] == "fig4a"
    with pytest.raises(vs.ParseError, match="available"):
        vs.canned_scenario("nope")


def test_selftest_subset():
    res = vs.selftest([4])
    assert [r["id"] for r in res] == [4]
    assert res[0]["pass"]
