import math

import numpy as np
import pytest

import afcxpm


def test_phase_per_photon_at_100_mhz():
    phi = afcxpm.phase_per_photon(afcxpm.material_preset("tm_linbo3"), afcxpm.mhz(100))
    assert phi == pytest.approx(1.12e-9, rel=0.01)
    assert afcxpm.phase_per_photon(afcxpm.material_preset("tm_linbo3"), afcxpm.mhz(-100)) == -phi


def test_probe_phase_is_linear_and_warns_near_band():
    p = afcxpm.material_preset("tm_linbo3")
    one, warnings = afcxpm.probe_phase(p, afcxpm.mhz(100), 6.9e7)
    three, _ = afcxpm.probe_phase(p, afcxpm.mhz(100), 6.9e7, passes=3)
    assert one == pytest.approx(0.0774, rel=1e-3)
    assert three == pytest.approx(3 * one, rel=1e-12)
    assert warnings


def test_design_point_is_feasible():
    report = afcxpm.check_conditions(afcxpm.example_design_point())
    assert report["all_satisfied"]
    assert report["eta"] == pytest.approx(0.499, rel=0.01)
    assert report["conditions"]["cond2"]["bound"] == pytest.approx(925, rel=0.01)


def test_errors_map_to_python_exceptions():
    p = afcxpm.material_preset("tm_linbo3")
    with pytest.raises(afcxpm.DomainError):
        afcxpm.phase_per_photon(p, 0.0)
    with pytest.raises(afcxpm.ConfigError):
        afcxpm.material_preset("sapphire")
    assert issubclass(afcxpm.ConfigError, RuntimeError)


def test_absorption_profile_shapes():
    det, alpha = afcxpm.absorption_profile(afcxpm.experimental_comb(), points=4096)
    assert det.shape == alpha.shape == (4096,)
    assert np.all(alpha >= 0)


def test_noiseless_sweep_matches_analytic():
    model = afcxpm.ReadoutModel()
    model.noise = afcxpm.NoiseModel.none()
    for row in afcxpm.detuning_sweep(model=model, repetitions=5):
        assert row["slope"] == pytest.approx(row["analytic"], rel=1e-12)


def test_experiment_is_seed_deterministic():
    model = afcxpm.ReadoutModel()
    model.noise.seed = 3
    a = afcxpm.run_experiment(0.05, 100, model)
    b = afcxpm.run_experiment(0.05, 100, model, threads=2)
    assert np.array_equal(a["phases"], b["phases"])
    assert a["sem"] == pytest.approx(a["std_dev"] / math.sqrt(100))


def test_fig4_states_share_the_phase():
    rows = afcxpm.reproduce_fig4()
    assert rows[0]["state"] is None
    means = {r["phase_mean"] for r in rows[1:]}
    assert len(means) == 1


def test_short_echo_run():
    comb = afcxpm.CombParams()
    comb.peak_od, comb.finesse, comb.background_od, comb.pit_od = 1.0, 4.0, 0.0, 0.0
    run = afcxpm.simulate_echo(comb, afcxpm.material_preset("tm_linbo3"), z_slices=16, steps_per_storage=512)
    assert run["efficiency"] == pytest.approx(afcxpm.recall_efficiency(1.0, 4.0), rel=0.1)
    assert abs(run["echo_delay"] - run["storage_time"]) < 2e-9
    assert run["output"].dtype == np.complex128
