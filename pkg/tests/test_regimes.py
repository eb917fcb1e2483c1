"""Cross-regime physics checks that need real propagation but are not part
of the acceptance checklist: fluctuation-level ordering, carpet symmetry,
and the frozen-phase approximation quality at strong force."""

import numpy as np
import pytest

from beclat import (
    Frame,
    IntegratorConfig,
    ModelParams,
    ScenarioConfig,
    bloch_spectrum,
    carpet_grid,
    frozen_phase_state,
    gauss_sum_spectrum,
    propagate,
    revival_time,
    run_scenario,
    solve_thomas_fermi,
    thomas_fermi_init,
    to_frame,
)


def test_fluctuation_saturation_grows_as_force_weakens(fig1_result, fig2_result, results_dir):
    # saturation level of the total-variation fluctuation C(t): only the
    # ordering across forces is asserted, not magnitudes
    cfg = ScenarioConfig(
        name="chaotic_F1",
        J=1.0,
        g=10.0,
        F=1.0,
        L=128,
        alpha=0.001,
        scheme="split4",
        horizon=150.0,
        n_samples=300,
    )
    res_f1 = run_scenario(cfg, results_dir / cfg.name)

    def saturation(series):
        C = np.asarray(series.C)
        return float(C[len(C) // 2 :].mean())

    c100 = saturation(fig1_result.series)
    c10 = saturation(fig2_result.series)
    c1 = saturation(res_f1.series)
    print(f"C saturation: F=100 {c100:.3f}, F=10 {c10:.3f}, F=1 {c1:.3f}")
    assert c1 > c10 > c100


def test_carpet_symmetry_of_frozen_prediction():
    # the frozen-phase spectrum of a real even packet is even in kappa at
    # every time, exactly
    tf = solve_thomas_fermi(0.001)
    g, L = 10.0, 64
    t_rev = revival_time(g, tf.alpha)
    for t in np.linspace(0.0, t_rev, 17):
        p = np.abs(gauss_sum_spectrum(tf, g, t, L)) ** 2
        np.testing.assert_allclose(p[1:], p[1:][::-1], atol=1e-13)


def test_carpet_early_time_symmetry_of_simulation(fig1_result):
    # the simulated strong-force carpet keeps the kappa -> -kappa symmetry
    # through the early evolution (a slow asymmetric mode grows later)
    grid = np.asarray(fig1_result.series.bk2)
    early = grid[: len(grid) // 16]  # first 1/16 of the revival period
    asym = np.max(np.abs(early[:, 1:] - early[:, 1:][:, ::-1]))
    assert asym < 5e-3


def test_frozen_phase_matches_simulation_at_strong_force():
    # strong-force oracle: propagate to a tenth of the revival period and
    # compare against the frozen-phase prediction in site space
    params = ModelParams(J=1.0, g=10.0, F=100.0, L=64)
    state = thomas_fermi_init(0.001, params)
    t_rev = revival_time(params.g, 0.001)
    target = 0.1 * t_rev
    sim = propagate(to_frame(state, Frame.GAUGE, params), params, IntegratorConfig("split4"), target)
    frozen = frozen_phase_state(state, params.g, target)
    fid = abs(np.vdot(frozen.amplitudes, sim.amplitudes)) ** 2
    print(f"site-space fidelity at 0.1 T_rev: {fid:.5f}")
    assert fid >= 0.99


def test_carpet_grid_of_run_matches_gauss_sum_when_frozen(fig1_result):
    # at t = 0 the simulated spectrum slice equals the analytic one
    series = fig1_result.series
    tf = solve_thomas_fermi(0.001)
    pred = np.abs(gauss_sum_spectrum(tf, 10.0, 0.0, 64)) ** 2
    np.testing.assert_allclose(series.bk2[0], pred, atol=1e-12)
    t, kappa, grid = carpet_grid(series, time_unit=revival_time(10.0, 0.001))
    assert grid.shape == (513, 64)
    assert t[-1] == pytest.approx(1.0)
