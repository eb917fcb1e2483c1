"""End-to-end acceptance checklist.

Every test prints one PASS/FAIL line per checked claim (run with -s to see
them live).  The expensive scenario runs are session fixtures shared across
criteria; the multi-hour full-horizon spreading run is marked slow and has
a reduced-horizon smoke variant that always runs.

Checklist:
 1. conservation budget of every built-in scenario
 2. closed-form zero-mode oracle for the uniform initial condition
 3. revival regime: frozen populations, full and half revival fidelities
 4. coherence-time window and its growth with the force
 5. chaotic vs regular tangent growth (Lyapunov regimes)
 6. subdiffusive spreading exponent (smoke + slow full horizon)
 7. cubic-diffusion scaling exponents and initial-condition insensitivity
 8. momentum-space vs site-space propagator equivalence
 9. tangent Jacobian against finite differences
10. pixel-level figure matching is excluded by design; the fidelity and
    exponent windows above stand in for it
"""

import numpy as np
import pytest

from beclat import (
    Frame,
    IntegratorConfig,
    ModelParams,
    TangentState,
    bloch_spectrum,
    carpet_fidelity,
    coherence_time,
    derivative_gauge,
    derivative_static,
    dispersion,
    fit_power_law,
    gaussian_init,
    lyapunov_series,
    propagate,
    propagate_momentum,
    propagate_with_tangent,
    random_tangent,
    revival_structure,
    run_nonlinear,
    scaling_check,
    solve_thomas_fermi,
    subdiffusion_config,
    run_scenario,
    tangent_derivative,
    thomas_fermi_init,
    to_frame,
    uniform_closed_form,
    uniform_init,
    LatticeState,
    DiffusionProfile,
)

pytestmark = pytest.mark.acceptance


def check(label, ok, detail=""):
    print(f"[{label}] {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, f"{label}: {detail}"


# ---------------------------------------------------------------------------
# 1. Conservation suite


@pytest.mark.parametrize("name", ["fig1", "fig2", "fig3", "fig4"])
def test_criterion_1_conservation_dnlse(name, request):
    res = request.getfixturevalue(f"{name}_result")
    cons = res.report["conservation"]
    norm_rate = float(cons["norm_drift_per_time"])
    h_rel = float(cons["energy_rel_drift"])
    check(
        f"criterion 1 {name}",
        norm_rate <= 1e-9 and h_rel <= 1e-8,
        f"norm drift {norm_rate:.2e}/time (<=1e-9), energy drift {h_rel:.2e} rel (<=1e-8)",
    )


def test_criterion_1_conservation_diffusion(fig5_result):
    drift = float(fig5_result.report["conservation"]["mass_max_drift"])
    check("criterion 1 fig5", drift <= 1e-12, f"mass drift {drift:.2e} (<=1e-12)")


# ---------------------------------------------------------------------------
# 2. Closed-form oracle, uniform initial condition


def test_criterion_2_uniform_closed_form():
    J, g, F, L = 1.0, 10.0, 100.0, 16
    params = ModelParams(J=J, g=g, F=F, L=L)
    t_b = params.bloch_period
    state = to_frame(uniform_init(params), Frame.GAUGE, params)
    times = np.linspace(0.0, 10 * t_b, 201)
    worst_b0 = 0.0
    worst_rest = 0.0

    def obs(s):
        nonlocal worst_b0, worst_rest
        b = bloch_spectrum(s)
        ref = uniform_closed_form(J, F, g, L, s.time)
        worst_b0 = max(worst_b0, abs(b[L // 2] - ref))
        worst_rest = max(worst_rest, float(np.max(np.abs(np.delete(b, L // 2)))))

    propagate(state, params, IntegratorConfig("rk4"), 10 * t_b, sample_times=times, observers=[obs])
    check(
        "criterion 2",
        worst_b0 <= 1e-6 and worst_rest < 1e-8,
        f"max |b0 - closed form| {worst_b0:.2e} (<=1e-6), max other modes {worst_rest:.2e} (<1e-8)",
    )


# ---------------------------------------------------------------------------
# 3. Revival regime (strong force)


def test_criterion_3a_populations_frozen(fig1_result):
    P = fig1_result.series.P
    dev = float(np.max(np.abs(P - P[0])))
    bound = 0.05 * float(P[0].max())
    check("criterion 3a", dev <= bound, f"max pop deviation {dev:.4f} (<= {bound:.4f})")


def test_criterion_3b_full_revival_fidelity(fig1_result):
    bk2 = fig1_result.series.bk2
    fid = carpet_fidelity(bk2[-1], bk2[0])
    check("criterion 3b", fid >= 0.95, f"revival fidelity {fid:.4f} (>=0.95)")


def test_criterion_3c_half_revival_is_half_zone_shift(fig1_result):
    series = fig1_result.series
    bk2 = series.bk2
    i_half = len(series) // 2
    assert series.times[i_half] == pytest.approx(series.times[-1] / 2, rel=1e-9)
    L = bk2.shape[1]
    fid = carpet_fidelity(bk2[i_half], np.roll(bk2[0], L // 2))
    check("criterion 3c", fid >= 0.9, f"half-revival shifted fidelity {fid:.4f} (>=0.9)")


# ---------------------------------------------------------------------------
# 4. Coherence-time transition


def test_criterion_4_coherence_times(coherence_results):
    tf = solve_thomas_fermi(0.001)
    g = 10.0
    rs = revival_structure(g, tf.alpha)
    t_cohs = {}
    for F, res in sorted(coherence_results.items()):
        r = coherence_time(res.series, rs, tf, g)
        t_cohs[F] = r.time
        print(f"    T_coh(F={F:g}) = {r.time / rs.T_rev:.3f} T_rev censored={r.censored}")
    ratio = t_cohs[10.0] / rs.T_rev
    check("criterion 4 window", 0.1 <= ratio <= 0.3, f"T_coh(F=10) = {ratio:.3f} T_rev (in [0.1, 0.3])")
    forces = np.array(sorted(t_cohs))
    values = np.array([t_cohs[f] for f in forces])
    corr = float(np.corrcoef(forces, values)[0, 1])
    monotone = bool(np.all(np.diff(values) > 0))
    check("criterion 4 growth", corr >= 0.9 and monotone, f"corr(T_coh, F) = {corr:.3f} (>=0.9), increasing={monotone}")


# ---------------------------------------------------------------------------
# 5. Lyapunov regime split


@pytest.fixture(scope="session")
def lyapunov_chaotic_runs():
    params = ModelParams(J=1.0, g=10.0, F=0.25, L=512)
    t_b = params.bloch_period
    horizon = 40.0 * t_b
    grid = np.linspace(0.0, horizon, 161)
    state = to_frame(thomas_fermi_init(0.001, params), Frame.GAUGE, params)
    cfg = IntegratorConfig("rk4")
    out = []
    for seed in (7, 1234):
        _, _, rows = propagate_with_tangent(
            state, random_tangent(params.L, seed), params, cfg, horizon, sample_times=grid
        )
        out.append(rows)
    return t_b, out


def test_criterion_5_chaotic_plateau(lyapunov_chaotic_runs):
    t_b, runs = lyapunov_chaotic_runs
    means = []
    for rows in runs:
        t, lam = lyapunov_series(rows)
        plateau = lam[t >= t[-1] / 2]  # last half of the run, past 10 T_B
        mean, std = float(plateau.mean()), float(plateau.std())
        means.append(mean)
        check(
            "criterion 5 chaotic",
            mean > 0 and mean > 5 * std,
            f"plateau lambda = {mean:.4f} +- {std:.4f} (positive, mean > 5 sigma)",
        )
    spread = abs(means[0] - means[1]) / (0.5 * (means[0] + means[1]))
    check("criterion 5 seeds", spread <= 0.10, f"seed-to-seed plateau spread {spread:.2%} (<=10%)")


def test_criterion_5_regular_decay():
    params = ModelParams(J=1.0, g=10.0, F=100.0, L=64)
    t_b = params.bloch_period
    horizon = 500.0 * t_b
    grid = np.linspace(0.0, horizon, 251)
    state = to_frame(thomas_fermi_init(0.001, params), Frame.GAUGE, params)
    _, _, rows = propagate_with_tangent(
        state, random_tangent(params.L, 7), params, IntegratorConfig("rk4"), horizon, sample_times=grid
    )
    lam_t = rows[:, 1]  # lambda(t) * t = ln|delta a(t)|
    bound = float(np.max(lam_t))
    t, lam = lyapunov_series(rows)
    # decisively separated from the chaotic case, where lambda*t grows past
    # 100 within tens of Bloch periods; and lambda itself keeps decaying
    early = float(lam[(t >= 40 * t_b) & (t <= 60 * t_b)].mean())
    late = float(lam[t >= 450 * t_b].mean())
    check(
        "criterion 5 regular",
        bound <= 8.0 and 0 < late <= 0.6 * early,
        f"max lambda*t = {bound:.2f} (<=8), lambda decays {early:.4f} -> {late:.4f} (ratio <= 0.6)",
    )


# ---------------------------------------------------------------------------
# 6. Subdiffusion


def test_criterion_6_smoke_exponent(smoke_subdiffusion_result):
    # reduced-horizon sanity check: spreading at roughly sqrt(t) over the
    # post-onset range (the asymptotic-window fit belongs to the full run)
    series = smoke_subdiffusion_result.series
    t_b = 2 * np.pi / 0.25
    fit = fit_power_law(series.times, series.M, window=(10.0 * t_b, float(series.times[-1])))
    check(
        "criterion 6 smoke",
        0.3 <= fit.exponent <= 0.7,
        f"M(t) exponent {fit.exponent:.3f} over {fit.fit_window} (in [0.3, 0.7])",
    )


@pytest.fixture(scope="session")
def full_subdiffusion_fits(results_dir):
    fits = {}
    for F in (0.25, 0.15):
        cfg = subdiffusion_config(F=F, horizon_TB=2000.0, dt=0.02, name=f"subdiff_full_F{F:g}")
        res = run_scenario(cfg, results_dir / cfg.name)
        # final half-decade of the run
        fits[F] = fit_power_law(res.series.times, res.series.M)
        print(f"    F={F}: exponent {fits[F].exponent:.3f}, prefactor {fits[F].prefactor:.3f} over {fits[F].fit_window}")
    return fits


@pytest.mark.slow
def test_criterion_6_full_exponent(full_subdiffusion_fits):
    expo = full_subdiffusion_fits[0.25].exponent
    check("criterion 6 full", 0.4 <= expo <= 0.6, f"M(t) exponent {expo:.3f} (in [0.4, 0.6])")


@pytest.mark.slow
def test_criterion_6_full_prefactor(full_subdiffusion_fits):
    p15 = full_subdiffusion_fits[0.15].prefactor
    p25 = full_subdiffusion_fits[0.25].prefactor
    check(
        "criterion 6 prefactor",
        p15 > p25,
        f"prefactor grows as the force weakens: {p15:.3f} > {p25:.3f}",
    )


# ---------------------------------------------------------------------------
# 7. Cubic-diffusion scaling


@pytest.fixture(scope="session")
def cubic_diffusion_runs():
    D_tilde, L = 50.0, 256
    horizon = 2000.0 * 2 * np.pi
    grid = np.geomspace(horizon * 1e-3, horizon, 220)
    tf = solve_thomas_fermi(0.001)
    p_tf = DiffusionProfile(tf.amplitudes(L) ** 2)
    sigma = float(np.sqrt(dispersion(p_tf.P)))  # equal-width Gaussian
    a = gaussian_init(sigma, ModelParams(J=1.0, g=0.0, F=0.0, L=L)).amplitudes
    p_g = DiffusionProfile(np.abs(a) ** 2)
    runs = {}
    for label, prof in (("thomas_fermi", p_tf), ("gaussian", p_g)):
        runs[label] = run_nonlinear(prof, D_tilde, horizon, grid)
    return runs


def test_criterion_7_scaling_exponents(cubic_diffusion_runs):
    _, series = cubic_diffusion_runs["thomas_fermi"]
    scaling = scaling_check(series)
    check(
        "criterion 7 dispersion",
        0.45 <= scaling.M_fit.exponent <= 0.55,
        f"M exponent {scaling.M_fit.exponent:.3f} (in [0.45, 0.55])",
    )
    check(
        "criterion 7 radius",
        0.2 <= scaling.radius_fit.exponent <= 0.3,
        f"radius exponent {scaling.radius_fit.exponent:.3f} (in [0.2, 0.3])",
    )


def test_criterion_7_shape_insensitivity(cubic_diffusion_runs):
    final_tf, _ = cubic_diffusion_runs["thomas_fermi"]
    final_g, _ = cubic_diffusion_runs["gaussian"]
    dist = float(np.abs(final_tf.P - final_g.P).sum() / final_tf.P.sum())
    check("criterion 7 insensitivity", dist < 0.05, f"late-time relative L1 distance {dist:.4f} (<0.05)")


# ---------------------------------------------------------------------------
# 8. Cross-propagator equivalence


def test_criterion_8_momentum_vs_site():
    params = ModelParams(J=1.0, g=10.0, F=10.0, L=16)
    t_b = params.bloch_period
    horizon = 5.0 * t_b
    state = to_frame(thomas_fermi_init(0.004, params), Frame.GAUGE, params)
    b = bloch_spectrum(state, order="natural")
    b_mom = propagate_momentum(b, params, IntegratorConfig("rk4", dt=1e-3), horizon)
    site = propagate(state, params, IntegratorConfig("split4", dt=1e-3), horizon)
    b_site = bloch_spectrum(site, order="natural")
    diff = float(np.max(np.abs(b_mom - b_site)))
    check("criterion 8", diff <= 1e-6, f"max mode amplitude difference {diff:.2e} (<=1e-6)")


# ---------------------------------------------------------------------------
# 9. Jacobian correctness


def test_criterion_9_jacobian_vs_finite_differences():
    rng = np.random.default_rng(42)
    eps = 1e-6
    worst = 0.0
    for i in range(20):
        L = 16
        frame = Frame.STATIC if i % 2 == 0 else Frame.GAUGE
        params = ModelParams(J=1.0, g=10.0, F=float(rng.uniform(0.1, 20.0)), L=L)
        a = rng.standard_normal(L) + 1j * rng.standard_normal(L)
        a /= np.linalg.norm(a)
        st = LatticeState(a, time=float(rng.uniform(0, 5)), frame=frame)
        d = rng.standard_normal(L) + 1j * rng.standard_normal(L)
        d /= np.linalg.norm(d)
        deriv = derivative_static if frame is Frame.STATIC else derivative_gauge
        plus = deriv(LatticeState(a + eps * d, st.time, frame), params)
        minus = deriv(LatticeState(a - eps * d, st.time, frame), params)
        fd = (plus - minus) / (2 * eps)
        jac = tangent_derivative(st, TangentState(d), params)
        worst = max(worst, float(np.linalg.norm(jac - fd) / np.linalg.norm(fd)))
    check("criterion 9", worst <= 1e-6, f"worst relative error over 20 states {worst:.2e} (<=1e-6)")


# ---------------------------------------------------------------------------
# 10. Exclusions


def test_criterion_10_exclusions_documented():
    check(
        "criterion 10",
        True,
        "pixel-level figure matching and absolute fluctuation magnitudes are excluded; "
        "fidelity thresholds, exponent windows, and ordering assertions stand in",
    )
