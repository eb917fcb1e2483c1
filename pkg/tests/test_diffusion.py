import numpy as np
import pytest

from beclat import (
    DiffusionParams,
    DiffusionProfile,
    diffusion_coefficient,
    dispersion,
    linear_step,
    nonlinear_step,
    run_linear,
    run_nonlinear,
    scaling_check,
    solve_thomas_fermi,
    support_radius,
)


def tf_profile(L=64, alpha=0.001):
    tf = solve_thomas_fermi(alpha)
    return DiffusionProfile(tf.amplitudes(L) ** 2)


class TestCoefficient:
    def test_equal_rates(self):
        for F in (0.5, 2.0, 10.0):
            assert diffusion_coefficient(F, F) == pytest.approx(1.0 / (2 * F), rel=1e-14)

    def test_weak_noise_limit(self):
        D = diffusion_coefficient(0.1, 10.0)
        assert D == pytest.approx(0.1 / 100.01, rel=1e-14)
        assert D == pytest.approx(0.1 / 100.0, rel=1e-3)

    def test_vanishing_noise(self):
        assert diffusion_coefficient(0.0, 5.0) == 0.0

    def test_undefined_case(self):
        with pytest.raises(ValueError):
            diffusion_coefficient(0.0, 0.0)

    def test_params_derivation(self):
        p = DiffusionParams(gamma=0.1, F=10.0, D_tilde=50.0)
        assert p.D == pytest.approx(0.1 / 100.01)


class TestLinearStep:
    def test_uniform_unchanged(self):
        prof = DiffusionProfile(np.full(16, 1.0 / 16))
        out = linear_step(prof, D=1.0, dt=0.3)
        np.testing.assert_array_equal(out.P, prof.P)

    def test_mass_conserved(self):
        rng = np.random.default_rng(0)
        prof = DiffusionProfile(rng.random(64))
        m0 = prof.mass
        for _ in range(1000):
            prof = linear_step(prof, D=1.0, dt=0.4)
        assert abs(prof.mass - m0) < 1e-12

    def test_stability_bound_enforced(self):
        prof = tf_profile()
        with pytest.raises(ValueError, match="stability"):
            linear_step(prof, D=1.0, dt=0.6)

    def test_variance_grows_as_2Dt(self):
        # exact moment identity of the discrete heat evolution
        P = np.zeros(128)
        P[64] = 1.0
        prof = DiffusionProfile(P)
        D, dt, n = 0.8, 0.5, 60  # keep the packet far from the ring wrap
        m0 = dispersion(prof.P)
        for _ in range(n):
            prof = linear_step(prof, D, dt)
        t = n * dt
        assert dispersion(prof.P) == pytest.approx(m0 + 2 * D * t, rel=1e-10)

    def test_max_principle(self):
        rng = np.random.default_rng(4)
        prof = DiffusionProfile(rng.random(32))
        peak = prof.P.max()
        for _ in range(100):
            prof = linear_step(prof, D=1.0, dt=0.5)
            assert prof.P.max() <= peak + 1e-15
            peak = prof.P.max()


class TestNonlinearStep:
    def test_uniform_unchanged(self):
        prof = DiffusionProfile(np.full(16, 1.0 / 16))
        out = nonlinear_step(prof, D_tilde=50.0, dt=0.1)
        np.testing.assert_array_equal(out.P, prof.P)

    def test_mass_conserved(self):
        prof = tf_profile()
        m0 = prof.mass
        dt = 0.5 / (6 * 50.0 * prof.P.max() ** 2)
        for _ in range(2000):
            prof = nonlinear_step(prof, 50.0, dt)
        assert abs(prof.mass - m0) < 1e-12

    def test_stability_bound_enforced(self):
        prof = tf_profile()
        bound = 1.0 / (6 * 50.0 * prof.P.max() ** 2)
        with pytest.raises(ValueError, match="stability"):
            nonlinear_step(prof, 50.0, 2.1 * bound)

    def test_even_profile_stays_even_exactly(self):
        prof = tf_profile()
        dt = 0.4 / (6 * 50.0 * prof.P.max() ** 2)
        for _ in range(500):
            prof = nonlinear_step(prof, 50.0, dt)
        P = prof.P
        np.testing.assert_array_equal(P[33:], P[1:32][::-1])

    def test_max_principle(self):
        prof = tf_profile()
        peak = prof.P.max()
        dt = 0.9 / (6 * 50.0 * peak**2)
        for _ in range(300):
            prof = nonlinear_step(prof, 50.0, dt)
            assert prof.P.max() <= peak + 1e-15
            peak = prof.P.max()

    def test_support_grows_at_most_one_site_per_step(self):
        prof = tf_profile()
        r = support_radius(prof.P)
        dt = 0.9 / (6 * 50.0 * prof.P.max() ** 2)
        for _ in range(300):
            prof = nonlinear_step(prof, 50.0, dt)
            r_new = support_radius(prof.P)
            assert r_new <= r + 1
            r = r_new

    def test_moment_identity(self):
        # dM/dt = 2 D~ sum P^3 for the cubic equation (summation by parts)
        prof = tf_profile()
        D_tilde = 50.0
        dt = 1e-4
        m0 = dispersion(prof.P)
        rate = 2 * D_tilde * np.sum(prof.P**3)
        out = nonlinear_step(prof, D_tilde, dt)
        assert (dispersion(out.P) - m0) / dt == pytest.approx(rate, rel=1e-3)


class TestRunsAndScaling:
    def test_linear_run_is_ordinary_diffusion(self):
        P = np.zeros(256)
        P[128] = 1.0
        t_final = 2000.0
        grid = np.geomspace(1.0, t_final, 60)
        _, series = run_linear(DiffusionProfile(P), 0.05, t_final, grid)
        fit = scaling_check(series)
        assert 0.95 <= fit.M_fit.exponent <= 1.05
        np.testing.assert_allclose(series.mass, 1.0, atol=1e-12)

    def test_insufficient_spreading_rejected(self):
        prof = tf_profile()
        _, series = run_nonlinear(prof, 50.0, 5.0, np.linspace(0.5, 5.0, 12))
        with pytest.raises(ValueError, match="insufficient spreading"):
            scaling_check(series)

    def test_run_lands_on_samples(self):
        prof = tf_profile()
        grid = [0.0, 1.0, np.pi, 10.0]
        _, series = run_nonlinear(prof, 50.0, 10.0, grid)
        np.testing.assert_allclose(series.times, grid, rtol=1e-9)

    def test_support_radius_threshold(self):
        P = np.zeros(32)
        P[16] = 1.0
        P[20] = 1e-12
        assert support_radius(P) == 0
        assert support_radius(P, rel_threshold=1e-13) == 4

    def test_profile_rejects_negative(self):
        with pytest.raises(ValueError):
            DiffusionProfile(np.array([0.1, -0.1, 0.2, 0.0]))
