import numpy as np
import pytest
from mpmath import mp, mpf, exp as mpexp

from ctsc.dynsys import InstabilityError, etdrk4_coefficients, solve_ks, solve_ks_energies


def coeffs_highprec(L_val, dt):
    """Direct-formula oracle in 40-digit arithmetic (no contour needed at
    high precision: the cancellation the contour avoids is harmless here)."""
    mp.dps = 40
    z = mpf(L_val) * mpf(dt)
    h = mpf(dt)
    if z == 0:
        return (1.0, 1.0, float(h) / 2, float(h) / 6, float(h) / 6, float(h) / 6)
    E = mpexp(z)
    E2 = mpexp(z / 2)
    Q = h * (mpexp(z / 2) - 1) / z
    f1 = h * (-4 - z + E * (4 - 3 * z + z ** 2)) / z ** 3
    f2 = h * (2 + z + E * (-2 + z)) / z ** 3
    f3 = h * (-4 - 3 * z - z ** 2 + E * (4 - z)) / z ** 3
    return tuple(float(v) for v in (E, E2, Q, f1, f2, f3))


class TestEtdrk4Coefficients:
    def test_zero_symbol_limits(self):
        E, E2, Q, f1, f2, f3 = etdrk4_coefficients(np.array([0.0]), dt=0.1)
        assert E[0] == 1.0 and E2[0] == 1.0
        assert Q[0] == pytest.approx(0.1 / 2, abs=1e-14)
        assert f1[0] == pytest.approx(0.1 / 6, abs=1e-14)
        assert f2[0] == pytest.approx(0.1 / 6, abs=1e-14)
        assert f3[0] == pytest.approx(0.1 / 6, abs=1e-14)

    def test_scalar_exponential(self):
        E, E2, *_ = etdrk4_coefficients(np.array([-1.0]), dt=0.5)
        assert E[0] == pytest.approx(np.exp(-0.5), abs=1e-12)
        assert E2[0] == pytest.approx(np.exp(-0.25), abs=1e-12)

    def test_against_highprec_oracle(self):
        alpha = 125.0
        dt = 2.5e-4
        k = np.arange(1, 257, dtype=np.float64)
        L = -4.0 * k ** 4 + alpha * k ** 2
        E, E2, Q, f1, f2, f3 = etdrk4_coefficients(L, dt)
        for i in range(0, len(k), 17):
            ref = coeffs_highprec(L[i], dt)
            got = (E[i], E2[i], Q[i], f1[i], f2[i], f3[i])
            for g, r in zip(got, ref):
                assert abs(g - r) <= 1e-10 * max(1.0, abs(r)), (k[i], g, r)


class TestSolveKS:
    def test_alpha0_linear_decay(self):
        # alpha=0 kills the nonlinearity: u = -exp(-4t) sin x, E = pi exp(-8t)
        run = solve_ks(0.0, n_modes=64, dt=1e-4, t_end=1.0, n_samples=100)
        exact = np.pi * np.exp(-8.0 * run.t)
        assert np.max(np.abs(run.energy - exact) / exact) < 1e-6

    def test_sampling_grid(self):
        run = solve_ks(0.0, n_modes=64, dt=1e-4, t_end=1.0, n_samples=100)
        assert run.t.shape == (100,)
        assert run.t[-1] == pytest.approx(1.0, abs=1e-12)
        assert run.energy.shape == (100,)
        assert np.all(run.energy >= 0.0)

    def test_alpha100_settles_to_steady_energy(self):
        _, e = solve_ks_energies([100.0], n_modes=256, dt=2.5e-4, t_end=10.0, n_samples=1000)
        tail = e[0, 100:]  # t > 1, past the documented t <~ 0.5 transient
        assert tail.std() / tail.mean() < 1e-6
        head = e[0, :50]
        assert head.max() - head.min() > 0.01 * tail.mean()  # transient visible

    def test_alpha125_irregular(self):
        _, e = solve_ks_energies([125.0], n_modes=256, dt=2.5e-4, t_end=10.0, n_samples=1000)
        tail = e[0, 500:]
        assert tail.std() / tail.mean() > 0.05
        best = min(np.abs(tail[:-p] - tail[p:]).max() for p in range(1, 100))
        assert best > 1e-3 * tail.mean()  # no periodic recurrence

    def test_temporal_order_four(self):
        # errors against a dt/16 reference shrink ~16x per dt halving; the
        # dts sit in the asymptotic regime (larger steps carry a slowly
        # fading h^3 stiff-order component on top of the h^4 error)
        alpha, n_modes, t_end = 30.0, 128, 0.1
        dts = [1.25e-4, 6.25e-5, 3.125e-5]

        def field_at_end(dt):
            run = solve_ks(alpha, n_modes=n_modes, dt=dt, t_end=t_end, n_samples=1,
                           keep_snapshots=True)
            return run.snapshots[:, -1]

        ref = field_at_end(dts[-1] / 16.0)
        errs = [np.linalg.norm(field_at_end(dt) - ref) for dt in dts]
        r1 = errs[0] / errs[1]
        r2 = errs[1] / errs[2]
        assert 16.0 * 0.7 <= r1 <= 16.0 * 1.3
        assert 16.0 * 0.7 <= r2 <= 16.0 * 1.3

    def test_zero_mode_stays_zero(self):
        for alpha in (20.0, 44.0, 100.0, 125.0):
            run = solve_ks(alpha, n_modes=128, dt=2.5e-4, t_end=2.0, n_samples=100,
                           keep_snapshots=True)
            means = run.snapshots.mean(axis=0)
            assert np.max(np.abs(means)) < 1e-8, alpha

    def test_parseval_matches_trapezoid(self):
        run = solve_ks(44.0, n_modes=128, dt=2.5e-4, t_end=1.0, n_samples=10,
                       keep_snapshots=True)
        n = run.n_modes
        x = 2.0 * np.pi * np.arange(n + 1) / n
        trapezoid = getattr(np, "trapezoid", None) or np.trapz
        for j in range(10):
            u = np.append(run.snapshots[:, j], run.snapshots[0, j])
            quad = trapezoid(u ** 2, x)
            assert abs(quad - run.energy[j]) <= 1e-8 * run.energy[j]

    def test_blowup_guard(self):
        with pytest.raises(InstabilityError) as exc:
            solve_ks(125.0, n_modes=128, dt=1e-2, t_end=10.0, n_samples=100)
        assert exc.value.alpha == 125.0
        assert exc.value.step > 0

    def test_grid_validation(self):
        with pytest.raises(ValueError):
            solve_ks(44.0, n_modes=100, dt=1e-4, t_end=1.0, n_samples=100)
        with pytest.raises(ValueError):
            solve_ks(44.0, n_modes=64, dt=3e-4, t_end=1.0, n_samples=100)
        with pytest.raises(ValueError):
            solve_ks(44.0, n_modes=64, dt=-1e-4, t_end=1.0, n_samples=100)

    def test_batch_matches_single(self):
        t_b, e_b = solve_ks_energies([20.0, 44.0], n_modes=64, dt=5e-4, t_end=1.0,
                                     n_samples=100)
        for i, alpha in enumerate((20.0, 44.0)):
            single = solve_ks(alpha, n_modes=64, dt=5e-4, t_end=1.0, n_samples=100)
            assert np.array_equal(single.energy, e_b[i])
            assert np.array_equal(single.t, t_b)

    def test_determinism(self):
        _, a = solve_ks_energies([125.0], n_modes=64, dt=5e-4, t_end=1.0, n_samples=100)
        _, b = solve_ks_energies([125.0], n_modes=64, dt=5e-4, t_end=1.0, n_samples=100)
        assert np.array_equal(a, b)
