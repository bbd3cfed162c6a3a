import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cascadelab import shell_model as sm
from cascadelab.errors import ConfigError, InstabilityError
from cascadelab.spectrum import fit_loglog_slope


def params(**kw):
    kw.setdefault("n_shells", 20)
    return sm.CascadeParams(**kw)


# -- scales and steady state --------------------------------------------------

def test_scales_at_shell_3():
    s = sm.shell_scales(params(lam=2.0, n_shells=4))
    assert s.ell[3] == 0.125
    assert s.k[3] == 8.0
    assert s.tau[3] == pytest.approx(0.25, rel=1e-15)
    assert (s.ell[0], s.k[0], s.tau[0]) == (1.0, 1.0, 1.0)


def test_tau_with_lambda_e():
    s = sm.shell_scales(params(lam=math.e, n_shells=4))
    assert s.tau[3] == pytest.approx(0.1353352832366127, rel=1e-14)  # e^-2


def test_steady_state_examples():
    assert sm.steady_state_energies(params(lam=2.0), 1.0).energies[3] == pytest.approx(0.25, rel=1e-15)
    assert sm.steady_state_energies(params(lam=8.0), 1.0).energies[1] == pytest.approx(0.25, rel=1e-15)
    assert not np.any(sm.steady_state_energies(params(), 0.0).energies)


def test_single_shell_spectrum():
    p = params(n_shells=1)
    spec = sm.spectrum_from_shells(sm.ShellState(0.0, np.array([1.0])), sm.shell_scales(p))
    assert (spec.k[0], spec.E[0]) == (1.0, 1.0)


def test_spectrum_length_mismatch():
    p = params(n_shells=3)
    with pytest.raises(ValueError, match="shells"):
        sm.spectrum_from_shells(sm.ShellState(0.0, np.ones(2)), sm.shell_scales(p))


def test_k41_steady_slope_and_flux():
    p = params(lam=2.0, n_shells=25)
    steady = sm.steady_state_energies(p, 1.0)
    scales = sm.shell_scales(p)
    fit = fit_loglog_slope(sm.spectrum_from_shells(steady, scales))
    assert fit.slope == pytest.approx(-5.0 / 3.0, abs=1e-12)
    flux = sm.energy_flux(steady, scales)
    assert np.max(np.abs(flux - 1.0)) < 1e-12


def test_flux_examples():
    p = params(lam=2.0, n_shells=2)
    scales = sm.shell_scales(p)
    flux = sm.energy_flux(sm.ShellState(0.0, np.array([1.0, 1.0])), scales)
    assert flux[0] == 1.0
    assert flux[1] == pytest.approx(2 ** (2 / 3), rel=1e-15)
    assert not np.any(sm.energy_flux(sm.ShellState(0.0, np.zeros(2)), scales))


# -- right-hand sides -----------------------------------------------------------

def test_steady_state_is_fixed_point():
    p = params(lam=2.0, n_shells=25)
    rates = sm.inviscid_rhs(sm.steady_state_energies(p, 1.0), p)
    # shell 0 drains (closed boundary) and the last shell's outflow exits; interior balance is exact
    assert np.max(np.abs(rates[1:])) < 1e-14 * np.max(1.0 / sm.shell_scales(p).tau)


def test_delta_rates():
    p = params(lam=2.0, n_shells=5)
    E = np.zeros(5)
    E[0] = 1.0
    r = sm.inviscid_rhs(sm.ShellState(0.0, E), p)
    assert r[0] == -1.0 and r[1] == 1.0 and not np.any(r[2:])


def test_zero_state_rates():
    p = params(nu=1e-3)
    z = sm.ShellState(0.0, np.zeros(p.n_shells))
    assert not np.any(sm.inviscid_rhs(z, p))
    assert not np.any(sm.viscous_rhs(z, p))


def test_viscous_reduces_to_inviscid_at_nu0():
    p = params(lam=1.5, n_shells=6)
    s = sm.ShellState(0.0, np.linspace(1, 2, 6))
    np.testing.assert_array_equal(sm.viscous_rhs(s, p), sm.inviscid_rhs(s, p))


def test_isolated_last_shell_rate():
    p = params(lam=2.0, n_shells=6, nu=1e-3)
    E = np.zeros(6)
    E[-1] = 1.0
    r = sm.viscous_rhs(sm.ShellState(0.0, E), p)
    s = sm.shell_scales(p)
    assert r[-1] == pytest.approx(-(1 / s.tau[-1] + 1e-3 * s.k[-1] ** 2), rel=1e-15)


def test_forced_boundary_inflow():
    p = params(n_shells=3, boundary="forced", forcing_flux=2.5)
    r = sm.inviscid_rhs(sm.ShellState(0.0, np.zeros(3)), p)
    assert r[0] == 2.5
    budget = sm.energy_budget(sm.ShellState(0.0, np.zeros(3)), p)
    assert budget["inflow"] == 2.5


def test_forced_run_reaches_k41_steady_state():
    p = params(lam=2.0, n_shells=6, boundary="forced", forcing_flux=1.0)
    traj = sm.integrate(sm.ShellState(0.0, np.zeros(6)), p, dt=sm.max_stable_dt(p), t_end=60.0, stride=10**9)
    np.testing.assert_allclose(traj.final, sm.steady_state_energies(p, 1.0).energies, rtol=1e-9)


# -- integration -----------------------------------------------------------------

def test_zero_initial_state_stays_zero():
    p = params(n_shells=8, nu=1e-2)
    traj = sm.integrate(sm.ShellState(0.0, np.zeros(8)), p, "viscous", dt=1e-4, t_end=0.1)
    assert not np.any(traj.states)


def test_energy_budget_closes():
    p = params(lam=2.0, n_shells=8, nu=1e-3)
    E0 = np.zeros(8)
    E0[0] = 1.0
    dt = sm.max_stable_dt(p)
    traj = sm.integrate(sm.ShellState(0.0, E0), p, "viscous", dt=dt, t_end=2.0)
    totals = traj.states.sum(axis=1)
    losses = np.array([
        sm.energy_budget(sm.ShellState(t, E), p)["exit_flux"] + sm.energy_budget(sm.ShellState(t, E), p)["dissipation"]
        for t, E in zip(traj.times, traj.states)
    ])
    # trapezoid-integrated losses match the drop in total energy
    drop = totals[0] - totals[-1]
    lost = float(np.sum(0.5 * (losses[1:] + losses[:-1]) * np.diff(traj.times)))
    assert lost == pytest.approx(drop, rel=1e-6)


def test_rk4_matches_matrix_exponential():
    p = params(lam=1.25, n_shells=20)
    E0 = np.zeros(20)
    E0[0] = 1.0
    init = sm.ShellState(0.0, E0)
    traj = sm.integrate(init, p, dt=1e-3, t_end=5.0, stride=10**9)
    exact = sm.exact_inviscid_solution(init, p, 5.0).energies
    assert np.max(np.abs(traj.final - exact)) < 1e-12


def test_fourth_order_convergence():
    p = params(lam=2.0, n_shells=6)
    E0 = np.zeros(6)
    E0[0] = 1.0
    init = sm.ShellState(0.0, E0)
    exact = sm.exact_inviscid_solution(init, p, 1.0).energies
    errs = [np.max(np.abs(sm.integrate(init, p, dt=dt, t_end=1.0).final - exact)) for dt in (2e-3, 1e-3)]
    assert math.log2(errs[0] / errs[1]) == pytest.approx(4.0, abs=0.2)


def test_isolated_deep_shell_decays_viscously():
    p = params(lam=2.0, n_shells=12, nu=1e-2)
    s = sm.shell_scales(p)
    n = 11
    rate = p.nu * s.k[n] ** 2
    assert rate * s.tau[n] >= 100
    E0 = np.zeros(12)
    E0[n] = 1.0
    t_end = math.log(10.0) / rate
    traj = sm.integrate(sm.ShellState(0.0, E0), p, "viscous", dt=t_end / 100, t_end=t_end)
    ref = np.exp(-rate * traj.times)
    assert np.max(np.abs(traj.states[:, n] / ref - 1.0)) < 0.05
    assert traj.final[n] < 0.11


def test_stability_guard_rejects_large_dt():
    p = params(lam=2.0, n_shells=20)
    with pytest.raises(ConfigError, match="stability"):
        sm.integrate(p.initial_state(), p, dt=1e-3, t_end=1.0)


def test_negativity_raises_instability(monkeypatch):
    p = params(lam=2.0, n_shells=4)
    E0 = np.array([1.0, 0.0, 0.0, 0.0])
    # pretend the guard is looser so an overshooting step goes through
    monkeypatch.setattr(sm, "STABILITY_FRACTION", 100.0)
    with pytest.raises(InstabilityError) as info:
        sm.integrate(sm.ShellState(0.0, E0), p, dt=3.0, t_end=30.0)
    assert info.value.index is not None
    assert info.value.suggested_dt < 3.0


def test_final_time_within_dt():
    p = params(n_shells=3)
    traj = sm.integrate(p.initial_state(), p, dt=0.03, t_end=1.0)
    assert abs(traj.times[-1] - 1.0) <= 0.03


@pytest.mark.parametrize(
    "kw",
    [dict(lam=1.0), dict(tau0=0.0), dict(nu=-1.0), dict(n_shells=0), dict(boundary="open"), dict(ell0=-1.0)],
)
def test_param_validation(kw):
    with pytest.raises(ConfigError):
        params(**kw)


# -- closed form --------------------------------------------------------------------

def test_closed_form_poisson_example():
    p = params(lam=2.0, n_shells=6)
    E0 = np.zeros(6)
    E0[0] = 1.0
    out = sm.analytic_inviscid_solution(sm.ShellState(0.0, E0), p, 1.0).energies
    assert out[1] == pytest.approx(0.36787944117144233, rel=1e-14)
    t = 2.5
    out = sm.analytic_inviscid_solution(sm.ShellState(0.0, E0), p, t).energies
    expected = [math.exp(-t) * t**n / math.factorial(n) for n in range(6)]
    np.testing.assert_allclose(out, expected, rtol=1e-13)


def test_closed_form_poisson_normalization():
    p = params(lam=2.0, n_shells=200)
    E0 = np.zeros(200)
    E0[0] = 1.0
    out = sm.analytic_inviscid_solution(sm.ShellState(0.0, E0), p, 30.0).energies
    assert out.sum() == pytest.approx(1.0, rel=1e-12)
    assert np.all(np.isfinite(out))


def test_closed_form_at_t0_is_identity():
    p = params(n_shells=5)
    E0 = np.array([1.0, 0.3, 0.2, 0.1, 0.0])
    out = sm.analytic_inviscid_solution(sm.ShellState(0.0, E0), p, 0.0).energies
    np.testing.assert_array_equal(out, E0)


def test_closed_form_solves_uniform_tau_system():
    # the sum is exact for dE_n/dt = (E_{n-1} - E_n)/tau0
    from scipy.linalg import expm

    n = 8
    p = params(lam=2.0, n_shells=n)
    E0 = np.zeros(n)
    E0[0] = 1.0
    A = -np.eye(n) + np.eye(n, k=-1)
    ref = expm(2.0 * A) @ E0
    out = sm.analytic_inviscid_solution(sm.ShellState(0.0, E0), p, 2.0).energies
    np.testing.assert_allclose(out, ref, rtol=1e-12, atol=1e-15)


def test_closed_form_differs_from_shell_system():
    p = params(lam=2.0, n_shells=6)
    E0 = np.zeros(6)
    E0[0] = 1.0
    init = sm.ShellState(0.0, E0)
    closed = sm.analytic_inviscid_solution(init, p, 1.0).energies[1]
    exact = sm.exact_inviscid_solution(init, p, 1.0).energies[1]
    # exact: (tau1/(tau0 - tau1)) * (e^{-t/tau0} - e^{-t/tau1}) with tau1 = 2^{-2/3}
    tau1 = 2 ** (-2 / 3)
    oracle = tau1 / (1 - tau1) * (math.exp(-1) - math.exp(-1 / tau1))
    assert exact == pytest.approx(oracle, rel=1e-12)
    assert exact == pytest.approx(0.278214, abs=1e-6)
    assert abs(closed - exact) > 0.08


# -- dissipation criteria -------------------------------------------------------------

def test_local_reynolds_examples():
    p = params(lam=2.0, nu=1e-6)
    assert sm.local_reynolds(p, 0) == pytest.approx(1e6, rel=1e-14)
    assert sm.local_reynolds(p, 15) == pytest.approx(1e6 * 2.0**-20, rel=1e-12)
    assert sm.local_reynolds(p, 15) == pytest.approx(0.954, abs=1e-3)
    with pytest.raises(ConfigError, match="inviscid"):
        sm.local_reynolds(params(), 0)


def test_dissipation_shell_index():
    p = params(lam=2.0, nu=1e-6)
    n_star = sm.dissipation_shell_index(p)
    assert n_star == pytest.approx(0.75 * math.log(1e6) / math.log(2), rel=1e-14)
    assert n_star == pytest.approx(14.95, abs=0.005)
    re = sm.local_reynolds(p, round(n_star))
    assert 2 ** (-4 / 3) <= re <= 2 ** (4 / 3)
    with pytest.raises(ConfigError):
        sm.dissipation_shell_index(params(nu=1.0))


def test_n_star_uses_ell0_normalization():
    a = sm.dissipation_shell_index(params(lam=2.0, nu=4e-6, ell0=2.0))
    b = sm.dissipation_shell_index(params(lam=2.0, nu=1e-6))
    assert a == pytest.approx(b, rel=1e-14)


def test_timescale_ratio_examples():
    p = params(lam=2.0, nu=1e-6)
    assert sm.timescale_ratio(p, 15) == pytest.approx(2**20 * 1e-6, rel=1e-12)
    assert sm.timescale_ratio(p, 0) == pytest.approx(1e-6, rel=1e-15)
    r = sm.timescale_ratio(p, np.arange(30))
    assert np.all(np.diff(r) > 0)


@settings(max_examples=40, deadline=None)
@given(lam=st.floats(1.1, 10.0), nu=st.floats(1e-9, 1e-2), tau0=st.floats(0.1, 10.0), ell0=st.floats(0.1, 10.0))
def test_scaling_identities(lam, nu, tau0, ell0):
    p = sm.CascadeParams(lam=lam, nu=nu, tau0=tau0, ell0=ell0, n_shells=10)
    n = np.arange(10)
    g = lam ** (4 * n / 3)
    re = sm.local_reynolds(p, n) * g
    tr = sm.timescale_ratio(p, n) / g
    np.testing.assert_allclose(re, re[0], rtol=1e-12)
    np.testing.assert_allclose(tr, tr[0], rtol=1e-12)


# -- viscous steady state ------------------------------------------------------------

def test_viscous_steady_balance():
    p = params(lam=2.0, n_shells=25, nu=1e-6)
    st_ = sm.steady_viscous_energies(p, 1.0)
    r = sm.viscous_rhs(st_, p)
    assert np.max(np.abs(r[1:])) < 1e-12
    assert np.max(np.abs(sm.steady_viscous_residual(st_, p))) < 1e-12


def test_viscous_steady_reduces_to_inviscid():
    p = params(lam=2.0, n_shells=10)
    np.testing.assert_allclose(
        sm.steady_viscous_energies(p, 1.0).energies, sm.steady_state_energies(p, 1.0).energies, rtol=1e-15
    )


def test_viscous_steady_local_slope_formula():
    # local log-slope between shells n-1 and n is -5/3 - ln(1 + r_n)/ln(lam), r_n = tau_n nu k_n^2
    p = params(lam=2.0, n_shells=25, nu=1e-6)
    scales = sm.shell_scales(p)
    spec = sm.spectrum_from_shells(sm.steady_viscous_energies(p, 1.0), scales)
    local = np.diff(np.log(spec.E)) / np.diff(np.log(spec.k))
    r = sm.timescale_ratio(p, np.arange(1, 25))
    np.testing.assert_allclose(local, -5 / 3 - np.log1p(r) / math.log(2.0), rtol=1e-10)
    assert local[-1] < -3.0 - 5.0


@settings(max_examples=30, deadline=None)
@given(lam=st.floats(1.1, 4.0), nu=st.floats(0.0, 1e-2), e0=st.floats(0.0, 10.0))
def test_viscous_steady_always_balances(lam, nu, e0):
    p = sm.CascadeParams(lam=lam, nu=nu, n_shells=15)
    s = sm.steady_viscous_energies(p, e0)
    r = sm.steady_viscous_residual(s, p)
    assert np.all(s.energies >= 0)
    assert np.max(np.abs(r)) <= 1e-12 * max(e0, 1.0) * np.max(1 / sm.shell_scales(p).tau)


@settings(max_examples=25, deadline=None)
@given(E0=st.lists(st.floats(0.0, 5.0), min_size=6, max_size=6), nu=st.floats(0.0, 1e-2))
def test_integration_keeps_energies_nonnegative_and_nonincreasing(E0, nu):
    p = sm.CascadeParams(lam=2.0, nu=nu, n_shells=6)
    init = sm.ShellState(0.0, np.array(E0))
    traj = sm.integrate(init, p, "viscous", dt=sm.max_stable_dt(p), t_end=1.0)
    assert np.all(traj.states >= 0)
    totals = traj.states.sum(axis=1)
    assert np.all(np.diff(totals) <= 1e-12 * max(totals[0], 1e-300))


def test_determinism():
    p = params(lam=2.0, n_shells=8, nu=1e-3)
    E0 = np.linspace(1, 0, 8)
    a = sm.integrate(sm.ShellState(0.0, E0), p, "viscous", dt=1e-3, t_end=0.5)
    b = sm.integrate(sm.ShellState(0.0, E0), p, "viscous", dt=1e-3, t_end=0.5)
    assert a.states.tobytes() == b.states.tobytes()
