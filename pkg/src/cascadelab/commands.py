"""Subcommand bodies: validated parameters in, tables + derived values + claims out.

Every command builds its model objects (which validate) before doing any
numerical work, and returns all tables at once so nothing is written for a
run that fails part-way.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from cascadelab import burgers as bg
from cascadelab import closure_spectral as cs
from cascadelab import keps
from cascadelab import shell_model as sm
from cascadelab import tao
from cascadelab.errors import ConfigError
from cascadelab.report import claim
from cascadelab.spectrum import SpectrumSeries, fit_loglog_slope


@dataclass
class Param:
    name: str
    type: type
    default: object = None
    help: str = ""
    choices: tuple | None = None
    required: bool = False


@dataclass
class Table:
    columns: list
    rows: list


@dataclass
class RunResult:
    tables: dict = field(default_factory=dict)
    derived: dict = field(default_factory=dict)
    claims: list = field(default_factory=list)
    extra_files: dict = field(default_factory=dict)  # name -> JSON-serialisable document


def _cascade_params(cfg, initial=None) -> sm.CascadeParams:
    return sm.CascadeParams(
        lam=cfg["lambda"],
        tau0=cfg.get("tau0", 1.0),
        ell0=cfg.get("ell0", 1.0),
        nu=cfg.get("nu", 0.0),
        n_shells=cfg["shells"],
        initial_energies=() if initial is None else tuple(initial),
        boundary=cfg.get("boundary", "closed"),
        forcing_flux=cfg.get("forcing_flux", 0.0),
    )


def _initial_energies(kind, n, e0, lam):
    if e0 < 0:
        raise ConfigError("e0 must be non-negative")
    if kind == "delta":
        E = np.zeros(n)
        E[0] = e0
    elif kind == "steady":
        E = e0 * lam ** (-2.0 / 3.0 * np.arange(n))
    elif kind == "uniform":
        E = np.full(n, float(e0))
    else:
        raise ConfigError(f"unknown initial profile {kind!r}")
    return E


def _shell_derived(p: sm.CascadeParams) -> dict:
    d = {"alpha": p.alpha, "beta": p.beta, "nu0": p.nu0, "max_stable_dt": sm.max_stable_dt(p)}
    if p.nu > 0 and p.nu0 * p.tau0 < 1:
        d["dissipation_shell_n_star"] = sm.dissipation_shell_index(p)
        d["n_star_normalization"] = "nu0 = nu/ell0^2 used in place of nu"
    return d


def _auto_dt(p, dt):
    return sm.max_stable_dt(p) if dt is None else dt


# -- shell model ---------------------------------------------------------------

def shell_steady(cfg) -> RunResult:
    p = _cascade_params(cfg)
    e0 = cfg["e0"]
    steady = sm.steady_state_energies(p, e0)
    scales = sm.shell_scales(p)
    spec = sm.spectrum_from_shells(steady, scales)
    flux = sm.energy_flux(steady, scales)
    columns = ["n", "ell", "k", "tau", "E", "Pi", "E_of_k", "local_slope"]
    cols = [np.arange(p.n_shells), scales.ell, scales.k, scales.tau, steady.energies, flux, spec.E, _local_slope(spec)]
    res = RunResult(derived=_shell_derived(p))

    if p.n_shells >= 3 and e0 > 0:
        fit = fit_loglog_slope(spec)
        dev = float(np.max(np.abs(flux - flux[0])) / flux[0])
        res.derived.update(k41_slope=fit.slope, k41_fit_residual=fit.residual, flux_max_rel_deviation=dev)
        res.claims += [claim("k41_shell_slope", fit.slope), claim("shell_flux_constancy", dev)]

    if p.nu > 0:
        visc = sm.steady_viscous_energies(p, e0)
        vspec = sm.spectrum_from_shells(visc, scales)
        resid = sm.steady_viscous_residual(visc, p)
        columns += ["E_viscous", "Pi_viscous", "E_of_k_viscous", "balance_residual"]
        cols += [visc.energies, sm.energy_flux(visc, scales), vspec.E, np.concatenate([[0.0], resid])]
        res.derived["viscous_balance_max_residual"] = float(np.max(np.abs(resid))) if resid.size else 0.0
        band = vspec.band(scales.k[-1] / 10.0, None)
        if len(band) >= 3 and np.all(band.E > 0):
            fit = fit_loglog_slope(band)
            res.derived["dissipation_range_slope"] = fit.slope
            res.claims.append(claim("shell_dissipation_range_slope", fit.slope))

    res.tables["shell_steady"] = Table(columns, _rows(cols))
    return res


def shell_sim(cfg) -> RunResult:
    lam, n = cfg["lambda"], cfg["shells"]
    E0 = _initial_energies(cfg["initial"], n, cfg["e0"], lam)
    p = _cascade_params(cfg, E0)
    dt = _auto_dt(p, cfg.get("dt"))
    traj = sm.integrate(p.initial_state(), p, cfg["rhs"], dt, cfg["t_end"], stride=cfg["stride"])
    scales = sm.shell_scales(p)
    visc = sm.viscous_rates(p) if cfg["rhs"] == "viscous" else np.zeros(n)
    inflow = p.forcing_flux if p.boundary == "forced" else 0.0
    columns = ["time"] + [f"E_{i}" for i in range(n)] + ["total", "inflow", "exit_flux", "dissipation"]
    rows = []
    for t, E in zip(traj.times, traj.states):
        rows.append([t, *E, E.sum(), inflow, E[-1] / scales.tau[-1], float(np.sum(visc * E))])
    res = RunResult(derived=_shell_derived(p))
    res.derived.update(dt=dt, steps=int(round((cfg["t_end"]) / dt)), final_total=float(traj.final.sum()))
    res.tables["shell_sim"] = Table(columns, rows)
    return res


def shell_analytic(cfg) -> RunResult:
    lam, n = cfg["lambda"], cfg["shells"]
    E0 = _initial_energies(cfg["initial"], n, cfg["e0"], lam)
    p = _cascade_params(dict(cfg, nu=0.0), E0)
    dt = _auto_dt(p, cfg.get("dt"))
    samples = cfg["samples"]
    if samples < 2:
        raise ConfigError("samples must be >= 2")
    interval = cfg["t_end"] / (samples - 1)
    stride = max(1, int(round(interval / dt)))
    initial = p.initial_state()
    traj = sm.integrate(initial, p, "inviscid", dt, cfg["t_end"], stride=stride)

    closed = np.array([sm.analytic_inviscid_solution(initial, p, t).energies for t in traj.times])
    exact = np.array([sm.exact_inviscid_solution(initial, p, t).energies for t in traj.times])
    rows = []
    for i, t in enumerate(traj.times):
        for m in range(n):
            rows.append([t, m, closed[i, m], exact[i, m], traj.states[i, m]])

    def per_shell_error(a, b):
        peak = np.max(np.abs(b), axis=0)
        err = np.max(np.abs(a - b), axis=0)
        return float(np.max(np.where(peak > 0, err / np.where(peak > 0, peak, 1), 0)))

    res = RunResult(derived=_shell_derived(p))
    res.derived.update(
        dt=dt,
        rk4_vs_exact_max_rel_error=per_shell_error(traj.states, exact),
        rk4_vs_closed_form_max_rel_error=per_shell_error(traj.states, closed),
        closed_form_vs_exact_max_rel_error=per_shell_error(closed, exact),
    )
    res.claims.append(claim("shell_closed_form", res.derived["closed_form_vs_exact_max_rel_error"]))
    res.tables["shell_analytic"] = Table(["time", "n", "E_closed_form", "E_exact", "E_rk4"], rows)
    return res


def shell_criteria(cfg) -> RunResult:
    p = _cascade_params(cfg)
    if p.nu == 0:
        raise ConfigError("shell-criteria needs nu > 0 (local Reynolds number undefined)")
    n = np.arange(p.n_shells)
    scales = sm.shell_scales(p)
    Re = sm.local_reynolds(p, n)
    ratio = sm.timescale_ratio(p, n)
    growth = p.lam ** (4.0 * n / 3.0)
    cols = [n, scales.k, scales.tau, Re, ratio, Re * growth, ratio / growth]
    res = RunResult(derived=_shell_derived(p))
    res.tables["shell_criteria"] = Table(
        ["n", "k", "tau", "Re", "timescale_ratio", "Re_times_lam_4n3", "ratio_over_lam_4n3"], _rows(cols)
    )
    if "dissipation_shell_n_star" in res.derived:
        n_star = res.derived["dissipation_shell_n_star"]
        nearest = int(round(n_star))
        re_near = float(sm.local_reynolds(p, nearest))
        offset = 0.75 * abs(math.log(re_near)) / math.log(p.lam)
        res.derived.update(nearest_shell=nearest, Re_at_nearest_shell=re_near)
        res.claims.append(claim("dissipation_shell_offset", offset))
    if p.n_shells > 1:
        res.claims.append(claim("timescale_ratio_limit", float(ratio[-1] / ratio[0])))
    return res


# -- Burgers ---------------------------------------------------------------------

def burgers(cfg) -> RunResult:
    ic_params = {}
    for key in ("amplitude", "mode", "center", "width", "value"):
        if cfg.get(key) is not None:
            ic_params[key] = cfg[key]
    if cfg["ic"] == "file":
        if not cfg.get("ic_file"):
            raise ConfigError("--ic file requires --ic-file")
        ic_params["path"] = cfg["ic_file"]
    base = dict(
        domain_length=cfg["length"],
        grid_points=cfg["grid"],
        nu=cfg["nu"],
        t_end=cfg["t_end"],
        initial_condition=cfg["ic"],
        ic_params=ic_params,
        x_start=cfg["x_start"],
        noise=cfg["noise"],
        seed=cfg["seed"],
    )
    dt = cfg.get("dt")
    if dt is None:
        probe = bg.BurgersConfig(**base, dt=1e-300)
        dt = probe.stable_dt(probe.initial_field())
    config = bg.BurgersConfig(**base, dt=dt)
    run = bg.run_with_history(config, stride=cfg["stride"], keep_snapshots=cfg["snapshots"])

    res = RunResult()
    res.tables["burgers_history"] = Table(
        list(bg.DIAGNOSTIC_FIELDS), [[getattr(d, f) for f in bg.DIAGNOSTIC_FIELDS] for d in run.history]
    )
    if cfg["snapshots"]:
        x = config.x
        res.tables["burgers_snapshots"] = Table(
            ["time", "x", "u"], [[s.time, xi, ui] for s in run.snapshots for xi, ui in zip(x, s.u)]
        )
    res.derived.update(
        dx=config.dx,
        dt=config.dt,
        min_grad=run.min_grad,
        min_grad_time=run.min_grad_time,
        grad_norm_peak_time=run.grad_norm_peak_time,
        max_kinetic_energy_increase=float(np.max(np.diff(run.kinetic_energy_steps), initial=0.0)),
    )
    g0 = run.history[0].grad_norm
    if g0 > 0:
        res.claims.append(claim("burgers_gradient_vanishes", max(d.grad_norm for d in run.history) / g0))
    last = run.history[-1]
    if len(run.history) > 1 and last.transport_residual_corrected_L2 > 0:
        res.claims.append(
            claim("burgers_transport_identity", last.transport_residual_L2 / last.transport_residual_corrected_L2)
        )
    return res


# -- amplitude cascade -------------------------------------------------------------

def _tao_setup(cfg):
    lam, n = cfg["lambda"], cfg["shells"]
    E0 = _initial_energies(cfg["initial"], n, cfg["e0"], lam)
    p = _cascade_params(cfg, E0)
    tp = tao.tao_params_from_shell(p, x_scale=cfg["x_scale"])
    if cfg.get("coeffs"):
        C = [float(c) for c in str(cfg["coeffs"]).split(",")]
        if len(C) != n:
            raise ConfigError(f"{len(C)} coefficients given for {n} modes")
        tp = tao.TaoParams(np.array(C), tp.nu, tp.k, tp.initial_amplitudes)
    return p, tp, _auto_dt(p, cfg.get("dt"))


def tao_run(cfg) -> RunResult:
    p, tp, dt = _tao_setup(cfg)
    traj = tao.integrate_tao(tao.TaoState(0.0, tp.initial_amplitudes), tp, dt, cfg["t_end"], stride=cfg["stride"])
    res = RunResult(derived={"dt": dt, "coefficients": tp.coefficients.tolist()})
    res.tables["tao"] = Table(
        ["time"] + [f"X_{i}" for i in range(tp.n_modes)], [[t, *X] for t, X in zip(traj.times, traj.states)]
    )
    return res


def tao_compare(cfg) -> RunResult:
    p, tp, dt = _tao_setup(cfg)
    kind = "viscous" if p.nu > 0 else "inviscid"
    shell = sm.integrate(p.initial_state(), p, kind, dt, cfg["t_end"], stride=cfg["stride"])
    amp = tao.integrate_tao(tao.TaoState(0.0, tp.initial_amplitudes), tp, dt, cfg["t_end"], stride=cfg["stride"])
    rep = tao.energy_correspondence(amp, shell, tp, p, x_scale=cfg["x_scale"])

    rows = []
    for i, t in enumerate(rep["times"]):
        for m in range(p.n_shells):
            rows.append([t, m, rep["energy_tao"][i, m], rep["energy_shell"][i, m], rep["relative_difference"][i, m]])
    rate_cols = [
        np.arange(p.n_shells),
        rep["initial_inflow_tao"],
        rep["initial_inflow_shell"],
        rep["initial_rate_tao"],
        rep["initial_rate_shell"],
        rep["decay_rate_energy_tao"],
        rep["decay_rate_energy_shell"],
    ]
    res = RunResult(derived={"dt": dt, "shell_rhs": kind, "max_relative_difference": rep["max_relative_difference"]})
    res.tables["tao_compare"] = Table(["time", "n", "E_tao", "E_shell", "rel_diff"], rows)
    res.tables["tao_initial_rates"] = Table(
        ["n", "inflow_tao", "inflow_shell", "rate_tao", "rate_shell", "decay_energy_tao", "decay_energy_shell"],
        _rows(rate_cols),
    )
    res.claims.append(claim("tao_inflow_identification", float(np.max(rep["initial_inflow_abs_difference"]))))
    if p.nu > 0:
        visc = rep["decay_rate_energy_shell"]
        factor = float(np.max(rep["decay_rate_energy_tao"][visc > 0] / visc[visc > 0]))
        res.claims.append(claim("tao_decay_identification", factor))
    return res


# -- closure spectrum ----------------------------------------------------------------

def closure_spectrum(cfg) -> RunResult:
    params = cs.ClosureParams(nu=cfg["nu"], epsilon=cfg["epsilon"], C0=cfg["c0"], hausdorff_dim=cfg["dim_h"])
    if cfg["grid"] < 8:
        raise ConfigError("grid must be >= 8")
    if cfg["band_factor"] < 4:
        raise ConfigError("band_factor must be >= 4")
    kc = cs.crossover_wavenumber(params) if params.nu > 0 else None
    if cfg["sampling"] == "fft":
        forcing = cs.band_forcing(cfg["grid"], cfg["length"])
    else:
        if kc is None:
            raise ConfigError("log sampling is centred on the crossover and needs nu > 0")
        span = 10.0 ** cfg["decades"]
        k = np.geomspace(kc / span, kc * span, cfg["grid"])
        forcing = cs.FourierField1D(k, np.ones_like(k))
    sol = cs.steady_spectral_solution(forcing, params)
    raw = cs.energy_spectrum_raw(sol)
    corrected = cs.hausdorff_corrected_spectrum(raw, params, cfg.get("correction_exponent"))

    res = RunResult(derived={"cascade_coefficient": params.cascade_coefficient, "crossover_k": kc})
    pos = sol.k > 0
    order = np.argsort(sol.k[pos])
    kk = sol.k[pos][order]
    cols = [
        kk,
        np.abs(sol.coeffs[pos][order]),
        raw.E,
        corrected.E,
        params.nu * kk**2,
        params.cascade_coefficient * kk ** (2.0 / 3.0),
    ]
    res.tables["closure_spectrum"] = Table(["k", "abs_U", "E_raw", "E_corrected", "viscous_term", "cascade_term"], _rows(cols))

    bf = cfg["band_factor"]
    forced = raw.band(None, None)
    kmax_forced = float(forced.k[forced.E > 0].max()) if np.any(forced.E > 0) else 0.0
    inertial_hi = kmax_forced if kc is None else min(kmax_forced, kc / bf)
    if _band_ok(raw, None, inertial_hi):
        res.derived["inertial_slope_raw"] = fit_loglog_slope(raw, None, inertial_hi).slope
        s = fit_loglog_slope(corrected, None, inertial_hi).slope
        res.derived["inertial_slope_corrected"] = s
        res.claims.append(claim("closure_inertial_slope", s))
    if kc is not None and _band_ok(raw, kc * bf, kmax_forced):
        s_raw = fit_loglog_slope(raw, kc * bf, kmax_forced).slope
        s_cor = fit_loglog_slope(corrected, kc * bf, kmax_forced).slope
        res.derived.update(dissipation_slope_raw=s_raw, dissipation_slope_corrected=s_cor, dissipation_slope_shell_balance=-3.0)
        res.claims += [
            claim("closure_dissipation_slope_raw", s_raw),
            claim("closure_dissipation_slope_corrected", s_cor),
        ]
    res.claims.append(claim("closure_eps_prefactor", cs.inertial_prefactor_exponent(params)))
    res.claims.append(claim("hausdorff_dimension", cs.hausdorff_from_exponent(5.0 / 3.0)))
    return res


def _band_ok(series, lo, hi):
    sub = series.band(lo, hi)
    return len(sub) >= 3 and bool(np.all(sub.E > 0))


def transient(cfg) -> RunResult:
    params = cs.ClosureParams(nu=0.0, epsilon=cfg["epsilon"], C0=cfg["c0"])
    t_star = cfg["t_star"]
    if not t_star > 0:
        raise ConfigError("t_star must be positive")
    if cfg["samples"] < 2:
        raise ConfigError("samples must be >= 2")
    ts = np.linspace(0.0, t_star, cfg["samples"])
    fac = np.array([cs.transient_solution(cfg["u0"], params, t_star, t) for t in ts])
    res = RunResult(derived={"singularity_cascade_constant": params.cascade_coefficient})
    res.tables["transient"] = Table(["t", "factor", "U"], _rows([ts, fac, cfg["u0"] * fac]))
    res.claims.append(claim("transient_decay", float(fac[-1] - fac[0])))
    return res


# -- k-epsilon ------------------------------------------------------------------------

def keps_constants(cfg) -> RunResult:
    inputs = keps.GeometryInputs(hausdorff_dim=cfg["dim_h"], lam=cfg["lambda"], C0=cfg["c0"], C_K=cfg["ck"])
    c = keps.constants_from_geometry(inputs)
    rows = [[r.name, r.formula_value, r.boxed_value, r.abs_discrepancy, r.note] for r in c.rows()]
    res = RunResult(
        derived={
            "C_K": inputs.C_K,
            "C_K_for_boxed_C_mu": c.C_K_for_boxed_C_mu,
            "C_2eps_chained": c.C_2eps_chained,
            "sigma_eps_from_final_sigma_k": c.sigma_eps_from_final_sigma_k,
            "closure_constants": {r.name: r.formula_value for r in c.rows()},
        }
    )
    res.tables["keps_constants"] = Table(["name", "formula", "boxed", "abs_delta", "note"], rows)
    res.claims += [claim(r.name, r.formula_value) for r in c.rows()]
    return res


def keps_decay(cfg) -> RunResult:
    init = keps.KEpsState(0.0, cfg["k0"], cfg["eps0"])
    run = keps.decaying_turbulence(init, cfg["c2eps"], cfg["dt"], cfg["t_end"], stride=cfg["stride"])
    cols = [run.times, run.k, run.eps, run.k_exact, run.eps_exact, run.k / run.eps]
    res = RunResult(
        derived={
            "k_max_rel_error": float(np.max(np.abs(run.k / run.k_exact - 1))),
            "eps_max_rel_error": float(np.max(np.abs(run.eps / run.eps_exact - 1))),
            "expected_decay_exponent": run.decay_exponent,
            "timescale_growth_rate": float(np.polyfit(run.times, run.k / run.eps, 1)[0]),
        }
    )
    res.tables["keps_decay"] = Table(["time", "k", "eps", "k_exact", "eps_exact", "k_over_eps"], _rows(cols))
    # virtual origin t0 = k0 / ((C_2eps - 1) eps0) makes k a pure power of (t + t0)
    t0 = init.k / ((cfg["c2eps"] - 1.0) * init.eps)
    ok = run.k > 0
    slope = float(np.polyfit(np.log(run.times[ok] + t0), np.log(run.k[ok]), 1)[0])
    res.derived.update(virtual_origin=t0, fitted_decay_exponent=slope)
    res.claims.append(claim("keps_decay_exponent", slope, reference=run.decay_exponent))
    return res


# -- spectrum file utilities --------------------------------------------------------

def read_spectrum_csv(path, k_column="k", e_column="E") -> SpectrumSeries:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ConfigError(f"{path} is empty")
        ki = header.index(k_column) if k_column in header else 0
        ei = header.index(e_column) if e_column in header else 1
        k, E = [], []
        for row in reader:
            if row:
                k.append(float(row[ki]))
                E.append(float(row[ei]))
    return SpectrumSeries(np.array(k), np.array(E), f"file:{Path(path).name}")


def spectrum_integrals(cfg) -> RunResult:
    series = read_spectrum_csv(cfg["input"], cfg["k_column"], cfg["e_column"])
    out = keps.spectrum_integrals(series, cfg["nu"], cfg.get("kmin"), cfg.get("kmax"))
    res = RunResult(derived=dict(out))
    res.tables["spectrum_integrals"] = Table(["k_total", "eps_total"], [[out["k_total"], out["eps_total"]]])
    return res


def fit_slope(cfg) -> RunResult:
    series = read_spectrum_csv(cfg["input"], cfg["k_column"], cfg["e_column"])
    fit = fit_loglog_slope(series, cfg.get("kmin"), cfg.get("kmax"))
    res = RunResult(derived={"slope": fit.slope})
    res.tables["fit_slope"] = Table(
        ["slope", "intercept", "residual", "n_samples"], [[fit.slope, fit.intercept, fit.residual, fit.n_samples]]
    )
    return res


def _local_slope(series):
    if len(series) < 2 or np.any(series.E <= 0):
        return np.full(len(series), np.nan)
    return np.gradient(np.log(series.E), np.log(series.k))


def _rows(columns):
    return [list(r) for r in zip(*columns)]


# -- registry -----------------------------------------------------------------------

F, I, S, B = float, int, str, bool

_SHELL = [
    Param("lambda", F, 2.0, "shell scale ratio (> 1)"),
    Param("tau0", F, 1.0, "cascade time of shell 0"),
    Param("ell0", F, 1.0, "length of shell 0"),
]
_DYN = [
    Param("dt", F, None, "time step (default: 0.1 * min tau_n)"),
    Param("t_end", F, 5.0, "final time"),
    Param("initial", S, "delta", "initial energies", ("delta", "steady", "uniform")),
    Param("e0", F, 1.0, "energy scale of the initial profile"),
]

COMMANDS = {
    "shell-steady": (shell_steady, "steady K41 shell energies, flux and spectrum", _SHELL + [
        Param("shells", I, 25, "number of shells"),
        Param("e0", F, 1.0, "energy of shell 0"),
        Param("nu", F, 0.0, "viscosity; > 0 adds the viscous fixed point"),
    ]),
    "shell-sim": (shell_sim, "integrate the shell cascade", _SHELL + _DYN + [
        Param("shells", I, 12, "number of shells"),
        Param("nu", F, 0.0, "viscosity"),
        Param("rhs", S, "inviscid", "cascade form", ("inviscid", "viscous")),
        Param("boundary", S, "closed", "shell-0 inflow policy", ("closed", "forced")),
        Param("forcing_flux", F, 0.0, "inflow into shell 0 for the forced policy"),
        Param("stride", I, 10, "record every N steps"),
    ]),
    "shell-analytic": (shell_analytic, "closed-form vs exact vs RK4 inviscid cascade", _SHELL + _DYN + [
        Param("shells", I, 12, "number of shells"),
        Param("samples", I, 11, "number of output times"),
    ]),
    "shell-criteria": (shell_criteria, "local Reynolds numbers, dissipation shell, timescale ratios", _SHELL + [
        Param("shells", I, 25, "number of shells"),
        Param("nu", F, 1e-6, "viscosity"),
    ]),
    "burgers": (burgers, "periodic viscous Burgers run with energy diagnostics", [
        Param("grid", I, 256, "grid points (power of two >= 16)"),
        Param("length", F, 2 * math.pi, "domain length"),
        Param("x_start", F, 0.0, "left end of the domain"),
        Param("nu", F, 0.01, "viscosity"),
        Param("dt", F, None, "time step (default: the stability bound)"),
        Param("t_end", F, 1.0, "final time"),
        Param("ic", S, "sin", "initial profile", bg.PROFILES),
        Param("ic_file", S, None, "initial samples, one per line (with --ic file)"),
        Param("amplitude", F, None, "profile amplitude"),
        Param("mode", I, None, "sin wavenumber index"),
        Param("center", F, None, "bump centre"),
        Param("width", F, None, "bump half-width"),
        Param("value", F, None, "constant profile value"),
        Param("noise", F, 0.0, "amplitude of seeded smooth noise added to the profile"),
        Param("seed", I, 0, "seed for --noise"),
        Param("stride", I, 10, "record every N steps"),
        Param("snapshots", B, False, "also write velocity snapshots"),
    ]),
    "tao": (tao_run, "integrate the amplitude cascade", _SHELL + _DYN + [
        Param("shells", I, 8, "number of modes"),
        Param("nu", F, 0.0, "viscosity"),
        Param("x_scale", F, 1.0, "energy per squared amplitude"),
        Param("coeffs", S, None, "comma-separated C_n overriding the matched schedule"),
        Param("stride", I, 10, "record every N steps"),
    ]),
    "tao-compare": (tao_compare, "amplitude cascade vs shell model under E = X^2", _SHELL + _DYN + [
        Param("shells", I, 8, "number of modes"),
        Param("nu", F, 1e-3, "viscosity"),
        Param("x_scale", F, 1.0, "energy per squared amplitude"),
        Param("coeffs", S, None, "comma-separated C_n overriding the matched schedule"),
        Param("stride", I, 10, "record every N steps"),
    ]),
    "closure-spectrum": (closure_spectrum, "steady fractional-closure spectrum, raw and dimension-corrected", [
        Param("nu", F, 1e-3, "viscosity"),
        Param("epsilon", F, 1.0, "mean dissipation rate"),
        Param("c0", F, 0.12, "cascade constant C0"),
        Param("dim_h", F, 7.0 / 3.0, "singular-set dimension"),
        Param("correction_exponent", F, None, "dimension-correction exponent (default dim_h)"),
        Param("sampling", S, "log", "radial log grid around k_c, or FFT grid", ("log", "fft")),
        Param("grid", I, 4096, "number of wavenumbers"),
        Param("length", F, 2 * math.pi, "domain length (fft sampling)"),
        Param("decades", F, 4.0, "log grid half-width in decades (log sampling)"),
        Param("band_factor", F, 100.0, "fit bands start this factor inside k_c"),
    ]),
    "transient": (transient, "near-critical-time transient factor", [
        Param("c0", F, 0.12, "cascade constant C0"),
        Param("epsilon", F, 1.0, "mean dissipation rate"),
        Param("t_star", F, 1.0, "critical time"),
        Param("u0", F, 1.0, "amplitude of U0"),
        Param("samples", I, 101, "number of output times"),
    ]),
    "keps-constants": (keps_constants, "geometric k-epsilon constants vs boxed values", [
        Param("lambda", F, math.e, "cascade ratio"),
        Param("ck", F, 1.5, "Kolmogorov prefactor constant C_K"),
        Param("c0", F, 0.12, "cascade constant C0"),
        Param("dim_h", F, 7.0 / 3.0, "singular-set dimension"),
    ]),
    "keps-decay": (keps_decay, "0D decaying k-epsilon run vs closed form", [
        Param("k0", F, 1.0, "initial k"),
        Param("eps0", F, 1.0, "initial eps"),
        Param("c2eps", F, 1.92, "C_2eps"),
        Param("dt", F, 1e-3, "time step"),
        Param("t_end", F, 10.0, "final time"),
        Param("stride", I, 100, "record every N steps"),
    ]),
    "spectrum-integrals": (spectrum_integrals, "trapezoid k and eps integrals of a spectrum CSV", [
        Param("input", S, None, "CSV with k and E columns", required=True),
        Param("nu", F, 0.0, "viscosity"),
        Param("kmin", F, None, "lower band edge"),
        Param("kmax", F, None, "upper band edge"),
        Param("k_column", S, "k", "wavenumber column"),
        Param("e_column", S, "E", "spectrum column"),
    ]),
    "fit-slope": (fit_slope, "log-log least-squares slope of a spectrum CSV", [
        Param("input", S, None, "CSV with k and E columns", required=True),
        Param("kmin", F, None, "lower band edge"),
        Param("kmax", F, None, "upper band edge"),
        Param("k_column", S, "k", "wavenumber column"),
        Param("e_column", S, "E", "spectrum column"),
    ]),
}
