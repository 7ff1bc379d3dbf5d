//! Subcommand bodies. Each returns a JSON report, optional CSV payload and
//! an overall pass flag.

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use super::config::RunConfig;
use super::output::Csv;
use crate::angular::{
    mode_battery, orthonormality_defect, sector_residual, verify_mode_against, AngularIndex, AngularMode,
};
use crate::dunkl_ops::{check_heisenberg, check_j_squared, check_t_algebra, DunklParams, ParitySector};
use crate::ermakov::{invariant_drift, solve_span, ErmakovTrajectory, Family};
use crate::error::{Error, Result};
use crate::oracle::{compare_angular_spectrum, flux_shift_report, RadialGrid};
use crate::radial::{
    matching_report, ode_residual, sector_identity_check, spectrum_row, RadialMode, Region, DEFAULT_R_REG,
};
use crate::scalar::Sign;
use crate::solution::{NormQuadrature, Solution};

pub const HEISENBERG_TOL: f64 = 1e-13;
pub const J_SQUARED_TOL: f64 = 1e-7;
pub const MODE_TOL: f64 = 1e-6;
pub const GRAM_TOL: f64 = 1e-6;
pub const ODE_TOL: f64 = 1e-9;
pub const SECTOR_IDENTITY_TOL: f64 = 1e-14;
pub const MATCHING_MIN_ORDER: f64 = 0.9;
pub const RADIAL_ORACLE_TOL: f64 = 1e-4;
pub const FLUX_SHIFT_TOL: f64 = 1e-3;
pub const ANGULAR_ORACLE_TOL: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

pub struct CommandOutput {
    pub report: Value,
    pub csv: Option<String>,
    pub pass: bool,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report serializes")
}

/// Every mode of the sector with l ≤ `l_max`.
fn modes_up_to(sector: ParitySector, params: DunklParams<f64>, l_max: f64) -> Result<Vec<AngularMode<f64>>> {
    let mut count = 1;
    loop {
        let modes = mode_battery(sector, params, count)?;
        if modes.last().expect("nonempty").l.value::<f64>() > l_max {
            return mode_battery(sector, params, count - 1);
        }
        count += 1;
    }
}

pub fn spectrum(cfg: &RunConfig, format: Format) -> Result<CommandOutput> {
    let params = cfg.dunkl_params()?;
    let sector = cfg.parity_sector();
    let flux = cfg.flux_spin();
    let mut rows = Vec::new();
    let mut excluded = Vec::new();
    let mut twice = AngularIndex::lowest(sector.eps()).twice();
    while (twice as f64) / 2.0 <= cfg.spectrum.l_max {
        let l = AngularIndex::from_twice(twice);
        for sign in [Sign::Plus, Sign::Minus] {
            let mode = AngularMode::new(sector, l, sign, params)?;
            if mode.is_constant() && sign == Sign::Minus {
                continue;
            }
            for n in 0..=cfg.spectrum.n_max {
                match spectrum_row(n, mode.lambda, &flux, &params, sector) {
                    Ok(r) => rows.push(json!({
                        "n": n, "l": l.value::<f64>(), "sign": sign.as_i32(), "m_s": flux.m_s.as_i32(),
                        "vartheta": flux.vartheta, "lambda": mode.lambda,
                        "k_minus": r.k_minus, "k_plus": r.k_plus, "e_minus": r.e_minus, "e_plus": r.e_plus,
                    })),
                    Err(e @ (Error::Branch(_) | Error::Normalizability(_))) => {
                        excluded.push(json!({"n": n, "l": l.value::<f64>(), "sign": sign.as_i32(), "reason": e.to_string()}));
                    }
                    Err(e) => return Err(e),
                }
            }
        }
        twice += 2;
    }
    let csv = (format == Format::Csv).then(|| {
        let mut c = Csv::new(&["n", "l", "sign", "m_s", "vartheta", "lambda", "k_minus", "k_plus", "e_minus", "e_plus"]);
        for r in &rows {
            let f = |k: &str| r[k].as_f64().unwrap_or(f64::NAN);
            c.row(&[
                f("n"), f("l"), f("sign"), f("m_s"), f("vartheta"), f("lambda"), f("k_minus"), f("k_plus"),
                f("e_minus"), f("e_plus"),
            ]);
        }
        c.into_string()
    });
    let report = json!({
        "nu1": params.nu1, "nu2": params.nu2, "eps1": sector.eps1.as_i32(), "eps2": sector.eps2.as_i32(),
        "rows": rows, "excluded": excluded,
    });
    Ok(CommandOutput { report, csv, pass: true })
}

pub fn angular(cfg: &RunConfig, format: Format) -> Result<CommandOutput> {
    let params = cfg.dunkl_params()?;
    let sector = cfg.parity_sector();
    let modes = modes_up_to(sector, params, cfg.spectrum.l_max)?;
    let n = cfg.grids.mode_n;
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for m in &modes {
        let res = verify_mode_against(m, n, m.lambda + cfg.fault_injection.lambda_offset)?;
        let sr = sector_residual(m, n)?;
        worst = worst.max(res.residual);
        rows.push((m.l.value::<f64>(), m.sign.as_i32(), m.lambda, res.residual, sr));
    }
    let per_quadrant = modes.iter().map(|m| m.l.twice() as usize).max().unwrap_or(0) + 8;
    let gram = orthonormality_defect(&modes, per_quadrant)?;
    let pass = worst <= MODE_TOL && gram <= GRAM_TOL;
    let csv = (format == Format::Csv).then(|| {
        let mut c = Csv::new(&["eps", "l", "sign", "lambda", "residual", "sector_residual"]);
        for r in &rows {
            c.row(&[sector.eps().as_i32() as f64, r.0, r.1 as f64, r.2, r.3, r.4]);
        }
        c.into_string()
    });
    let report = json!({
        "nu1": params.nu1, "nu2": params.nu2, "eps": sector.eps().as_i32(), "grid_n": n,
        "modes": rows.iter().map(|r| json!({"l": r.0, "sign": r.1, "lambda": r.2, "residual": r.3, "sector_residual": r.4})).collect::<Vec<_>>(),
        "max_residual": worst, "residual_threshold": MODE_TOL,
        "orthonormality_defect": gram, "orthonormality_threshold": GRAM_TOL,
    });
    Ok(CommandOutput { report, csv, pass })
}

fn trajectory(cfg: &RunConfig, t_end: f64) -> Result<ErmakovTrajectory> {
    let profiles = cfg.time_profiles()?;
    let (rho0, v0) = match (cfg.ermakov.rho0, cfg.ermakov.rho_dot0) {
        (Some(r), Some(v)) => (r, v),
        (r, v) => {
            let (sr, sv) = profiles.equilibrium_seed(0.0)?;
            (r.unwrap_or(sr), v.unwrap_or(sv))
        }
    };
    solve_span(&profiles, 0.0, rho0, v0, t_end, cfg.ermakov.tol, cfg.ermakov.dt_out)
}

fn trajectory_meta(traj: &ErmakovTrajectory) -> Value {
    json!({
        "profile": to_value(&traj.profiles),
        "family": to_value(&traj.profiles.family()),
        "t_start": traj.t_start(), "t_end": traj.t_end(), "samples": traj.len(),
        "rho0": traj.rho[0], "rho_dot0": traj.rho_dot[0],
        "tol": traj.stats.tol, "steps_accepted": traj.stats.accepted, "steps_rejected": traj.stats.rejected,
        "min_rho": traj.min_rho(),
        "max_rho": traj.rho.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    })
}

pub fn ermakov(cfg: &RunConfig, format: Format) -> Result<CommandOutput> {
    let traj = trajectory(cfg, cfg.ermakov.t_end)?;
    let mut meta = trajectory_meta(&traj);
    meta["dt_out"] = json!(cfg.ermakov.dt_out);
    meta["invariant_drift"] = match traj.profiles.family() {
        Family::Constant => json!(invariant_drift(&traj)?),
        _ => Value::Null,
    };
    let csv = match format {
        Format::Csv => Some(traj.to_csv()),
        Format::Json => {
            meta["times"] = json!(traj.times);
            meta["rho"] = json!(traj.rho);
            meta["rho_dot"] = json!(traj.rho_dot);
            None
        }
    };
    Ok(CommandOutput { report: meta, csv, pass: true })
}

pub fn wavefunction(cfg: &RunConfig, format: Format) -> Result<CommandOutput> {
    let wf = &cfg.wavefunction;
    if wf.nr == 0 || wf.nphi == 0 || !(wf.r_max > 0.0) || wf.times.is_empty() {
        return Err(Error::Grid("wavefunction grid needs nr, nphi >= 1, r_max > 0 and at least one time".into()));
    }
    let state = cfg.state_spec()?;
    let t_end = wf.times.iter().copied().fold(0.0, f64::max);
    let sol = Solution::new(state, trajectory(cfg, t_end)?)?;
    let params = *state.params();
    let two_delta = 2.0 * params.delta();
    let hr = wf.r_max / wf.nr as f64;
    let hphi = 2.0 * std::f64::consts::PI / wf.nphi as f64;
    let mut csv = Csv::new(&["r", "phi", "t", "re_psi1", "im_psi1", "re_psi2", "im_psi2", "abs_psi_sq"]);
    let mut samples = Vec::new();
    let mut per_time = Vec::new();
    let quad = NormQuadrature::for_state(&state);
    for &t in &wf.times {
        let mut trap = 0.0;
        for i in 1..=wf.nr {
            let r = hr * i as f64;
            let wr = if i == wf.nr { 0.5 * hr } else { hr };
            for j in 0..wf.nphi {
                let phi = -std::f64::consts::PI + hphi * (j as f64 + 0.5);
                let [p1, p2] = sol.eval_psi(r, phi, t)?;
                let dens = p1.norm_sqr() + p2.norm_sqr();
                let w = phi.cos().abs().powf(2.0 * params.nu1) * phi.sin().abs().powf(2.0 * params.nu2);
                trap += wr * hphi * r.powf(two_delta) * w * dens;
                let row = [r, phi, t, p1.re, p1.im, p2.re, p2.im, dens];
                match format {
                    Format::Csv => csv.row(&row),
                    Format::Json => samples.push(row.to_vec()),
                }
            }
        }
        per_time.push(json!({
            "t": t,
            "eta": sol.phase.eta_at(t)?,
            "trapezoid_norm": trap,
            "quadrature_norm": sol.dunkl_norm(t, quad)?,
        }));
    }
    let mut report = json!({
        "state": to_value(&state),
        "energy": state.energy(),
        "trajectory": trajectory_meta(&sol.trajectory),
        "grid": {"r_max": wf.r_max, "nr": wf.nr, "nphi": wf.nphi, "times": wf.times},
        "columns": ["r", "phi", "t", "re_psi1", "im_psi1", "re_psi2", "im_psi2", "abs_psi_sq"],
        "norms": per_time,
    });
    if format == Format::Json {
        report["samples"] = json!(samples);
    }
    Ok(CommandOutput { report, csv: (format == Format::Csv).then(|| csv.into_string()), pass: true })
}

#[derive(Debug, Serialize)]
struct Check {
    name: &'static str,
    value: f64,
    threshold: f64,
    pass: bool,
    detail: Value,
}

pub fn verify(cfg: &RunConfig) -> Result<CommandOutput> {
    let params = cfg.dunkl_params()?;
    let sector = cfg.parity_sector();
    let flux = cfg.flux_spin();
    let v = &cfg.verify;
    let mut checks = Vec::new();

    let h = check_heisenberg(&params, v.heisenberg_degree);
    checks.push(Check {
        name: "heisenberg_float",
        value: h.max_residual,
        threshold: HEISENBERG_TOL,
        pass: h.max_residual <= HEISENBERG_TOL,
        detail: to_value(&h),
    });
    let exact = match (BigRational::from_float(params.nu1), BigRational::from_float(params.nu2)) {
        (Some(a), Some(b)) => DunklParams::new(a, b)?,
        _ => return Err(Error::Domain("Dunkl parameters are not finite".into())),
    };
    let he = check_heisenberg(&exact, v.heisenberg_degree);
    checks.push(Check {
        name: "heisenberg_exact",
        value: he.max_residual,
        threshold: 0.0,
        pass: he.exact_zero,
        detail: to_value(&he),
    });

    let j = check_j_squared(cfg.grids.angular_n, &params)?;
    checks.push(Check {
        name: "j_squared",
        value: j.max_residual,
        threshold: J_SQUARED_TOL,
        pass: j.max_residual <= J_SQUARED_TOL,
        detail: to_value(&j),
    });

    let state = cfg.state_spec()?;
    let lambda = state.angular.lambda;
    let grid = RadialGrid::new(cfg.grids.t_algebra_xi_max, cfg.grids.t_algebra_n)?;
    let t = check_t_algebra(&grid, &params, sector, lambda, &flux)?;
    checks.push(Check { name: "t_algebra", value: t.max_residual, threshold: t.relations[0].threshold, pass: t.pass, detail: to_value(&t) });

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut worst: f64 = 0.0;
    for _ in 0..v.random_pairs {
        let p = DunklParams::new(rng.random_range(-0.49..2.0), rng.random_range(-0.49..2.0))?;
        for s in [ParitySector::new(Sign::Plus, Sign::Plus), ParitySector::new(Sign::Plus, Sign::Minus)] {
            worst = worst.max(sector_identity_check(&p, s));
        }
    }
    checks.push(Check {
        name: "sector_identity",
        value: worst,
        threshold: SECTOR_IDENTITY_TOL,
        pass: worst <= SECTOR_IDENTITY_TOL,
        detail: json!({"pairs": v.random_pairs, "seed": cfg.seed}),
    });

    let modes = modes_up_to(sector, params, cfg.spectrum.l_max)?;
    let mut per_mode = Vec::new();
    let mut worst: f64 = 0.0;
    for m in &modes {
        let r = verify_mode_against(m, cfg.grids.mode_n, m.lambda + cfg.fault_injection.lambda_offset)?;
        worst = worst.max(r.residual);
        per_mode.push(json!({"l": m.l.value::<f64>(), "sign": m.sign.as_i32(), "lambda": r.lambda, "residual": r.residual}));
    }
    checks.push(Check {
        name: "verify_mode",
        value: worst,
        threshold: MODE_TOL,
        pass: worst <= MODE_TOL,
        detail: json!({"grid_n": cfg.grids.mode_n, "modes": per_mode, "lambda_offset": cfg.fault_injection.lambda_offset}),
    });
    let per_quadrant = modes.iter().map(|m| m.l.twice() as usize).max().unwrap_or(0) + 8;
    let gram = orthonormality_defect(&modes, per_quadrant)?;
    checks.push(Check {
        name: "orthonormality",
        value: gram,
        threshold: GRAM_TOL,
        pass: gram <= GRAM_TOL,
        detail: json!({"modes": modes.len(), "per_quadrant": per_quadrant}),
    });

    let xi: Vec<f64> = (0..200).map(|i| 0.05 + 6.0 * i as f64 / 199.0).collect();
    let mut ks = vec![state.k_minus];
    if state.radial.k != state.k_minus {
        ks.push(state.radial.k);
    }
    let mut worst: f64 = 0.0;
    let mut per_k = Vec::new();
    for &k in &ks {
        for n in 0..=v.ode_n_max {
            let r = ode_residual(&RadialMode::new(Region::Outer, n, k, DEFAULT_R_REG)?, &xi)?;
            worst = worst.max(r);
            per_k.push(json!({"k": k, "n": n, "residual": r}));
        }
    }
    checks.push(Check { name: "ode_residual", value: worst, threshold: ODE_TOL, pass: worst <= ODE_TOL, detail: json!(per_k) });

    let m = matching_report(lambda, &flux, &params, sector, v.matching_r, v.matching_n, v.halvings)?;
    let order = m.min_order().unwrap_or(f64::INFINITY);
    checks.push(Check {
        name: "matching",
        value: if m.exact { f64::INFINITY } else { order },
        threshold: MATCHING_MIN_ORDER,
        pass: m.leading_order_mismatch.abs() <= 1e-12 && (m.exact || order >= MATCHING_MIN_ORDER),
        detail: to_value(&m),
    });

    let pass = checks.iter().all(|c| c.pass);
    let failed: Vec<&str> = checks.iter().filter(|c| !c.pass).map(|c| c.name).collect();
    Ok(CommandOutput { report: json!({"checks": checks, "failed": failed}), csv: None, pass })
}

pub fn oracle(cfg: &RunConfig) -> Result<CommandOutput> {
    let params = cfg.dunkl_params()?;
    let sector = cfg.parity_sector();
    let flux = cfg.flux_spin();
    let state = cfg.state_spec()?;
    let row = spectrum_row(0, state.angular.lambda, &flux, &params, sector)?;
    let grid = RadialGrid::new(cfg.grids.xi_max, cfg.grids.radial_n)?;
    let shift = flux_shift_report(row.k_minus, row.k_plus, cfg.grids.oracle_n_max, &grid)?;
    let ang = compare_angular_spectrum(cfg.grids.angular_n, &params)?;
    let radial_err = shift.inner.max_relative_error.max(shift.outer.max_relative_error);
    let checks = json!([
        {"name": "radial_inner", "value": shift.inner.max_relative_error, "threshold": RADIAL_ORACLE_TOL,
         "pass": shift.inner.max_relative_error <= RADIAL_ORACLE_TOL},
        {"name": "radial_outer", "value": shift.outer.max_relative_error, "threshold": RADIAL_ORACLE_TOL,
         "pass": shift.outer.max_relative_error <= RADIAL_ORACLE_TOL},
        {"name": "flux_shift", "value": shift.max_deviation, "threshold": FLUX_SHIFT_TOL,
         "pass": shift.max_deviation <= FLUX_SHIFT_TOL},
        {"name": "angular", "value": ang.max_abs_error, "threshold": ANGULAR_ORACLE_TOL,
         "pass": ang.max_abs_error <= ANGULAR_ORACLE_TOL},
    ]);
    let pass = radial_err <= RADIAL_ORACLE_TOL && shift.max_deviation <= FLUX_SHIFT_TOL && ang.max_abs_error <= ANGULAR_ORACLE_TOL;
    let report = json!({
        "checks": checks,
        "radial": to_value(&shift),
        "angular": to_value(&ang),
    });
    Ok(CommandOutput { report, csv: None, pass })
}
