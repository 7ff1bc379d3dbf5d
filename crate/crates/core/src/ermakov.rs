//! Ermakov–Pinney auxiliary equation
//!
//!   ρ̈ + (Ṁ/M) ρ̇ + Ω² ρ = 1/(M² ρ³)
//!
//! for time-dependent mass and frequency profiles, integrated with an
//! adaptive Dormand–Prince 5(4) pair onto a uniform output grid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Integration aborts once ρ drops below this value.
pub const SINGULARITY_THRESHOLD: f64 = 1e-8;
/// Default spacing of the output grid.
pub const DEFAULT_DT_OUT: f64 = 1.0 / 256.0;
pub const MIN_TOL: f64 = 1e-12;
pub const MAX_TOL: f64 = 1e-4;
const MAX_STEPS: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Constant,
    ExponentialMass,
    ModulatedFrequency,
    Tabulated,
}

/// Profile definition as it appears in configuration files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProfileSpec {
    Constant { mass: f64, omega: f64 },
    /// M = M₀ e^{γt}.
    ExponentialMass { m0: f64, gamma: f64, omega: f64 },
    /// Ω² = Ω₀²(1 + a cos ω_d t), |a| < 1.
    ModulatedFrequency { mass: f64, omega0: f64, a: f64, omega_d: f64 },
    /// Sampled M(t) and Ω(t), interpolated by monotone cubics.
    Tabulated { times: Vec<f64>, mass: Vec<f64>, omega: Vec<f64> },
}

/// Piecewise-cubic Hermite interpolant with Fritsch–Carlson slopes.
#[derive(Debug, Clone, PartialEq)]
pub struct Pchip {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl Pchip {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let n = x.len();
        if n < 2 || y.len() != n {
            return Err(Error::Profile(format!("tabulated profile needs >= 2 matching samples, got {} and {}", n, y.len())));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) || x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(Error::Profile("tabulated times must be finite and strictly increasing".into()));
        }
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let d: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
        let mut m = vec![0.0; n];
        if n == 2 {
            m[0] = d[0];
            m[1] = d[0];
        } else {
            for k in 1..n - 1 {
                if d[k - 1] * d[k] > 0.0 {
                    let w1 = 2.0 * h[k] + h[k - 1];
                    let w2 = h[k] + 2.0 * h[k - 1];
                    m[k] = (w1 + w2) / (w1 / d[k - 1] + w2 / d[k]);
                }
            }
            m[0] = end_slope(h[0], h[1], d[0], d[1]);
            m[n - 1] = end_slope(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
        }
        Ok(Self { x, y, m })
    }

    pub fn range(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    /// (value, derivative); clamps t to the table range.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        let (lo, hi) = self.range();
        let t = t.clamp(lo, hi);
        let k = match self.x.partition_point(|&v| v <= t) {
            0 => 0,
            p => (p - 1).min(self.x.len() - 2),
        };
        let h = self.x[k + 1] - self.x[k];
        let s = (t - self.x[k]) / h;
        let (y0, y1, m0, m1) = (self.y[k], self.y[k + 1], self.m[k], self.m[k + 1]);
        let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        let h10 = s * (1.0 - s) * (1.0 - s);
        let h01 = s * s * (3.0 - 2.0 * s);
        let h11 = s * s * (s - 1.0);
        let value = h00 * y0 + h10 * h * m0 + h01 * y1 + h11 * h * m1;
        let d00 = 6.0 * s * s - 6.0 * s;
        let d10 = 3.0 * s * s - 4.0 * s + 1.0;
        let d01 = -d00;
        let d11 = 3.0 * s * s - 2.0 * s;
        let deriv = (d00 * y0 + d01 * y1) / h + d10 * m0 + d11 * m1;
        (value, deriv)
    }
}

fn end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if m.signum() != d0.signum() {
        0.0
    } else if d0.signum() != d1.signum() && m.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        m
    }
}

/// Validated mass and frequency profiles.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeProfiles {
    spec: ProfileSpec,
    tables: Option<(Pchip, Pchip)>,
}

impl TimeProfiles {
    pub fn new(spec: ProfileSpec) -> Result<Self> {
        let positive = |v: f64, what: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Profile(format!("{what} must be positive and finite, got {v}")))
            }
        };
        let finite = |v: f64, what: &str| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::Profile(format!("{what} must be finite, got {v}")))
            }
        };
        let tables = match &spec {
            ProfileSpec::Constant { mass, omega } => {
                positive(*mass, "mass")?;
                finite(*omega, "omega")?;
                None
            }
            ProfileSpec::ExponentialMass { m0, gamma, omega } => {
                positive(*m0, "m0")?;
                finite(*gamma, "gamma")?;
                finite(*omega, "omega")?;
                None
            }
            ProfileSpec::ModulatedFrequency { mass, omega0, a, omega_d } => {
                positive(*mass, "mass")?;
                finite(*omega0, "omega0")?;
                finite(*omega_d, "omega_d")?;
                if !(a.abs() < 1.0) {
                    return Err(Error::Profile(format!("modulation depth |a| must be < 1, got {a}")));
                }
                None
            }
            ProfileSpec::Tabulated { times, mass, omega } => {
                if let Some(bad) = mass.iter().find(|&&m| !(m > 0.0)) {
                    return Err(Error::Profile(format!("tabulated mass must be positive everywhere, found {bad}")));
                }
                Some((Pchip::new(times.clone(), mass.clone())?, Pchip::new(times.clone(), omega.clone())?))
            }
        };
        let profiles = Self { spec, tables };
        profiles.check_mass_derivative()?;
        Ok(profiles)
    }

    pub fn constant(mass: f64, omega: f64) -> Result<Self> {
        Self::new(ProfileSpec::Constant { mass, omega })
    }

    pub fn spec(&self) -> &ProfileSpec {
        &self.spec
    }

    pub fn family(&self) -> Family {
        match self.spec {
            ProfileSpec::Constant { .. } => Family::Constant,
            ProfileSpec::ExponentialMass { .. } => Family::ExponentialMass,
            ProfileSpec::ModulatedFrequency { .. } => Family::ModulatedFrequency,
            ProfileSpec::Tabulated { .. } => Family::Tabulated,
        }
    }

    /// Time window where the profile is defined; unbounded for analytic families.
    pub fn window(&self) -> (f64, f64) {
        match &self.tables {
            Some((m, _)) => m.range(),
            None => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    pub fn mass(&self, t: f64) -> f64 {
        match &self.spec {
            ProfileSpec::Constant { mass, .. } | ProfileSpec::ModulatedFrequency { mass, .. } => *mass,
            ProfileSpec::ExponentialMass { m0, gamma, .. } => m0 * (gamma * t).exp(),
            ProfileSpec::Tabulated { .. } => self.tables.as_ref().expect("tables").0.eval(t).0,
        }
    }

    pub fn mass_dot(&self, t: f64) -> f64 {
        match &self.spec {
            ProfileSpec::Constant { .. } | ProfileSpec::ModulatedFrequency { .. } => 0.0,
            ProfileSpec::ExponentialMass { m0, gamma, .. } => gamma * m0 * (gamma * t).exp(),
            ProfileSpec::Tabulated { .. } => self.tables.as_ref().expect("tables").0.eval(t).1,
        }
    }

    pub fn omega(&self, t: f64) -> f64 {
        match &self.spec {
            ProfileSpec::ModulatedFrequency { .. } => self.omega_sq(t).sqrt(),
            ProfileSpec::Constant { omega, .. } | ProfileSpec::ExponentialMass { omega, .. } => *omega,
            ProfileSpec::Tabulated { .. } => self.tables.as_ref().expect("tables").1.eval(t).0,
        }
    }

    pub fn omega_sq(&self, t: f64) -> f64 {
        match &self.spec {
            ProfileSpec::ModulatedFrequency { omega0, a, omega_d, .. } => {
                omega0 * omega0 * (1.0 + a * (omega_d * t).cos())
            }
            _ => {
                let w = self.omega(t);
                w * w
            }
        }
    }

    /// Compares Ṁ with a central difference of M at sample times.
    fn check_mass_derivative(&self) -> Result<()> {
        let (lo, hi) = match self.window() {
            (a, b) if a.is_finite() => (a, b),
            _ => (0.0, 10.0),
        };
        let h = 1e-5 * (hi - lo).max(1.0);
        for k in 1..64 {
            let t = lo + (hi - lo) * k as f64 / 64.0;
            let t = t.clamp(lo + h, hi - h);
            let fd = (self.mass(t + h) - self.mass(t - h)) / (2.0 * h);
            let md = self.mass_dot(t);
            let scale = md.abs().max(self.mass(t)).max(1.0);
            // Tabulated interpolants have kinks in the second derivative at knots.
            let tol = if self.tables.is_some() { 1e-3 } else { 1e-6 };
            if (fd - md).abs() > tol * scale {
                return Err(Error::Profile(format!(
                    "mass derivative inconsistent at t = {t}: analytic {md}, finite difference {fd}"
                )));
            }
        }
        Ok(())
    }

    /// Equilibrium seed ρ₀ = (M(t)Ω(t))^{−½}, ρ̇₀ = 0.
    pub fn equilibrium_seed(&self, t: f64) -> Result<(f64, f64)> {
        let mw = self.mass(t) * self.omega(t).abs();
        if !(mw > 0.0) {
            return Err(Error::Profile(format!("equilibrium seed needs M*Omega > 0 at t = {t}")));
        }
        Ok((mw.powf(-0.5), 0.0))
    }

    fn rhs(&self, t: f64, y: [f64; 2]) -> Result<[f64; 2]> {
        let m = self.mass(t);
        if !(m > 0.0) {
            return Err(Error::Profile(format!("mass M({t}) = {m} is not positive")));
        }
        let (rho, v) = (y[0], y[1]);
        Ok([v, -(self.mass_dot(t) / m) * v - self.omega_sq(t) * rho + 1.0 / (m * m * rho * rho * rho)])
    }

    /// ρ̈ from the equation of motion.
    pub fn acceleration(&self, t: f64, rho: f64, rho_dot: f64) -> Result<f64> {
        Ok(self.rhs(t, [rho, rho_dot])?[1])
    }
}

impl Serialize for TimeProfiles {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.spec.serialize(s)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StepStats {
    pub tol: f64,
    pub accepted: usize,
    pub rejected: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ErmakovTrajectory {
    pub times: Vec<f64>,
    pub rho: Vec<f64>,
    pub rho_dot: Vec<f64>,
    pub profiles: TimeProfiles,
    pub stats: StepStats,
}

impl ErmakovTrajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn t_start(&self) -> f64 {
        self.times[0]
    }

    pub fn t_end(&self) -> f64 {
        self.times[self.times.len() - 1]
    }

    /// Whether t lies inside the sampled window (either direction).
    pub fn covers(&self, t: f64) -> bool {
        let (a, b) = (self.t_start().min(self.t_end()), self.t_start().max(self.t_end()));
        t >= a - 1e-12 && t <= b + 1e-12
    }

    /// (ρ, ρ̇) at t by cubic Hermite interpolation between samples, using ρ̇
    /// and ρ̈ from the equation of motion as slopes.
    pub fn state_at(&self, t: f64) -> Result<(f64, f64)> {
        if !self.covers(t) {
            return Err(Error::Coverage(format!(
                "t = {t} is outside the trajectory window [{}, {}]",
                self.t_start(),
                self.t_end()
            )));
        }
        let n = self.len();
        if n == 1 {
            return Ok((self.rho[0], self.rho_dot[0]));
        }
        let forward = self.t_end() > self.t_start();
        let k = if forward {
            self.times.partition_point(|&s| s <= t).saturating_sub(1).min(n - 2)
        } else {
            self.times.partition_point(|&s| s >= t).saturating_sub(1).min(n - 2)
        };
        let (t0, t1) = (self.times[k], self.times[k + 1]);
        let h = t1 - t0;
        let s = ((t - t0) / h).clamp(0.0, 1.0);
        let (r0, r1, v0, v1) = (self.rho[k], self.rho[k + 1], self.rho_dot[k], self.rho_dot[k + 1]);
        let a0 = self.profiles.acceleration(t0, r0, v0)?;
        let a1 = self.profiles.acceleration(t1, r1, v1)?;
        Ok((hermite(s, h, r0, r1, v0, v1), hermite(s, h, v0, v1, a0, a1)))
    }

    /// CSV with columns t, rho, rho_dot; shortest round-trip floats.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,rho,rho_dot\n");
        for k in 0..self.len() {
            out.push_str(&format!("{},{},{}\n", self.times[k], self.rho[k], self.rho_dot[k]));
        }
        out
    }

    pub fn min_rho(&self) -> f64 {
        self.rho.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

fn hermite(s: f64, h: f64, y0: f64, y1: f64, m0: f64, m1: f64) -> f64 {
    let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
    let h10 = s * (1.0 - s) * (1.0 - s);
    let h01 = s * s * (3.0 - 2.0 * s);
    let h11 = s * s * (s - 1.0);
    h00 * y0 + h10 * h * m0 + h01 * y1 + h11 * h * m1
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// One DP5(4) step: (5th-order solution, scaled error norm).
fn dp_step(p: &TimeProfiles, t: f64, y: [f64; 2], h: f64, tol: f64) -> Result<([f64; 2], f64)> {
    let mut k = [[0.0f64; 2]; 7];
    k[0] = p.rhs(t, y)?;
    for i in 1..7 {
        let mut yi = y;
        for (j, kj) in k.iter().enumerate().take(i) {
            yi[0] += h * A[i][j] * kj[0];
            yi[1] += h * A[i][j] * kj[1];
        }
        if !(yi[0] > SINGULARITY_THRESHOLD) {
            return Ok(([yi[0], yi[1]], f64::INFINITY));
        }
        k[i] = p.rhs(t + C[i] * h, yi)?;
    }
    let mut y5 = y;
    let mut err: f64 = 0.0;
    for c in 0..2 {
        let mut e = 0.0;
        for i in 0..7 {
            y5[c] += h * B5[i] * k[i][c];
            e += h * (B5[i] - B4[i]) * k[i][c];
        }
        let sc = tol * (1.0 + y[c].abs().max(y5[c].abs()));
        err = err.max((e / sc).abs());
    }
    Ok((y5, err))
}

/// Integrates from t = 0 with the default output spacing.
pub fn solve(profiles: &TimeProfiles, rho0: f64, rho_dot0: f64, t_end: f64, tol: f64) -> Result<ErmakovTrajectory> {
    solve_span(profiles, 0.0, rho0, rho_dot0, t_end, tol, DEFAULT_DT_OUT)
}

/// Integrates from t0 to t_end (either direction), recording the state on a
/// uniform grid of about `dt_out` spacing. Steps are clipped to land on
/// every output time.
pub fn solve_span(
    profiles: &TimeProfiles,
    t0: f64,
    rho0: f64,
    rho_dot0: f64,
    t_end: f64,
    tol: f64,
    dt_out: f64,
) -> Result<ErmakovTrajectory> {
    if !(rho0 > 0.0) || !rho0.is_finite() || !rho_dot0.is_finite() {
        return Err(Error::Domain(format!("initial data must have rho0 > 0, got ({rho0}, {rho_dot0})")));
    }
    if !(MIN_TOL..=MAX_TOL).contains(&tol) {
        return Err(Error::Domain(format!("tol must lie in [{MIN_TOL:e}, {MAX_TOL:e}], got {tol:e}")));
    }
    if !(dt_out > 0.0) || !t_end.is_finite() || !t0.is_finite() {
        return Err(Error::Domain("output spacing must be positive and times finite".into()));
    }
    let (lo, hi) = profiles.window();
    if t0.min(t_end) < lo - 1e-12 || t0.max(t_end) > hi + 1e-12 {
        return Err(Error::Coverage(format!("integration window [{t0}, {t_end}] exceeds the profile table [{lo}, {hi}]")));
    }
    let span = t_end - t0;
    let n_out = ((span.abs() / dt_out).ceil() as usize).max(1);
    let dir = if span >= 0.0 { 1.0 } else { -1.0 };
    let mut times = Vec::with_capacity(n_out + 1);
    let mut rho = Vec::with_capacity(n_out + 1);
    let mut rho_dot = Vec::with_capacity(n_out + 1);
    times.push(t0);
    rho.push(rho0);
    rho_dot.push(rho_dot0);
    let mut stats = StepStats { tol, accepted: 0, rejected: 0 };
    if span == 0.0 {
        return Ok(ErmakovTrajectory { times, rho, rho_dot, profiles: profiles.clone(), stats });
    }
    let mut t = t0;
    let mut y = [rho0, rho_dot0];
    let mut h = dir * (span.abs() / n_out as f64).min(1e-2);
    for k in 1..=n_out {
        let target = if k == n_out { t_end } else { t0 + span * k as f64 / n_out as f64 };
        while (target - t) * dir > 0.0 {
            let remaining = target - t;
            let last = h.abs() >= remaining.abs();
            let step = if last { remaining } else { h };
            let (y_new, err) = dp_step(profiles, t, y, step, tol)?;
            if err <= 1.0 {
                t = if last { target } else { t + step };
                y = y_new;
                stats.accepted += 1;
                if !(y[0] >= SINGULARITY_THRESHOLD) || !y[0].is_finite() {
                    return Err(Error::Singularity { t, threshold: SINGULARITY_THRESHOLD });
                }
            } else {
                stats.rejected += 1;
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            let proposed = step * factor;
            // Keep the unclipped size when the step was only shortened to hit the target.
            h = if last && err <= 1.0 { dir * h.abs().max(proposed.abs()) } else { proposed };
            if h.abs() < 1e-14 * t.abs().max(1.0) || !h.is_finite() {
                return Err(Error::Singularity { t, threshold: SINGULARITY_THRESHOLD });
            }
            if stats.accepted + stats.rejected > MAX_STEPS {
                return Err(Error::Convergence { index: k, iterations: MAX_STEPS });
            }
        }
        times.push(t);
        rho.push(y[0]);
        rho_dot.push(y[1]);
    }
    Ok(ErmakovTrajectory { times, rho, rho_dot, profiles: profiles.clone(), stats })
}

/// Q = ½ρ̇² + ½Ω²ρ² + 1/(2M²ρ²), conserved when M and Ω are constant.
pub fn conserved_quantity(mass: f64, omega: f64, rho: f64, rho_dot: f64) -> f64 {
    0.5 * rho_dot * rho_dot + 0.5 * omega * omega * rho * rho + 0.5 / (mass * mass * rho * rho)
}

/// max_t |Q(t) − Q(0)| / |Q(0)| for a constant-coefficient trajectory.
pub fn invariant_drift(traj: &ErmakovTrajectory) -> Result<f64> {
    let ProfileSpec::Constant { mass, omega } = *traj.profiles.spec() else {
        return Err(Error::Family(format!(
            "invariant drift is defined for constant profiles only, got {:?}",
            traj.profiles.family()
        )));
    };
    let q0 = conserved_quantity(mass, omega, traj.rho[0], traj.rho_dot[0]);
    Ok(traj
        .rho
        .iter()
        .zip(&traj.rho_dot)
        .map(|(&r, &v)| ((conserved_quantity(mass, omega, r, v) - q0) / q0).abs())
        .fold(0.0, f64::max))
}

/// Closed-form constant-coefficient solution
/// ρ² = A u₁² + 2B u₁u₂ + C u₂², u₁ = cos Ωt, u₂ = sin Ωt / Ω (t if Ω = 0),
/// with A = ρ₀², B = ρ₀ρ̇₀ and AC − B² = 1/M₀².
pub fn pinney_oracle(omega0: f64, m0: f64, rho0: f64, rho_dot0: f64, t: f64) -> f64 {
    let (u1, u2) = if omega0 == 0.0 {
        (1.0, t)
    } else {
        ((omega0 * t).cos(), (omega0 * t).sin() / omega0)
    };
    let a = rho0 * rho0;
    let b = rho0 * rho_dot0;
    let c = (1.0 / (m0 * m0) + b * b) / a;
    (a * u1 * u1 + 2.0 * b * u1 * u2 + c * u2 * u2).sqrt()
}
