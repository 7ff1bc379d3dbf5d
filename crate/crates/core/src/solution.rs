//! Full time-dependent spinor: Lewis–Riesenfeld phase, scaling unitary and
//! the product of certified angular and radial modes.
//!
//!   ψ = e^{iη(t)} e^{iMρ̇r²/(2ρ)} ρ^{−δ−½} L(r/ρ) (r/ρ)^{−δ} Φ(φ) χ_{m_s},
//!
//! normalized under r^{2δ}|cos φ|^{2ν₁}|sin φ|^{2ν₂} dr dφ, δ = ½ + ν₁ + ν₂.

use num_complex::Complex;
use serde::Serialize;

use crate::angular::{eval_phi, AngularIndex, AngularMode};
use crate::dunkl_ops::{DunklParams, ParitySector};
use crate::ermakov::ErmakovTrajectory;
use crate::error::{Error, Result};
use crate::quadrature::{dunkl_angular, gauss_laguerre, gauss_legendre};
use crate::radial::{k_minus, k_plus, radial_eval, FluxSpin, RadialMode, Region, DEFAULT_R_REG};
use crate::scalar::Sign;
use crate::specfun::laguerre_l;

/// Largest radial index for which ⟨H⟩ is evaluated by Gauss–Laguerre.
pub const MAX_EXPECTATION_N: usize = 60;

/// An admissible (angular, radial, spin) quantum-number combination.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StateSpec {
    pub angular: AngularMode<f64>,
    /// Outer-region mode, index K₊.
    pub radial: RadialMode<f64>,
    pub flux: FluxSpin<f64>,
    pub n: usize,
    pub k_minus: f64,
}

impl StateSpec {
    /// Applies the AB gate and the branch rule when ϑ ≠ 0.
    pub fn new(
        params: DunklParams<f64>,
        sector: ParitySector,
        l: AngularIndex,
        sign: Sign,
        n: usize,
        flux: FluxSpin<f64>,
    ) -> Result<Self> {
        let angular = AngularMode::new(sector, l, sign, params)?;
        let kp = k_plus(angular.lambda, &flux, &params, sector)?;
        let km = if flux.vartheta == 0.0 { kp } else { k_minus(angular.lambda, &params, sector) };
        let radial = RadialMode::new(Region::Outer, n, kp, DEFAULT_R_REG)?;
        Ok(Self { angular, radial, flux, n, k_minus: km })
    }

    pub fn params(&self) -> &DunklParams<f64> {
        &self.angular.params
    }

    /// Invariant eigenvalue E = 2n + K₊ + 1.
    pub fn energy(&self) -> f64 {
        self.radial.energy
    }

    /// Unsigned radial amplitude in the scaled frame (ρ = 1, no phases).
    pub fn static_radial(&self, r: f64) -> Result<f64> {
        let delta = self.params().delta();
        Ok(radial_eval(&self.radial, r)? * r.powf(-delta))
    }
}

/// Radial moments of a unit-normalized mode in the scaled variable ξ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialMoments {
    /// ∫ L² dξ.
    pub norm: f64,
    /// ∫ [L'² + (K²−¼)L²/ξ²] dξ.
    pub kinetic: f64,
    /// ∫ ξ² L² dξ.
    pub potential: f64,
    pub nodes: usize,
}

/// Gauss–Laguerre moments in s = ξ², weight s^{K−1}e^{−s}. Requires K > 0.
pub fn radial_moments(mode: &RadialMode<f64>) -> Result<RadialMoments> {
    let n = mode.n;
    if n > MAX_EXPECTATION_N {
        return Err(Error::QuadratureDegree(format!(
            "radial index n = {n} exceeds the supported expectation order {MAX_EXPECTATION_N}"
        )));
    }
    let k = mode.k;
    if !(k > 0.0) {
        return Err(Error::Domain(format!("energy expectation needs K > 0, got K = {k}")));
    }
    let q = gauss_laguerre(n + 2, k - 1.0)?;
    let c = 0.5 * mode.norm_prefactor * mode.norm_prefactor;
    let (mut norm, mut kin, mut pot) = (0.0, 0.0, 0.0);
    for (&s, &w) in q.nodes.iter().zip(&q.weights) {
        let pe = laguerre_l(n, k, s)?;
        let (p, dp) = (pe.value, pe.derivative);
        // L' = N ξ^{K−½} e^{−ξ²/2} [(K+½)p − s p + 2s p'].
        let d = (k + 0.5) * p - s * p + 2.0 * s * dp;
        norm += w * s * p * p;
        kin += w * (d * d + (k * k - 0.25) * p * p);
        pot += w * s * s * p * p;
    }
    Ok(RadialMoments { norm: c * norm, kinetic: c * kin, potential: c * pot, nodes: q.len() })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseRecord {
    pub times: Vec<f64>,
    pub eta: Vec<f64>,
    pub eta_dyn: Option<Vec<f64>>,
    pub eta_geo: Option<Vec<f64>>,
    /// η̇ = −E/(Mρ²) at each sample.
    pub rates: Vec<f64>,
    /// ⟨H⟩ at each sample, when the split is computed.
    pub energy_expectation: Option<Vec<f64>>,
}

impl PhaseRecord {
    /// η(t) by cubic Hermite interpolation with the sampled rates.
    pub fn eta_at(&self, t: f64) -> Result<f64> {
        let n = self.times.len();
        let (a, b) = (self.times[0], self.times[n - 1]);
        if t < a.min(b) - 1e-12 || t > a.max(b) + 1e-12 {
            return Err(Error::Coverage(format!("t = {t} is outside the phase window [{a}, {b}]")));
        }
        if n == 1 {
            return Ok(self.eta[0]);
        }
        let h = (b - a) / (n - 1) as f64;
        let k = (((t - a) / h).floor().max(0.0) as usize).min(n - 2);
        let s = ((t - self.times[k]) / h).clamp(0.0, 1.0);
        let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        let h10 = s * (1.0 - s) * (1.0 - s);
        let h01 = s * s * (3.0 - 2.0 * s);
        let h11 = s * s * (s - 1.0);
        Ok(h00 * self.eta[k] + h10 * h * self.rates[k] + h01 * self.eta[k + 1] + h11 * h * self.rates[k + 1])
    }

    /// max |η − η_dyn − η_geo|, if the split was computed.
    pub fn decomposition_defect(&self) -> Option<f64> {
        let (d, g) = (self.eta_dyn.as_ref()?, self.eta_geo.as_ref()?);
        Some(self.eta.iter().zip(d).zip(g).map(|((e, d), g)| (e - d - g).abs()).fold(0.0, f64::max))
    }
}

/// Cumulative integral on a uniform grid: composite Simpson at even
/// indices, Simpson plus a closing 3/8 panel at odd ones.
pub fn cumulative_simpson(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let mut out = vec![0.0; n];
    if n < 2 {
        return out;
    }
    if n == 2 {
        out[1] = 0.5 * h * (f[0] + f[1]);
        return out;
    }
    out[1] = h / 12.0 * (5.0 * f[0] + 8.0 * f[1] - f[2]);
    for i in 2..n {
        out[i] = if i % 2 == 0 {
            out[i - 2] + h / 3.0 * (f[i - 2] + 4.0 * f[i - 1] + f[i])
        } else {
            out[i - 3] + 3.0 * h / 8.0 * (f[i - 3] + 3.0 * f[i - 2] + 3.0 * f[i - 1] + f[i])
        };
    }
    out
}

fn grid_step(traj: &ErmakovTrajectory) -> f64 {
    if traj.len() < 2 {
        0.0
    } else {
        (traj.t_end() - traj.t_start()) / (traj.len() - 1) as f64
    }
}

/// η(t) = −E ∫₀ᵗ dt'/(M ρ²) on the trajectory grid.
pub fn lr_phase(e: f64, traj: &ErmakovTrajectory) -> Result<PhaseRecord> {
    let rates: Vec<f64> = traj
        .times
        .iter()
        .zip(&traj.rho)
        .map(|(&t, &r)| -e / (traj.profiles.mass(t) * r * r))
        .collect();
    let eta = cumulative_simpson(&rates, grid_step(traj));
    Ok(PhaseRecord { times: traj.times.clone(), eta, eta_dyn: None, eta_geo: None, rates, energy_expectation: None })
}

/// ⟨H⟩ = ⟨p_ξ²⟩/(2Mρ²) + ½M(ρ̇² + Ω²ρ²)⟨ξ²⟩ in the instantaneous
/// invariant eigenstate.
pub fn energy_expectation(moments: &RadialMoments, mass: f64, omega_sq: f64, rho: f64, rho_dot: f64) -> f64 {
    moments.kinetic / (2.0 * mass * rho * rho) + 0.5 * mass * (rho_dot * rho_dot + omega_sq * rho * rho) * moments.potential
}

/// LR phase with η_dyn = −∫⟨H⟩dt and η_geo = η − η_dyn.
pub fn phase_split(state: &StateSpec, traj: &ErmakovTrajectory) -> Result<PhaseRecord> {
    let mut rec = lr_phase(state.energy(), traj)?;
    let moments = radial_moments(&state.radial)?;
    let p = &traj.profiles;
    let h: Vec<f64> = (0..traj.len())
        .map(|k| {
            let t = traj.times[k];
            energy_expectation(&moments, p.mass(t), p.omega_sq(t), traj.rho[k], traj.rho_dot[k])
        })
        .collect();
    let neg: Vec<f64> = h.iter().map(|v| -v).collect();
    let dyn_ = cumulative_simpson(&neg, grid_step(traj));
    let geo = rec.eta.iter().zip(&dyn_).map(|(e, d)| e - d).collect();
    rec.eta_dyn = Some(dyn_);
    rec.eta_geo = Some(geo);
    rec.energy_expectation = Some(h);
    Ok(rec)
}

/// U = exp(i M ρ̇ r²/(2ρ)) at time t.
pub fn unitary_factor(traj: &ErmakovTrajectory, r: f64, t: f64) -> Result<Complex<f64>> {
    let (rho, rho_dot) = traj.state_at(t)?;
    Ok(Complex::from_polar(1.0, traj.profiles.mass(t) * rho_dot * r * r / (2.0 * rho)))
}

/// Quadrature resolution for [`Solution::dunkl_norm`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormQuadrature {
    pub panels: usize,
    pub points: usize,
    /// Geometric refinements of the panel touching r = 0.
    pub origin_levels: usize,
    pub per_quadrant: usize,
}

impl NormQuadrature {
    pub fn for_state(state: &StateSpec) -> Self {
        Self { panels: 48, points: 12, origin_levels: 24, per_quadrant: 8 + state.angular.l.twice() as usize }
    }
}

/// A state propagated along an Ermakov trajectory.
#[derive(Debug, Clone, Serialize)]
pub struct Solution {
    pub state: StateSpec,
    #[serde(skip)]
    pub trajectory: ErmakovTrajectory,
    #[serde(skip)]
    pub phase: PhaseRecord,
}

impl Solution {
    pub fn new(state: StateSpec, trajectory: ErmakovTrajectory) -> Result<Self> {
        let phase = lr_phase(state.energy(), &trajectory)?;
        Ok(Self { state, trajectory, phase })
    }

    /// Scalar part ψ/χ at (r, φ, t).
    pub fn eval_scalar(&self, r: f64, phi: f64, t: f64) -> Result<Complex<f64>> {
        if !(r > 0.0) {
            return Err(Error::Domain(format!("eval_psi needs r > 0, got {r}")));
        }
        let (rho, _) = self.trajectory.state_at(t)?;
        let delta = self.state.params().delta();
        let xi = r / rho;
        let radial = radial_eval(&self.state.radial, xi)? * xi.powf(-delta) * rho.powf(-delta - 0.5);
        let eta = self.phase.eta_at(t)?;
        let u = unitary_factor(&self.trajectory, r, t)?;
        Ok(Complex::from_polar(1.0, eta) * u * radial * eval_phi(&self.state.angular, phi)?)
    }

    /// (ψ₁, ψ₂) with χ₊ = (1, 0), χ₋ = (0, 1).
    pub fn eval_psi(&self, r: f64, phi: f64, t: f64) -> Result<[Complex<f64>; 2]> {
        let v = self.eval_scalar(r, phi, t)?;
        let zero = Complex::new(0.0, 0.0);
        Ok(match self.state.flux.m_s {
            Sign::Plus => [v, zero],
            Sign::Minus => [zero, v],
        })
    }

    /// ∫∫ |ψ|² under the Dunkl measure by composite Gauss–Legendre in r and
    /// the reflection-adapted angular rule in φ.
    pub fn dunkl_norm(&self, t: f64, quad: NormQuadrature) -> Result<f64> {
        let (rho, _) = self.trajectory.state_at(t)?;
        let params = *self.state.params();
        let two_delta = 2.0 * params.delta();
        let r_max = rho * ((2.0 * self.state.energy()).sqrt() + 8.0);
        let width = r_max / quad.panels as f64;
        let mut intervals = Vec::with_capacity(quad.panels + quad.origin_levels);
        let mut hi = width;
        for _ in 0..quad.origin_levels {
            intervals.push((0.5 * hi, hi));
            hi *= 0.5;
        }
        for k in 1..quad.panels {
            intervals.push((k as f64 * width, (k + 1) as f64 * width));
        }
        let ang = dunkl_angular(quad.per_quadrant, &params)?;
        let mut total = 0.0;
        for (a, b) in intervals {
            let g = gauss_legendre(quad.points, a, b)?;
            for (&r, &wr) in g.nodes.iter().zip(&g.weights) {
                let mut inner = 0.0;
                for (&phi, &wp) in ang.nodes.iter().zip(&ang.weights) {
                    let [p1, p2] = self.eval_psi(r, phi, t)?;
                    inner += wp * (p1.norm_sqr() + p2.norm_sqr());
                }
                total += wr * r.powf(two_delta) * inner;
            }
        }
        Ok(total)
    }
}
