//! Regularized radial problem under the AB flux: centrifugal indices K∓ in
//! the inner and outer regions, the matching conditions at the
//! regularization radius, closed-form radial modes and invariant eigenvalues.
//!
//! Each region solves
//!
//!   −L'' + (K² − ¼)/ξ² L + ξ² L = 2E L,   E = 2n + K + 1,
//!
//! with L = N ξ^{K+½} e^{−ξ²/2} L_n^K(ξ²) and N² = 2 n!/Γ(n+K+1).

use serde::{Deserialize, Serialize};

use crate::angular::{ab_constrain, CONSTRAINT_TOL};
use crate::dunkl_ops::{DunklParams, ParitySector};
use crate::error::{Error, Result};
use crate::scalar::{Real, Sign};
use crate::specfun::{laguerre_l, ln_gamma};

/// Largest allowed disagreement between the two K₊ formulas.
pub const K_PLUS_CONSISTENCY_TOL: f64 = 1e-10;
/// Default regularization radius.
pub const DEFAULT_R_REG: f64 = 1e-2;

/// AB flux ϑ and σ_z spin projection m_s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluxSpin<T> {
    pub vartheta: T,
    pub m_s: Sign,
}

impl<T: Real> FluxSpin<T> {
    pub fn new(vartheta: T, m_s: Sign) -> Self {
        Self { vartheta, m_s }
    }

    /// ϑ m_s.
    pub fn shift(&self) -> T {
        self.vartheta * self.m_s.value::<T>()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    /// ξ < R.
    Inner,
    /// ξ > R.
    Outer,
}

/// δ = ½ + ν₁ + ν₂.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeltaShift<T> {
    pub delta: T,
}

impl<T: Real> DeltaShift<T> {
    pub fn from_params(params: &DunklParams<T>) -> Result<Self> {
        let delta = params.delta();
        if !(delta > T::lit(-0.5)) {
            return Err(Error::Domain(format!("delta = {delta} must exceed -1/2")));
        }
        Ok(Self { delta })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialMode<T> {
    pub region: Region,
    pub n: usize,
    pub k: T,
    pub energy: T,
    pub norm_prefactor: T,
    pub r_reg: T,
}

impl<T: Real> RadialMode<T> {
    /// Unit-normalized mode: ∫₀^∞ L² dξ = 1.
    pub fn new(region: Region, n: usize, k: T, r_reg: T) -> Result<Self> {
        let energy = energy(n, k)?;
        let nf = T::from_usize_lossy(n);
        let ln_n2 = T::lit(2.0).ln() + ln_gamma(nf + T::one())? - ln_gamma(nf + k + T::one())?;
        Ok(Self { region, n, k, energy, norm_prefactor: (T::lit(0.5) * ln_n2).exp(), r_reg })
    }

    /// Outer mode with index `k_plus` whose amplitude makes it continuous with
    /// `inner` at ξ = R: N₊ = N₋ R^{K₋−K₊} L_n^{K₋}(R²)/L_n^{K₊}(R²).
    pub fn matched_outer(inner: &RadialMode<T>, k_plus: T) -> Result<Self> {
        let mut outer = Self::new(Region::Outer, inner.n, k_plus, inner.r_reg)?;
        outer.norm_prefactor = inner.norm_prefactor * continuity_ratio(inner.n, inner.k, k_plus, inner.r_reg)?;
        Ok(outer)
    }
}

/// N₊/N₋ forced by continuity at R.
fn continuity_ratio<T: Real>(n: usize, k_minus: T, k_plus: T, r: T) -> Result<T> {
    let r2 = r * r;
    let pm = laguerre_l(n, k_minus, r2)?.value;
    let pp = laguerre_l(n, k_plus, r2)?.value;
    Ok(r.powf(k_minus - k_plus) * pm / pp)
}

/// K₋ = √(λ² + (ν₁ + εν₂)²).
pub fn k_minus<T: Real>(lambda: T, params: &DunklParams<T>, sector: ParitySector) -> T {
    let d = params.ab_defect(sector);
    (lambda * lambda + d * d).sqrt()
}

/// K₋ with the branch rule λ m_s > 0, under which the constrained radical
/// equals λ/m_s.
pub fn k_minus_branch<T: Real>(lambda: T, m_s: Sign, params: &DunklParams<T>, sector: ParitySector) -> Result<T> {
    if !(lambda * m_s.value::<T>() > T::zero()) {
        return Err(Error::Branch(format!(
            "K- = lambda/m_s needs lambda*m_s > 0, got lambda = {lambda}, m_s = {m_s}; align the spin with the eigenvalue branch"
        )));
    }
    Ok(k_minus(lambda, params, sector))
}

/// √((ϑ−λ)² + (ν₁+εν₂)² + 2ϑ(ν₁ε₁+ν₂ε₂)m_s), the outer index from the outer
/// region's own centrifugal coefficient.
pub fn k_plus_radical<T: Real>(lambda: T, flux: &FluxSpin<T>, params: &DunklParams<T>, sector: ParitySector) -> Result<T> {
    let d = params.ab_defect(sector);
    let th = flux.vartheta;
    let sq = (th - lambda) * (th - lambda)
        + d * d
        + T::lit(2.0) * th * params.reflection_weighted_sum(sector) * flux.m_s.value::<T>();
    if sq < T::zero() {
        return Err(Error::Domain(format!("K+^2 = {sq} is negative")));
    }
    Ok(sq.sqrt())
}

/// K₊ = K₋ − ϑ m_s, cross-checked against [`k_plus_radical`].
///
/// With ϑ = 0 the two regions coincide and no constraint applies. Otherwise
/// ν₁ + εν₂ = 0 and λ m_s > 0 are required.
pub fn k_plus<T: Real>(lambda: T, flux: &FluxSpin<T>, params: &DunklParams<T>, sector: ParitySector) -> Result<T> {
    if flux.vartheta == T::zero() {
        return Ok(k_minus(lambda, params, sector));
    }
    ab_constrain(sector, params).map_err(|r| r.into_error())?;
    let km = k_minus_branch(lambda, flux.m_s, params, sector)?;
    let kp = km - flux.shift();
    if kp <= -T::one() {
        return Err(Error::Normalizability(format!("K+ = {kp} <= -1")));
    }
    let direct = k_plus_radical(lambda, flux, params, sector)?;
    if (kp - direct).abs().to_f64_lossy() > K_PLUS_CONSISTENCY_TOL {
        return Err(Error::Consistency(format!(
            "K- - vartheta*m_s = {kp} disagrees with the outer radical {direct}"
        )));
    }
    Ok(kp)
}

/// E = 2n + K + 1.
pub fn energy<T: Real>(n: usize, k: T) -> Result<T> {
    if !(k > -T::one()) {
        return Err(Error::Domain(format!("K = {k} must exceed -1 for a normalizable mode")));
    }
    Ok(T::lit(2.0) * T::from_usize_lossy(n) + k + T::one())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumRow<T> {
    pub n: usize,
    pub k_minus: T,
    pub k_plus: T,
    pub e_minus: T,
    pub e_plus: T,
}

/// Inner and outer indices and eigenvalues for one (n, λ, m_s, ϑ).
pub fn spectrum_row<T: Real>(
    n: usize,
    lambda: T,
    flux: &FluxSpin<T>,
    params: &DunklParams<T>,
    sector: ParitySector,
) -> Result<SpectrumRow<T>> {
    let kp = k_plus(lambda, flux, params, sector)?;
    let km = if flux.vartheta == T::zero() {
        k_minus(lambda, params, sector)
    } else {
        k_minus_branch(lambda, flux.m_s, params, sector)?
    };
    Ok(SpectrumRow { n, k_minus: km, k_plus: kp, e_minus: energy(n, km)?, e_plus: energy(n, kp)? })
}

/// L(ξ) = N ξ^{K+½} e^{−ξ²/2} L_n^K(ξ²).
pub fn radial_eval<T: Real>(mode: &RadialMode<T>, xi: T) -> Result<T> {
    if !(xi > T::zero()) {
        return Err(Error::Domain(format!("radial_eval needs xi > 0, got {xi}")));
    }
    let p = laguerre_l(mode.n, mode.k, xi * xi)?.value;
    Ok(mode.norm_prefactor * xi.powf(mode.k + T::lit(0.5)) * (-T::lit(0.5) * xi * xi).exp() * p)
}

/// (L, L', L'') at ξ from the analytic derivatives of the Laguerre factor.
pub fn radial_derivatives<T: Real>(mode: &RadialMode<T>, xi: T) -> Result<(T, T, T)> {
    let s = xi * xi;
    let n = mode.n;
    let pe = laguerre_l(n, mode.k, s)?;
    let (p, dp) = (pe.value, pe.derivative);
    let ddp = if n >= 2 { -laguerre_l(n - 1, mode.k + T::one(), s)?.derivative } else { T::zero() };
    let a = mode.k + T::lit(0.5);
    let w = mode.norm_prefactor * xi.powf(a) * (-T::lit(0.5) * s).exp();
    let lw = a / xi - xi;
    let w1 = w * lw;
    let w2 = w * (lw * lw - a / s - T::one());
    let two = T::lit(2.0);
    let l0 = w * p;
    let l1 = w1 * p + w * two * xi * dp;
    let l2 = w2 * p + two * w1 * two * xi * dp + w * (two * dp + T::lit(4.0) * s * ddp);
    Ok((l0, l1, l2))
}

/// max |L'' − (K²−¼)/ξ² L − ξ² L + 2E L| / max |L| over the grid.
pub fn ode_residual<T: Real>(mode: &RadialMode<T>, xi: &[T]) -> Result<f64> {
    ode_residual_with_energy(mode, xi, mode.energy)
}

/// As [`ode_residual`] but with a trial eigenvalue E.
pub fn ode_residual_with_energy<T: Real>(mode: &RadialMode<T>, xi: &[T], e: T) -> Result<f64> {
    let c = mode.k * mode.k - T::lit(0.25);
    let two = T::lit(2.0);
    let mut num = T::zero();
    let mut den = T::zero();
    for &x in xi {
        let (l0, _, l2) = radial_derivatives(mode, x)?;
        let res = l2 - c / (x * x) * l0 - x * x * l0 + two * e * l0;
        num = num.max(res.abs());
        den = den.max(l0.abs());
    }
    Ok((num / den).to_f64_lossy())
}

#[derive(Debug, Clone, Serialize)]
pub struct MatchingStep {
    pub r: f64,
    /// N₊/N₋ from continuity.
    pub continuity_ratio: f64,
    /// R^{ϑ m_s}.
    pub power_law: f64,
    /// R^{ϑ m_s} L_n^{K₋}(0)/L_n^{K₊}(0), the small-R limit of the ratio.
    pub continuity_leading: f64,
    /// [L₊′ − L₋′ + (ϑ m_s/R) L₋] / L₋ at ξ = R.
    pub derivative_defect: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MatchingReport {
    pub n: usize,
    pub k_minus: f64,
    pub k_plus: f64,
    /// K₊ − K₋ + ϑ m_s: the O(1/R) coefficient of the jump, zero when the
    /// indices satisfy the flux relation.
    pub leading_order_mismatch: f64,
    pub steps: Vec<MatchingStep>,
    /// log₂(defect(R)/defect(R/2)) for consecutive halvings.
    pub orders: Vec<f64>,
    /// True if every defect vanishes identically (n = 0, or ϑ = 0).
    pub exact: bool,
}

impl MatchingReport {
    pub fn min_order(&self) -> Option<f64> {
        self.orders.iter().copied().reduce(f64::min)
    }
}

/// Continuity and derivative-jump conditions at ξ = R, R/2, …, R/2^halvings.
///
/// The outer mode is matched for continuity, so the jump reduces to
/// (K₊ − K₋ + ϑm_s)/R + 2R[p₊'/p₊ − p₋'/p₋](R²) with p = L_n^K. The first
/// term is reported separately as `leading_order_mismatch`; the remainder is
/// the O(R) defect whose convergence order is measured.
pub fn matching_report<T: Real>(
    lambda: T,
    flux: &FluxSpin<T>,
    params: &DunklParams<T>,
    sector: ParitySector,
    r: T,
    n: usize,
    halvings: usize,
) -> Result<MatchingReport> {
    if !(r > T::zero() && r <= T::lit(0.1)) {
        return Err(Error::Domain(format!("regularization radius must lie in (0, 0.1], got {r}")));
    }
    let kp = k_plus(lambda, flux, params, sector)?;
    let km = if flux.vartheta == T::zero() {
        k_minus(lambda, params, sector)
    } else {
        k_minus_branch(lambda, flux.m_s, params, sector)?
    };
    let shift = flux.shift();
    let origin_ratio = laguerre_l(n, km, T::zero())?.value / laguerre_l(n, kp, T::zero())?.value;
    let mut steps = Vec::with_capacity(halvings + 1);
    let mut rr = r;
    for _ in 0..=halvings {
        let inner = RadialMode::new(Region::Inner, n, km, rr)?;
        let outer = RadialMode::matched_outer(&inner, kp)?;
        let s = rr * rr;
        let pm = laguerre_l(n, km, s)?;
        let pp = laguerre_l(n, kp, s)?;
        let defect = T::lit(2.0) * rr * (pp.derivative / pp.value - pm.derivative / pm.value);
        let power_law = rr.powf(shift);
        steps.push(MatchingStep {
            r: rr.to_f64_lossy(),
            continuity_ratio: (outer.norm_prefactor / inner.norm_prefactor).to_f64_lossy(),
            power_law: power_law.to_f64_lossy(),
            continuity_leading: (power_law * origin_ratio).to_f64_lossy(),
            derivative_defect: defect.to_f64_lossy(),
        });
        rr = rr * T::lit(0.5);
    }
    let exact = steps.iter().all(|s| s.derivative_defect == 0.0);
    let orders = if exact {
        Vec::new()
    } else {
        steps.windows(2).map(|w| (w[0].derivative_defect / w[1].derivative_defect).abs().log2()).collect()
    };
    Ok(MatchingReport {
        n,
        k_minus: km.to_f64_lossy(),
        k_plus: kp.to_f64_lossy(),
        leading_order_mismatch: (kp - km + shift).to_f64_lossy(),
        steps,
        orders,
        exact,
    })
}

/// |[δ(δ−1) − 2ν₁ν₂(1−ε)] − [(ν₁+εν₂)² − ¼]|.
pub fn sector_identity_check<T: Real>(params: &DunklParams<T>, sector: ParitySector) -> T {
    let delta = params.delta();
    let eps = sector.eps().value::<T>();
    let lhs = delta * (delta - T::one()) - T::lit(2.0) * params.nu1 * params.nu2 * (T::one() - eps);
    let d = params.ab_defect(sector);
    let rhs = d * d - T::lit(0.25);
    (lhs - rhs).abs()
}

/// Whether ϑ ≠ 0 and the constraint fails; the gate every flux-dependent
/// entry point applies.
pub fn constraint_blocks<T: Real>(flux: &FluxSpin<T>, params: &DunklParams<T>, sector: ParitySector) -> bool {
    flux.vartheta != T::zero() && params.ab_defect(sector).abs().to_f64_lossy() > CONSTRAINT_TOL
}
