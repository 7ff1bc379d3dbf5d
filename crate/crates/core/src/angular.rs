//! Closed-form eigenpairs of the angular operator J_φ in the two parity
//! sectors, and the flux-induced constraint on (ν₁, ν₂).
//!
//! With u = −cos 2φ the eigenfunctions are
//!
//!   ε = +1:  Φ = [A_l P_l^{(ν₁−½, ν₂−½)}(u) + i s A'_l sinφ cosφ P_{l−1}^{(ν₁+½, ν₂+½)}(u)] / √2,
//!   ε = −1:  Φ = [B_l cosφ P_{l−½}^{(ν₁+½, ν₂−½)}(u) − i s B'_l sinφ P_{l−½}^{(ν₁−½, ν₂+½)}(u)] / √2,
//!
//! with s the sign of λ. The l = 0 member of the ε = +1 tower is the constant A₀.

use std::fmt;

use num_complex::Complex;
use serde::{Deserialize, Serialize, Serializer};

use crate::dunkl_ops::{angular_operator, permute, AngularGrid, DunklParams, OperatorLabel, ParitySector};
use crate::error::{Error, Result};
use crate::quadrature::dunkl_angular;
use crate::scalar::{Real, Sign};
use crate::specfun::{angular_norms, jacobi_p};

/// Tolerance on |ν₁ + εν₂| below which the flux constraint counts as satisfied.
pub const CONSTRAINT_TOL: f64 = 1e-12;

/// Angular quantum number l, stored as 2l so that half-odd values are exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Deserialize)]
#[serde(try_from = "f64")]
pub struct AngularIndex {
    twice: u32,
}

impl AngularIndex {
    pub fn from_twice(twice: u32) -> Self {
        Self { twice }
    }

    pub fn integer(l: u32) -> Self {
        Self { twice: 2 * l }
    }

    /// k + ½.
    pub fn half_odd(k: u32) -> Self {
        Self { twice: 2 * k + 1 }
    }

    pub fn twice(&self) -> u32 {
        self.twice
    }

    pub fn value<T: Real>(&self) -> T {
        T::from_usize_lossy(self.twice as usize) * T::lit(0.5)
    }

    /// Lowest admissible index of the sector's tower.
    pub fn lowest(eps: Sign) -> Self {
        match eps {
            Sign::Plus => Self::integer(0),
            Sign::Minus => Self::half_odd(0),
        }
    }

    /// ε = +1 takes l ∈ {0, 1, 2, …}; ε = −1 takes l ∈ {½, 3/2, …}.
    pub fn check_sector(&self, sector: ParitySector) -> Result<()> {
        let even = self.twice % 2 == 0;
        match (sector.eps(), even) {
            (Sign::Plus, true) | (Sign::Minus, false) => Ok(()),
            (Sign::Plus, false) => Err(Error::Admissibility(format!(
                "l = {self} is half-odd but the eps = +1 sector needs an integer l"
            ))),
            (Sign::Minus, true) => Err(Error::Admissibility(format!(
                "l = {self} is an integer but the eps = -1 sector needs l in {{1/2, 3/2, ...}}"
            ))),
        }
    }
}

impl TryFrom<f64> for AngularIndex {
    type Error = Error;

    fn try_from(x: f64) -> Result<Self> {
        let t = 2.0 * x;
        if !(t >= 0.0) || t.fract() != 0.0 || t > u32::MAX as f64 {
            return Err(Error::Admissibility(format!("l = {x} is not a nonnegative multiple of 1/2")));
        }
        Ok(Self { twice: t as u32 })
    }
}

impl fmt::Display for AngularIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twice % 2 == 0 {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

impl Serialize for AngularIndex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.twice as f64 / 2.0)
    }
}

/// λ_ε: sign·2√(l(l+ν₁+ν₂)) for ε = +1, sign·2√((l+ν₁)(l+ν₂)) for ε = −1.
pub fn lambda_of<T: Real>(sector: ParitySector, l: AngularIndex, sign: Sign, params: &DunklParams<T>) -> Result<T> {
    l.check_sector(sector)?;
    let lv: T = l.value();
    let radicand = match sector.eps() {
        Sign::Plus => lv * (lv + params.nu1 + params.nu2),
        Sign::Minus => (lv + params.nu1) * (lv + params.nu2),
    };
    if radicand < T::zero() {
        return Err(Error::Domain(format!("eigenvalue radicand {radicand} is negative for l = {l}")));
    }
    Ok(sign.value::<T>() * T::lit(2.0) * radicand.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AngularMode<T> {
    pub sector: ParitySector,
    pub l: AngularIndex,
    pub sign: Sign,
    pub lambda: T,
    pub params: DunklParams<T>,
    /// (A_l, A'_l) or (B_l, B'_l).
    pub norms: (T, T),
}

impl<T: Real> AngularMode<T> {
    pub fn new(sector: ParitySector, l: AngularIndex, sign: Sign, params: DunklParams<T>) -> Result<Self> {
        let lambda = lambda_of(sector, l, sign, &params)?;
        let norms = angular_norms(sector, l, &params)?;
        Ok(Self { sector, l, sign, lambda, params, norms })
    }

    pub fn eps(&self) -> Sign {
        self.sector.eps()
    }

    pub fn is_constant(&self) -> bool {
        self.eps() == Sign::Plus && self.l.twice() == 0
    }

    /// The mode with the opposite eigenvalue branch.
    pub fn partner(&self) -> Result<Self> {
        Self::new(self.sector, self.l, self.sign.flip(), self.params)
    }
}

/// Modes ordered by l, then λ > 0 before λ < 0; `count` entries.
pub fn mode_battery<T: Real>(sector: ParitySector, params: DunklParams<T>, count: usize) -> Result<Vec<AngularMode<T>>> {
    let mut out = Vec::with_capacity(count);
    let mut twice = AngularIndex::lowest(sector.eps()).twice();
    while out.len() < count {
        let l = AngularIndex::from_twice(twice);
        let mode = AngularMode::new(sector, l, Sign::Plus, params)?;
        let constant = mode.is_constant();
        out.push(mode);
        if !constant && out.len() < count {
            out.push(AngularMode::new(sector, l, Sign::Minus, params)?);
        }
        twice += 2;
    }
    Ok(out)
}

/// Φ(φ) for the given mode.
pub fn eval_phi<T: Real>(mode: &AngularMode<T>, phi: T) -> Result<Complex<T>> {
    let (nu1, nu2) = (mode.params.nu1, mode.params.nu2);
    let half = T::lit(0.5);
    let (c0, c1) = mode.norms;
    if mode.is_constant() {
        return Ok(Complex::new(c0, T::zero()));
    }
    let u = -(phi + phi).cos();
    let (s, c) = phi.sin_cos();
    let sgn = mode.sign.value::<T>();
    let inv_sqrt2 = T::SQRT_2().recip();
    let twice = mode.l.twice() as usize;
    match mode.eps() {
        Sign::Plus => {
            let l = twice / 2;
            let f = jacobi_p(l, nu1 - half, nu2 - half, u)?.value;
            let g = s * c * jacobi_p(l - 1, nu1 + half, nu2 + half, u)?.value;
            Ok(Complex::new(c0 * f, sgn * c1 * g) * inv_sqrt2)
        }
        Sign::Minus => {
            let k = (twice - 1) / 2;
            let f = c * jacobi_p(k, nu1 + half, nu2 - half, u)?.value;
            let g = s * jacobi_p(k, nu1 - half, nu2 + half, u)?.value;
            Ok(Complex::new(c0 * f, -sgn * c1 * g) * inv_sqrt2)
        }
    }
}

pub fn sample_on_grid<T: Real>(mode: &AngularMode<T>, grid: &AngularGrid<T>) -> Result<Vec<Complex<T>>> {
    grid.nodes().iter().map(|&p| eval_phi(mode, p)).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct ModeResidual {
    pub n: usize,
    pub lambda: f64,
    /// ‖J_φΦ − λΦ‖∞ / ‖Φ‖∞.
    pub residual: f64,
}

/// Eigen-residual of the mode on an N-point grid.
pub fn verify_mode<T: Real>(mode: &AngularMode<T>, n: usize) -> Result<ModeResidual> {
    verify_mode_against(mode, n, mode.lambda)
}

/// Eigen-residual against an arbitrary trial eigenvalue.
pub fn verify_mode_against<T: Real>(mode: &AngularMode<T>, n: usize, lambda: T) -> Result<ModeResidual> {
    let j = angular_operator(OperatorLabel::JPhi, n, &mode.params)?;
    let v = sample_on_grid(mode, &j.grid)?;
    let jv = j.apply(&v);
    let num = jv.iter().zip(&v).map(|(a, b)| (*a - *b * lambda).norm()).fold(T::zero(), T::max);
    let den = v.iter().map(|z| z.norm()).fold(T::zero(), T::max);
    Ok(ModeResidual { n, lambda: lambda.to_f64_lossy(), residual: (num / den).to_f64_lossy() })
}

/// max |R₁R₂Φ − εΦ| on the grid.
pub fn sector_residual<T: Real>(mode: &AngularMode<T>, n: usize) -> Result<f64> {
    let grid = AngularGrid::<T>::new(n)?;
    let v = sample_on_grid(mode, &grid)?;
    let rot = permute(grid.r1(), &permute(grid.r2(), &v));
    let eps = mode.eps().value::<T>();
    Ok(rot.iter().zip(&v).map(|(a, b)| (*a - *b * eps).norm()).fold(T::zero(), T::max).to_f64_lossy())
}

/// Gram matrix ⟨Φ_a, Φ_b⟩ under |cos φ|^{2ν₁}|sin φ|^{2ν₂} dφ.
///
/// All modes must share the same parameters. The quadrature is exact for the
/// polynomial degrees present once `per_quadrant` exceeds the largest l + 1.
pub fn gram_matrix<T: Real>(modes: &[AngularMode<T>], per_quadrant: usize) -> Result<Vec<Vec<Complex<T>>>> {
    let Some(first) = modes.first() else {
        return Ok(Vec::new());
    };
    if modes.iter().any(|m| m.params != first.params) {
        return Err(Error::Domain("Gram matrix modes must share one parameter pair".into()));
    }
    let q = dunkl_angular(per_quadrant, &first.params)?;
    let samples: Vec<Vec<Complex<T>>> =
        modes.iter().map(|m| q.nodes.iter().map(|&p| eval_phi(m, p)).collect::<Result<Vec<_>>>()).collect::<Result<_>>()?;
    Ok(samples
        .iter()
        .map(|a| {
            samples
                .iter()
                .map(|b| {
                    a.iter().zip(b).zip(&q.weights).fold(Complex::new(T::zero(), T::zero()), |acc, ((x, y), &w)| {
                        acc + x.conj() * y * w
                    })
                })
                .collect()
        })
        .collect())
}

/// max |G − I| over the Gram matrix.
pub fn orthonormality_defect<T: Real>(modes: &[AngularMode<T>], per_quadrant: usize) -> Result<f64> {
    let g = gram_matrix(modes, per_quadrant)?;
    let mut worst: f64 = 0.0;
    for (i, row) in g.iter().enumerate() {
        for (j, z) in row.iter().enumerate() {
            let target = if i == j { T::one() } else { T::zero() };
            worst = worst.max((*z - target).norm().to_f64_lossy());
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstraintReport {
    pub eps: Sign,
    pub nu1: f64,
    pub nu2: f64,
    /// ν₁ + εν₂.
    pub defect: f64,
    pub required: String,
}

impl ConstraintReport {
    pub fn message(&self) -> String {
        format!(
            "AB flux constraint nu1 + eps*nu2 = 0 violated in the eps = {} sector: nu1 + eps*nu2 = {:e}; requires {}",
            self.eps, self.defect, self.required
        )
    }

    pub fn into_error(self) -> Error {
        Error::ConstraintViolation(self.message())
    }
}

impl fmt::Display for ConstraintReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message())
    }
}

/// Returns the parameters unchanged when ν₁ + εν₂ = 0 (within
/// [`CONSTRAINT_TOL`]), otherwise a report naming the required relation.
pub fn ab_constrain<T: Real>(
    sector: ParitySector,
    params: &DunklParams<T>,
) -> std::result::Result<DunklParams<T>, ConstraintReport> {
    let defect = params.ab_defect(sector);
    if defect.abs().to_f64_lossy() <= CONSTRAINT_TOL {
        return Ok(*params);
    }
    let required = match sector.eps() {
        Sign::Plus => "nu1 = -nu2",
        Sign::Minus => "nu1 = nu2",
    };
    Err(ConstraintReport {
        eps: sector.eps(),
        nu1: params.nu1.to_f64_lossy(),
        nu2: params.nu2.to_f64_lossy(),
        defect: defect.to_f64_lossy(),
        required: required.to_string(),
    })
}
