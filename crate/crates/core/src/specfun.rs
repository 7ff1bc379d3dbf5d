//! Log-gamma, Jacobi and generalized Laguerre polynomials, and the angular
//! normalization constants.
//!
//! Polynomials are evaluated with ascending three-term recurrences. The
//! explicit hypergeometric series is kept in the test module as an oracle.

use crate::angular::AngularIndex;
use crate::dunkl_ops::{DunklParams, ParitySector};
use crate::error::{Error, Result};
use crate::scalar::{Real, Sign};

/// Value and first derivative of an orthogonal polynomial at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolyEval<T> {
    pub degree: usize,
    pub value: T,
    pub derivative: T,
}

// Stirling series coefficients B_{2k} / (2k (2k-1)), k = 1..8.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
];

/// Below this argument the recurrence Γ(x+1) = xΓ(x) shifts upward first.
const STIRLING_MIN: f64 = 15.0;

/// Natural log of Γ(x) for x > 0.
pub fn ln_gamma<T: Real>(x: T) -> Result<T> {
    if !(x > T::zero()) || !x.is_finite() {
        return Err(Error::Domain(format!("ln_gamma requires x > 0, got {x}")));
    }
    let mut z = x;
    let mut shift = T::one();
    let min = T::lit(STIRLING_MIN);
    while z < min {
        shift = shift * z;
        z = z + T::one();
    }
    let half = T::lit(0.5);
    let ln_2pi = (T::PI() + T::PI()).ln();
    let inv = z.recip();
    let inv2 = inv * inv;
    let mut series = T::zero();
    let mut pow = inv;
    for c in STIRLING {
        series = series + T::lit(c) * pow;
        pow = pow * inv2;
    }
    Ok((z - half) * z.ln() - z + half * ln_2pi + series - shift.ln())
}

/// Jacobi polynomial P_n^(a,b)(x) and its derivative.
pub fn jacobi_p<T: Real>(n: usize, a: T, b: T, x: T) -> Result<PolyEval<T>> {
    if !(a > -T::one()) || !(b > -T::one()) {
        return Err(Error::Domain(format!(
            "Jacobi parameters must exceed -1, got a = {a}, b = {b}"
        )));
    }
    let one = T::one();
    let two = T::lit(2.0);
    if n == 0 {
        return Ok(PolyEval { degree: 0, value: one, derivative: T::zero() });
    }
    let mut p_prev = one;
    let mut d_prev = T::zero();
    let mut p = (a - b) / two + (a + b + two) * x / two;
    let mut d = (a + b + two) / two;
    for k in 2..=n {
        let k = T::from_usize_lossy(k);
        let s = two * k + a + b;
        let denom = two * k * (k + a + b) * (s - two);
        let lin = (s - one) * s * (s - two);
        let cst = (s - one) * (a * a - b * b);
        let back = two * (k + a - one) * (k + b - one) * s;
        let p_next = ((lin * x + cst) * p - back * p_prev) / denom;
        let d_next = (lin * p + (lin * x + cst) * d - back * d_prev) / denom;
        p_prev = p;
        d_prev = d;
        p = p_next;
        d = d_next;
    }
    Ok(PolyEval { degree: n, value: p, derivative: d })
}

fn laguerre_value<T: Real>(n: usize, alpha: T, x: T) -> T {
    let one = T::one();
    if n == 0 {
        return one;
    }
    let mut l_prev = one;
    let mut l = one + alpha - x;
    for k in 1..n {
        let kf = T::from_usize_lossy(k);
        let next = ((kf + kf + one + alpha - x) * l - (kf + alpha) * l_prev) / (kf + one);
        l_prev = l;
        l = next;
    }
    l
}

/// Generalized Laguerre polynomial L_n^alpha(x) and its derivative
/// (d/dx L_n^alpha = -L_{n-1}^{alpha+1}).
pub fn laguerre_l<T: Real>(n: usize, alpha: T, x: T) -> Result<PolyEval<T>> {
    if !(alpha > -T::one()) {
        return Err(Error::Domain(format!("Laguerre alpha must exceed -1, got {alpha}")));
    }
    let value = laguerre_value(n, alpha, x);
    let derivative = if n == 0 {
        T::zero()
    } else {
        -laguerre_value(n - 1, alpha + T::one(), x)
    };
    Ok(PolyEval { degree: n, value, derivative })
}

/// Normalization pair of the two-term angular eigenfunction: (A_l, A'_l) in the
/// ε = +1 sector, (B_l, B'_l) in the ε = −1 sector.
///
/// Each constant normalizes its own component to unit norm under the angular
/// measure |cos φ|^{2ν₁}|sin φ|^{2ν₂} dφ on [−π, π). For the constant ε = +1,
/// l = 0 mode the second constant is zero.
pub fn angular_norms<T: Real>(
    sector: ParitySector,
    l: AngularIndex,
    params: &DunklParams<T>,
) -> Result<(T, T)> {
    l.check_sector(sector)?;
    let (nu1, nu2) = (params.nu1, params.nu2);
    let half = T::lit(0.5);
    let two = T::lit(2.0);
    let lv: T = l.value();
    let nu = nu1 + nu2;
    let ln_pos = |x: T, what: &str| -> Result<T> {
        if x > T::zero() {
            Ok(x.ln())
        } else {
            Err(Error::Domain(format!("{what} = {x} must be positive")))
        }
    };
    match sector.eps() {
        Sign::Plus if l.twice() == 0 => {
            let ln_a = ln_gamma(nu + T::one())?
                - two.ln()
                - ln_gamma(nu1 + half)?
                - ln_gamma(nu2 + half)?;
            Ok(((half * ln_a).exp(), T::zero()))
        }
        Sign::Plus => {
            let common = ln_pos(two * lv + nu, "2l + nu1 + nu2")?
                - two.ln()
                - ln_gamma(lv + nu1 + half)?
                - ln_gamma(lv + nu2 + half)?;
            let ln_a = common + ln_gamma(lv + nu)? + ln_gamma(lv + T::one())?;
            let ln_a_prime = common + ln_gamma(lv + nu + T::one())? + ln_gamma(lv)?;
            Ok(((half * ln_a).exp(), (half * ln_a_prime).exp()))
        }
        Sign::Minus => {
            let common = ln_pos(two * lv + nu, "2l + nu1 + nu2")? - two.ln()
                + ln_gamma(lv + nu + half)?
                + ln_gamma(lv + half)?;
            let ln_b = common - ln_gamma(lv + nu1 + T::one())? - ln_gamma(lv + nu2)?;
            let ln_b_prime = common - ln_gamma(lv + nu1)? - ln_gamma(lv + nu2 + T::one())?;
            Ok(((half * ln_b).exp(), (half * ln_b_prime).exp()))
        }
    }
}
