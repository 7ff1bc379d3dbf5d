//! Dense diagonalization of the grid J_φ = iA with A real.
//!
//! Eigenvalues μ of A give λ = iμ; true eigenpairs have μ on the imaginary
//! axis. High-frequency grid modes are discarded by a Nyquist filter.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::angular::mode_battery;
use crate::dunkl_ops::{angular_operator, DunklParams, OperatorLabel, ParitySector};
use crate::error::Result;
use crate::scalar::Sign;

/// Largest |Re λ|/max(1, |λ|) accepted as a real eigenvalue.
pub const REALNESS_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Serialize)]
pub struct AngularEigResult {
    pub n: usize,
    /// Real eigenvalues with |λ| ≤ N/4, ascending.
    pub eigenvalues: Vec<f64>,
    pub discarded: usize,
}

pub fn angular_eig(n: usize, params: &DunklParams<f64>) -> Result<AngularEigResult> {
    let j = angular_operator(OperatorLabel::JPhi, n, params)?;
    let a = DMatrix::from_row_slice(n, n, &j.matrix);
    let bound = n as f64 / 4.0;
    let mut eigenvalues = Vec::new();
    let mut discarded = 0;
    for mu in a.complex_eigenvalues().iter() {
        // λ = iμ = −Im μ + i Re μ.
        let lam = -mu.im;
        let imag = mu.re;
        if imag.abs() <= REALNESS_TOL * lam.abs().max(1.0) && lam.abs() <= bound {
            eigenvalues.push(lam);
        } else {
            discarded += 1;
        }
    }
    eigenvalues.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(AngularEigResult { n, eigenvalues, discarded })
}

#[derive(Debug, Clone, Serialize)]
pub struct AngularLevel {
    pub eps: Sign,
    pub l: f64,
    pub sign: Sign,
    pub closed_form: f64,
    pub nearest_discrete: f64,
    pub abs_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AngularComparison {
    pub n: usize,
    pub nu1: f64,
    pub nu2: f64,
    pub levels: Vec<AngularLevel>,
    pub max_abs_error: f64,
    pub discrete: AngularEigResult,
}

/// Every closed-form λ with |λ| ≤ N/8 located in the discrete spectrum.
pub fn compare_angular_spectrum(n: usize, params: &DunklParams<f64>) -> Result<AngularComparison> {
    let discrete = angular_eig(n, params)?;
    let bound = n as f64 / 8.0;
    let mut levels = Vec::new();
    for sector in [ParitySector::new(Sign::Plus, Sign::Plus), ParitySector::new(Sign::Plus, Sign::Minus)] {
        let mut count = 1;
        loop {
            let modes = mode_battery(sector, *params, count)?;
            let last = modes.last().expect("nonempty battery");
            if last.lambda.abs() > bound {
                break;
            }
            count += 1;
        }
        for m in mode_battery(sector, *params, count - 1)? {
            let nearest = discrete
                .eigenvalues
                .iter()
                .copied()
                .min_by(|a, b| (a - m.lambda).abs().partial_cmp(&(b - m.lambda).abs()).unwrap())
                .unwrap_or(f64::NAN);
            levels.push(AngularLevel {
                eps: sector.eps(),
                l: m.l.value(),
                sign: m.sign,
                closed_form: m.lambda,
                nearest_discrete: nearest,
                abs_error: (nearest - m.lambda).abs(),
            });
        }
    }
    let max_abs_error = levels.iter().map(|l| l.abs_error).fold(0.0, f64::max);
    Ok(AngularComparison { n, nu1: params.nu1, nu2: params.nu2, levels, max_abs_error, discrete })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn undeformed_spectrum_is_the_integers() {
        let r = angular_eig(64, &DunklParams::undeformed()).unwrap();
        for k in -8i32..=8 {
            assert!(r.eigenvalues.iter().any(|&l| (l - k as f64).abs() < 1e-9), "missing {k}");
        }
        assert!(r.eigenvalues.iter().any(|l| l.abs() < 1e-9));
    }

    #[test]
    fn deformed_spectrum_matches_closed_forms() {
        for &(a, b) in &[(0.3, -0.3), (0.25, 0.25), (0.1, 0.6)] {
            let p = DunklParams::new(a, b).unwrap();
            let c = compare_angular_spectrum(128, &p).unwrap();
            assert!(c.max_abs_error <= 1e-5, "({a},{b}) {}", c.max_abs_error);
            assert!(c.levels.len() >= 8);
        }
    }

    #[test]
    fn constrained_plus_branch_is_even_integers() {
        let p = DunklParams::new(0.3, -0.3).unwrap();
        let r = angular_eig(128, &p).unwrap();
        for l in 1..=6 {
            for s in [-1.0, 1.0] {
                let target = s * 2.0 * l as f64;
                assert!(r.eigenvalues.iter().any(|&x| (x - target).abs() < 1e-6));
            }
        }
    }
}
