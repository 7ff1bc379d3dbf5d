//! Second-order finite-difference discretization of
//! −d²/dξ² + (K² − ¼)/ξ² + ξ² on (0, ξ_max) with Dirichlet ends.

use serde::Serialize;

use super::tridiag::{lowest_eigenvalues, SymTridiagonal};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Relative bisection width for the discrete levels.
const BISECTION_TOL: f64 = 1e-14;

/// Nodes ξ_i = i h, h = ξ_max/N, i = 1 … N−1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialGrid<T> {
    pub xi_max: T,
    pub n: usize,
}

impl<T: Real> RadialGrid<T> {
    pub fn new(xi_max: T, n: usize) -> Result<Self> {
        if !(xi_max > T::zero()) || !xi_max.is_finite() {
            return Err(Error::Grid(format!("xi_max must be positive, got {xi_max}")));
        }
        if n < 2 {
            return Err(Error::Grid(format!("radial grid needs N >= 2 intervals, got {n}")));
        }
        Ok(Self { xi_max, n })
    }

    pub fn step(&self) -> T {
        self.xi_max / T::from_usize_lossy(self.n)
    }

    pub fn nodes(&self) -> Vec<T> {
        let h = self.step();
        (1..self.n).map(|i| T::from_usize_lossy(i) * h).collect()
    }
}

pub fn radial_operator<T: Real>(k: T, grid: &RadialGrid<T>) -> Result<SymTridiagonal<T>> {
    if !(k > -T::one()) {
        return Err(Error::Domain(format!("K = {k} must exceed -1")));
    }
    let h = grid.step();
    let inv_h2 = (h * h).recip();
    let c = k * k - T::lit(0.25);
    let diag = grid.nodes().iter().map(|&x| T::lit(2.0) * inv_h2 + c / (x * x) + x * x).collect();
    let offdiag = vec![-inv_h2; grid.n - 2];
    SymTridiagonal::new(diag, offdiag)
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelComparison {
    pub n: usize,
    /// 2(2n + K + 1).
    pub closed_form: f64,
    pub discrete: f64,
    pub relative_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RadialComparison {
    pub k: f64,
    pub grid_n: usize,
    pub xi_max: f64,
    pub levels: Vec<LevelComparison>,
    pub max_relative_error: f64,
    pub truncation_warning: Option<String>,
}

impl RadialComparison {
    pub fn discrete(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.discrete).collect()
    }
}

/// Lowest n_max + 1 discrete levels against 2(2n + K + 1).
pub fn compare_radial_spectrum<T: Real>(k: T, n_max: usize, grid: &RadialGrid<T>) -> Result<RadialComparison> {
    let op = radial_operator(k, grid)?;
    let eig = lowest_eigenvalues(&op, n_max + 1, T::lit(BISECTION_TOL))?;
    let two = T::lit(2.0);
    let levels: Vec<LevelComparison> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(n, &mu)| {
            let exact = two * (two * T::from_usize_lossy(n) + k + T::one());
            LevelComparison {
                n,
                closed_form: exact.to_f64_lossy(),
                discrete: mu.to_f64_lossy(),
                relative_error: ((mu - exact) / exact).abs().to_f64_lossy(),
            }
        })
        .collect();
    let e_top = two * T::from_usize_lossy(n_max) + k + T::one();
    let needed = two * (two * e_top).sqrt();
    let truncation_warning = (grid.xi_max < needed).then(|| {
        format!("xi_max = {} is below 2*sqrt(2E) = {needed} for n = {n_max}; truncation error may dominate", grid.xi_max)
    });
    let max_relative_error = levels.iter().map(|l| l.relative_error).fold(0.0, f64::max);
    Ok(RadialComparison {
        k: k.to_f64_lossy(),
        grid_n: grid.n,
        xi_max: grid.xi_max.to_f64_lossy(),
        levels,
        max_relative_error,
        truncation_warning,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct FluxShiftReport {
    pub k_minus: f64,
    pub k_plus: f64,
    /// 2(K₋ − K₊) = 2ϑ m_s.
    pub expected_shift: f64,
    /// μ_n(K₋) − μ_n(K₊) per level.
    pub level_shifts: Vec<f64>,
    pub max_deviation: f64,
    pub inner: RadialComparison,
    pub outer: RadialComparison,
}

/// Two independent diagonalizations at K₋ and K₊ and their level-by-level difference.
pub fn flux_shift_report<T: Real>(k_minus: T, k_plus: T, n_max: usize, grid: &RadialGrid<T>) -> Result<FluxShiftReport> {
    let inner = compare_radial_spectrum(k_minus, n_max, grid)?;
    let outer = compare_radial_spectrum(k_plus, n_max, grid)?;
    let expected = 2.0 * (k_minus - k_plus).to_f64_lossy();
    let level_shifts: Vec<f64> = inner.levels.iter().zip(&outer.levels).map(|(a, b)| a.discrete - b.discrete).collect();
    let max_deviation = level_shifts.iter().map(|s| (s - expected).abs()).fold(0.0, f64::max);
    Ok(FluxShiftReport {
        k_minus: k_minus.to_f64_lossy(),
        k_plus: k_plus.to_f64_lossy(),
        expected_shift: expected,
        level_shifts,
        max_deviation,
        inner,
        outer,
    })
}

/// Maximum relative level error for each grid size, plus successive error ratios.
pub fn radial_convergence<T: Real>(k: T, n_max: usize, xi_max: T, sizes: &[usize]) -> Result<(Vec<f64>, Vec<f64>)> {
    let errors = sizes
        .iter()
        .map(|&n| Ok(compare_radial_spectrum(k, n_max, &RadialGrid::new(xi_max, n)?)?.max_relative_error))
        .collect::<Result<Vec<f64>>>()?;
    let ratios = errors.windows(2).map(|w| w[0] / w[1]).collect();
    Ok((errors, ratios))
}
