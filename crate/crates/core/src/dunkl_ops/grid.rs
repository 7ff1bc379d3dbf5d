//! Dunkl angular operators on a half-step-offset periodic grid.
//!
//! Nodes are φ_k = −π + (k + ½)·2π/N with N divisible by 4, so both
//! reflections φ → −φ and φ → π − φ permute the nodes and no node sits on a
//! multiple of π/2. Derivatives use the trigonometric interpolation
//! (spectral) differentiation matrices.

use num_complex::Complex;
use serde::Serialize;

use super::DunklParams;
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OperatorLabel {
    BPhi,
    JPhi,
    R1,
    R2,
    Identity,
}

/// The node set and the two reflection permutations.
#[derive(Debug, Clone)]
pub struct AngularGrid<T> {
    n: usize,
    nodes: Vec<T>,
    /// R₁: φ → π − φ (x → −x).
    r1: Vec<usize>,
    /// R₂: φ → −φ (y → −y).
    r2: Vec<usize>,
}

impl<T: Real> AngularGrid<T> {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n % 4 != 0 {
            return Err(Error::Size(format!("angular grid size must be a positive multiple of 4, got {n}")));
        }
        let h = (T::PI() + T::PI()) / T::from_usize_lossy(n);
        let half = T::lit(0.5);
        let nodes = (0..n).map(|k| -T::PI() + (T::from_usize_lossy(k) + half) * h).collect();
        let r2 = (0..n).map(|k| n - 1 - k).collect();
        let r1 = (0..n).map(|k| (n / 2 + n - 1 - k) % n).collect();
        Ok(Self { n, nodes, r1, r2 })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn step(&self) -> T {
        (T::PI() + T::PI()) / T::from_usize_lossy(self.n)
    }

    pub fn r1(&self) -> &[usize] {
        &self.r1
    }

    pub fn r2(&self) -> &[usize] {
        &self.r2
    }

    pub fn sample<V: Copy>(&self, f: impl Fn(T) -> V) -> Vec<V> {
        self.nodes.iter().map(|&p| f(p)).collect()
    }

    /// First-derivative matrix, row-major.
    pub fn diff1(&self) -> Vec<T> {
        let n = self.n;
        let h = self.step();
        let half = T::lit(0.5);
        let mut m = vec![T::zero(); n * n];
        for j in 0..n {
            for k in 0..n {
                if j == k {
                    continue;
                }
                let d = j as isize - k as isize;
                let sign = if d.rem_euclid(2) == 0 { T::one() } else { -T::one() };
                let arg = T::from_usize_lossy(d.unsigned_abs()) * h * half;
                let cot = arg.cos() / arg.sin();
                let cot = if d < 0 { -cot } else { cot };
                m[j * n + k] = half * sign * cot;
            }
        }
        m
    }

    /// Second-derivative matrix, row-major.
    pub fn diff2(&self) -> Vec<T> {
        let n = self.n;
        let h = self.step();
        let half = T::lit(0.5);
        let diag = -(T::PI() * T::PI()) / (T::lit(3.0) * h * h) - T::lit(1.0 / 6.0);
        let mut m = vec![T::zero(); n * n];
        for j in 0..n {
            for k in 0..n {
                if j == k {
                    m[j * n + k] = diag;
                    continue;
                }
                let d = j as isize - k as isize;
                let sign = if d.rem_euclid(2) == 0 { T::one() } else { -T::one() };
                let s = (T::from_usize_lossy(d.unsigned_abs()) * h * half).sin();
                m[j * n + k] = -sign * half / (s * s);
            }
        }
        m
    }
}

/// Dense N×N operator. When `imaginary_unit` is set the operator acts as
/// i·`matrix`; J_φ is stored this way so that `matrix` stays real.
#[derive(Debug, Clone)]
pub struct AngularGridOperator<T> {
    pub label: OperatorLabel,
    pub n: usize,
    pub matrix: Vec<T>,
    pub imaginary_unit: bool,
    pub grid: AngularGrid<T>,
}

impl<T: Real> AngularGridOperator<T> {
    pub fn entry(&self, row: usize, col: usize) -> T {
        self.matrix[row * self.n + col]
    }

    /// Applies the real matrix part to a real vector.
    pub fn apply_matrix(&self, v: &[T]) -> Vec<T> {
        let n = self.n;
        (0..n)
            .map(|j| {
                let row = &self.matrix[j * n..(j + 1) * n];
                row.iter().zip(v).fold(T::zero(), |acc, (&a, &b)| acc + a * b)
            })
            .collect()
    }

    pub fn apply(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        let re: Vec<T> = v.iter().map(|c| c.re).collect();
        let im: Vec<T> = v.iter().map(|c| c.im).collect();
        let are = self.apply_matrix(&re);
        let aim = self.apply_matrix(&im);
        are.into_iter()
            .zip(aim)
            .map(|(r, i)| {
                let c = Complex::new(r, i);
                if self.imaginary_unit {
                    c * Complex::i()
                } else {
                    c
                }
            })
            .collect()
    }
}

fn permutation_matrix<T: Real>(perm: &[usize]) -> Vec<T> {
    let n = perm.len();
    let mut m = vec![T::zero(); n * n];
    for (row, &col) in perm.iter().enumerate() {
        m[row * n + col] = T::one();
    }
    m
}

/// Builds B_φ, J_φ, either reflection, or the identity on an N-point grid.
///
/// B_φ = −½∂² + (ν₁ tan φ − ν₂ cot φ)∂ + ν₁(1 − R₁)/(2cos²φ) + ν₂(1 − R₂)/(2sin²φ),
/// J_φ = i(∂ + ν₂ cot φ (1 − R₂) − ν₁ tan φ (1 − R₁)).
pub fn angular_operator<T: Real>(
    label: OperatorLabel,
    n: usize,
    params: &DunklParams<T>,
) -> Result<AngularGridOperator<T>> {
    let grid = AngularGrid::<T>::new(n)?;
    let (nu1, nu2) = (params.nu1, params.nu2);
    let half = T::lit(0.5);
    let (matrix, imaginary_unit) = match label {
        OperatorLabel::Identity => (permutation_matrix::<T>(&(0..n).collect::<Vec<_>>()), false),
        OperatorLabel::R1 => (permutation_matrix::<T>(grid.r1()), false),
        OperatorLabel::R2 => (permutation_matrix::<T>(grid.r2()), false),
        OperatorLabel::JPhi => {
            let mut m = grid.diff1();
            for (j, &phi) in grid.nodes().iter().enumerate() {
                let cot = phi.cos() / phi.sin();
                let tan = phi.tan();
                m[j * n + j] = m[j * n + j] + nu2 * cot - nu1 * tan;
                m[j * n + grid.r2()[j]] = m[j * n + grid.r2()[j]] - nu2 * cot;
                m[j * n + grid.r1()[j]] = m[j * n + grid.r1()[j]] + nu1 * tan;
            }
            (m, true)
        }
        OperatorLabel::BPhi => {
            let d1 = grid.diff1();
            let d2 = grid.diff2();
            let mut m: Vec<T> = d2.iter().map(|&v| -half * v).collect();
            for (j, &phi) in grid.nodes().iter().enumerate() {
                let (s, c) = phi.sin_cos();
                let drift = nu1 * s / c - nu2 * c / s;
                for k in 0..n {
                    m[j * n + k] = m[j * n + k] + drift * d1[j * n + k];
                }
                let w1 = nu1 * half / (c * c);
                let w2 = nu2 * half / (s * s);
                m[j * n + j] = m[j * n + j] + w1 + w2;
                m[j * n + grid.r1()[j]] = m[j * n + grid.r1()[j]] - w1;
                m[j * n + grid.r2()[j]] = m[j * n + grid.r2()[j]] - w2;
            }
            (m, false)
        }
    };
    Ok(AngularGridOperator { label, n, matrix, imaginary_unit, grid })
}

/// (Pv)_k = v[perm[k]]: applies an index map to grid samples.
pub fn permute<V: Copy>(perm: &[usize], v: &[V]) -> Vec<V> {
    perm.iter().map(|&j| v[j]).collect()
}

/// One smooth periodic test function of the J² battery.
#[derive(Debug, Clone, Copy)]
pub struct BatteryFunction {
    pub name: &'static str,
    pub eval: fn(f64) -> f64,
}

/// Test functions spanning all four reflection parities.
pub const J_SQUARED_BATTERY: [BatteryFunction; 9] = [
    BatteryFunction { name: "sin(phi)", eval: |p| p.sin() },
    BatteryFunction { name: "cos(phi)", eval: |p| p.cos() },
    BatteryFunction { name: "sin(2phi)", eval: |p| (2.0 * p).sin() },
    BatteryFunction { name: "cos(2phi)", eval: |p| (2.0 * p).cos() },
    BatteryFunction { name: "exp(sin(phi))", eval: |p| p.sin().exp() },
    BatteryFunction { name: "sin(phi)cos(2phi)", eval: |p| p.sin() * (2.0 * p).cos() },
    BatteryFunction { name: "exp(sin(phi))cos(phi)", eval: |p| p.sin().exp() * p.cos() },
    BatteryFunction { name: "exp(cos(phi))sin(2phi)", eval: |p| p.cos().exp() * (2.0 * p).sin() },
    BatteryFunction { name: "sin(phi)cos(phi)", eval: |p| p.sin() * p.cos() },
];

#[derive(Debug, Clone, Serialize)]
pub struct JSquaredReport {
    pub n: usize,
    pub nu1: f64,
    pub nu2: f64,
    /// (function name, ‖(J² − 2B − 2ν₁ν₂(1 − R₁R₂))g‖∞).
    pub per_function: Vec<(String, f64)>,
    pub max_residual: f64,
}

/// ‖(J_φ² − 2B_φ − 2ν₁ν₂(1 − R₁R₂)) g‖∞ over [`J_SQUARED_BATTERY`].
pub fn check_j_squared<T: Real>(n: usize, params: &DunklParams<T>) -> Result<JSquaredReport> {
    let j = angular_operator(OperatorLabel::JPhi, n, params)?;
    let b = angular_operator(OperatorLabel::BPhi, n, params)?;
    let grid = &j.grid;
    let two = T::lit(2.0);
    let coupling = two * params.nu1 * params.nu2;
    let mut per_function = Vec::new();
    let mut max_residual: f64 = 0.0;
    for f in J_SQUARED_BATTERY.iter() {
        let g: Vec<T> = grid.sample(|p| T::lit((f.eval)(p.to_f64_lossy())));
        // J² = (iA)² = −A².
        let aag = j.apply_matrix(&j.apply_matrix(&g));
        let bg = b.apply_matrix(&g);
        let rot = permute(grid.r1(), &permute(grid.r2(), &g));
        let r = (0..n)
            .map(|k| (-aag[k] - two * bg[k] - coupling * (g[k] - rot[k])).abs().to_f64_lossy())
            .fold(0.0, f64::max);
        max_residual = max_residual.max(r);
        per_function.push((f.name.to_string(), r));
    }
    Ok(JSquaredReport {
        n,
        nu1: params.nu1.to_f64_lossy(),
        nu2: params.nu2.to_f64_lossy(),
        per_function,
        max_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn size_must_be_multiple_of_four() {
        assert!(matches!(AngularGrid::<f64>::new(30), Err(Error::Size(_))));
        let p = DunklParams::new(0.1, 0.1).unwrap();
        assert!(angular_operator(OperatorLabel::JPhi, 34, &p).is_err());
    }

    #[test]
    fn reflections_are_exact_involutions() {
        let g = AngularGrid::<f64>::new(64).unwrap();
        for k in 0..64 {
            assert_eq!(g.r1()[g.r1()[k]], k);
            assert_eq!(g.r2()[g.r2()[k]], k);
            assert_eq!(g.r1()[g.r2()[k]], g.r2()[g.r1()[k]]);
        }
        for (k, &phi) in g.nodes().iter().enumerate() {
            assert!((g.nodes()[g.r2()[k]] + phi).abs() < 1e-13);
            let mirrored = std::f64::consts::PI - phi;
            let wrapped = (mirrored + std::f64::consts::PI).rem_euclid(2.0 * std::f64::consts::PI)
                - std::f64::consts::PI;
            assert!((g.nodes()[g.r1()[k]] - wrapped).abs() < 1e-13);
            let quarter = phi / std::f64::consts::FRAC_PI_2;
            assert!((quarter - quarter.round()).abs() > 1e-3);
        }
    }

    #[test]
    fn r2_flips_sine() {
        let p = DunklParams::new(0.0, 0.0).unwrap();
        let r2 = angular_operator(OperatorLabel::R2, 32, &p).unwrap();
        let s = r2.grid.sample(|x: f64| x.sin());
        let out = r2.apply_matrix(&s);
        let neg: Vec<f64> = s.iter().map(|v| -v).collect();
        assert!(max_abs_diff(&out, &neg) < 1e-14);
    }

    #[test]
    fn undeformed_j_is_i_derivative() {
        let p = DunklParams::new(0.0, 0.0).unwrap();
        let j = angular_operator(OperatorLabel::JPhi, 64, &p).unwrap();
        let v: Vec<Complex<f64>> = j.grid.sample(|x: f64| Complex::new(x.cos(), x.sin()));
        let out = j.apply(&v);
        let err = out.iter().zip(&v).map(|(a, b)| (a + b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-12, "err {err}");
    }

    #[test]
    fn spectral_second_derivative() {
        let g = AngularGrid::<f64>::new(32).unwrap();
        let d2 = g.diff2();
        let v = g.sample(|x| (3.0 * x).sin());
        let out: Vec<f64> = (0..32).map(|j| (0..32).map(|k| d2[j * 32 + k] * v[k]).sum()).collect();
        let expect: Vec<f64> = v.iter().map(|s| -9.0 * s).collect();
        assert!(max_abs_diff(&out, &expect) < 1e-11);
    }

    #[test]
    fn operators_commute_with_rotation_by_pi() {
        let p = DunklParams::new(0.3, -0.2).unwrap();
        for label in [OperatorLabel::JPhi, OperatorLabel::BPhi] {
            let op = angular_operator(label, 64, &p).unwrap();
            let g = &op.grid;
            let v = g.sample(|x: f64| (x.sin() + 0.3 * x.cos()).exp());
            let rot = |w: &[f64]| permute(g.r1(), &permute(g.r2(), w));
            let a = op.apply_matrix(&rot(&v));
            let b = rot(&op.apply_matrix(&v));
            let scale = b.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            assert!(max_abs_diff(&a, &b) <= 1e-10 * scale.max(1.0), "{label:?}");
        }
    }

    #[test]
    fn j_squared_identity_undeformed() {
        let p = DunklParams::new(0.0, 0.0).unwrap();
        let r = check_j_squared(64, &p).unwrap();
        assert!(r.max_residual <= 1e-10, "{r:?}");
    }

    #[test]
    fn j_squared_identity_deformed() {
        let p = DunklParams::new(0.3, 0.2).unwrap();
        let r = check_j_squared(128, &p).unwrap();
        assert!(r.max_residual <= 1e-7, "{r:?}");
    }
}
