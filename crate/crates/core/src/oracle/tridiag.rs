//! Symmetric tridiagonal eigensolvers: implicit-shift QL (all eigenvalues,
//! optional eigenvectors) and Sturm-sequence bisection (selected levels).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Iteration cap per eigenvalue for the QL sweep.
pub const QL_MAX_ITERATIONS: usize = 60;

#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal<T> {
    pub diag: Vec<T>,
    /// Sub/super-diagonal, length `diag.len() - 1`.
    pub offdiag: Vec<T>,
}

impl<T: Real> SymTridiagonal<T> {
    pub fn new(diag: Vec<T>, offdiag: Vec<T>) -> Result<Self> {
        if diag.is_empty() || offdiag.len() + 1 != diag.len() {
            return Err(Error::Size(format!(
                "tridiagonal operator needs n >= 1 diagonal and n - 1 off-diagonal entries, got {} and {}",
                diag.len(),
                offdiag.len()
            )));
        }
        Ok(Self { diag, offdiag })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn apply(&self, v: &[T]) -> Vec<T> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut acc = self.diag[i] * v[i];
                if i > 0 {
                    acc = acc + self.offdiag[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    acc = acc + self.offdiag[i] * v[i + 1];
                }
                acc
            })
            .collect()
    }

    /// Gershgorin interval containing the whole spectrum.
    pub fn gershgorin(&self) -> (T, T) {
        let n = self.len();
        let mut lo = T::infinity();
        let mut hi = T::neg_infinity();
        for i in 0..n {
            let mut radius = T::zero();
            if i > 0 {
                radius = radius + self.offdiag[i - 1].abs();
            }
            if i + 1 < n {
                radius = radius + self.offdiag[i].abs();
            }
            lo = lo.min(self.diag[i] - radius);
            hi = hi.max(self.diag[i] + radius);
        }
        (lo, hi)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SymmetricEigenResult<T> {
    /// Ascending.
    pub eigenvalues: Vec<T>,
    /// `vectors[k]` is the unit eigenvector of `eigenvalues[k]`.
    #[serde(skip)]
    pub vectors: Option<Vec<Vec<T>>>,
    pub iterations: usize,
    pub method: &'static str,
}

impl<T: Real> SymmetricEigenResult<T> {
    /// max_k ‖Av_k − λ_k v_k‖∞ / ‖v_k‖∞, if vectors were computed.
    pub fn max_residual(&self, op: &SymTridiagonal<T>) -> Option<T> {
        let vectors = self.vectors.as_ref()?;
        let mut worst = T::zero();
        for (lam, v) in self.eigenvalues.iter().zip(vectors) {
            let av = op.apply(v);
            let num = av.iter().zip(v).map(|(&a, &x)| (a - *lam * x).abs()).fold(T::zero(), T::max);
            let den = v.iter().map(|x| x.abs()).fold(T::zero(), T::max);
            worst = worst.max(num / den);
        }
        Some(worst)
    }
}

/// All eigenvalues (and optionally eigenvectors) by implicit-shift QL.
pub fn eig_sym_tridiagonal<T: Real>(
    op: &SymTridiagonal<T>,
    want_vectors: bool,
) -> Result<SymmetricEigenResult<T>> {
    let n = op.len();
    let mut d = op.diag.clone();
    let mut e = op.offdiag.clone();
    e.push(T::zero());
    let mut z = if want_vectors {
        let mut z = vec![T::zero(); n * n];
        for i in 0..n {
            z[i * n + i] = T::one();
        }
        Some(z)
    } else {
        None
    };
    let two = T::lit(2.0);
    let eps = T::epsilon();
    let mut total = 0;

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= eps * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            total += 1;
            if iter > QL_MAX_ITERATIONS {
                return Err(Error::Convergence { index: l, iterations: iter - 1 });
            }
            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = g.hypot(T::one());
            g = d[m] - d[l] + e[l] / (g + if g >= T::zero() { r.abs() } else { -r.abs() });
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] = d[i + 1] - p;
                    e[m] = T::zero();
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + two * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_mut() {
                    for k in 0..n {
                        let f = z[k * n + i + 1];
                        z[k * n + i + 1] = s * z[k * n + i] + c * f;
                        z[k * n + i] = c * z[k * n + i] - s * f;
                    }
                }
            }
            if deflated {
                continue;
            }
            d[l] = d[l] - p;
            e[l] = g;
            e[m] = T::zero();
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).unwrap_or(std::cmp::Ordering::Equal));
    let eigenvalues = order.iter().map(|&k| d[k]).collect();
    let vectors = z.map(|z| order.iter().map(|&k| (0..n).map(|row| z[row * n + k]).collect()).collect());
    Ok(SymmetricEigenResult { eigenvalues, vectors, iterations: total, method: "implicit QL" })
}

/// Number of eigenvalues strictly below `x` (Sturm sequence).
pub fn sturm_count<T: Real>(op: &SymTridiagonal<T>, x: T) -> usize {
    let tiny = T::min_positive_value().sqrt();
    let mut count = 0;
    let mut q = op.diag[0] - x;
    for i in 0..op.len() {
        if i > 0 {
            let b = op.offdiag[i - 1];
            q = op.diag[i] - x - b * b / q;
        }
        if q == T::zero() {
            q = -tiny;
        }
        if q < T::zero() {
            count += 1;
        }
    }
    count
}

/// The `k` lowest eigenvalues by bisection, each to absolute width
/// `rel_tol · max(1, |λ|)`.
pub fn lowest_eigenvalues<T: Real>(op: &SymTridiagonal<T>, k: usize, rel_tol: T) -> Result<SymmetricEigenResult<T>> {
    if k > op.len() {
        return Err(Error::Size(format!("requested {k} eigenvalues of a {}x{} operator", op.len(), op.len())));
    }
    let (lo0, hi0) = op.gershgorin();
    let mut out = Vec::with_capacity(k);
    let mut iterations = 0;
    for idx in 0..k {
        let (mut lo, mut hi) = (lo0, hi0);
        let mut it = 0;
        while hi - lo > rel_tol * T::one().max(lo.abs().max(hi.abs())) {
            let mid = (lo + hi) * T::lit(0.5);
            if mid <= lo || mid >= hi {
                break;
            }
            if sturm_count(op, mid) > idx {
                hi = mid;
            } else {
                lo = mid;
            }
            it += 1;
            if it > 400 {
                return Err(Error::Convergence { index: idx, iterations: it });
            }
        }
        iterations += it;
        out.push((lo + hi) * T::lit(0.5));
    }
    Ok(SymmetricEigenResult { eigenvalues: out, vectors: None, iterations, method: "Sturm bisection" })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn two_by_two() {
        let op = SymTridiagonal::new(vec![2.0f64, 2.0], vec![1.0]).unwrap();
        let r = eig_sym_tridiagonal(&op, true).unwrap();
        assert!((r.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((r.eigenvalues[1] - 3.0).abs() < 1e-14);
        assert!(r.max_residual(&op).unwrap() < 1e-14);
        let b = lowest_eigenvalues(&op, 2, 1e-15).unwrap();
        assert!((b.eigenvalues[0] - 1.0).abs() < 1e-13);
        assert!((b.eigenvalues[1] - 3.0).abs() < 1e-13);
    }

    #[test]
    fn diagonal_is_sorted() {
        let op = SymTridiagonal::new(vec![3.0, -1.0, 2.0, 0.5], vec![0.0; 3]).unwrap();
        let r = eig_sym_tridiagonal(&op, false).unwrap();
        assert_eq!(r.eigenvalues, vec![-1.0, 0.5, 2.0, 3.0]);
    }

    #[test]
    fn discrete_laplacian_closed_form() {
        // tridiag(−1, 2, −1) has eigenvalues 2 − 2cos(kπ/(n+1)).
        let n = 50;
        let op = SymTridiagonal::new(vec![2.0; n], vec![-1.0; n - 1]).unwrap();
        let r = eig_sym_tridiagonal(&op, true).unwrap();
        for (k, lam) in r.eigenvalues.iter().enumerate() {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((lam - exact).abs() < 1e-12);
        }
        assert!(r.max_residual(&op).unwrap() < 1e-8);
        let b = lowest_eigenvalues(&op, 5, 1e-14).unwrap();
        for k in 0..5 {
            assert!((b.eigenvalues[k] - r.eigenvalues[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn shape_mismatch() {
        assert!(SymTridiagonal::new(vec![1.0, 2.0], vec![]).is_err());
    }

    #[test]
    fn f32_instantiation() {
        let op = SymTridiagonal::new(vec![2.0f32, 2.0], vec![1.0]).unwrap();
        let r = eig_sym_tridiagonal(&op, false).unwrap();
        assert!((r.eigenvalues[0] - 1.0).abs() < 1e-5);
    }

    proptest! {
        #[test]
        fn ql_and_bisection_agree(diag in prop::collection::vec(-5.0f64..5.0, 2..30), seed in -3.0f64..3.0) {
            let n = diag.len();
            let off: Vec<f64> = (0..n - 1).map(|i| seed + (i as f64).sin()).collect();
            let op = SymTridiagonal::new(diag, off).unwrap();
            let r = eig_sym_tridiagonal(&op, true).unwrap();
            prop_assert!(r.max_residual(&op).unwrap() <= 1e-8);
            for w in r.eigenvalues.windows(2) {
                prop_assert!(w[0] <= w[1]);
            }
            let b = lowest_eigenvalues(&op, n, 1e-14).unwrap();
            for (x, y) in r.eigenvalues.iter().zip(&b.eigenvalues) {
                prop_assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0));
            }
        }
    }
}
