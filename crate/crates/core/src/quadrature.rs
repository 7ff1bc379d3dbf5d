//! Gauss rules from the Golub–Welsch construction, and a product rule for
//! the reflection-invariant angular measure |cos φ|^{2ν₁}|sin φ|^{2ν₂} dφ.

use crate::dunkl_ops::DunklParams;
use crate::error::{Error, Result};
use crate::oracle::tridiag::{eig_sym_tridiagonal, SymTridiagonal};
use crate::scalar::Real;
use crate::specfun::ln_gamma;

#[derive(Debug, Clone, PartialEq)]
pub struct Quadrature<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> Quadrature<T> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(T) -> T) -> T {
        self.nodes.iter().zip(&self.weights).fold(T::zero(), |acc, (&x, &w)| acc + w * f(x))
    }
}

/// Nodes and weights from the monic recurrence (a_k, √b_k) and total mass μ₀.
fn golub_welsch<T: Real>(diag: Vec<T>, offdiag: Vec<T>, mu0: T) -> Result<Quadrature<T>> {
    let op = SymTridiagonal::new(diag, offdiag)?;
    let eig = eig_sym_tridiagonal(&op, true)?;
    let vectors = eig.vectors.expect("vectors requested");
    let weights = vectors.iter().map(|v| mu0 * v[0] * v[0]).collect();
    Ok(Quadrature { nodes: eig.eigenvalues, weights })
}

fn check_order(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::QuadratureDegree("a Gauss rule needs at least one node".into()));
    }
    Ok(())
}

/// n-point rule for (1 − x)^α (1 + x)^β on [−1, 1].
pub fn gauss_jacobi<T: Real>(n: usize, alpha: T, beta: T) -> Result<Quadrature<T>> {
    check_order(n)?;
    let one = T::one();
    let two = T::lit(2.0);
    if !(alpha > -one) || !(beta > -one) {
        return Err(Error::Domain(format!("Gauss-Jacobi needs alpha, beta > -1, got ({alpha}, {beta})")));
    }
    let ab = alpha + beta;
    let diag = (0..n)
        .map(|k| {
            if k == 0 {
                (beta - alpha) / (ab + two)
            } else {
                let s = two * T::from_usize_lossy(k) + ab;
                (beta * beta - alpha * alpha) / (s * (s + two))
            }
        })
        .collect();
    let offdiag = (1..n)
        .map(|k| {
            let kk = T::from_usize_lossy(k);
            let s = two * kk + ab;
            let b2 = if k == 1 {
                T::lit(4.0) * (one + alpha) * (one + beta) / ((ab + two) * (ab + two) * (ab + T::lit(3.0)))
            } else {
                T::lit(4.0) * kk * (kk + alpha) * (kk + beta) * (kk + ab) / (s * s * (s + one) * (s - one))
            };
            b2.sqrt()
        })
        .collect();
    let ln_mu0 = (ab + one) * two.ln() + ln_gamma(alpha + one)? + ln_gamma(beta + one)? - ln_gamma(ab + two)?;
    golub_welsch(diag, offdiag, ln_mu0.exp())
}

/// n-point rule for x^α e^{−x} on [0, ∞).
pub fn gauss_laguerre<T: Real>(n: usize, alpha: T) -> Result<Quadrature<T>> {
    check_order(n)?;
    let one = T::one();
    if !(alpha > -one) {
        return Err(Error::Domain(format!("Gauss-Laguerre needs alpha > -1, got {alpha}")));
    }
    let diag = (0..n).map(|k| T::lit(2.0) * T::from_usize_lossy(k) + alpha + one).collect();
    let offdiag = (1..n)
        .map(|k| {
            let kk = T::from_usize_lossy(k);
            (kk * (kk + alpha)).sqrt()
        })
        .collect();
    golub_welsch(diag, offdiag, ln_gamma(alpha + one)?.exp())
}

/// n-point Gauss–Legendre rule on [a, b].
pub fn gauss_legendre<T: Real>(n: usize, a: T, b: T) -> Result<Quadrature<T>> {
    let q = gauss_jacobi(n, T::zero(), T::zero())?;
    let half = T::lit(0.5);
    let mid = half * (a + b);
    let rad = half * (b - a);
    Ok(Quadrature {
        nodes: q.nodes.iter().map(|&x| mid + rad * x).collect(),
        weights: q.weights.iter().map(|&w| rad * w).collect(),
    })
}

/// Rule on [−π, π) for |cos φ|^{2ν₁}|sin φ|^{2ν₂} dφ with `per_quadrant`
/// nodes in each quadrant.
///
/// Within a quadrant u = −cos 2φ maps the measure to
/// 2^{−ν₁−ν₂−1}(1 − u)^{ν₁−½}(1 + u)^{ν₂−½} du. The rule integrates exactly
/// every product of angular eigenfunctions whose combined u-degree is below
/// 2·`per_quadrant`, including the singular endpoint behaviour of the weight.
pub fn dunkl_angular<T: Real>(per_quadrant: usize, params: &DunklParams<T>) -> Result<Quadrature<T>> {
    let half = T::lit(0.5);
    let q = gauss_jacobi(per_quadrant, params.nu1 - half, params.nu2 - half)?;
    let scale = T::lit(2.0).powf(-(params.nu1 + params.nu2 + T::one()));
    let pi = T::PI();
    let mut nodes = Vec::with_capacity(4 * q.len());
    let mut weights = Vec::with_capacity(4 * q.len());
    for (&u, &w) in q.nodes.iter().zip(&q.weights) {
        let phi0 = half * (-u).acos();
        for phi in [phi0, -phi0, pi - phi0, -pi + phi0] {
            nodes.push(phi);
            weights.push(w * scale);
        }
    }
    Ok(Quadrature { nodes, weights })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_integrates_polynomials() {
        let q = gauss_legendre(5, -1.0f64, 1.0).unwrap();
        assert!((q.integrate(|x| x.powi(8)) - 2.0 / 9.0).abs() < 1e-14);
        assert!(q.integrate(|x| x.powi(7)).abs() < 1e-14);
        let q = gauss_legendre(4, 0.0f64, 2.0).unwrap();
        assert!((q.integrate(|x| x * x * x) - 4.0).abs() < 1e-13);
    }

    #[test]
    fn laguerre_moments() {
        // ∫ x^{α+k} e^{−x} = Γ(α+k+1).
        let alpha = 1.4f64;
        let q = gauss_laguerre(8, alpha).unwrap();
        for k in 0..15 {
            let exact = ln_gamma(alpha + k as f64 + 1.0).unwrap().exp();
            let got = q.integrate(|x| x.powi(k));
            assert!(((got - exact) / exact).abs() < 1e-11, "k={k}");
        }
    }

    #[test]
    fn jacobi_half_sum_minus_one() {
        // α + β = −1 exercises the special first off-diagonal entry.
        let q = gauss_jacobi(6, -0.2f64, -0.8).unwrap();
        let mass = ln_gamma(0.8f64).unwrap().exp() * ln_gamma(0.2f64).unwrap().exp();
        assert!((q.integrate(|_| 1.0) - mass).abs() < 1e-12);
        // Chebyshev case α = β = −½: nodes cos((2k−1)π/(2n)).
        let q = gauss_jacobi(6, -0.5f64, -0.5).unwrap();
        for (k, x) in q.nodes.iter().enumerate() {
            let exact = -((2 * k + 1) as f64 * std::f64::consts::PI / 12.0).cos();
            assert!((x - exact).abs() < 1e-13);
            assert!((q.weights[k] - std::f64::consts::PI / 6.0).abs() < 1e-13);
        }
    }

    #[test]
    fn angular_rule_matches_beta_integrals() {
        // ∫_{−π}^{π} |cos|^{2a}|sin|^{2b} dφ = 2 Γ(a+½)Γ(b+½)/Γ(a+b+1).
        for &(a, b) in &[(0.0f64, 0.0f64), (0.3, -0.3), (0.25, 0.25), (1.2, 0.4), (-0.4, 0.7)] {
            let p = DunklParams::new(a, b).unwrap();
            let q = dunkl_angular(10, &p).unwrap();
            let exact = 2.0
                * (ln_gamma(a + 0.5).unwrap() + ln_gamma(b + 0.5).unwrap() - ln_gamma(a + b + 1.0).unwrap()).exp();
            assert!((q.integrate(|_| 1.0) - exact).abs() < 1e-12 * exact);
            // cos²φ shifts a by one.
            let exact2 = 2.0
                * (ln_gamma(a + 1.5).unwrap() + ln_gamma(b + 0.5).unwrap() - ln_gamma(a + b + 2.0).unwrap()).exp();
            assert!((q.integrate(|x| x.cos().powi(2)) - exact2).abs() < 1e-12 * exact2);
            // odd functions under either reflection integrate to zero.
            assert!(q.integrate(|x| x.sin() * x.cos().abs()).abs() < 1e-13);
            assert!(q.integrate(|x| x.cos()).abs() < 1e-13);
        }
    }

    #[test]
    fn zero_nodes_rejected() {
        assert!(matches!(gauss_laguerre(0, 0.0f64), Err(Error::QuadratureDegree(_))));
    }
}
