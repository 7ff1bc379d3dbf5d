//! Exact Dunkl calculus on polynomials in two variables.
//!
//! Coefficients are generic: `f64` for floating checks, `BigRational` for the
//! exact ones.

use std::collections::BTreeMap;
use std::ops::Neg;

use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};
use serde::Serialize;

use super::DunklParams;

/// Coefficient ring for [`MonomialFunction`].
pub trait Coefficient:
    Clone + Num + Signed + Neg<Output = Self> + FromPrimitive + ToPrimitive + std::fmt::Debug
{
}

impl<C> Coefficient for C where
    C: Clone + Num + Signed + Neg<Output = C> + FromPrimitive + ToPrimitive + std::fmt::Debug
{
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Axis {
    X,
    Y,
}

/// Finite sum Σ c_ij x^i y^j.
#[derive(Debug, Clone, PartialEq)]
pub struct MonomialFunction<C> {
    terms: BTreeMap<(u32, u32), C>,
}

impl<C: Coefficient> Default for MonomialFunction<C> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<C: Coefficient> MonomialFunction<C> {
    pub fn zero() -> Self {
        Self { terms: BTreeMap::new() }
    }

    pub fn monomial(i: u32, j: u32, c: C) -> Self {
        let mut f = Self::zero();
        f.add_term(i, j, c);
        f
    }

    pub fn constant(c: C) -> Self {
        Self::monomial(0, 0, c)
    }

    pub fn add_term(&mut self, i: u32, j: u32, c: C) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry((i, j)).or_insert_with(C::zero);
        *entry = entry.clone() + c;
        if entry.is_zero() {
            self.terms.remove(&(i, j));
        }
    }

    pub fn coefficient(&self, i: u32, j: u32) -> C {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(C::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &C)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.values().all(|c| c.is_zero())
    }

    pub fn max_degree(&self) -> u32 {
        self.terms.keys().map(|&(i, j)| i + j).max().unwrap_or(0)
    }

    /// Largest |c_ij| as `f64`.
    pub fn max_abs(&self) -> f64 {
        self.terms
            .values()
            .map(|c| c.abs().to_f64().unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&(i, j), c) in &other.terms {
            out.add_term(i, j, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&(i, j), c) in &other.terms {
            out.add_term(i, j, -c.clone());
        }
        out
    }

    pub fn scale(&self, s: &C) -> Self {
        let mut out = Self::zero();
        for (&(i, j), c) in &self.terms {
            out.add_term(i, j, c.clone() * s.clone());
        }
        out
    }

    /// Multiplication by the coordinate along `axis`.
    pub fn mul_coord(&self, axis: Axis) -> Self {
        let mut out = Self::zero();
        for (&(i, j), c) in &self.terms {
            match axis {
                Axis::X => out.add_term(i + 1, j, c.clone()),
                Axis::Y => out.add_term(i, j + 1, c.clone()),
            }
        }
        out
    }

    /// R_axis: flips the sign of the coordinate along `axis`.
    pub fn reflect(&self, axis: Axis) -> Self {
        let mut out = Self::zero();
        for (&(i, j), c) in &self.terms {
            let k = match axis {
                Axis::X => i,
                Axis::Y => j,
            };
            let c = if k % 2 == 1 { -c.clone() } else { c.clone() };
            out.add_term(i, j, c);
        }
        out
    }

    /// Every monomial x^i y^j with i + j ≤ `max_degree`, unit coefficient.
    pub fn basis(max_degree: u32) -> Vec<Self> {
        let mut out = Vec::new();
        for d in 0..=max_degree {
            for i in 0..=d {
                out.push(Self::monomial(i, d - i, C::one()));
            }
        }
        out
    }
}

fn int<C: Coefficient>(k: u32) -> C {
    C::from_u32(k).expect("small integer representable")
}

fn param<C: Coefficient>(params: &DunklParams<C>, axis: Axis) -> C {
    match axis {
        Axis::X => params.nu1.clone(),
        Axis::Y => params.nu2.clone(),
    }
}

/// D_axis = ∂_axis + (ν/x_axis)(1 − R_axis), applied exactly:
/// D x^k = (k + ν(1 − (−1)^k)) x^{k−1}.
pub fn dunkl_deriv<C: Coefficient>(
    f: &MonomialFunction<C>,
    axis: Axis,
    params: &DunklParams<C>,
) -> MonomialFunction<C> {
    let nu = param(params, axis);
    let two_nu = nu.clone() + nu;
    let mut out = MonomialFunction::zero();
    for (&(i, j), c) in &f.terms {
        let k = match axis {
            Axis::X => i,
            Axis::Y => j,
        };
        if k == 0 {
            continue;
        }
        let mut factor = int::<C>(k);
        if k % 2 == 1 {
            factor = factor + two_nu.clone();
        }
        let coef = c.clone() * factor;
        match axis {
            Axis::X => out.add_term(i - 1, j, coef),
            Axis::Y => out.add_term(i, j - 1, coef),
        }
    }
    out
}

/// Σ_axis D_axis², by composition.
pub fn dunkl_laplacian<C: Coefficient>(
    f: &MonomialFunction<C>,
    params: &DunklParams<C>,
) -> MonomialFunction<C> {
    let dxx = dunkl_deriv(&dunkl_deriv(f, Axis::X, params), Axis::X, params);
    let dyy = dunkl_deriv(&dunkl_deriv(f, Axis::Y, params), Axis::Y, params);
    dxx.add(&dyy)
}

/// The expanded Laplacian ∂² + (2ν/x)∂ − (ν/x²)(1 − R) per axis, term by term.
///
/// Terms with exponent below two contribute a coefficient to x^{k−2} that is
/// identically zero; the function asserts that cancellation instead of
/// producing negative powers.
pub fn dunkl_laplacian_expanded<C: Coefficient>(
    f: &MonomialFunction<C>,
    params: &DunklParams<C>,
) -> MonomialFunction<C> {
    let mut out = MonomialFunction::zero();
    for (&(i, j), c) in &f.terms {
        for axis in [Axis::X, Axis::Y] {
            let nu = param(params, axis);
            let k = match axis {
                Axis::X => i,
                Axis::Y => j,
            };
            let kc = int::<C>(k);
            let second = if k >= 1 { kc.clone() * (kc.clone() - C::one()) } else { C::zero() };
            let first = (nu.clone() + nu.clone()) * kc;
            let reflect = if k % 2 == 1 { nu.clone() + nu } else { C::zero() };
            let coef = second + first - reflect;
            if k < 2 {
                assert!(coef.is_zero(), "non-polynomial remainder on x^{k}");
                continue;
            }
            let coef = c.clone() * coef;
            match axis {
                Axis::X => out.add_term(i - 2, j, coef),
                Axis::Y => out.add_term(i, j - 2, coef),
            }
        }
    }
    out
}

/// Residuals of the deformed Heisenberg relations over a monomial basis.
#[derive(Debug, Clone, Serialize)]
pub struct HeisenbergReport {
    pub max_degree: u32,
    pub monomials_checked: usize,
    /// max over i, j of ‖([D_j, x_i] − δ_ij(1 + 2ν_j R_j)) f‖.
    pub position_derivative: f64,
    /// max ‖[D_x, D_y] f‖.
    pub derivative_derivative: f64,
    /// max ‖[x, y] f‖.
    pub position_position: f64,
    pub max_residual: f64,
    /// Every residual polynomial is identically zero.
    pub exact_zero: bool,
}

/// Checks [D_j, x_i] = δ_ij(1 + 2ν_j R_j), [D_x, D_y] = 0 and [x, y] = 0 on
/// every monomial up to `max_degree`.
pub fn check_heisenberg<C: Coefficient>(params: &DunklParams<C>, max_degree: u32) -> HeisenbergReport {
    let basis = MonomialFunction::<C>::basis(max_degree.max(2));
    let mut pd: f64 = 0.0;
    let mut dd: f64 = 0.0;
    let mut pp: f64 = 0.0;
    let mut exact = true;
    let axes = [Axis::X, Axis::Y];
    for f in &basis {
        for &dj in &axes {
            for &xi in &axes {
                let lhs = dunkl_deriv(&f.mul_coord(xi), dj, params)
                    .sub(&dunkl_deriv(f, dj, params).mul_coord(xi));
                let rhs = if dj == xi {
                    let nu = param(params, dj);
                    f.add(&f.reflect(dj).scale(&(nu.clone() + nu)))
                } else {
                    MonomialFunction::zero()
                };
                let r = lhs.sub(&rhs);
                exact &= r.is_zero();
                pd = pd.max(r.max_abs());
            }
        }
        let r = dunkl_deriv(&dunkl_deriv(f, Axis::Y, params), Axis::X, params)
            .sub(&dunkl_deriv(&dunkl_deriv(f, Axis::X, params), Axis::Y, params));
        exact &= r.is_zero();
        dd = dd.max(r.max_abs());
        let r = f.mul_coord(Axis::Y).mul_coord(Axis::X).sub(&f.mul_coord(Axis::X).mul_coord(Axis::Y));
        exact &= r.is_zero();
        pp = pp.max(r.max_abs());
    }
    HeisenbergReport {
        max_degree,
        monomials_checked: basis.len(),
        position_derivative: pd,
        derivative_derivative: dd,
        position_position: pp,
        max_residual: pd.max(dd).max(pp),
        exact_zero: exact,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn derivative_examples() {
        let p = DunklParams::new(q(3, 10), q(-1, 5)).unwrap();
        let x2 = MonomialFunction::monomial(2, 0, q(1, 1));
        assert_eq!(dunkl_deriv(&x2, Axis::X, &p), MonomialFunction::monomial(1, 0, q(2, 1)));
        let x3 = MonomialFunction::monomial(3, 0, q(1, 1));
        assert_eq!(
            dunkl_deriv(&x3, Axis::X, &p),
            MonomialFunction::monomial(2, 0, q(3, 1) + q(6, 10))
        );
        let one = MonomialFunction::constant(q(1, 1));
        assert!(dunkl_deriv(&one, Axis::X, &p).is_zero());
        assert!(dunkl_deriv(&one, Axis::Y, &p).is_zero());
    }

    #[test]
    fn laplacian_examples() {
        let (nu1, nu2) = (q(3, 10), q(-1, 5));
        let p = DunklParams::new(nu1.clone(), nu2.clone()).unwrap();
        let r2 = MonomialFunction::monomial(2, 0, q(1, 1)).add(&MonomialFunction::monomial(0, 2, q(1, 1)));
        let two = q(2, 1);
        let expect = two.clone() * (q(1, 1) + two.clone() * nu1) + two.clone() * (q(1, 1) + two * nu2);
        assert_eq!(dunkl_laplacian(&r2, &p), MonomialFunction::constant(expect));
        assert!(dunkl_laplacian(&MonomialFunction::constant(q(7, 3)), &p).is_zero());
        assert!(dunkl_laplacian(&MonomialFunction::monomial(1, 1, q(1, 1)), &p).is_zero());
    }

    #[test]
    fn commutator_examples() {
        let p = DunklParams::new(0.3f64, 0.2).unwrap();
        let x2 = MonomialFunction::monomial(2, 0, 1.0);
        let c = dunkl_deriv(&x2.mul_coord(Axis::X), Axis::X, &p)
            .sub(&dunkl_deriv(&x2, Axis::X, &p).mul_coord(Axis::X));
        assert!((c.coefficient(2, 0) - 1.6).abs() < 1e-15);
        let y3 = MonomialFunction::monomial(0, 3, 1.0);
        let c = dunkl_deriv(&y3.mul_coord(Axis::Y), Axis::X, &p)
            .sub(&dunkl_deriv(&y3, Axis::X, &p).mul_coord(Axis::Y));
        assert!(c.is_zero());
    }

    #[test]
    fn laplacian_composition_equals_expanded_form_exactly() {
        for (a, b) in [(q(0, 1), q(0, 1)), (q(3, 10), q(-3, 10)), (q(7, 4), q(1, 3))] {
            let p = DunklParams::new(a, b).unwrap();
            for f in MonomialFunction::<BigRational>::basis(8) {
                assert_eq!(dunkl_laplacian(&f, &p), dunkl_laplacian_expanded(&f, &p));
            }
        }
    }

    #[test]
    fn heisenberg_is_exact_in_rationals() {
        let p = DunklParams::new(q(1, 4), q(-2, 5)).unwrap();
        let r = check_heisenberg(&p, 8);
        assert!(r.exact_zero);
        assert_eq!(r.max_residual, 0.0);
        assert_eq!(r.monomials_checked, 45);
    }

    #[test]
    fn wrong_ordering_is_detected() {
        // [x, D_x] x² = −(1 + 2ν R)x², the opposite sign of the implemented relation.
        let p = DunklParams::new(0.3f64, 0.0).unwrap();
        let x2 = MonomialFunction::monomial(2, 0, 1.0);
        let c = dunkl_deriv(&x2, Axis::X, &p)
            .mul_coord(Axis::X)
            .sub(&dunkl_deriv(&x2.mul_coord(Axis::X), Axis::X, &p));
        assert!((c.coefficient(2, 0) + 1.6).abs() < 1e-15);
    }

    #[test]
    fn reflection_is_an_involution() {
        let f = MonomialFunction::monomial(3, 1, 2.0).add(&MonomialFunction::monomial(2, 5, -1.0));
        for a in [Axis::X, Axis::Y] {
            assert_eq!(f.reflect(a).reflect(a), f);
        }
        assert_eq!(f.reflect(Axis::X).reflect(Axis::Y), f.reflect(Axis::Y).reflect(Axis::X));
    }
}
