//! Dunkl operator calculus.
//!
//! Two representations are provided: exact coefficient arithmetic on
//! polynomials in (x, y) ([`monomial`]), and dense operators on a
//! reflection-symmetric periodic angular grid ([`grid`]). The radial generator
//! algebra lives in [`t_algebra`].

pub mod grid;
pub mod monomial;
pub mod t_algebra;

use num_traits::Num;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{Real, Sign};

pub use grid::{angular_operator, check_j_squared, permute, AngularGrid, AngularGridOperator, OperatorLabel};
pub use monomial::{check_heisenberg, dunkl_deriv, dunkl_laplacian, Axis, HeisenbergReport, MonomialFunction};
pub use t_algebra::{check_t_algebra, TAlgebraReport};

/// Wigner deformation pair (ν₁, ν₂), each strictly above −1/2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DunklParams<T> {
    pub nu1: T,
    pub nu2: T,
}

impl<T: Clone + Num + PartialOrd + std::fmt::Debug> DunklParams<T> {
    pub fn new(nu1: T, nu2: T) -> Result<Self> {
        let above = |nu: &T| nu.clone() + nu.clone() + T::one() > T::zero();
        if !above(&nu1) || !above(&nu2) {
            return Err(Error::Domain(format!(
                "Dunkl parameters must satisfy nu > -1/2, got ({nu1:?}, {nu2:?})"
            )));
        }
        Ok(Self { nu1, nu2 })
    }

    /// Skips the ν > −1/2 check; for exercising downstream domain errors.
    pub fn new_unchecked(nu1: T, nu2: T) -> Self {
        Self { nu1, nu2 }
    }

    pub fn undeformed() -> Self {
        Self { nu1: T::zero(), nu2: T::zero() }
    }
}

impl<T: Real> DunklParams<T> {
    /// δ = 1/2 + ν₁ + ν₂.
    pub fn delta(&self) -> T {
        T::lit(0.5) + self.nu1 + self.nu2
    }

    /// ν₁ + ε ν₂, which the AB flux forces to vanish.
    pub fn ab_defect(&self, sector: ParitySector) -> T {
        self.nu1 + sector.eps().value::<T>() * self.nu2
    }

    /// ν₁ε₁ + ν₂ε₂.
    pub fn reflection_weighted_sum(&self, sector: ParitySector) -> T {
        self.nu1 * sector.eps1.value::<T>() + self.nu2 * sector.eps2.value::<T>()
    }

    pub fn to_f64(&self) -> DunklParams<f64> {
        DunklParams { nu1: self.nu1.to_f64_lossy(), nu2: self.nu2.to_f64_lossy() }
    }
}

/// Reflection eigenvalues (ε₁, ε₂) with ε = ε₁ε₂.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct ParitySector {
    pub eps1: Sign,
    pub eps2: Sign,
}

impl ParitySector {
    pub fn new(eps1: Sign, eps2: Sign) -> Self {
        Self { eps1, eps2 }
    }

    pub fn eps(&self) -> Sign {
        self.eps1 * self.eps2
    }

    pub fn all() -> [ParitySector; 4] {
        use Sign::*;
        [
            Self::new(Plus, Plus),
            Self::new(Minus, Minus),
            Self::new(Plus, Minus),
            Self::new(Minus, Plus),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_domain() {
        assert!(DunklParams::new(-0.5f64, 0.0).is_err());
        assert!(DunklParams::new(0.0f64, -0.7).is_err());
        assert!(DunklParams::new(-0.49f64, 3.0).is_ok());
    }

    #[test]
    fn sector_product() {
        for s in ParitySector::all() {
            assert_eq!(s.eps().as_i32(), s.eps1.as_i32() * s.eps2.as_i32());
        }
    }

    #[test]
    fn constraint_forms_agree_in_every_sector() {
        // ν₁ε₁ + ν₂ε₂ = ε₁(ν₁ + εν₂), so both vanish together.
        for s in ParitySector::all() {
            for &(a, b) in &[(0.3, -0.3), (0.25, 0.25), (0.1, 0.4), (-0.2, 0.2)] {
                let p = DunklParams::new(a, b).unwrap();
                let lhs = p.reflection_weighted_sum(s);
                let rhs = p.ab_defect(s);
                assert_eq!(lhs, s.eps1.value::<f64>() * rhs);
                assert_eq!(lhs == 0.0, rhs == 0.0);
            }
        }
    }
}
