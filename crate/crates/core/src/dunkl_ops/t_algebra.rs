//! Finite-difference check of the su(1,1)-type algebra of the radial
//! generators
//!
//!   T₁ = p_r² + C/r²,  T₂ = r²,  T₃ = r p_r + p_r r,  p_r = −i(∂_r + δ/r),
//!
//! where C is the angular/spin block reduced to its scalar value on a fixed
//! (ε, λ, m_s) sector. The relations checked are
//! [T₁, T₂] = −2iT₃, [T₂, T₃] = 4iT₂ and [T₁, T₃] = −4iT₁ (ħ = 1).
//!
//! Writing p_r = −iP and T₃ = −iS with P, S real, all three relations become
//! real: [T₁, T₂] = −2S, [T₂, S] = −4T₂ and [T₁, S] = 4T₁.

use serde::Serialize;

use super::{DunklParams, ParitySector};
use crate::error::{Error, Result};
use crate::oracle::RadialGrid;
use crate::radial::FluxSpin;
use crate::scalar::Real;

/// Largest grid step accepted; nested fourth-order stencils lose accuracy above it.
pub const MAX_STEP: f64 = 0.02;
/// Relative residual above which a relation is reported as failed.
pub const RESIDUAL_THRESHOLD: f64 = 1e-5;
/// Smallest radius entering the residual window.
pub const WINDOW_MIN_R: f64 = 0.25;

#[derive(Debug, Clone, Serialize)]
pub struct RelationResidual {
    pub relation: String,
    pub residual: f64,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct TAlgebraReport {
    pub step: f64,
    pub centrifugal_coefficient: f64,
    pub relations: Vec<RelationResidual>,
    pub max_residual: f64,
    pub pass: bool,
    pub diagnostic: Option<String>,
}

/// Scalar value of the angular/spin block
/// ϑ² − 2ϑλ + λ² + δ(δ−1) − 2ν₁ν₂(1 − ε) + 2ϑ(ν₁ε₁ + ν₂ε₂)m_s.
pub fn centrifugal_coefficient<T: Real>(
    params: &DunklParams<T>,
    sector: ParitySector,
    lambda: T,
    flux: &FluxSpin<T>,
) -> T {
    let two = T::lit(2.0);
    let delta = params.delta();
    let eps: T = sector.eps().value();
    let th = flux.vartheta;
    (th - lambda) * (th - lambda) + delta * (delta - T::one())
        - two * params.nu1 * params.nu2 * (T::one() - eps)
        + two * th * params.reflection_weighted_sum(sector) * flux.m_s.value::<T>()
}

struct Ops<'a, T> {
    r: &'a [T],
    h: T,
    delta: T,
    c: T,
}

impl<T: Real> Ops<'_, T> {
    fn deriv(&self, v: &[T]) -> Vec<T> {
        let n = v.len();
        let twelve_h = T::lit(12.0) * self.h;
        let eight = T::lit(8.0);
        (0..n)
            .map(|i| {
                if i < 2 || i + 2 >= n {
                    T::nan()
                } else {
                    (v[i - 2] - eight * v[i - 1] + eight * v[i + 1] - v[i + 2]) / twelve_h
                }
            })
            .collect()
    }

    fn p(&self, v: &[T]) -> Vec<T> {
        let d = self.deriv(v);
        d.iter().zip(v).zip(self.r).map(|((&dv, &x), &r)| dv + self.delta * x / r).collect()
    }

    fn t1(&self, v: &[T]) -> Vec<T> {
        let pp = self.p(&self.p(v));
        pp.iter().zip(v).zip(self.r).map(|((&q, &x), &r)| -q + self.c * x / (r * r)).collect()
    }

    fn t2(&self, v: &[T]) -> Vec<T> {
        v.iter().zip(self.r).map(|(&x, &r)| r * r * x).collect()
    }

    fn s(&self, v: &[T]) -> Vec<T> {
        let rv: Vec<T> = v.iter().zip(self.r).map(|(&x, &r)| r * x).collect();
        let a = self.p(v);
        let b = self.p(&rv);
        a.iter().zip(&b).zip(self.r).map(|((&pa, &pb), &r)| r * pa + pb).collect()
    }
}

fn sub<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x - y).collect()
}

fn scale<T: Real>(a: &[T], s: T) -> Vec<T> {
    a.iter().map(|&x| x * s).collect()
}

/// max |lhs − rhs| / max |rhs| over indices where both are finite and r ≥ WINDOW_MIN_R.
fn relative_residual<T: Real>(lhs: &[T], rhs: &[T], r: &[T]) -> f64 {
    let mut num: f64 = 0.0;
    let mut den: f64 = 0.0;
    for ((&a, &b), &x) in lhs.iter().zip(rhs).zip(r) {
        if !a.is_finite() || !b.is_finite() || x.to_f64_lossy() < WINDOW_MIN_R {
            continue;
        }
        num = num.max((a - b).abs().to_f64_lossy());
        den = den.max(b.abs().to_f64_lossy());
    }
    if den == 0.0 {
        num
    } else {
        num / den
    }
}

/// Verifies the generator algebra on the interior of `grid` for a battery of
/// Gaussian-type test vectors.
pub fn check_t_algebra<T: Real>(
    grid: &RadialGrid<T>,
    params: &DunklParams<T>,
    sector: ParitySector,
    lambda: T,
    flux: &FluxSpin<T>,
) -> Result<TAlgebraReport> {
    let h = grid.step();
    if h.to_f64_lossy() > MAX_STEP {
        return Err(Error::Grid(format!(
            "radial step {h} exceeds {MAX_STEP}; refine the grid for the commutator check"
        )));
    }
    let r = grid.nodes();
    if r.len() < 16 {
        return Err(Error::Grid(format!("radial grid has only {} interior nodes", r.len())));
    }
    let c = centrifugal_coefficient(params, sector, lambda, flux);
    let ops = Ops { r: &r, h, delta: params.delta(), c };
    let half = T::lit(0.5);
    let vectors: [Box<dyn Fn(T) -> T>; 3] = [
        Box::new(move |x: T| (-half * x * x).exp()),
        Box::new(|x: T| x * x * (-x * x).exp()),
        Box::new(|x: T| x * (-(x - T::lit(1.5)) * (x - T::lit(1.5))).exp()),
    ];
    let mut res = [0.0f64; 4];
    for f in &vectors {
        let v: Vec<T> = r.iter().map(|&x| f(x)).collect();
        let t1v = ops.t1(&v);
        let t2v = ops.t2(&v);
        let sv = ops.s(&v);

        let lhs = sub(&ops.t1(&t2v), &ops.t2(&t1v));
        res[0] = res[0].max(relative_residual(&lhs, &scale(&sv, T::lit(-2.0)), &r));

        let lhs = sub(&ops.t2(&sv), &ops.s(&t2v));
        res[1] = res[1].max(relative_residual(&lhs, &scale(&t2v, T::lit(-4.0)), &r));

        let lhs = sub(&ops.t1(&sv), &ops.s(&t1v));
        res[2] = res[2].max(relative_residual(&lhs, &scale(&t1v, T::lit(4.0)), &r));

        let t1t1 = ops.t1(&t1v);
        let lhs = sub(&t1t1, &t1t1);
        let zero = vec![T::zero(); lhs.len()];
        res[3] = res[3].max(relative_residual(&lhs, &zero, &r));
    }
    let names = ["[T1,T2] = -2i T3", "[T2,T3] = 4i T2", "[T1,T3] = -4i T1", "[T1,T1] = 0"];
    let relations: Vec<RelationResidual> = names
        .iter()
        .zip(res)
        .map(|(name, residual)| RelationResidual {
            relation: name.to_string(),
            residual,
            threshold: RESIDUAL_THRESHOLD,
            pass: residual <= RESIDUAL_THRESHOLD,
        })
        .collect();
    let max_residual = res.iter().copied().fold(0.0, f64::max);
    let pass = relations.iter().all(|r| r.pass);
    let diagnostic = (!pass).then(|| {
        format!("commutator residual {max_residual:e} above {RESIDUAL_THRESHOLD:e}; grid step {h} too coarse")
    });
    Ok(TAlgebraReport {
        step: h.to_f64_lossy(),
        centrifugal_coefficient: c.to_f64_lossy(),
        relations,
        max_residual,
        pass,
        diagnostic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Sign;

    fn set_a() -> (DunklParams<f64>, ParitySector, FluxSpin<f64>) {
        (
            DunklParams::new(0.3, -0.3).unwrap(),
            ParitySector::new(Sign::Plus, Sign::Plus),
            FluxSpin::new(0.6, Sign::Plus),
        )
    }

    #[test]
    fn algebra_holds_on_set_a() {
        let (p, s, f) = set_a();
        let grid = RadialGrid::new(8.0, 4000).unwrap();
        let r = check_t_algebra(&grid, &p, s, 2.0, &f).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.relations[3].residual, 0.0);
        assert!(r.relations[1].residual <= 1e-5);
    }

    #[test]
    fn algebra_holds_undeformed() {
        let p = DunklParams::new(0.0, 0.0).unwrap();
        let s = ParitySector::new(Sign::Plus, Sign::Plus);
        let f = FluxSpin::new(0.0, Sign::Plus);
        let grid = RadialGrid::new(8.0, 4000).unwrap();
        let r = check_t_algebra(&grid, &p, s, 0.0, &f).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let (p, s, f) = set_a();
        let grid = RadialGrid::new(8.0, 100).unwrap();
        assert!(matches!(check_t_algebra(&grid, &p, s, 2.0, &f), Err(Error::Grid(_))));
    }

    #[test]
    fn halved_generators_fail_the_stated_constants() {
        // With T₂ = r²/2 and T₃ = (r p + p r)/2 the bracket [T₂, T₃] equals 2iT₂,
        // half of the stated structure constant.
        let (p, _, _) = set_a();
        let grid = RadialGrid::new(8.0, 4000).unwrap();
        let r = grid.nodes();
        let ops = Ops { r: &r, h: grid.step(), delta: p.delta(), c: 0.0 };
        let v: Vec<f64> = r.iter().map(|x| (-0.5 * x * x).exp()).collect();
        let t2h = |w: &[f64]| scale(&ops.t2(w), 0.5);
        let sh = |w: &[f64]| scale(&ops.s(w), 0.5);
        let lhs = sub(&t2h(&sh(&v)), &sh(&t2h(&v)));
        let stated = scale(&t2h(&v), -4.0);
        assert!(relative_residual(&lhs, &stated, &r) > 0.4);
        let halved = scale(&t2h(&v), -2.0);
        assert!(relative_residual(&lhs, &halved, &r) < 1e-5);
    }
}
