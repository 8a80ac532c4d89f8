//! Weighted-distance diagnostics for uniqueness.
//!
//! Two solutions are compared in the metric
//! `M(t) = ∫ (x^{k1} + x^{-k2}) |u₁ - u₂| dx`, with exponents constrained by
//!
//! ```text
//! 0 ≤ (λ - σ) + k₁ ≤ max(α, 1),
//! 0 ≤ σ - k₁ ≤ r₂,
//! 0 < k₂ ≤ min(|r₂ - σ|, α).
//! ```
//!
//! `k₁` is free within an interval; the midpoint is chosen for
//! reproducibility.  `k₂` is pinned to its upper bound.

use crate::error::{Error, Result};
use crate::grid::{DensityState, GeometricGrid};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniquenessExponents<S: Scalar> {
    pub k1: S,
    pub k2: S,
}

/// Resolves the exponent constraints, erring with the violated interval when
/// the system is infeasible.
pub fn choose_uniqueness_exponents<S: Scalar>(
    lambda: S,
    sigma: S,
    alpha: S,
    r2: S,
) -> Result<UniquenessExponents<S>> {
    let growth = lambda - sigma;
    let lo = (-growth).max(sigma - r2);
    let hi = (alpha.max(S::one()) - growth).min(sigma);
    if lo > hi {
        return Err(Error::InfeasibleExponents(format!(
            "k1 interval empty: [{:e}, {:e}] from growth {:e}, sigma {:e}, r2 {:e}",
            lo.as_f64(),
            hi.as_f64(),
            growth.as_f64(),
            sigma.as_f64(),
            r2.as_f64()
        )));
    }
    let k2_cap = (r2 - sigma).abs().min(alpha);
    if !(k2_cap > S::zero()) {
        return Err(Error::InfeasibleExponents(format!(
            "k2 interval empty: 0 < k2 <= min(|r2 - sigma|, alpha) = {:e}",
            k2_cap.as_f64()
        )));
    }
    let exps = UniquenessExponents { k1: (lo + hi) * S::lit(0.5), k2: k2_cap };
    // the constraints are re-checked on exit
    let eps = S::lit(1e-12);
    assert!(growth + exps.k1 >= -eps && growth + exps.k1 <= alpha.max(S::one()) + eps);
    assert!(sigma - exps.k1 >= -eps && sigma - exps.k1 <= r2 + eps);
    assert!(exps.k2 > S::zero() && exps.k2 <= k2_cap + eps);
    Ok(exps)
}

/// `Σ (p^{k1} + p^{-k2}) |a_i - b_i|` over a shared grid.
pub fn uniqueness_distance<S: Scalar>(
    a: &DensityState<S>,
    b: &DensityState<S>,
    exps: &UniquenessExponents<S>,
    grid: &GeometricGrid<S>,
) -> Result<S> {
    let m = grid.cells();
    if a.conc.len() != m || b.conc.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: if a.conc.len() != m { a.conc.len() } else { b.conc.len() },
        });
    }
    let mut acc = S::zero();
    for i in 0..m {
        let p = grid.pivot(i);
        acc = acc + (p.powf(exps.k1) + p.powf(-exps.k2)) * (a.conc[i] - b.conc[i]).abs();
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::build_grid;

    #[test]
    fn reference_exponent_case() {
        // lambda = 2/3, sigma = 1/3, alpha = 1, r2 = 1/2:
        // k1 in [-1/6, 1/3] -> midpoint 1/12; k2 = min(1/6, 1) = 1/6
        let e = choose_uniqueness_exponents::<f64>(2.0 / 3.0, 1.0 / 3.0, 1.0, 0.5).unwrap();
        assert!((e.k1 - 1.0 / 12.0).abs() < 1e-15);
        assert!((e.k2 - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn linear_growth_case() {
        // lambda = 1, sigma = 0, alpha = 1, r2 = 1/2:
        // k1 in [-1/2, 0] -> midpoint -1/4; k2 = 1/2
        let e = choose_uniqueness_exponents::<f64>(1.0, 0.0, 1.0, 0.5).unwrap();
        assert!((e.k1 + 0.25).abs() < 1e-15);
        assert!((e.k2 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn zero_alpha_is_infeasible() {
        let r = choose_uniqueness_exponents::<f64>(0.0, 0.0, 0.0, 0.5);
        assert!(matches!(r, Err(Error::InfeasibleExponents(_))));
    }

    #[test]
    fn distance_is_symmetric_and_zero_on_equal_states() {
        let grid = build_grid::<f64>(1e-2, 1e2, 24).unwrap();
        let e = choose_uniqueness_exponents::<f64>(2.0 / 3.0, 1.0 / 3.0, 1.0, 0.5).unwrap();
        let a = DensityState { time: 0.0, conc: (0..24).map(|i| (i as f64).sin().abs()).collect() };
        let b = DensityState { time: 0.0, conc: (0..24).map(|i| (i as f64).cos().abs()).collect() };
        assert_eq!(uniqueness_distance(&a, &a, &e, &grid).unwrap(), 0.0);
        assert_eq!(
            uniqueness_distance(&a, &b, &e, &grid).unwrap(),
            uniqueness_distance(&b, &a, &e, &grid).unwrap()
        );
        assert!(uniqueness_distance(&a, &b, &e, &grid).unwrap() > 0.0);
    }

    #[test]
    fn grid_mismatch_is_rejected() {
        let grid = build_grid::<f64>(1e-2, 1e2, 24).unwrap();
        let e = choose_uniqueness_exponents::<f64>(2.0 / 3.0, 1.0 / 3.0, 1.0, 0.5).unwrap();
        let a = DensityState::zero(24);
        let b = DensityState::zero(23);
        assert!(matches!(
            uniqueness_distance(&a, &b, &e, &grid),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
