//! Coagulation kernel catalog.
//!
//! Every kernel ships with the constants `(k, σ, λ)` of its admissibility
//! bound
//!
//! ```text
//! K(x,y) ≤ k (1 + x + y)^λ / (xy)^σ,     0 ≤ σ < 1,  λ - σ ∈ [0, 1],
//! ```
//!
//! which controls both the singularity strength at small mass and the growth
//! at large mass (at most linear).  Catalog constants are verified by the
//! grid-supremum check in [`crate::kernels::verify`]; custom tabulated
//! kernels must supply their own.

use serde::Serialize;

use super::tabulated::Table2;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Functional form of the coagulation rate.
#[derive(Debug, Clone, PartialEq)]
pub enum CoagulationForm<S: Scalar> {
    /// No coagulation.
    Zero,
    /// `K = 1`.
    Constant,
    /// `K = x + y`.
    Sum,
    /// Brownian-motion kernel `K = (x^{1/a} + y^{1/a})(x^{-1/a} + y^{-1/a})`
    /// with fractal dimension `a > 1`; singular on both axes.
    Smoluchowski { fractal_dim: S },
    /// Equipartition-of-kinetic-energy kernel
    /// `K = (x^{1/3} + y^{1/3})^2 sqrt(1/x + 1/y)`.
    EquipartitionKineticEnergy,
    /// Granulation kinetics `K = (x + y)^{0.71} / (xy)^{0.062}`.
    Granulation,
    /// Shear kernel, linear velocity profile: `K = (x^{1/3} + y^{1/3})^3`.
    ShearLinear,
    /// Shear kernel, non-linear velocity profile:
    /// `K = (x^{1/3} + y^{1/3})^{7/3}`.
    ShearNonlinear,
    /// Bilinear interpolation of a tabulated rate; symmetrized by evaluating
    /// at the ordered pair.
    Tabulated(Table2<S>),
}

/// A coagulation kernel together with its bound constants.
#[derive(Debug, Clone, PartialEq)]
pub struct CoagulationSpec<S: Scalar> {
    pub form: CoagulationForm<S>,
    /// Bound prefactor `k > 0`.
    pub k: S,
    /// Singularity exponent `σ ∈ [0, 1)`.
    pub sigma: S,
    /// Growth exponent `λ`, with `λ - σ ∈ [0, 1]`.
    pub lambda: S,
}

impl<S: Scalar> CoagulationSpec<S> {
    pub fn zero() -> Self {
        Self { form: CoagulationForm::Zero, k: S::one(), sigma: S::zero(), lambda: S::zero() }
    }

    pub fn constant() -> Self {
        Self { form: CoagulationForm::Constant, k: S::one(), sigma: S::zero(), lambda: S::zero() }
    }

    pub fn sum() -> Self {
        Self { form: CoagulationForm::Sum, k: S::one(), sigma: S::zero(), lambda: S::one() }
    }

    /// Smoluchowski kernel with `σ = 1/a`, `λ = 2/a`, `k = 4`; the bound
    /// follows from `K (xy)^{1/a} = (x^{1/a} + y^{1/a})^2 ≤ 4 max(x,y)^{2/a}`.
    pub fn smoluchowski(fractal_dim: S) -> Self {
        let inv = fractal_dim.recip();
        Self {
            form: CoagulationForm::Smoluchowski { fractal_dim },
            k: S::lit(4.0),
            sigma: inv,
            lambda: inv + inv,
        }
    }

    pub fn equipartition_kinetic_energy() -> Self {
        Self {
            form: CoagulationForm::EquipartitionKineticEnergy,
            k: S::lit(6.0),
            sigma: S::lit(0.5),
            lambda: S::lit(7.0 / 6.0),
        }
    }

    pub fn granulation() -> Self {
        Self {
            form: CoagulationForm::Granulation,
            k: S::one(),
            sigma: S::lit(0.062),
            lambda: S::lit(0.71),
        }
    }

    pub fn shear_linear() -> Self {
        Self { form: CoagulationForm::ShearLinear, k: S::lit(4.0), sigma: S::zero(), lambda: S::one() }
    }

    pub fn shear_nonlinear() -> Self {
        Self {
            form: CoagulationForm::ShearNonlinear,
            k: S::lit(4.0),
            sigma: S::zero(),
            lambda: S::lit(7.0 / 9.0),
        }
    }

    pub fn tabulated(table: Table2<S>, k: S, sigma: S, lambda: S) -> Self {
        Self { form: CoagulationForm::Tabulated(table), k, sigma, lambda }
    }

    /// Checks the structural invariants on the bound constants.
    pub fn validate(&self) -> Result<()> {
        let zero = S::zero();
        let one = S::one();
        if !(self.k > zero) {
            return Err(Error::InvalidConfig("coagulation k must be positive".into()));
        }
        if !(self.sigma >= zero && self.sigma < one) {
            return Err(Error::InvalidConfig("sigma must lie in [0,1)".into()));
        }
        let growth = self.lambda - self.sigma;
        if !(growth >= zero && growth <= one) {
            return Err(Error::InvalidConfig("lambda - sigma must lie in [0,1]".into()));
        }
        if let CoagulationForm::Smoluchowski { fractal_dim } = self.form {
            if !(fractal_dim > one) {
                return Err(Error::InvalidConfig(
                    "smoluchowski fractal dimension must exceed 1".into(),
                ));
            }
        }
        if let CoagulationForm::Tabulated(t) = &self.form {
            if t.min_value() < zero {
                return Err(Error::InvalidConfig("tabulated kernel has negative entries".into()));
            }
        }
        Ok(())
    }

    /// Rate `K(x, y)` assuming positive masses.
    ///
    /// Every catalog form is built from commutative subexpressions of the
    /// argument pair, so evaluation is bit-exactly symmetric.
    pub fn rate_unchecked(&self, x: S, y: S) -> S {
        let third = S::lit(1.0 / 3.0);
        match &self.form {
            CoagulationForm::Zero => S::zero(),
            CoagulationForm::Constant => S::one(),
            CoagulationForm::Sum => x + y,
            CoagulationForm::Smoluchowski { fractal_dim } => {
                let p = fractal_dim.recip();
                (x.powf(p) + y.powf(p)) * (x.powf(-p) + y.powf(-p))
            }
            CoagulationForm::EquipartitionKineticEnergy => {
                let s = x.powf(third) + y.powf(third);
                s * s * (x.recip() + y.recip()).sqrt()
            }
            CoagulationForm::Granulation => {
                (x + y).powf(S::lit(0.71)) / (x * y).powf(S::lit(0.062))
            }
            CoagulationForm::ShearLinear => {
                let s = x.powf(third) + y.powf(third);
                s * s * s
            }
            CoagulationForm::ShearNonlinear => {
                (x.powf(third) + y.powf(third)).powf(S::lit(7.0 / 3.0))
            }
            CoagulationForm::Tabulated(t) => {
                let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
                t.eval(lo, hi)
            }
        }
    }

    /// Form label used in reports.
    pub fn form_name(&self) -> &'static str {
        match self.form {
            CoagulationForm::Zero => "zero",
            CoagulationForm::Constant => "constant",
            CoagulationForm::Sum => "sum",
            CoagulationForm::Smoluchowski { .. } => "smoluchowski",
            CoagulationForm::EquipartitionKineticEnergy => "eke",
            CoagulationForm::Granulation => "granulation",
            CoagulationForm::ShearLinear => "shear-linear",
            CoagulationForm::ShearNonlinear => "shear-nonlinear",
            CoagulationForm::Tabulated(_) => "custom-tabulated",
        }
    }
}

/// Evaluates `K(x, y)`, rejecting non-positive masses.
pub fn eval_coagulation<S: Scalar>(spec: &CoagulationSpec<S>, x: S, y: S) -> Result<S> {
    if !(x > S::zero()) || !(y > S::zero()) {
        return Err(Error::NonpositiveMass { x: x.as_f64(), y: y.as_f64() });
    }
    Ok(spec.rate_unchecked(x, y))
}

/// Bound constants exported into reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundConstants {
    pub k: f64,
    pub sigma: f64,
    pub lambda: f64,
}

impl<S: Scalar> From<&CoagulationSpec<S>> for BoundConstants {
    fn from(s: &CoagulationSpec<S>) -> Self {
        Self { k: s.k.as_f64(), sigma: s.sigma.as_f64(), lambda: s.lambda.as_f64() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smoluchowski_reference_values() {
        let k: CoagulationSpec<f64> = CoagulationSpec::smoluchowski(3.0);
        // (1+1)(1+1) = 4
        assert_eq!(eval_coagulation(&k, 1.0, 1.0).unwrap(), 4.0);
        // (2+1)(1/2+1) = 4.5
        assert!((eval_coagulation(&k, 8.0, 1.0).unwrap() - 4.5).abs() < 1e-14);
    }

    #[test]
    fn constant_kernel_ignores_arguments() {
        let k: CoagulationSpec<f64> = CoagulationSpec::constant();
        assert_eq!(eval_coagulation(&k, 5.0, 0.2).unwrap(), 1.0);
    }

    #[test]
    fn nonpositive_mass_is_a_domain_error() {
        let k: CoagulationSpec<f64> = CoagulationSpec::constant();
        assert!(matches!(
            eval_coagulation(&k, 0.0, 1.0),
            Err(Error::NonpositiveMass { .. })
        ));
        assert!(eval_coagulation(&k, 1.0, -2.0).is_err());
    }

    #[test]
    fn catalog_validates() {
        let specs: Vec<CoagulationSpec<f64>> = vec![
            CoagulationSpec::zero(),
            CoagulationSpec::constant(),
            CoagulationSpec::sum(),
            CoagulationSpec::smoluchowski(3.0),
            CoagulationSpec::equipartition_kinetic_energy(),
            CoagulationSpec::granulation(),
            CoagulationSpec::shear_linear(),
            CoagulationSpec::shear_nonlinear(),
        ];
        for s in &specs {
            s.validate().unwrap();
        }
    }

    #[test]
    fn invalid_constants_rejected() {
        let mut s: CoagulationSpec<f64> = CoagulationSpec::constant();
        s.sigma = 1.0;
        assert!(s.validate().is_err());
        let mut s: CoagulationSpec<f64> = CoagulationSpec::constant();
        s.lambda = 1.5; // lambda - sigma > 1
        assert!(s.validate().is_err());
        let mut s: CoagulationSpec<f64> = CoagulationSpec::constant();
        s.k = 0.0;
        assert!(s.validate().is_err());
    }

    #[test]
    fn evaluation_is_bitwise_symmetric() {
        let specs: Vec<CoagulationSpec<f64>> = vec![
            CoagulationSpec::sum(),
            CoagulationSpec::smoluchowski(2.5),
            CoagulationSpec::equipartition_kinetic_energy(),
            CoagulationSpec::granulation(),
            CoagulationSpec::shear_linear(),
            CoagulationSpec::shear_nonlinear(),
        ];
        let mut x = 3.7e-4;
        for s in &specs {
            let mut y = 8.1e2;
            for _ in 0..50 {
                assert_eq!(s.rate_unchecked(x, y), s.rate_unchecked(y, x));
                y *= 0.7;
            }
            x *= 1.9;
        }
    }
}
