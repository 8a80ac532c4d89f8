//! Selection (breakage-rate) functions with the growth bound `S(x) ≤ S₀ x^α`,
//! `0 ≤ α ≤ 1`.

use super::tabulated::Table1;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub enum SelectionForm<S: Scalar> {
    /// No fragmentation.
    Zero,
    /// `S(x) = S₀`.
    Constant,
    /// `S(x) = S₀ x^exponent`.  The bound exponent `α` is tracked separately
    /// so an inadmissible pairing can be expressed and caught by the
    /// verifier.
    Power { exponent: S },
    /// Piecewise-linear tabulated rate.
    Tabulated(Table1<S>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionSpec<S: Scalar> {
    pub form: SelectionForm<S>,
    /// Bound constant `S₀ ≥ 0`.
    pub s0: S,
    /// Bound exponent `α ∈ [0, 1]`.
    pub alpha: S,
}

impl<S: Scalar> SelectionSpec<S> {
    pub fn zero() -> Self {
        Self { form: SelectionForm::Zero, s0: S::zero(), alpha: S::zero() }
    }

    pub fn constant(s0: S) -> Self {
        Self { form: SelectionForm::Constant, s0, alpha: S::zero() }
    }

    /// `S(x) = s0 · x^alpha` with the bound saturated.
    pub fn power(s0: S, alpha: S) -> Self {
        Self { form: SelectionForm::Power { exponent: alpha }, s0, alpha }
    }

    pub fn tabulated(table: Table1<S>, s0: S, alpha: S) -> Self {
        Self { form: SelectionForm::Tabulated(table), s0, alpha }
    }

    pub fn validate(&self) -> Result<()> {
        if self.s0 < S::zero() {
            return Err(Error::InvalidConfig("S0 must be nonnegative".into()));
        }
        if !(self.alpha >= S::zero() && self.alpha <= S::one()) {
            return Err(Error::InvalidConfig("alpha must lie in [0,1]".into()));
        }
        if let SelectionForm::Tabulated(t) = &self.form {
            if t.min_value() < S::zero() {
                return Err(Error::InvalidConfig("tabulated selection has negative entries".into()));
            }
        }
        Ok(())
    }

    /// `S(x)` for `x > 0`.
    pub fn rate_unchecked(&self, x: S) -> S {
        match &self.form {
            SelectionForm::Zero => S::zero(),
            SelectionForm::Constant => self.s0,
            SelectionForm::Power { exponent } => self.s0 * x.powf(*exponent),
            SelectionForm::Tabulated(t) => t.eval(x),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.form, SelectionForm::Zero) || self.s0 == S::zero()
    }

    pub fn form_name(&self) -> &'static str {
        match self.form {
            SelectionForm::Zero => "zero",
            SelectionForm::Constant => "constant",
            SelectionForm::Power { .. } => "power",
            SelectionForm::Tabulated(_) => "custom",
        }
    }
}

/// Evaluates `S(x)`, rejecting non-positive mass.
pub fn eval_selection<S: Scalar>(spec: &SelectionSpec<S>, x: S) -> Result<S> {
    if !(x > S::zero()) {
        return Err(Error::NonpositiveMass { x: x.as_f64(), y: f64::NAN });
    }
    Ok(spec.rate_unchecked(x))
}
