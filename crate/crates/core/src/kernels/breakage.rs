//! Multiple-fragmentation daughter distributions.
//!
//! A breakage function `b(x, y)` gives the number density of fragments of
//! mass `x` produced when a parent of mass `y` breaks; `b(x,y) = 0` for
//! `x > y`.  Admissible distributions satisfy
//!
//! ```text
//! ∫₀^y x b(x,y) dx = y                 (fragments carry the parent mass)
//! ∫₀^y   b(x,y) dx = ν(y) ≤ N          (bounded fragment count, N ≥ 2)
//! ∫₀^y x^{-γ} b(x,y) dx ≤ N₀ y^{-γ}    (σ < γ < 1)
//! sup_{x ∈ [x₁,x₂]} b(x,y) ≤ b̄        (for y above a threshold Y)
//! ```
//!
//! The catalog forms have closed-form fragment counts and negative moments;
//! their default constants below are derived from those closed forms and are
//! cross-checked by quadrature in the verifier tests.

use super::tabulated::Table2;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub enum BreakageForm<S: Scalar> {
    /// `b = 2/y`: two fragments, uniform in fragment mass.
    BinaryUniform,
    /// `b = 6 (y - x) / y²`: three fragments, linearly weighted toward small
    /// fragments.
    TernaryUniform,
    /// `b = 12 x (y - x) / y³`: two fragments with a parabolic profile that
    /// suppresses very small and very large fragments.
    Parabolic,
    /// Tabulated daughter distribution (zero is enforced for `x > y`).
    Tabulated(Table2<S>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BreakageSpec<S: Scalar> {
    pub form: BreakageForm<S>,
    /// Fragment-count cap `N ≥ 2`.
    pub fragment_cap: u32,
    /// Negative-moment exponent `γ`, required to satisfy `σ < γ < 1`.
    pub gamma: S,
    /// Negative-moment constant `N₀ > 0`.
    pub n0: S,
    /// Supremum bound `b̄ > 0` valid for parents above `y_threshold`.
    pub b_bar: S,
    /// Parent-mass threshold `Y > 0` for the supremum bound.
    pub y_threshold: S,
}

impl<S: Scalar> BreakageSpec<S> {
    /// Binary uniform distribution with default `γ = 1/2`.
    pub fn binary_uniform() -> Self {
        Self::binary_uniform_with_gamma(S::lit(0.5))
    }

    /// Binary uniform with explicit `γ`; `N₀ = 2/(1-γ)` from
    /// `∫ x^{-γ} (2/y) dx = 2/(1-γ) · y^{-γ}`.
    pub fn binary_uniform_with_gamma(gamma: S) -> Self {
        let two = S::lit(2.0);
        Self {
            form: BreakageForm::BinaryUniform,
            fragment_cap: 2,
            gamma,
            n0: two / (S::one() - gamma),
            b_bar: two,
            y_threshold: S::one(),
        }
    }

    /// Ternary distribution with default `γ = 1/2`.
    pub fn ternary_uniform() -> Self {
        Self::ternary_uniform_with_gamma(S::lit(0.5))
    }

    /// `N₀ = 6/((1-γ)(2-γ))` from the closed-form negative moment.
    pub fn ternary_uniform_with_gamma(gamma: S) -> Self {
        let one = S::one();
        let six = S::lit(6.0);
        Self {
            form: BreakageForm::TernaryUniform,
            fragment_cap: 3,
            gamma,
            n0: six / ((one - gamma) * (S::lit(2.0) - gamma)),
            b_bar: six,
            y_threshold: one,
        }
    }

    /// Parabolic distribution with default `γ = 1/2`.
    pub fn parabolic() -> Self {
        Self::parabolic_with_gamma(S::lit(0.5))
    }

    /// `N₀ = 12/((2-γ)(3-γ))`; the supremum is `3/y` at `x = y/2`.
    pub fn parabolic_with_gamma(gamma: S) -> Self {
        Self {
            form: BreakageForm::Parabolic,
            fragment_cap: 2,
            gamma,
            n0: S::lit(12.0) / ((S::lit(2.0) - gamma) * (S::lit(3.0) - gamma)),
            b_bar: S::lit(3.0),
            y_threshold: S::one(),
        }
    }

    pub fn tabulated(
        table: Table2<S>,
        fragment_cap: u32,
        gamma: S,
        n0: S,
        b_bar: S,
        y_threshold: S,
    ) -> Self {
        Self { form: BreakageForm::Tabulated(table), fragment_cap, gamma, n0, b_bar, y_threshold }
    }

    /// Structural invariants; `sigma` comes from the paired coagulation
    /// kernel since `γ` must exceed it.
    pub fn validate(&self, sigma: S) -> Result<()> {
        if self.fragment_cap < 2 {
            return Err(Error::InvalidConfig("fragment cap N must be at least 2".into()));
        }
        if !(self.gamma > sigma && self.gamma < S::one()) {
            return Err(Error::InvalidConfig(
                "gamma must lie strictly between sigma and 1".into(),
            ));
        }
        if !(self.n0 > S::zero()) {
            return Err(Error::InvalidConfig("N0 must be positive".into()));
        }
        if !(self.b_bar > S::zero()) {
            return Err(Error::InvalidConfig("b_bar must be positive".into()));
        }
        if !(self.y_threshold > S::zero()) {
            return Err(Error::InvalidConfig("Y must be positive".into()));
        }
        if let BreakageForm::Tabulated(t) = &self.form {
            if t.min_value() < S::zero() {
                return Err(Error::InvalidConfig("tabulated breakage has negative entries".into()));
            }
        }
        Ok(())
    }

    /// `b(x, y)` for positive arguments; zero when `x > y`.
    pub fn rate_unchecked(&self, x: S, y: S) -> S {
        if x > y || x <= S::zero() {
            return S::zero();
        }
        match &self.form {
            BreakageForm::BinaryUniform => S::lit(2.0) / y,
            BreakageForm::TernaryUniform => S::lit(6.0) * (y - x) / (y * y),
            BreakageForm::Parabolic => S::lit(12.0) * x * (y - x) / (y * y * y),
            BreakageForm::Tabulated(t) => t.eval(x, y),
        }
    }

    /// Closed-form fragment count `ν(y)` where one exists.
    pub fn fragment_count(&self) -> Option<S> {
        match self.form {
            BreakageForm::BinaryUniform | BreakageForm::Parabolic => Some(S::lit(2.0)),
            BreakageForm::TernaryUniform => Some(S::lit(3.0)),
            BreakageForm::Tabulated(_) => None,
        }
    }

    pub fn form_name(&self) -> &'static str {
        match self.form {
            BreakageForm::BinaryUniform => "binary-uniform",
            BreakageForm::TernaryUniform => "ternary-uniform",
            BreakageForm::Parabolic => "parabolic",
            BreakageForm::Tabulated(_) => "custom",
        }
    }
}

/// Evaluates `b(x, y)`, rejecting non-positive masses.
pub fn eval_breakage<S: Scalar>(spec: &BreakageSpec<S>, x: S, y: S) -> Result<S> {
    if !(x > S::zero()) || !(y > S::zero()) {
        return Err(Error::NonpositiveMass { x: x.as_f64(), y: y.as_f64() });
    }
    Ok(spec.rate_unchecked(x, y))
}
