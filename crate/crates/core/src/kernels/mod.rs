//! Kernel catalog, admissibility verification, and truncation.

pub mod breakage;
pub mod coagulation;
pub mod selection;
pub mod tabulated;
pub mod truncation;
pub mod verify;

pub use breakage::{eval_breakage, BreakageForm, BreakageSpec};
pub use coagulation::{eval_coagulation, BoundConstants, CoagulationForm, CoagulationSpec};
pub use selection::{eval_selection, SelectionForm, SelectionSpec};
pub use tabulated::{Table1, Table2};
pub use truncation::TruncationParams;
pub use verify::{
    default_y_samples, verify_breakage, verify_breakage_with, verify_coagulation_bound,
    verify_coagulation_bound_with, verify_selection_bound, verify_selection_bound_with,
    verify_system, BreakageBounds, BreakageReport, CoagulationVerdict, LogGridPlan,
    SelectionVerdict, SystemVerdict,
};

use crate::error::Result;
use crate::scalar::Scalar;

/// A full kernel system: coagulation rate, selection rate, daughter
/// distribution, and (optionally) a compact-support truncation applied to
/// the first two.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSystem<S: Scalar> {
    pub coagulation: CoagulationSpec<S>,
    pub selection: SelectionSpec<S>,
    pub breakage: BreakageSpec<S>,
    pub truncation: Option<TruncationParams<S>>,
}

impl<S: Scalar> KernelSystem<S> {
    pub fn new(
        coagulation: CoagulationSpec<S>,
        selection: SelectionSpec<S>,
        breakage: BreakageSpec<S>,
    ) -> Result<Self> {
        coagulation.validate()?;
        selection.validate()?;
        breakage.validate(coagulation.sigma)?;
        Ok(Self { coagulation, selection, breakage, truncation: None })
    }

    /// Replaces the active truncation, yielding `K_n(x,y) = φ(x)φ(y)K(x,y)`
    /// and `S_n(x) = φ(x)S(x)`; the daughter distribution is untouched.
    pub fn truncate(&self, params: TruncationParams<S>) -> Self {
        let mut out = self.clone();
        out.truncation = Some(params);
        out
    }

    /// Drops any active truncation.
    pub fn untruncated(&self) -> Self {
        let mut out = self.clone();
        out.truncation = None;
        out
    }

    /// Effective coagulation rate, truncation applied.
    pub fn coagulation_rate(&self, x: S, y: S) -> S {
        let base = self.coagulation.rate_unchecked(x, y);
        match &self.truncation {
            None => base,
            Some(t) => t.cutoff(x) * t.cutoff(y) * base,
        }
    }

    /// Effective selection rate, truncation applied.
    pub fn selection_rate(&self, x: S) -> S {
        let base = self.selection.rate_unchecked(x);
        match &self.truncation {
            None => base,
            Some(t) => t.cutoff(x) * base,
        }
    }

    /// Daughter distribution (never truncated).
    pub fn breakage_rate(&self, x: S, y: S) -> S {
        self.breakage.rate_unchecked(x, y)
    }
}

/// Applies a truncation to a verified system.
pub fn truncate<S: Scalar>(
    system: &KernelSystem<S>,
    params: TruncationParams<S>,
) -> KernelSystem<S> {
    system.truncate(params)
}
