//! Admissibility verifiers.
//!
//! The existence theory for the governing equation only applies to kernels
//! satisfying the growth bounds documented on the spec types.  Symbolic
//! proofs are out of reach for black-box (tabulated) kernels, so each bound
//! is checked by a supremum over a logarithmic sampling grid; the breakage
//! integrals use adaptive/graded quadrature that resolves the `x^{-γ}`
//! endpoint singularity.  Verifiers report the worst observed ratio and the
//! point where it occurred, so a failure is directly actionable.

use serde::Serialize;

use super::breakage::BreakageSpec;
use super::coagulation::CoagulationSpec;
use super::selection::SelectionSpec;
use super::KernelSystem;
use crate::error::{Error, Result};
use crate::quadrature::{adaptive_gk, singular_lower};
use crate::scalar::Scalar;

/// Logarithmic sampling plan for the bound checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogGridPlan<S: Scalar> {
    pub lo: S,
    pub hi: S,
    pub points: usize,
}

impl<S: Scalar> LogGridPlan<S> {
    /// Default plan: `[1e-6, 1e6]` with 96 points per axis.
    pub fn default_plan() -> Self {
        Self { lo: S::lit(1e-6), hi: S::lit(1e6), points: 96 }
    }

    pub fn samples(&self) -> Vec<S> {
        let n = self.points.max(2);
        let (llo, lhi) = (self.lo.ln(), self.hi.ln());
        (0..n)
            .map(|i| {
                let t = S::from_usize(i).unwrap() / S::from_usize(n - 1).unwrap();
                (llo + (lhi - llo) * t).exp()
            })
            .collect()
    }
}

/// Outcome of the coagulation bound check
/// `sup K(x,y) (xy)^σ / (1+x+y)^λ ≤ k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoagulationVerdict {
    pub pass: bool,
    /// Supremum of `K (xy)^σ / (1+x+y)^λ` over the sampling grid.
    pub worst_ratio: f64,
    pub worst_point: (f64, f64),
}

/// Outcome of the selection bound check `S(x) ≤ S₀ x^α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SelectionVerdict {
    pub pass: bool,
    pub worst_ratio: f64,
    pub worst_x: f64,
}

/// Per-condition outcome of the breakage checks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BreakageReport {
    /// `∫ x b dx = y` within `1e-8` relative at every sample.
    pub mass_ok: bool,
    /// `∫ b dx ≤ N` at every sample.
    pub count_ok: bool,
    /// `∫ x^{-γ} b dx ≤ N₀ y^{-γ}` at every sample.
    pub gamma_ok: bool,
    /// `sup b(·, y) ≤ b̄` over the window family for samples `y > Y`.
    pub sup_ok: bool,
    pub worst_mass_rel_error: f64,
    pub worst_count: f64,
    /// Supremum of `∫ x^{-γ} b dx / (N₀ y^{-γ})`.
    pub worst_gamma_ratio: f64,
    pub worst_sup: f64,
}

impl BreakageReport {
    pub fn pass(&self) -> bool {
        self.mass_ok && self.count_ok && self.gamma_ok && self.sup_ok
    }
}

/// Bound constants for the closure-based breakage verifier.
#[derive(Debug, Clone, Copy)]
pub struct BreakageBounds<S: Scalar> {
    pub fragment_cap: u32,
    pub gamma: S,
    pub n0: S,
    pub b_bar: S,
    pub y_threshold: S,
}

impl<S: Scalar> From<&BreakageSpec<S>> for BreakageBounds<S> {
    fn from(spec: &BreakageSpec<S>) -> Self {
        Self {
            fragment_cap: spec.fragment_cap,
            gamma: spec.gamma,
            n0: spec.n0,
            b_bar: spec.b_bar,
            y_threshold: spec.y_threshold,
        }
    }
}

/// Relative slack granted to the quadrature-based inequality checks.
const QUAD_SLACK: f64 = 1e-8;

/// Checks `K(x,y) ≤ k (1+x+y)^λ / (xy)^σ` on the sampling grid.
pub fn verify_coagulation_bound<S: Scalar>(
    spec: &CoagulationSpec<S>,
    plan: &LogGridPlan<S>,
) -> Result<CoagulationVerdict> {
    verify_coagulation_bound_with(
        |x, y| spec.rate_unchecked(x, y),
        spec.k,
        spec.sigma,
        spec.lambda,
        plan,
    )
}

/// Closure variant for kernels outside the catalog.
pub fn verify_coagulation_bound_with<S: Scalar, F: Fn(S, S) -> S>(
    kernel: F,
    k: S,
    sigma: S,
    lambda: S,
    plan: &LogGridPlan<S>,
) -> Result<CoagulationVerdict> {
    let xs = plan.samples();
    let one = S::one();
    let mut worst = S::neg_infinity();
    let mut at = (S::zero(), S::zero());
    for &x in &xs {
        for &y in &xs {
            let value = kernel(x, y);
            if !value.is_finite() || value < S::zero() {
                return Err(Error::InvalidConfig(format!(
                    "kernel evaluation invalid at ({:e}, {:e}): {}",
                    x.as_f64(),
                    y.as_f64(),
                    value
                )));
            }
            let ratio = value * (x * y).powf(sigma) / (one + x + y).powf(lambda);
            if ratio > worst {
                worst = ratio;
                at = (x, y);
            }
        }
    }
    Ok(CoagulationVerdict {
        pass: worst <= k,
        worst_ratio: worst.as_f64(),
        worst_point: (at.0.as_f64(), at.1.as_f64()),
    })
}

/// Checks `S(x) ≤ S₀ x^α` on the sampling grid.
pub fn verify_selection_bound<S: Scalar>(
    spec: &SelectionSpec<S>,
    plan: &LogGridPlan<S>,
) -> Result<SelectionVerdict> {
    verify_selection_bound_with(|x| spec.rate_unchecked(x), spec.s0, spec.alpha, plan)
}

pub fn verify_selection_bound_with<S: Scalar, F: Fn(S) -> S>(
    selection: F,
    s0: S,
    alpha: S,
    plan: &LogGridPlan<S>,
) -> Result<SelectionVerdict> {
    let mut worst = S::neg_infinity();
    let mut at = S::zero();
    let mut pass = true;
    for x in plan.samples() {
        let value = selection(x);
        if !value.is_finite() || value < S::zero() {
            return Err(Error::InvalidConfig(format!(
                "selection evaluation invalid at {:e}: {}",
                x.as_f64(),
                value
            )));
        }
        let bound = s0 * x.powf(alpha);
        if value > bound {
            pass = false;
        }
        let ratio = if bound > S::zero() {
            value / bound
        } else if value == S::zero() {
            S::zero()
        } else {
            S::infinity()
        };
        if ratio > worst {
            worst = ratio;
            at = x;
        }
    }
    Ok(SelectionVerdict { pass, worst_ratio: worst.as_f64(), worst_x: at.as_f64() })
}

/// Default parent masses for the breakage checks.
pub fn default_y_samples<S: Scalar>() -> Vec<S> {
    [1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3].iter().map(|&v| S::lit(v)).collect()
}

/// Window family sampled by the supremum condition.  The condition
/// quantifies over all `0 < x₁ < x₂`, which is untestable; this fixed family
/// spans the mass range the solver grids actually use.
const SUP_WINDOWS: [(f64, f64); 4] = [(1e-2, 1e-1), (1e-1, 1.0), (1.0, 10.0), (10.0, 100.0)];

/// Runs the daughter-mass, fragment-count, negative-moment, and supremum
/// checks for `b(·, y)` at each sample.
pub fn verify_breakage<S: Scalar>(
    spec: &BreakageSpec<S>,
    y_samples: &[S],
) -> Result<BreakageReport> {
    verify_breakage_with(|x, y| spec.rate_unchecked(x, y), &BreakageBounds::from(spec), y_samples)
}

pub fn verify_breakage_with<S: Scalar, F: Fn(S, S) -> S>(
    breakage: F,
    bounds: &BreakageBounds<S>,
    y_samples: &[S],
) -> Result<BreakageReport> {
    let slack = S::lit(1.0 + QUAD_SLACK);
    let cap = S::from_u32(bounds.fragment_cap).unwrap();
    let mut report = BreakageReport {
        mass_ok: true,
        count_ok: true,
        gamma_ok: true,
        sup_ok: true,
        worst_mass_rel_error: 0.0,
        worst_count: 0.0,
        worst_gamma_ratio: 0.0,
        worst_sup: 0.0,
    };
    for &y in y_samples {
        if !(y > S::zero()) {
            return Err(Error::NonpositiveMass { x: y.as_f64(), y: y.as_f64() });
        }
        let mass = split_integral(&|x| x * breakage(x, y), y, bounds.gamma)?;
        let rel = ((mass - y) / y).abs();
        report.worst_mass_rel_error = report.worst_mass_rel_error.max(rel.as_f64());
        if rel > S::lit(QUAD_SLACK) {
            report.mass_ok = false;
        }

        let count = split_integral(&|x| breakage(x, y), y, bounds.gamma)?;
        report.worst_count = report.worst_count.max(count.as_f64());
        if count > cap * slack {
            report.count_ok = false;
        }

        let neg = split_integral(&|x: S| x.powf(-bounds.gamma) * breakage(x, y), y, bounds.gamma)?;
        let allowed = bounds.n0 * y.powf(-bounds.gamma);
        let ratio = neg / allowed;
        report.worst_gamma_ratio = report.worst_gamma_ratio.max(ratio.as_f64());
        if neg > allowed * slack {
            report.gamma_ok = false;
        }

        if y > bounds.y_threshold {
            for (lo, hi) in SUP_WINDOWS {
                let lo = S::lit(lo);
                let hi = S::lit(hi).min(y);
                if hi <= lo {
                    continue;
                }
                let sup = window_sup(&breakage, lo, hi, y, 128);
                report.worst_sup = report.worst_sup.max(sup.as_f64());
                if sup > bounds.b_bar * S::lit(1.0 + 1e-12) {
                    report.sup_ok = false;
                }
            }
        }
    }
    Ok(report)
}

/// `∫₀^y f dx` split at `y/2`: a graded mesh handles the (possibly singular)
/// lower half, adaptive Gauss-Kronrod the upper half.
fn split_integral<S: Scalar, F: Fn(S) -> S>(f: &F, y: S, gamma: S) -> Result<S> {
    let half = y * S::lit(0.5);
    let lower = singular_lower(f, half, gamma, S::lit(1e-11)).map_err(|e| rewrap(e, y))?;
    let upper = adaptive_gk(f, half, y, S::lit(1e-11), S::lit(1e-300)).map_err(|e| rewrap(e, y))?;
    Ok(lower + upper)
}

fn rewrap<S: Scalar>(err: Error, y: S) -> Error {
    match err {
        Error::QuadratureNonConvergence { detail, .. } => {
            Error::QuadratureNonConvergence { sample: y.as_f64(), detail }
        }
        other => other,
    }
}

fn window_sup<S: Scalar, F: Fn(S, S) -> S>(f: &F, lo: S, hi: S, y: S, points: usize) -> S {
    let (llo, lhi) = (lo.ln(), hi.ln());
    let mut sup = S::neg_infinity();
    for i in 0..points {
        let t = S::from_usize(i).unwrap() / S::from_usize(points - 1).unwrap();
        let x = (llo + (lhi - llo) * t).exp();
        sup = sup.max(f(x, y));
    }
    sup
}

/// Verdicts for a whole kernel system (raw, untruncated specs: truncation
/// only ever lowers the rates, so admissibility is inherited).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemVerdict {
    pub coagulation: CoagulationVerdict,
    pub selection: SelectionVerdict,
    pub breakage: BreakageReport,
}

impl SystemVerdict {
    pub fn pass(&self) -> bool {
        self.coagulation.pass && self.selection.pass && self.breakage.pass()
    }

    pub fn summary(&self) -> String {
        let mut lines = Vec::new();
        lines.push(format!(
            "coagulation bound: {} (worst ratio {:.6e} at ({:.3e}, {:.3e}))",
            verdict_word(self.coagulation.pass),
            self.coagulation.worst_ratio,
            self.coagulation.worst_point.0,
            self.coagulation.worst_point.1
        ));
        lines.push(format!(
            "selection bound: {} (worst ratio {:.6e} at {:.3e})",
            verdict_word(self.selection.pass),
            self.selection.worst_ratio,
            self.selection.worst_x
        ));
        lines.push(format!(
            "breakage mass: {}, count: {}, negative moment: {}, supremum: {}",
            verdict_word(self.breakage.mass_ok),
            verdict_word(self.breakage.count_ok),
            verdict_word(self.breakage.gamma_ok),
            verdict_word(self.breakage.sup_ok)
        ));
        lines.join("\n")
    }
}

fn verdict_word(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "FAIL"
    }
}

/// Runs all verifiers for a system with the given plan and the default
/// parent-mass samples.
pub fn verify_system<S: Scalar>(
    system: &KernelSystem<S>,
    plan: &LogGridPlan<S>,
) -> Result<SystemVerdict> {
    Ok(SystemVerdict {
        coagulation: verify_coagulation_bound(&system.coagulation, plan)?,
        selection: verify_selection_bound(&system.selection, plan)?,
        breakage: verify_breakage(&system.breakage, &default_y_samples())?,
    })
}
