//! Envelope check on the scaled density `g = f / x^σ`.
//!
//! On a strip `[X₁, X₂]` in mass, solutions of the truncated system obey the
//! exponential-in-time envelope
//!
//! ```text
//! g(x, t) ≤ h(x, t) = h₀ exp{ ½ h₀ x k (1+X)^λ X^σ (e^t - 1) + t },
//! X  = max(1/X₁, X₂),
//! h₀ = max( sup_strip g(·, 0),  X^σ S₀ b̄ N̄_{⌈α⌉} ),
//! ```
//!
//! provided the truncation support contains the strip.  The check runs the
//! cell-averaged density estimate through the envelope at every snapshot and
//! strip pivot; a violation signals either a solver defect or mis-derived
//! constants, which is exactly why it is kept as a runtime diagnostic.

use serde::Serialize;

use crate::analysis::moments::moment;
use crate::error::{Error, Result};
use crate::grid::GeometricGrid;
use crate::kernels::KernelSystem;
use crate::scalar::Scalar;
use crate::solver::RunOutput;

/// Constants entering the envelope function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeConstants<S: Scalar> {
    /// Strip bound `X = max(1/X₁, X₂)`.
    pub strip_bound: S,
    /// Initial envelope level `h₀`.
    pub h0: S,
    pub k: S,
    pub lambda: S,
    pub sigma: S,
    pub s0: S,
    pub b_bar: S,
    /// Running maximum of the `⌈α⌉`-order moment over the run.
    pub moment_ceil_alpha: S,
}

/// Builds the envelope constants from a finished run.
///
/// The moment constant `N̄_{⌈α⌉}` is taken as the running maximum of the
/// computed moment over the run, and the initial level from the
/// cell-averaged density surrogate, so `g(·, 0) ≤ h₀` holds by construction.
pub fn envelope_constants<S: Scalar>(
    run: &RunOutput<S>,
    system: &KernelSystem<S>,
    grid: &GeometricGrid<S>,
    strip: (S, S),
) -> Result<EnvelopeConstants<S>> {
    let (x1, x2) = strip;
    if !(x1 > S::zero() && x2 > x1) {
        return Err(Error::InvalidConfig("envelope strip must satisfy 0 < X1 < X2".into()));
    }
    let strip_bound = x1.recip().max(x2);
    let sigma = system.coagulation.sigma;
    let alpha = system.selection.alpha;
    let ceil_alpha = if alpha > S::zero() { S::one() } else { S::zero() };

    let moment_ceil_alpha = run
        .states
        .iter()
        .map(|s| moment(s, ceil_alpha, grid))
        .fold(S::zero(), S::max);

    let initial = run.states.first().ok_or_else(|| {
        Error::InvalidConfig("run has no snapshots".into())
    })?;
    let mut g0_sup = S::zero();
    for i in 0..grid.cells() {
        let p = grid.pivot(i);
        if p >= x1 && p <= x2 {
            let g = initial.density_estimate(grid, i) / p.powf(sigma);
            g0_sup = g0_sup.max(g);
        }
    }

    let h0 = g0_sup.max(
        strip_bound.powf(sigma) * system.selection.s0 * system.breakage.b_bar * moment_ceil_alpha,
    );
    Ok(EnvelopeConstants {
        strip_bound,
        h0,
        k: system.coagulation.k,
        lambda: system.coagulation.lambda,
        sigma,
        s0: system.selection.s0,
        b_bar: system.breakage.b_bar,
        moment_ceil_alpha,
    })
}

/// The envelope `h(x, t)`.
pub fn envelope_value<S: Scalar>(c: &EnvelopeConstants<S>, x: S, t: S) -> S {
    let half = S::lit(0.5);
    let growth = half
        * c.h0
        * x
        * c.k
        * (S::one() + c.strip_bound).powf(c.lambda)
        * c.strip_bound.powf(c.sigma)
        * (t.exp() - S::one());
    c.h0 * (growth + t).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopeViolation {
    pub t: f64,
    pub x: f64,
    pub surrogate: f64,
    pub envelope: f64,
}

/// Outcome of the envelope check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopeVerdict {
    pub pass: bool,
    pub h0: f64,
    pub strip_bound: f64,
    pub checked_points: usize,
    pub first_violation: Option<EnvelopeViolation>,
}

/// Verifies `g ≤ h` at every snapshot and strip pivot.
pub fn envelope_check<S: Scalar>(
    run: &RunOutput<S>,
    constants: &EnvelopeConstants<S>,
    strip: (S, S),
    grid: &GeometricGrid<S>,
) -> EnvelopeVerdict {
    let (x1, x2) = strip;
    let mut verdict = EnvelopeVerdict {
        pass: true,
        h0: constants.h0.as_f64(),
        strip_bound: constants.strip_bound.as_f64(),
        checked_points: 0,
        first_violation: None,
    };
    for state in &run.states {
        for i in 0..grid.cells() {
            let p = grid.pivot(i);
            if p < x1 || p > x2 {
                continue;
            }
            verdict.checked_points += 1;
            let g = state.density_estimate(grid, i) / p.powf(constants.sigma);
            let h = envelope_value(constants, p, state.time);
            if g > h && verdict.pass {
                verdict.pass = false;
                verdict.first_violation = Some(EnvelopeViolation {
                    t: state.time.as_f64(),
                    x: p.as_f64(),
                    surrogate: g.as_f64(),
                    envelope: h.as_f64(),
                });
            }
        }
    }
    verdict
}
