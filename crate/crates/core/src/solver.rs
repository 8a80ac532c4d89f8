//! Adaptive explicit time integration.
//!
//! The truncated systems this solver targets are non-stiff at benchmark
//! scales, so the stepper is an embedded Dormand-Prince 5(4) pair with a
//! mixed absolute/relative error norm.  Stiffness is detected (step-size
//! underflow) and reported as an error rather than worked around.
//!
//! The leak register is integrated as an extra state component with the same
//! Runge-Kutta weights as the concentrations, so the discrete mass ledger
//!
//! ```text
//! N₁(t) + leak(t) = N₁(0)
//! ```
//!
//! closes to round-off regardless of step size.  Negative concentrations
//! beyond `-abs_tol` reject the step and halve `dt`; residuals in
//! `[-abs_tol, 0)` are clipped to zero and the clipped mass is logged.

use crate::analysis::moments::moment;
use crate::error::{Error, Result};
use crate::grid::{DensityState, GeometricGrid};
use crate::kernels::verify::{verify_system, LogGridPlan};
use crate::kernels::KernelSystem;
use crate::operators::{assemble, OperatorTables};
use crate::scalar::Scalar;

/// Dormand-Prince 5(4) tableau.
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fourth-order weights of the embedded solution (uses the FSAL stage).
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Largest factor by which an accepted step may grow.
pub const STEP_GROWTH_LIMIT: f64 = 5.0;
/// Smallest error-controlled shrink factor.
pub const STEP_SHRINK_LIMIT: f64 = 0.2;
/// Safety factor on the optimal step estimate.
pub const STEP_SAFETY: f64 = 0.9;
/// `dt` below `STIFFNESS_FLOOR · t_end` aborts the run as stiff.
pub const STIFFNESS_FLOOR: f64 = 1e-14;

/// Tolerances and horizon of one integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig<S: Scalar> {
    pub rel_tol: S,
    pub abs_tol: S,
    pub dt_init: S,
    pub dt_max: S,
    pub t_end: S,
}

impl<S: Scalar> IntegratorConfig<S> {
    /// Defaults for a horizon: `rel 1e-8`, `abs 1e-12`, `dt_init = 1e-4 T`,
    /// `dt_max = T/10`.
    pub fn with_horizon(t_end: S) -> Self {
        Self {
            rel_tol: S::lit(1e-8),
            abs_tol: S::lit(1e-12),
            dt_init: t_end * S::lit(1e-4),
            dt_max: t_end * S::lit(0.1),
            t_end,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > S::zero() && self.abs_tol > S::zero()) {
            return Err(Error::InvalidConfig("tolerances must be positive".into()));
        }
        if !(self.t_end > S::zero()) {
            return Err(Error::InvalidConfig("t_end must be positive".into()));
        }
        if !(self.dt_init > S::zero() && self.dt_init <= self.dt_max) {
            return Err(Error::InvalidConfig("dt_init must lie in (0, dt_max]".into()));
        }
        Ok(())
    }
}

/// Result of a single attempted step.
#[derive(Debug, Clone)]
pub struct StepOutcome<S: Scalar> {
    pub state: DensityState<S>,
    pub accepted: bool,
    /// Controller proposal for the next step size.
    pub dt_next: S,
    /// Leak mass accumulated over this step (zero if rejected).
    pub leak_delta: S,
    /// Mass removed by clipping tiny negative concentrations.
    pub clipped_mass: S,
}

/// One embedded Runge-Kutta step of the sectional system.
pub fn step<S: Scalar>(
    state: &DensityState<S>,
    tables: &OperatorTables<S>,
    dt: S,
    cfg: &IntegratorConfig<S>,
) -> Result<StepOutcome<S>> {
    let floor = S::lit(STIFFNESS_FLOOR) * cfg.t_end;
    if dt < floor {
        return Err(Error::Stiffness {
            t: state.time.as_f64(),
            dt: dt.as_f64(),
            floor: floor.as_f64(),
        });
    }
    let m = tables.cells();
    if state.conc.len() != m {
        return Err(Error::DimensionMismatch { expected: m, got: state.conc.len() });
    }
    // extended vector: concentrations plus the leak register
    let n = m + 1;
    let mut y0 = Vec::with_capacity(n);
    y0.extend_from_slice(&state.conc);
    y0.push(S::zero());

    let eval = |y: &[S]| -> Result<Vec<S>> {
        let probe = DensityState { time: state.time, conc: y[..m].to_vec() };
        let rate = tables.apply(&probe)?;
        let mut dy = rate.dconc;
        dy.push(rate.leak_mass_rate);
        Ok(dy)
    };

    let mut k: Vec<Vec<S>> = Vec::with_capacity(7);
    k.push(eval(&y0)?);
    let mut scratch = vec![S::zero(); n];
    for s in 0..6 {
        for i in 0..n {
            let mut acc = S::zero();
            for (j, kj) in k.iter().enumerate() {
                let a = A[s][j];
                if a != 0.0 {
                    acc = acc + S::lit(a) * kj[i];
                }
            }
            scratch[i] = y0[i] + dt * acc;
        }
        k.push(eval(&scratch)?);
    }
    // stage 7 input is already the 5th-order solution (FSAL row)
    let y5 = scratch.clone();
    let k7 = k.pop().unwrap();
    k.push(k7);

    // embedded 4th-order solution for the error estimate
    let mut err_norm = S::zero();
    for i in 0..n {
        let mut acc4 = S::zero();
        for (j, kj) in k.iter().enumerate() {
            let b = B4[j];
            if b != 0.0 {
                acc4 = acc4 + S::lit(b) * kj[i];
            }
        }
        let y4 = y0[i] + dt * acc4;
        let scale = cfg.abs_tol + cfg.rel_tol * y0[i].abs().max(y5[i].abs());
        let e = (y5[i] - y4) / scale;
        err_norm = err_norm + e * e;
    }
    err_norm = (err_norm / S::from_usize(n).unwrap()).sqrt();

    let grow = S::lit(STEP_GROWTH_LIMIT);
    let shrink = S::lit(STEP_SHRINK_LIMIT);
    let factor = if err_norm == S::zero() {
        grow
    } else {
        (S::lit(STEP_SAFETY) * err_norm.powf(S::lit(-0.2))).max(shrink).min(grow)
    };

    if err_norm > S::one() {
        return Ok(StepOutcome {
            state: state.clone(),
            accepted: false,
            dt_next: (dt * factor).min(cfg.dt_max),
            leak_delta: S::zero(),
            clipped_mass: S::zero(),
        });
    }

    // negativity policy: reject-and-halve on real excursions, clip residue
    let mut min_c = S::zero();
    for &c in &y5[..m] {
        min_c = min_c.min(c);
    }
    if min_c < -cfg.abs_tol {
        return Ok(StepOutcome {
            state: state.clone(),
            accepted: false,
            dt_next: dt * S::lit(0.5),
            leak_delta: S::zero(),
            clipped_mass: S::zero(),
        });
    }
    let mut conc = y5[..m].to_vec();
    let mut clipped = S::zero();
    if min_c < S::zero() {
        for (i, c) in conc.iter_mut().enumerate() {
            if *c < S::zero() {
                clipped = clipped - *c * tables.pivots()[i];
                *c = S::zero();
            }
        }
    }

    Ok(StepOutcome {
        state: DensityState { time: state.time + dt, conc },
        accepted: true,
        dt_next: (dt * factor).min(cfg.dt_max),
        leak_delta: y5[m],
        clipped_mass: clipped,
    })
}

/// A full simulation setup.
#[derive(Debug, Clone)]
pub struct Simulation<S: Scalar> {
    pub system: KernelSystem<S>,
    pub grid: GeometricGrid<S>,
    pub initial: DensityState<S>,
    pub integrator: IntegratorConfig<S>,
    /// Number of uniform snapshot intervals over `[0, t_end]`.
    pub snapshots: usize,
    /// Run the kernel verifiers before stepping; failures abort.
    pub strict: bool,
}

/// Moment samples recorded at each snapshot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSample<S: Scalar> {
    pub t: S,
    pub n0: S,
    pub n1: S,
    pub n2: S,
    /// Moment of order `-γ` (γ from the breakage spec).
    pub n_neg_gamma: S,
}

/// Time-series record of one integration.
#[derive(Debug, Clone)]
pub struct RunOutput<S: Scalar> {
    pub times: Vec<S>,
    pub states: Vec<DensityState<S>>,
    pub moments: Vec<MomentSample<S>>,
    /// Cumulative leak mass at each snapshot.
    pub leak: Vec<S>,
    /// Cumulative clipped mass at each snapshot.
    pub clipped: Vec<S>,
    /// `(t, dt)` of each accepted step.
    pub step_history: Vec<(S, S)>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub clip_events: usize,
    /// Negative-moment order recorded in `moments`.
    pub gamma: S,
    pub integrator: IntegratorConfig<S>,
}

impl<S: Scalar> RunOutput<S> {
    pub fn final_state(&self) -> &DensityState<S> {
        self.states.last().expect("run has at least the initial snapshot")
    }

    /// Relative mass-ledger error `(N₁(t) + leak - N₁(0)) / N₁(0)` at
    /// snapshot `i` (absolute when the initial mass is zero).
    pub fn ledger_error(&self, i: usize) -> S {
        let n1_0 = self.moments[0].n1;
        let drift = self.moments[i].n1 + self.leak[i] - n1_0;
        if n1_0 > S::zero() {
            drift / n1_0
        } else {
            drift
        }
    }
}

/// Integrates a simulation to its horizon, recording snapshots at the
/// configured cadence.
pub fn integrate<S: Scalar>(sim: &Simulation<S>) -> Result<RunOutput<S>> {
    sim.integrator.validate()?;
    if sim.snapshots == 0 {
        return Err(Error::InvalidConfig("need at least one snapshot interval".into()));
    }
    if sim.initial.conc.len() != sim.grid.cells() {
        return Err(Error::DimensionMismatch {
            expected: sim.grid.cells(),
            got: sim.initial.conc.len(),
        });
    }
    if sim.initial.conc.iter().any(|&c| c < S::zero() || !c.is_finite()) {
        return Err(Error::InvalidConfig("initial state must be finite and nonnegative".into()));
    }
    if sim.strict {
        let verdict = verify_system(&sim.system, &LogGridPlan::default_plan())?;
        if !verdict.pass() {
            return Err(Error::VerificationFailed(verdict.summary()));
        }
    }

    let tables = assemble(&sim.system, &sim.grid)?;
    let cfg = &sim.integrator;
    let gamma = sim.system.breakage.gamma;

    let mut out = RunOutput {
        times: Vec::with_capacity(sim.snapshots + 1),
        states: Vec::with_capacity(sim.snapshots + 1),
        moments: Vec::with_capacity(sim.snapshots + 1),
        leak: Vec::with_capacity(sim.snapshots + 1),
        clipped: Vec::with_capacity(sim.snapshots + 1),
        step_history: Vec::new(),
        accepted_steps: 0,
        rejected_steps: 0,
        clip_events: 0,
        gamma,
        integrator: *cfg,
    };

    let mut state = DensityState { time: S::zero(), ..sim.initial.clone() };
    let mut leak_total = S::zero();
    let mut clipped_total = S::zero();
    record(&mut out, &state, leak_total, clipped_total, &sim.grid, gamma);

    let mut dt_prop = cfg.dt_init.min(cfg.dt_max);
    // round-off sliver below which the clock snaps to the boundary
    let boundary_eps = cfg.t_end * S::lit(1e-13);
    for snap in 1..=sim.snapshots {
        let t_target = cfg.t_end * S::from_usize(snap).unwrap()
            / S::from_usize(sim.snapshots).unwrap();
        while t_target - state.time > boundary_eps {
            let remaining = t_target - state.time;
            let clamped = dt_prop > remaining;
            let dt_try = if clamped { remaining } else { dt_prop };
            let outcome = step(&state, &tables, dt_try, cfg)?;
            if outcome.accepted {
                state = outcome.state;
                leak_total = leak_total + outcome.leak_delta;
                if outcome.clipped_mass > S::zero() {
                    clipped_total = clipped_total + outcome.clipped_mass;
                    out.clip_events += 1;
                }
                out.accepted_steps += 1;
                out.step_history.push((state.time, dt_try));
                // don't let a boundary-clamped step shrink the controller
                dt_prop = if clamped { dt_prop.max(outcome.dt_next) } else { outcome.dt_next };
            } else {
                out.rejected_steps += 1;
                dt_prop = outcome.dt_next;
            }
        }
        state.time = t_target;
        record(&mut out, &state, leak_total, clipped_total, &sim.grid, gamma);
    }
    Ok(out)
}

fn record<S: Scalar>(
    out: &mut RunOutput<S>,
    state: &DensityState<S>,
    leak: S,
    clipped: S,
    grid: &GeometricGrid<S>,
    gamma: S,
) {
    out.times.push(state.time);
    out.moments.push(MomentSample {
        t: state.time,
        n0: moment(state, S::zero(), grid),
        n1: moment(state, S::one(), grid),
        n2: moment(state, S::lit(2.0), grid),
        n_neg_gamma: moment(state, -gamma, grid),
    });
    out.leak.push(leak);
    out.clipped.push(clipped);
    out.states.push(state.clone());
}
