//! Moments, the weighted Ω-norm, and the uniform moment-bound checks.
//!
//! The `i`-th moment of the number density is `N_i(t) = ∫ x^i f dx`; on the
//! sectional grid this is the pivot-weighted sum `Σ p_i^order conc_i`.  The
//! bound checks assert the discrete counterparts of the a-priori estimates
//! available for admissible kernels: constant mass, a Gronwall envelope
//! `N₀(t) ≤ (N₀(0) + N̄₁) e^{N S₀ t}` on the particle count, a Gronwall
//! envelope on `N₂` with source `k(N̄₀² + 3N̄₁N̄₀ + 2N̄₁²)` and rate
//! `2k(N̄₁ + N̄₀)`, and finiteness of the `-γ` moment.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{DensityState, GeometricGrid};
use crate::kernels::KernelSystem;
use crate::scalar::Scalar;
use crate::solver::RunOutput;

/// `Σ pivot_i^order · conc_i`.
///
/// This is the mass-ledger quantity for `order = 1`; the solver records its
/// snapshots through this same function.
pub fn moment<S: Scalar>(state: &DensityState<S>, order: S, grid: &GeometricGrid<S>) -> S {
    assert_eq!(state.conc.len(), grid.cells(), "state does not match grid");
    let mut acc = S::zero();
    for (i, &c) in state.conc.iter().enumerate() {
        acc = acc + grid.pivot(i).powf(order) * c;
    }
    acc
}

/// Moment time series for arbitrary orders, one row per snapshot.
pub fn moment_series<S: Scalar>(
    run: &RunOutput<S>,
    orders: &[S],
    grid: &GeometricGrid<S>,
) -> Vec<Vec<S>> {
    run.states
        .iter()
        .map(|s| orders.iter().map(|&o| moment(s, o, grid)).collect())
        .collect()
}

/// Weighted norm `Σ (p^{r1} + p^{-r2}) conc_i` with `r1 ≥ 1`, `0 < r2 < 1`,
/// controlling the large- and small-mass tails simultaneously.
pub fn omega_norm<S: Scalar>(
    state: &DensityState<S>,
    r1: S,
    r2: S,
    grid: &GeometricGrid<S>,
) -> Result<S> {
    check_omega_params(r1, r2)?;
    if state.conc.len() != grid.cells() {
        return Err(Error::DimensionMismatch { expected: grid.cells(), got: state.conc.len() });
    }
    let mut acc = S::zero();
    for (i, &c) in state.conc.iter().enumerate() {
        let p = grid.pivot(i);
        acc = acc + (p.powf(r1) + p.powf(-r2)) * c;
    }
    Ok(acc)
}

/// Ω-distance `Σ (p^{r1} + p^{-r2}) |a_i - b_i|` between two states on the
/// same grid.
pub fn omega_distance<S: Scalar>(
    a: &DensityState<S>,
    b: &DensityState<S>,
    r1: S,
    r2: S,
    grid: &GeometricGrid<S>,
) -> Result<S> {
    check_omega_params(r1, r2)?;
    if a.conc.len() != grid.cells() || b.conc.len() != grid.cells() {
        return Err(Error::DimensionMismatch { expected: grid.cells(), got: a.conc.len() });
    }
    let mut acc = S::zero();
    for i in 0..grid.cells() {
        let p = grid.pivot(i);
        acc = acc + (p.powf(r1) + p.powf(-r2)) * (a.conc[i] - b.conc[i]).abs();
    }
    Ok(acc)
}

fn check_omega_params<S: Scalar>(r1: S, r2: S) -> Result<()> {
    if r1 < S::one() {
        return Err(Error::InvalidConfig("omega norm requires r1 >= 1".into()));
    }
    if !(r2 > S::zero() && r2 < S::one()) {
        return Err(Error::InvalidConfig("omega norm requires r2 in (0,1)".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundViolation {
    pub t: f64,
    pub value: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundCheck {
    pub pass: bool,
    pub first_violation: Option<BoundViolation>,
}

impl BoundCheck {
    fn passing() -> Self {
        Self { pass: true, first_violation: None }
    }

    fn record<S: Scalar>(&mut self, t: S, value: S, bound: S) {
        if self.pass {
            self.pass = false;
            self.first_violation = Some(BoundViolation {
                t: t.as_f64(),
                value: value.as_f64(),
                bound: bound.as_f64(),
            });
        }
    }
}

/// Outcome of the uniform moment-bound checks on a finished run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentBoundReport {
    /// `N₁(t) + leak` constant up to the mass-ledger tolerance.
    pub mass_conserved: BoundCheck,
    /// `N₀(t) ≤ (N₀(0) + N̄₁) e^{N S₀ t}`.
    pub number_bounded: BoundCheck,
    /// `N₂(t)` finite and under its Gronwall envelope.
    pub second_moment_bounded: BoundCheck,
    /// `N_{-γ}(t)` finite.
    pub neg_moment_finite: BoundCheck,
}

impl MomentBoundReport {
    pub fn pass(&self) -> bool {
        self.mass_conserved.pass
            && self.number_bounded.pass
            && self.second_moment_bounded.pass
            && self.neg_moment_finite.pass
    }
}

/// Checks every snapshot of a run against the uniform moment bounds implied
/// by the kernel constants.
pub fn check_moment_bounds<S: Scalar>(
    run: &RunOutput<S>,
    system: &KernelSystem<S>,
) -> MomentBoundReport {
    let mut report = MomentBoundReport {
        mass_conserved: BoundCheck::passing(),
        number_bounded: BoundCheck::passing(),
        second_moment_bounded: BoundCheck::passing(),
        neg_moment_finite: BoundCheck::passing(),
    };
    if run.moments.is_empty() {
        return report;
    }

    let ledger_tol = run.integrator.rel_tol * S::lit(10.0);
    let n0_init = run.moments[0].n0;
    let n2_init = run.moments[0].n2;
    let n0_bar = run.moments.iter().map(|m| m.n0).fold(S::zero(), S::max);
    let n1_bar = run.moments.iter().map(|m| m.n1).fold(S::zero(), S::max);

    let cap = S::from_u32(system.breakage.fragment_cap).unwrap();
    let s0 = system.selection.s0;
    let k = system.coagulation.k;

    // N2 Gronwall envelope: dN2/dt <= A + B N2
    let a_const = k * (n0_bar * n0_bar
        + S::lit(3.0) * n1_bar * n0_bar
        + S::lit(2.0) * n1_bar * n1_bar);
    let b_rate = S::lit(2.0) * k * (n1_bar + n0_bar);

    for (i, m) in run.moments.iter().enumerate() {
        let t = m.t;
        let ledger = run.ledger_error(i).abs();
        if ledger > ledger_tol {
            report.mass_conserved.record(t, m.n1 + run.leak[i], run.moments[0].n1);
        }

        let number_bound = (n0_init + n1_bar) * (cap * s0 * t).exp();
        if !(m.n0 <= number_bound) {
            report.number_bounded.record(t, m.n0, number_bound);
        }

        let second_bound = if b_rate > S::zero() {
            let growth = (b_rate * t).exp();
            n2_init * growth + a_const / b_rate * (growth - S::one())
        } else {
            n2_init + a_const * t
        };
        if !m.n2.is_finite() || !(m.n2 <= second_bound) {
            report.second_moment_bounded.record(t, m.n2, second_bound);
        }

        if !m.n_neg_gamma.is_finite() {
            report.neg_moment_finite.record(t, m.n_neg_gamma, S::infinity());
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_grid, project_initial, InitialProfile};
    use crate::kernels::{BreakageSpec, CoagulationSpec, SelectionSpec};
    use crate::solver::{integrate, IntegratorConfig, Simulation};

    #[test]
    fn monodisperse_moments() {
        // a pivot at exactly 2: grid [1, 4] with one cell
        let grid = build_grid::<f64>(1.0, 4.0, 1).unwrap();
        assert_eq!(grid.pivot(0), 2.0);
        let state = DensityState { time: 0.0, conc: vec![3.0] };
        assert_eq!(moment(&state, 1.0, &grid), 6.0);
        assert_eq!(moment(&state, 0.0, &grid), 3.0);
        let half = moment(&state, -0.5, &grid);
        assert!((half - 3.0 / 2.0f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn omega_norm_basics() {
        let grid = build_grid::<f64>(0.5, 2.0, 1).unwrap();
        assert_eq!(grid.pivot(0), 1.0);
        let zero = DensityState::zero(1);
        assert_eq!(omega_norm(&zero, 2.0, 0.5, &grid).unwrap(), 0.0);
        let state = DensityState { time: 0.0, conc: vec![3.5] };
        // pivot 1: weight 1^{r1} + 1^{-r2} = 2
        assert_eq!(omega_norm(&state, 2.0, 0.5, &grid).unwrap(), 7.0);
        assert!(omega_norm(&state, 0.5, 0.5, &grid).is_err());
        assert!(omega_norm(&state, 2.0, 1.0, &grid).is_err());
    }

    #[test]
    fn omega_norm_of_exponential_profile() {
        // integral of (x^2 + x^{-1/2}) e^{-x} = Gamma(3) + Gamma(1/2)
        let exact = 2.0 + std::f64::consts::PI.sqrt();
        let grid = build_grid::<f64>(1e-8, 1e3, 440).unwrap();
        let s = project_initial(&InitialProfile::Exponential { mean: 1.0 }, &grid).unwrap();
        let v = omega_norm(&s, 2.0, 0.5, &grid).unwrap();
        assert!((v - exact).abs() / exact < 1e-3, "omega {v} vs {exact}");
        // stable under grid refinement
        let fine = build_grid::<f64>(1e-8, 1e3, 880).unwrap();
        let sf = project_initial(&InitialProfile::Exponential { mean: 1.0 }, &fine).unwrap();
        let vf = omega_norm(&sf, 2.0, 0.5, &fine).unwrap();
        assert!((v - vf).abs() / exact < 1e-3);
    }

    #[test]
    fn omega_dominates_individual_moments() {
        let grid = build_grid::<f64>(1e-4, 1e2, 80).unwrap();
        let s = project_initial(&InitialProfile::Exponential { mean: 1.0 }, &grid).unwrap();
        let r1 = 2.0;
        let r2 = 0.5;
        let omega = omega_norm(&s, r1, r2, &grid).unwrap();
        assert!(omega >= moment(&s, r1, &grid));
        assert!(omega >= moment(&s, -r2, &grid));
    }

    fn frag_sim() -> Simulation<f64> {
        let system = KernelSystem::new(
            CoagulationSpec::zero(),
            SelectionSpec::constant(1.0),
            BreakageSpec::binary_uniform(),
        )
        .unwrap();
        let grid = build_grid(1e-10, 1e2, 220).unwrap();
        let initial = project_initial(&InitialProfile::Exponential { mean: 1.0 }, &grid).unwrap();
        Simulation {
            system,
            grid,
            initial,
            integrator: IntegratorConfig::with_horizon(1.0),
            snapshots: 8,
            strict: true,
        }
    }

    #[test]
    fn bounds_pass_for_pure_fragmentation() {
        let sim = frag_sim();
        let run = integrate(&sim).unwrap();
        let report = check_moment_bounds(&run, &sim.system);
        assert!(report.pass(), "{report:?}");
        // N0 grows like e^t while the envelope grows like 2 e^{2t}
        let last = run.moments.last().unwrap();
        assert!((last.n0 / run.moments[0].n0 - 1.0f64.exp()).abs() < 1e-4);
    }

    #[test]
    fn bounds_pass_for_zero_kernels() {
        let mut sim = frag_sim();
        sim.system.selection = SelectionSpec::zero();
        let run = integrate(&sim).unwrap();
        let report = check_moment_bounds(&run, &sim.system);
        assert!(report.pass());
        for m in &run.moments {
            assert_eq!(m.n0, run.moments[0].n0);
            assert_eq!(m.n2, run.moments[0].n2);
        }
    }

    #[test]
    fn violated_bound_names_first_snapshot() {
        let sim = frag_sim();
        let mut run = integrate(&sim).unwrap();
        // corrupt the record so the count exceeds its envelope
        run.moments[3].n0 = 1e9;
        let report = check_moment_bounds(&run, &sim.system);
        assert!(!report.number_bounded.pass);
        let v = report.number_bounded.first_violation.unwrap();
        assert_eq!(v.t, run.moments[3].t.as_f64());
    }
}
