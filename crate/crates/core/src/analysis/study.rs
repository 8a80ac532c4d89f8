//! Truncation-convergence study.
//!
//! Runs the same simulation under a sequence of kernel truncations and
//! measures the Ω-distance of each truncated solution to the untruncated
//! one.  The supremum over `[0, T]` is approximated by sampling the distance
//! at the midpoint and horizon snapshots.  Member runs share no mutable
//! state and execute concurrently.

use serde::Serialize;

use crate::analysis::moments::omega_distance;
use crate::error::{Error, Result};
use crate::kernels::TruncationParams;
use crate::scalar::Scalar;
use crate::solver::{integrate, RunOutput, Simulation};

/// Ω-distance between two runs sampled at `T/2` and `T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StudyDistance {
    /// Label: truncation index, or the pair `(n_i, n_{i+1})` description.
    pub label: (u32, u32),
    pub at_midpoint: f64,
    pub at_horizon: f64,
}

impl StudyDistance {
    /// Sampled stand-in for the sup over `[0, T]`.
    pub fn sup(&self) -> f64 {
        self.at_midpoint.max(self.at_horizon)
    }
}

/// Study outcome.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyReport {
    pub n_list: Vec<u32>,
    pub ramp: f64,
    pub omega_r1: f64,
    pub omega_r2: f64,
    /// Distance of each truncated run to the untruncated reference.
    pub to_untruncated: Vec<StudyDistance>,
    /// Distances between successive truncated runs.
    pub pairwise: Vec<StudyDistance>,
    /// Whether the distance-to-untruncated sequence is nonincreasing in `n`.
    pub nonincreasing: bool,
}

/// Runs the study: `base` once untruncated, then once per entry of `n_list`.
pub fn truncation_study<S: Scalar>(
    base: &Simulation<S>,
    n_list: &[u32],
    ramp: S,
    r1: S,
    r2: S,
) -> Result<StudyReport> {
    if n_list.is_empty() {
        return Err(Error::InvalidConfig("study needs at least one truncation index".into()));
    }
    if n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidConfig("study n_list must increase strictly".into()));
    }
    let mut members = Vec::with_capacity(n_list.len() + 1);
    {
        let mut reference = base.clone();
        reference.system = base.system.untruncated();
        members.push(reference);
    }
    for &n in n_list {
        let mut sim = base.clone();
        sim.system = base.system.untruncated().truncate(TruncationParams::new(n, ramp)?);
        members.push(sim);
    }

    let mut runs: Vec<Option<Result<RunOutput<S>>>> = Vec::new();
    runs.resize_with(members.len(), || None);
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for sim in &members {
            handles.push(scope.spawn(move || integrate(sim)));
        }
        for (slot, handle) in runs.iter_mut().zip(handles) {
            *slot = Some(handle.join().expect("study worker panicked"));
        }
    });
    let mut resolved = Vec::with_capacity(runs.len());
    for r in runs {
        resolved.push(r.expect("slot filled")?);
    }
    let reference = &resolved[0];
    let truncated = &resolved[1..];

    let snapshots = reference.states.len();
    let mid = snapshots / 2;
    let last = snapshots - 1;
    let distance = |a: &RunOutput<S>, b: &RunOutput<S>, label| -> Result<StudyDistance> {
        Ok(StudyDistance {
            label,
            at_midpoint: omega_distance(&a.states[mid], &b.states[mid], r1, r2, &base.grid)?
                .as_f64(),
            at_horizon: omega_distance(&a.states[last], &b.states[last], r1, r2, &base.grid)?
                .as_f64(),
        })
    };

    let mut to_untruncated = Vec::with_capacity(truncated.len());
    for (i, run) in truncated.iter().enumerate() {
        to_untruncated.push(distance(run, reference, (n_list[i], n_list[i]))?);
    }
    let mut pairwise = Vec::new();
    for i in 1..truncated.len() {
        pairwise.push(distance(&truncated[i - 1], &truncated[i], (n_list[i - 1], n_list[i]))?);
    }
    let nonincreasing =
        to_untruncated.windows(2).all(|w| w[1].sup() <= w[0].sup());

    Ok(StudyReport {
        n_list: n_list.to_vec(),
        ramp: ramp.as_f64(),
        omega_r1: r1.as_f64(),
        omega_r2: r2.as_f64(),
        to_untruncated,
        pairwise,
        nonincreasing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_grid, project_initial, InitialProfile};
    use crate::kernels::{BreakageSpec, CoagulationSpec, KernelSystem, SelectionSpec};
    use crate::solver::IntegratorConfig;

    fn base() -> Simulation<f64> {
        let system = KernelSystem::new(
            CoagulationSpec::constant(),
            SelectionSpec::zero(),
            BreakageSpec::binary_uniform(),
        )
        .unwrap();
        let grid = build_grid(1e-2, 1e2, 60).unwrap();
        let initial = project_initial(&InitialProfile::Exponential { mean: 1.0 }, &grid).unwrap();
        let mut integrator = IntegratorConfig::with_horizon(0.5);
        integrator.rel_tol = 1e-7;
        Simulation { system, grid, initial, integrator, snapshots: 4, strict: true }
    }

    #[test]
    fn covering_truncation_reproduces_reference_exactly() {
        // [1/n, n] contains [1e-2, 1e2] for n = 128, so the cutoff is
        // identically 1 on the grid and the runs are bit-identical
        let report = truncation_study(&base(), &[128], 0.5, 2.0, 0.5).unwrap();
        assert_eq!(report.to_untruncated.len(), 1);
        assert_eq!(report.to_untruncated[0].sup(), 0.0);
        assert!(report.pairwise.is_empty());
        assert!(report.nonincreasing);
    }

    #[test]
    fn distances_shrink_with_support() {
        let report = truncation_study(&base(), &[2, 8, 32], 0.5, 2.0, 0.5).unwrap();
        assert!(report.nonincreasing, "{report:?}");
        assert!(report.to_untruncated[0].sup() > report.to_untruncated[2].sup());
        assert_eq!(report.pairwise.len(), 2);
    }

    #[test]
    fn non_increasing_n_list_rejected() {
        assert!(truncation_study(&base(), &[8, 8], 0.5, 2.0, 0.5).is_err());
        assert!(truncation_study(&base(), &[], 0.5, 2.0, 0.5).is_err());
    }
}
