//! Mass-conserving fixed-pivot discretization.
//!
//! Aggregation and breakage events redistribute onto the two pivots
//! bracketing the event mass `v`, with weights solving the number/mass
//! preservation equations
//!
//! ```text
//! w_lo + w_hi = 1,      w_lo p_k + w_hi p_{k+1} = v,
//! ```
//!
//! so the discrete operator conserves mass exactly up to round-off (Kumar &
//! Ramkrishna 1996).  Mass that cannot be placed — aggregates beyond the
//! last pivot, fragments below the first — is routed to an explicit leak
//! register instead of being dropped, which keeps the discrete mass ledger
//! closed for any state:
//!
//! ```text
//! Σ_i p_i (dc/dt)_i + leak rate = 0.
//! ```
//!
//! Breakage gain integrals `∫ b(x, p_j) w(x) dx` are evaluated per
//! (cell, parent) pair by adaptive quadrature at assembly time and cached;
//! the per-event leak is the exact residual of the column mass balance, so
//! a mass-defective daughter distribution shows up in the register rather
//! than silently violating conservation.

use std::io::Write;

use crate::error::{Error, Result};
use crate::grid::{DensityState, GeometricGrid};
use crate::kernels::KernelSystem;
use crate::quadrature::adaptive_gk;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
enum PairDest<S: Scalar> {
    /// Split between pivots `lo` and `lo + 1`.
    Split { lo: usize, hi_weight: S },
    /// Event mass exceeds the last pivot: the whole event leaks.
    Overflow,
}

/// Precomputed aggregation and fragmentation tables for one kernel system on
/// one grid.  Immutable after assembly; `apply` is pure and reentrant.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorTables<S: Scalar> {
    pivots: Vec<S>,
    /// `K(p_i, p_j)` packed over `i ≤ j`.
    kernel: Vec<S>,
    dest: Vec<PairDest<S>>,
    /// `S(p_j)`.
    selection: Vec<S>,
    /// Fragment placement counts per breakage event, column-major
    /// `gain[i + m j]`.
    frag_gain: Vec<S>,
    /// Mass leaving the grid per breakage event of pivot `j` (column mass
    /// residual, exactly `p_j - Σ_i p_i gain_ij`).
    frag_leak: Vec<S>,
}

/// Rate of change produced by [`OperatorTables::apply`].
#[derive(Debug, Clone, PartialEq)]
pub struct RateEval<S: Scalar> {
    pub dconc: Vec<S>,
    /// Rate at which mass exits `[x_min, x_max]`.
    pub leak_mass_rate: S,
}

#[inline]
fn pair_index(m: usize, i: usize, j: usize) -> usize {
    debug_assert!(i <= j && j < m);
    i * (2 * m - i + 1) / 2 + (j - i)
}

fn destination<S: Scalar>(pivots: &[S], v: S) -> PairDest<S> {
    let m = pivots.len();
    let last = pivots[m - 1];
    if v > last || m < 2 {
        return PairDest::Overflow;
    }
    if v == last {
        return PairDest::Split { lo: m - 2, hi_weight: S::one() };
    }
    // binary search: largest k with pivots[k] <= v
    let mut lo = 0usize;
    let mut hi = m - 1;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if pivots[mid] <= v {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let w = (v - pivots[lo]) / (pivots[lo + 1] - pivots[lo]);
    PairDest::Split { lo, hi_weight: w }
}

/// Assembles the fixed-pivot tables for a kernel system.
pub fn assemble<S: Scalar>(
    system: &KernelSystem<S>,
    grid: &GeometricGrid<S>,
) -> Result<OperatorTables<S>> {
    let m = grid.cells();
    let pivots = grid.pivots().to_vec();

    let mut kernel = vec![S::zero(); m * (m + 1) / 2];
    let mut dest = vec![PairDest::Overflow; m * (m + 1) / 2];
    for i in 0..m {
        for j in i..m {
            let idx = pair_index(m, i, j);
            kernel[idx] = system.coagulation_rate(pivots[i], pivots[j]);
            dest[idx] = destination(&pivots, pivots[i] + pivots[j]);
        }
    }

    let selection: Vec<S> = pivots.iter().map(|&p| system.selection_rate(p)).collect();

    let mut frag_gain = vec![S::zero(); m * m];
    let mut frag_leak = vec![S::zero(); m];
    let rel = S::lit(1e-12);
    let abs = S::lit(1e-300);
    for j in 0..m {
        if selection[j] == S::zero() {
            continue;
        }
        let y = pivots[j];
        for k in 0..=j {
            let mut gain = S::zero();
            if k >= 1 && pivots[k - 1] < y {
                let (a, b) = (pivots[k - 1], pivots[k].min(y));
                let width = pivots[k] - pivots[k - 1];
                gain = gain
                    + adaptive_gk(
                        &|x: S| system.breakage_rate(x, y) * (x - pivots[k - 1]) / width,
                        a,
                        b,
                        rel,
                        abs,
                    )?;
            }
            if k + 1 < m && pivots[k] < y {
                let (a, b) = (pivots[k], pivots[k + 1].min(y));
                let width = pivots[k + 1] - pivots[k];
                gain = gain
                    + adaptive_gk(
                        &|x: S| system.breakage_rate(x, y) * (pivots[k + 1] - x) / width,
                        a,
                        b,
                        rel,
                        abs,
                    )?;
            }
            frag_gain[k + m * j] = gain;
        }
        // exact column residual: fragments below the first pivot plus any
        // mass defect of the daughter distribution itself
        let placed = (0..=j).fold(S::zero(), |acc, i| acc + pivots[i] * frag_gain[i + m * j]);
        frag_leak[j] = y - placed;
    }

    Ok(OperatorTables { pivots, kernel, dest, selection, frag_gain, frag_leak })
}

/// Assembles tables directly from mass-discrete data: a symmetric kernel
/// matrix, per-pivot selection rates, and fragment counts
/// `fragments[i][j]` = offspring at pivot `i` per breakage of pivot `j`.
///
/// Used to compare `apply` against mass-discrete reference systems, where
/// fragment masses sit exactly on pivots and quadrature would be spurious.
pub fn assemble_discrete<S: Scalar>(
    grid: &GeometricGrid<S>,
    kernel_matrix: &[Vec<S>],
    selection: &[S],
    fragments: &[Vec<S>],
) -> Result<OperatorTables<S>> {
    let m = grid.cells();
    let pivots = grid.pivots().to_vec();
    if kernel_matrix.len() != m || selection.len() != m || fragments.len() != m {
        return Err(Error::DimensionMismatch { expected: m, got: kernel_matrix.len() });
    }
    let mut kernel = vec![S::zero(); m * (m + 1) / 2];
    let mut dest = vec![PairDest::Overflow; m * (m + 1) / 2];
    for i in 0..m {
        if kernel_matrix[i].len() != m || fragments[i].len() != m {
            return Err(Error::DimensionMismatch { expected: m, got: kernel_matrix[i].len() });
        }
        for j in i..m {
            let idx = pair_index(m, i, j);
            kernel[idx] = kernel_matrix[i][j];
            dest[idx] = destination(&pivots, pivots[i] + pivots[j]);
        }
    }
    let mut frag_gain = vec![S::zero(); m * m];
    let mut frag_leak = vec![S::zero(); m];
    for j in 0..m {
        for i in 0..m {
            frag_gain[i + m * j] = fragments[i][j];
        }
        let placed = (0..m).fold(S::zero(), |acc, i| acc + pivots[i] * frag_gain[i + m * j]);
        frag_leak[j] = pivots[j] - placed;
    }
    Ok(OperatorTables { pivots, kernel, dest, selection: selection.to_vec(), frag_gain, frag_leak })
}

impl<S: Scalar> OperatorTables<S> {
    pub fn cells(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivots(&self) -> &[S] {
        &self.pivots
    }

    pub fn selection_rates(&self) -> &[S] {
        &self.selection
    }

    /// Fragment placement count `gain_ij` per breakage event of pivot `j`.
    pub fn fragmentation_gain(&self, i: usize, j: usize) -> S {
        self.frag_gain[i + self.cells() * j]
    }

    /// Per-event fragmentation leak mass of pivot `j`.
    pub fn fragmentation_leak(&self, j: usize) -> S {
        self.frag_leak[j]
    }

    /// Evaluates the discrete right-hand side `dc/dt` for a state.
    pub fn apply(&self, state: &DensityState<S>) -> Result<RateEval<S>> {
        let m = self.cells();
        if state.conc.len() != m {
            return Err(Error::DimensionMismatch { expected: m, got: state.conc.len() });
        }
        let c = &state.conc;
        let mut d = vec![S::zero(); m];
        let mut leak = S::zero();
        let half = S::lit(0.5);
        let zero = S::zero();

        // aggregation over unordered pivot pairs
        for i in 0..m {
            let ci = c[i];
            if ci == zero {
                continue;
            }
            for j in i..m {
                let cj = c[j];
                if cj == zero {
                    continue;
                }
                let k = self.kernel[pair_index(m, i, j)];
                if k == zero {
                    continue;
                }
                let rate = if i == j { half * k * ci * cj } else { k * ci * cj };
                d[i] = d[i] - rate;
                d[j] = d[j] - rate;
                match self.dest[pair_index(m, i, j)] {
                    PairDest::Split { lo, hi_weight } => {
                        d[lo] = d[lo] + (S::one() - hi_weight) * rate;
                        d[lo + 1] = d[lo + 1] + hi_weight * rate;
                    }
                    PairDest::Overflow => {
                        leak = leak + (self.pivots[i] + self.pivots[j]) * rate;
                    }
                }
            }
        }

        // fragmentation
        for j in 0..m {
            let s = self.selection[j];
            if s == zero || c[j] == zero {
                continue;
            }
            let rate = s * c[j];
            d[j] = d[j] - rate;
            for i in 0..=j {
                let g = self.frag_gain[i + m * j];
                if g != zero {
                    d[i] = d[i] + g * rate;
                }
            }
            leak = leak + self.frag_leak[j] * rate;
        }

        Ok(RateEval { dconc: d, leak_mass_rate: leak })
    }

    /// Debug dump of the fragmentation gain matrix, one destination cell per
    /// row: `dest_pivot, gain(dest <- src_0), gain(dest <- src_1), ...`.
    pub fn write_fragmentation_gain_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let m = self.cells();
        write!(w, "dest_pivot")?;
        for j in 0..m {
            write!(w, ",src_{j}")?;
        }
        writeln!(w)?;
        for i in 0..m {
            write!(w, "{:.16e}", self.pivots[i].as_f64())?;
            for j in 0..m {
                write!(w, ",{:.16e}", self.frag_gain[i + m * j].as_f64())?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_grid, InitialProfile};
    use crate::kernels::{BreakageSpec, CoagulationSpec, SelectionSpec};
    use crate::quadrature::singular_lower;

    fn coag_only(spec: CoagulationSpec<f64>) -> KernelSystem<f64> {
        KernelSystem::new(spec, SelectionSpec::zero(), BreakageSpec::binary_uniform()).unwrap()
    }

    #[test]
    fn redistribution_weights_place_event_mass_exactly() {
        let grid = build_grid::<f64>(1e-3, 1e3, 60).unwrap();
        let p = grid.pivots();
        let tables = assemble(&coag_only(CoagulationSpec::constant()), &grid).unwrap();
        for i in 0..grid.cells() {
            for j in i..grid.cells() {
                let v = p[i] + p[j];
                match tables.dest[pair_index(grid.cells(), i, j)] {
                    PairDest::Split { lo, hi_weight } => {
                        let placed = (1.0 - hi_weight) * p[lo] + hi_weight * p[lo + 1];
                        assert!((placed - v).abs() <= 1e-13 * v);
                        assert!((0.0..=1.0).contains(&hi_weight));
                    }
                    PairDest::Overflow => assert!(v > p[grid.cells() - 1]),
                }
            }
        }
    }

    #[test]
    fn constant_kernel_monodisperse_number_decay() {
        // dN0/dt = -K N0^2 / 2 = -2 for N0 = 2
        let grid = build_grid::<f64>(1.0, 8.0, 3).unwrap();
        let tables = assemble(&coag_only(CoagulationSpec::constant()), &grid).unwrap();
        let mut state = DensityState::zero(3);
        state.conc[0] = 2.0;
        let rate = tables.apply(&state).unwrap();
        let dn0: f64 = rate.dconc.iter().sum();
        assert!((dn0 + 2.0).abs() <= 1e-12, "dN0 = {dn0}");
        assert_eq!(rate.leak_mass_rate, 0.0);
    }

    #[test]
    fn two_cell_loss_term_expansion() {
        let grid = build_grid::<f64>(1.0, 4.0, 2).unwrap();
        let tables = assemble(&coag_only(CoagulationSpec::constant()), &grid).unwrap();
        let state = DensityState { time: 0.0, conc: vec![0.7, 0.7] };
        let rate = tables.apply(&state).unwrap();
        // cell 1 receives no gain (2 p0 = p1 is the only on-grid event), so
        // its rate is the pure loss c1 (c1 + c2)
        let c = 0.7;
        let gain0_to_1 = 0.5 * c * c; // (0,0) event lands on pivot 1
        assert!((rate.dconc[0] + c * (c + c)).abs() < 1e-14);
        assert!((rate.dconc[1] + c * (c + c) - gain0_to_1).abs() < 1e-14);
    }

    #[test]
    fn binary_breakage_number_growth() {
        // dN0/dt = (nu - 1) S N0 = +5 up to the below-grid fragment trickle
        let grid = build_grid::<f64>(1e-6, 1e3, 180).unwrap();
        let system = KernelSystem::new(
            CoagulationSpec::zero(),
            SelectionSpec::constant(1.0),
            BreakageSpec::binary_uniform(),
        )
        .unwrap();
        let tables = assemble(&system, &grid).unwrap();
        // put 5 particles at a pivot near unit mass
        let cell = grid.pivots().iter().position(|&p| p > 1.0).unwrap();
        let state = project(&grid, cell, 5.0);
        let rate = tables.apply(&state).unwrap();
        let dn0: f64 = rate.dconc.iter().sum();
        assert!((dn0 - 5.0).abs() < 1e-4, "dN0 = {dn0}");
    }

    fn project(grid: &GeometricGrid<f64>, cell: usize, amount: f64) -> DensityState<f64> {
        crate::grid::project_initial(&InitialProfile::Monodisperse { cell, amount }, grid).unwrap()
    }

    #[test]
    fn fragmentation_leak_matches_below_grid_mass() {
        // column residual == S * integral of x b(x, p_j) over [0, p_0]
        let grid = build_grid::<f64>(1e-4, 1e2, 60).unwrap();
        let system = KernelSystem::new(
            CoagulationSpec::zero(),
            SelectionSpec::constant(1.0),
            BreakageSpec::binary_uniform(),
        )
        .unwrap();
        let tables = assemble(&system, &grid).unwrap();
        let p0 = grid.pivot(0);
        for j in [10usize, 30, 59] {
            let y = grid.pivot(j);
            let below =
                singular_lower(&|x: f64| x * system.breakage_rate(x, y), p0, 0.5, 1e-12).unwrap();
            let leak = tables.fragmentation_leak(j);
            assert!(
                (leak - below).abs() <= 1e-10 * y,
                "j={j}: leak {leak:e} vs below-grid {below:e}"
            );
        }
    }

    #[test]
    fn fragmentation_column_mass_balance() {
        let grid = build_grid::<f64>(1e-4, 1e2, 60).unwrap();
        let system = KernelSystem::new(
            CoagulationSpec::zero(),
            SelectionSpec::power(1.0, 1.0),
            BreakageSpec::parabolic(),
        )
        .unwrap();
        let tables = assemble(&system, &grid).unwrap();
        let m = grid.cells();
        for j in 0..m {
            let placed: f64 =
                (0..m).map(|i| grid.pivot(i) * tables.fragmentation_gain(i, j)).sum();
            let total = placed + tables.fragmentation_leak(j);
            assert!((total - grid.pivot(j)).abs() <= 1e-10 * grid.pivot(j));
        }
    }

    #[test]
    fn zero_state_and_zero_kernels_give_zero_rate() {
        let grid = build_grid::<f64>(1.0, 64.0, 12).unwrap();
        let tables = assemble(&coag_only(CoagulationSpec::constant()), &grid).unwrap();
        let rate = tables.apply(&DensityState::zero(12)).unwrap();
        assert!(rate.dconc.iter().all(|&d| d == 0.0));
        assert_eq!(rate.leak_mass_rate, 0.0);

        let zsys = KernelSystem::new(
            CoagulationSpec::zero(),
            SelectionSpec::zero(),
            BreakageSpec::binary_uniform(),
        )
        .unwrap();
        let ztab = assemble(&zsys, &grid).unwrap();
        let state = DensityState { time: 0.0, conc: vec![1.0; 12] };
        let rate = ztab.apply(&state).unwrap();
        assert!(rate.dconc.iter().all(|&d| d == 0.0));
    }

    #[test]
    fn dimension_mismatch_is_contract_violation() {
        let grid = build_grid::<f64>(1.0, 64.0, 12).unwrap();
        let tables = assemble(&coag_only(CoagulationSpec::constant()), &grid).unwrap();
        assert!(matches!(
            tables.apply(&DensityState::zero(7)),
            Err(Error::DimensionMismatch { expected: 12, got: 7 })
        ));
    }

    #[test]
    fn scaling_laws() {
        let grid = build_grid::<f64>(1e-2, 1e2, 40).unwrap();
        let state = DensityState {
            time: 0.0,
            conc: grid.pivots().iter().map(|&p: &f64| (-p).exp() + 0.01).collect(),
        };
        let doubled = DensityState {
            time: 0.0,
            conc: state.conc.iter().map(|&c| 2.0 * c).collect(),
        };

        // aggregation alone scales quadratically
        let tables = assemble(&coag_only(CoagulationSpec::sum()), &grid).unwrap();
        let r1 = tables.apply(&state).unwrap();
        let r2 = tables.apply(&doubled).unwrap();
        for (a, b) in r1.dconc.iter().zip(&r2.dconc) {
            assert_eq!(4.0 * a, *b);
        }

        // fragmentation alone is linear
        let fsys = KernelSystem::new(
            CoagulationSpec::zero(),
            SelectionSpec::power(1.0, 1.0),
            BreakageSpec::binary_uniform(),
        )
        .unwrap();
        let ftab = assemble(&fsys, &grid).unwrap();
        let r1 = ftab.apply(&state).unwrap();
        let r2 = ftab.apply(&doubled).unwrap();
        for (a, b) in r1.dconc.iter().zip(&r2.dconc) {
            assert_eq!(2.0 * a, *b);
        }
    }

    #[test]
    fn fragmentation_gain_csv_dump() {
        let grid = build_grid::<f64>(1.0, 8.0, 3).unwrap();
        let system = KernelSystem::new(
            CoagulationSpec::zero(),
            SelectionSpec::constant(1.0),
            BreakageSpec::binary_uniform(),
        )
        .unwrap();
        let tables = assemble(&system, &grid).unwrap();
        let mut buf = Vec::new();
        tables.write_fragmentation_gain_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 4); // header + 3 cells
        assert!(text.starts_with("dest_pivot,src_0,src_1,src_2"));
    }
}
