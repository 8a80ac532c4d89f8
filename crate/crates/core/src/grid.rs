//! Geometric mass grid and sectional density states.

use crate::error::{Error, Result};
use crate::kernels::Table1;
use crate::quadrature::adaptive_gk;
use crate::scalar::Scalar;

/// A sectional grid on `[x_min, x_max]` with geometrically spaced cell
/// boundaries and pivots at the geometric mean of each cell.
///
/// [`build_grid`] produces the constant-ratio grid used by the solver.  The
/// explicit-boundary constructors exist for cross-checks against
/// mass-discrete twins (unit-mass cells cannot have a constant ratio).
#[derive(Debug, Clone, PartialEq)]
pub struct GeometricGrid<S: Scalar> {
    x_min: S,
    x_max: S,
    boundaries: Vec<S>,
    pivots: Vec<S>,
}

impl<S: Scalar> GeometricGrid<S> {
    /// Number of cells.
    pub fn cells(&self) -> usize {
        self.pivots.len()
    }

    pub fn x_min(&self) -> S {
        self.x_min
    }

    pub fn x_max(&self) -> S {
        self.x_max
    }

    /// Constant boundary ratio of a grid built by [`build_grid`].
    pub fn ratio(&self) -> S {
        self.boundaries[1] / self.boundaries[0]
    }

    pub fn boundaries(&self) -> &[S] {
        &self.boundaries
    }

    pub fn pivots(&self) -> &[S] {
        &self.pivots
    }

    pub fn pivot(&self, i: usize) -> S {
        self.pivots[i]
    }

    pub fn cell_width(&self, i: usize) -> S {
        self.boundaries[i + 1] - self.boundaries[i]
    }

    /// Grid from explicit boundaries; pivots at geometric means.
    pub fn from_boundaries(boundaries: Vec<S>) -> Result<Self> {
        let pivots =
            boundaries.windows(2).map(|w| (w[0] * w[1]).sqrt()).collect::<Vec<_>>();
        Self::from_boundaries_and_pivots(boundaries, pivots)
    }

    /// Grid from explicit boundaries and pivots.  Pivots must lie strictly
    /// inside their cells.
    pub fn from_boundaries_and_pivots(boundaries: Vec<S>, pivots: Vec<S>) -> Result<Self> {
        if boundaries.len() < 2 || pivots.len() + 1 != boundaries.len() {
            return Err(Error::InvalidConfig("boundary/pivot lengths inconsistent".into()));
        }
        if boundaries[0] <= S::zero() {
            return Err(Error::InvalidConfig("grid must start at positive mass".into()));
        }
        for w in boundaries.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::InvalidConfig("boundaries must increase strictly".into()));
            }
        }
        for (i, &p) in pivots.iter().enumerate() {
            if !(p > boundaries[i] && p < boundaries[i + 1]) {
                return Err(Error::InvalidConfig(format!(
                    "pivot {i} does not lie inside its cell"
                )));
            }
        }
        let x_min = boundaries[0];
        let x_max = *boundaries.last().unwrap();
        Ok(Self { x_min, x_max, boundaries, pivots })
    }

    /// Unit-mass grid with pivots at `1, 2, ..., m` and boundaries at the
    /// half-integers; the mass-discrete twin of an `m`-species system.
    pub fn unit_masses(m: usize) -> Result<Self> {
        let half = S::lit(0.5);
        let boundaries =
            (0..=m).map(|i| S::from_usize(i).unwrap() + half).collect::<Vec<_>>();
        let pivots = (1..=m).map(|i| S::from_usize(i).unwrap()).collect::<Vec<_>>();
        Self::from_boundaries_and_pivots(boundaries, pivots)
    }
}

/// Builds the geometric grid with ratio `r = (x_max/x_min)^{1/m}`.
pub fn build_grid<S: Scalar>(x_min: S, x_max: S, cells: usize) -> Result<GeometricGrid<S>> {
    if !(x_min > S::zero()) || !(x_max > x_min) {
        return Err(Error::InvalidConfig(format!(
            "grid bounds must satisfy 0 < x_min < x_max, got [{:e}, {:e}]",
            x_min.as_f64(),
            x_max.as_f64()
        )));
    }
    if cells == 0 {
        return Err(Error::InvalidConfig("grid needs at least one cell".into()));
    }
    let (llo, lhi) = (x_min.ln(), x_max.ln());
    let mut boundaries = Vec::with_capacity(cells + 1);
    boundaries.push(x_min);
    for i in 1..cells {
        let t = S::from_usize(i).unwrap() / S::from_usize(cells).unwrap();
        boundaries.push((llo + (lhi - llo) * t).exp());
    }
    boundaries.push(x_max);
    GeometricGrid::from_boundaries(boundaries)
}

/// Per-cell number concentrations approximating `∫_cell f(x, t) dx`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityState<S: Scalar> {
    pub time: S,
    pub conc: Vec<S>,
}

impl<S: Scalar> DensityState<S> {
    pub fn zero(cells: usize) -> Self {
        Self { time: S::zero(), conc: vec![S::zero(); cells] }
    }

    pub fn cells(&self) -> usize {
        self.conc.len()
    }

    /// Cell-averaged density estimate `conc_i / width_i`, the pointwise
    /// surrogate for `f(pivot_i, t)`.
    pub fn density_estimate(&self, grid: &GeometricGrid<S>, i: usize) -> S {
        self.conc[i] / grid.cell_width(i)
    }
}

/// Initial condition `f(x, 0) = f₀(x) ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialProfile<S: Scalar> {
    /// Empty system.
    Zero,
    /// `f₀(x) = e^{-x/mean} / mean`: unit particle count, mean mass `mean`.
    Exponential { mean: S },
    /// `amount` particles concentrated in one cell.
    Monodisperse { cell: usize, amount: S },
    /// Piecewise-linear tabulated density; negative entries are rejected.
    Tabulated(Table1<S>),
}

/// Projects the profile onto the grid: `conc_i = ∫_cell f₀ dx` by adaptive
/// quadrature (exact placement for the monodisperse case).
pub fn project_initial<S: Scalar>(
    profile: &InitialProfile<S>,
    grid: &GeometricGrid<S>,
) -> Result<DensityState<S>> {
    let m = grid.cells();
    let mut state = DensityState::zero(m);
    match profile {
        InitialProfile::Zero => {}
        InitialProfile::Exponential { mean } => {
            if !(*mean > S::zero()) {
                return Err(Error::InvalidConfig("exponential mean must be positive".into()));
            }
            let inv = mean.recip();
            for i in 0..m {
                let (a, b) = (grid.boundaries()[i], grid.boundaries()[i + 1]);
                state.conc[i] =
                    adaptive_gk(&|x: S| (-x * inv).exp() * inv, a, b, S::lit(1e-12), S::lit(1e-300))?;
            }
        }
        InitialProfile::Monodisperse { cell, amount } => {
            if *cell >= m {
                return Err(Error::InvalidConfig(format!(
                    "monodisperse cell {cell} out of range for {m} cells"
                )));
            }
            if *amount < S::zero() {
                return Err(Error::InvalidConfig("monodisperse amount must be nonnegative".into()));
            }
            state.conc[*cell] = *amount;
        }
        InitialProfile::Tabulated(table) => {
            if table.min_value() < S::zero() {
                let (x, _) = table.x_range();
                return Err(Error::NegativeDensity { x: x.as_f64() });
            }
            for i in 0..m {
                let (a, b) = (grid.boundaries()[i], grid.boundaries()[i + 1]);
                state.conc[i] = adaptive_gk(&|x| table.eval(x), a, b, S::lit(1e-10), S::lit(1e-300))?;
            }
        }
    }
    Ok(state)
}
