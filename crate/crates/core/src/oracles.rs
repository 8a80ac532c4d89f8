//! Independent reference solutions and brute-force twins.
//!
//! Nothing here depends on the sectional operators or the adaptive stepper:
//! the analytic solutions certify themselves by direct substitution into the
//! governing equation ([`residual_check`]), and the mass-discrete system
//! integrates with its own fixed-step scheme.  Tests and acceptance criteria
//! compare the production code against these.

use crate::error::{Error, Result};
use crate::kernels::{BreakageSpec, CoagulationSpec, KernelSystem, SelectionSpec};
use crate::quadrature::adaptive_gk;
use crate::scalar::Scalar;

/// Closed-form density for the constant coagulation kernel (`K = 1`, no
/// fragmentation) with initial datum `f₀(x) = e^{-x}`:
///
/// ```text
/// f(x, t) = 4 / (2 + t)² · exp(-2x / (2 + t)),
/// N₀(t) = 2 / (2 + t),   N₁(t) = 1.
/// ```
pub fn constant_kernel_density<S: Scalar>(x: S, t: S) -> S {
    let two = S::lit(2.0);
    let s = two + t;
    S::lit(4.0) / (s * s) * (-two * x / s).exp()
}

/// An analytic solution bundled with its kernel system and validity domain.
pub struct AnalyticSolution<S: Scalar> {
    pub id: &'static str,
    pub system: KernelSystem<S>,
    pub density: Box<dyn Fn(S, S) -> S + Send + Sync>,
    pub number: Box<dyn Fn(S) -> S + Send + Sync>,
    pub mass: Box<dyn Fn(S) -> S + Send + Sync>,
    /// Mass range on which the residual is sampled.
    pub x_range: (S, S),
    /// Time range of validity.
    pub t_range: (S, S),
    /// Upper integration cut for the unbounded integrals; the density must
    /// be negligible beyond it throughout `t_range`.
    pub tail_cut: S,
}

/// The constant-kernel solution above.
pub fn constant_kernel_solution<S: Scalar>() -> AnalyticSolution<S> {
    let system = KernelSystem::new(
        CoagulationSpec::constant(),
        SelectionSpec::zero(),
        BreakageSpec::binary_uniform(),
    )
    .expect("catalog system is admissible");
    AnalyticSolution {
        id: "constant-kernel-exponential",
        system,
        density: Box::new(|x, t| constant_kernel_density(x, t)),
        number: Box::new(|t| S::lit(2.0) / (S::lit(2.0) + t)),
        mass: Box::new(|_| S::one()),
        x_range: (S::lit(0.01), S::lit(20.0)),
        t_range: (S::zero(), S::lit(2.0)),
        tail_cut: S::lit(200.0),
    }
}

/// The identically zero solution with inert kernels.
pub fn zero_solution<S: Scalar>() -> AnalyticSolution<S> {
    let system = KernelSystem::new(
        CoagulationSpec::zero(),
        SelectionSpec::zero(),
        BreakageSpec::binary_uniform(),
    )
    .expect("catalog system is admissible");
    AnalyticSolution {
        id: "zero",
        system,
        density: Box::new(|_, _| S::zero()),
        number: Box::new(|_| S::zero()),
        mass: Box::new(|_| S::zero()),
        x_range: (S::lit(0.01), S::lit(20.0)),
        t_range: (S::zero(), S::lit(2.0)),
        tail_cut: S::lit(50.0),
    }
}

/// Central-difference step for the residual time derivative; balances
/// truncation against round-off at the 1e-6 residual target.
fn time_step<S: Scalar>(t: S) -> S {
    S::lit(1e-5) * (S::one() + t)
}

/// Substitutes a candidate solution into the governing equation and returns
/// the maximum absolute residual over the sample grid.  A formula enters the
/// repository as an oracle only after this check passes.
pub fn residual_check<S: Scalar>(
    solution: &AnalyticSolution<S>,
    xs: &[S],
    ts: &[S],
) -> Result<S> {
    let f = &solution.density;
    let sys = &solution.system;
    let rel = S::lit(1e-10);
    let abs = S::lit(1e-14);
    let mut worst = S::zero();
    for &t in ts {
        let h = time_step(t);
        for &x in xs {
            let dfdt = ((f)(x, t + h) - (f)(x, t - h)) / (h + h);

            let gain = if x > S::zero() {
                adaptive_gk(
                    &|y: S| sys.coagulation_rate(x - y, y) * (f)(x - y, t) * (f)(y, t),
                    S::zero(),
                    x,
                    rel,
                    abs,
                )
                .map_err(|e| named(e, x))?
                    * S::lit(0.5)
            } else {
                S::zero()
            };
            let death = (f)(x, t)
                * adaptive_gk(
                    &|y: S| sys.coagulation_rate(x, y) * (f)(y, t),
                    S::zero(),
                    solution.tail_cut,
                    rel,
                    abs,
                )
                .map_err(|e| named(e, x))?;

            let (frag_gain, frag_death) = if sys.selection.is_zero() {
                (S::zero(), S::zero())
            } else {
                let g = adaptive_gk(
                    &|y: S| sys.breakage_rate(x, y) * sys.selection_rate(y) * (f)(y, t),
                    x,
                    solution.tail_cut,
                    rel,
                    abs,
                )
                .map_err(|e| named(e, x))?;
                (g, sys.selection_rate(x) * (f)(x, t))
            };

            let residual = dfdt - (gain - death + frag_gain - frag_death);
            worst = worst.max(residual.abs());
        }
    }
    Ok(worst)
}

fn named<S: Scalar>(err: Error, x: S) -> Error {
    match err {
        Error::QuadratureNonConvergence { detail, .. } => {
            Error::QuadratureNonConvergence { sample: x.as_f64(), detail }
        }
        other => other,
    }
}

/// Log-spaced sample grid for residual checks.
pub fn log_samples<S: Scalar>(lo: S, hi: S, n: usize) -> Vec<S> {
    let (llo, lhi) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            let t = S::from_usize(i).unwrap() / S::from_usize(n - 1).unwrap();
            (llo + (lhi - llo) * t).exp()
        })
        .collect()
}

/// Mass-discrete coagulation-fragmentation system on integer masses
/// `1..=M`, the brute-force twin of the sectional scheme on a unit grid.
#[derive(Debug, Clone)]
pub struct DiscreteSystem<S: Scalar> {
    /// Symmetric kernel values `K[i][j]` for masses `i+1`, `j+1`.
    pub kernel: Vec<Vec<S>>,
    /// Selection rate per mass.
    pub selection: Vec<S>,
    /// `fragments[i][j]`: offspring of mass `i+1` per breakage of mass
    /// `j+1`.
    pub fragments: Vec<Vec<S>>,
}

/// Trajectory record of the discrete twin.
#[derive(Debug, Clone)]
pub struct DiscreteRun<S: Scalar> {
    pub times: Vec<S>,
    pub states: Vec<Vec<S>>,
    pub leak_mass: Vec<S>,
}

impl<S: Scalar> DiscreteRun<S> {
    pub fn number(&self, i: usize) -> S {
        self.states[i].iter().fold(S::zero(), |a, &c| a + c)
    }

    pub fn mass(&self, i: usize) -> S {
        self.states[i]
            .iter()
            .enumerate()
            .fold(S::zero(), |a, (k, &c)| a + S::from_usize(k + 1).unwrap() * c)
    }
}

impl<S: Scalar> DiscreteSystem<S> {
    /// Discrete binary-uniform breakage: mass `j` splits into `(k, j-k)`
    /// uniformly, `β_kj = 2/(j-1)`, with unit selection rate for `j ≥ 2`.
    pub fn binary_uniform_breakage(m: usize) -> (Vec<S>, Vec<Vec<S>>) {
        let mut selection = vec![S::zero(); m];
        let mut fragments = vec![vec![S::zero(); m]; m];
        for j in 1..m {
            selection[j] = S::one();
            let beta = S::lit(2.0) / S::from_usize(j).unwrap();
            for item in fragments.iter_mut().take(j) {
                item[j] = beta;
            }
        }
        (selection, fragments)
    }

    pub fn masses(&self) -> usize {
        self.kernel.len()
    }

    fn validate(&self) -> Result<()> {
        let m = self.masses();
        if m > 64 {
            return Err(Error::InvalidConfig("discrete twin limited to 64 masses".into()));
        }
        if self.selection.len() != m || self.fragments.len() != m {
            return Err(Error::DimensionMismatch { expected: m, got: self.selection.len() });
        }
        Ok(())
    }

    /// Right-hand side of the discrete equations plus the mass-leak rate
    /// from aggregates beyond mass `M`.
    pub fn rhs(&self, c: &[S]) -> (Vec<S>, S) {
        let m = self.masses();
        let half = S::lit(0.5);
        let mut d = vec![S::zero(); m];
        let mut leak = S::zero();
        for i in 0..m {
            // coagulation gain: pairs summing to i+1
            let mut gain = S::zero();
            for a in 0..i {
                let b = i - 1 - a;
                gain = gain + self.kernel[a][b] * c[a] * c[b];
            }
            d[i] = d[i] + half * gain;
            // coagulation loss
            let mut loss = S::zero();
            for (j, &cj) in c.iter().enumerate() {
                loss = loss + self.kernel[i][j] * cj;
            }
            d[i] = d[i] - c[i] * loss;
        }
        // overflow pairs: i + j > M leaves the system
        for i in 0..m {
            for j in i..m {
                if i + j + 2 > m {
                    let rate = if i == j {
                        half * self.kernel[i][j] * c[i] * c[j]
                    } else {
                        self.kernel[i][j] * c[i] * c[j]
                    };
                    leak = leak + S::from_usize(i + j + 2).unwrap() * rate;
                }
            }
        }
        // fragmentation
        for j in 0..m {
            let rate = self.selection[j] * c[j];
            if rate == S::zero() {
                continue;
            }
            d[j] = d[j] - rate;
            let mut placed = S::zero();
            for i in 0..m {
                let beta = self.fragments[i][j];
                if beta != S::zero() {
                    d[i] = d[i] + beta * rate;
                    placed = placed + S::from_usize(i + 1).unwrap() * beta;
                }
            }
            leak = leak + (S::from_usize(j + 1).unwrap() - placed) * rate;
        }
        (d, leak)
    }

    /// Integrates with classic fixed-step RK4, doubling the step count until
    /// the number and mass trajectories agree to `1e-10`.
    pub fn integrate(&self, c0: &[S], t_end: S, samples: usize) -> Result<DiscreteRun<S>> {
        self.validate()?;
        if c0.len() != self.masses() {
            return Err(Error::DimensionMismatch { expected: self.masses(), got: c0.len() });
        }
        let tol = S::lit(1e-10);
        let mut steps = 64usize;
        let mut prev = self.rk4_run(c0, t_end, samples, steps);
        for _ in 0..12 {
            steps *= 2;
            let next = self.rk4_run(c0, t_end, samples, steps);
            let last = prev.states.len() - 1;
            let dn = (next.number(last) - prev.number(last)).abs();
            let dm = (next.mass(last) - prev.mass(last)).abs();
            if dn <= tol && dm <= tol {
                return Ok(next);
            }
            prev = next;
        }
        Err(Error::QuadratureNonConvergence {
            sample: t_end.as_f64(),
            detail: "discrete twin did not converge under step doubling".into(),
        })
    }

    fn rk4_run(&self, c0: &[S], t_end: S, samples: usize, steps_per_sample: usize) -> DiscreteRun<S> {
        let samples = samples.max(1);
        let mut run = DiscreteRun {
            times: vec![S::zero()],
            states: vec![c0.to_vec()],
            leak_mass: vec![S::zero()],
        };
        let mut c = c0.to_vec();
        let mut leak = S::zero();
        let dt = t_end / S::from_usize(samples * steps_per_sample).unwrap();
        for s in 1..=samples {
            for _ in 0..steps_per_sample {
                self.rk4_step(&mut c, &mut leak, dt);
            }
            run.times.push(t_end * S::from_usize(s).unwrap() / S::from_usize(samples).unwrap());
            run.states.push(c.clone());
            run.leak_mass.push(leak);
        }
        run
    }

    fn rk4_step(&self, c: &mut Vec<S>, leak: &mut S, dt: S) {
        let n = c.len();
        let half = S::lit(0.5);
        let sixth = S::lit(1.0 / 6.0);
        let two = S::lit(2.0);
        let (k1, l1) = self.rhs(c);
        let y2: Vec<S> = (0..n).map(|i| c[i] + half * dt * k1[i]).collect();
        let (k2, l2) = self.rhs(&y2);
        let y3: Vec<S> = (0..n).map(|i| c[i] + half * dt * k2[i]).collect();
        let (k3, l3) = self.rhs(&y3);
        let y4: Vec<S> = (0..n).map(|i| c[i] + dt * k3[i]).collect();
        let (k4, l4) = self.rhs(&y4);
        for i in 0..n {
            c[i] = c[i] + dt * sixth * (k1[i] + two * k2[i] + two * k3[i] + k4[i]);
        }
        *leak = *leak + dt * sixth * (l1 + two * l2 + two * l3 + l4);
    }
}
