//! Compactly supported kernel truncation.
//!
//! For a support index `n` the cutoff `φ_n` equals 1 on `[1/n, n]`, vanishes
//! outside `[ramp/n, n/ramp]`, and is linear in log-mass on the two ramps.
//! The truncated kernels are the separable products
//!
//! ```text
//! K_n(x,y) = φ_n(x) φ_n(y) K(x,y),      S_n(x) = φ_n(x) S(x),
//! ```
//!
//! so `K_n = K` on `[1/n, n]²`, `K_n ≤ K` everywhere, `K_n` is continuous
//! with compact support, and symmetry and the admissibility bounds are
//! inherited.  The daughter distribution `b` is left untouched.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationParams<S: Scalar> {
    /// Support index `n ≥ 1`: the cutoff is identically 1 on `[1/n, n]`.
    pub support_index: u32,
    /// Relative ramp width in `(0, 1)`: the outer support is
    /// `[ramp/n, n/ramp]`.
    pub ramp: S,
}

impl<S: Scalar> TruncationParams<S> {
    pub const DEFAULT_RAMP: f64 = 0.5;

    pub fn new(support_index: u32, ramp: S) -> Result<Self> {
        if support_index < 1 {
            return Err(Error::InvalidConfig("truncation index n must be at least 1".into()));
        }
        if !(ramp > S::zero() && ramp < S::one()) {
            return Err(Error::InvalidConfig("truncation ramp must lie in (0,1)".into()));
        }
        Ok(Self { support_index, ramp })
    }

    pub fn with_default_ramp(support_index: u32) -> Result<Self> {
        Self::new(support_index, S::lit(Self::DEFAULT_RAMP))
    }

    /// The cutoff `φ_n(x)`.
    ///
    /// Both the core `[1/n, n]` and the outer support are symmetric about
    /// `x = 1` in log-mass, so a single fold over `|ln x|` covers both ramps.
    pub fn cutoff(&self, x: S) -> S {
        if x <= S::zero() {
            return S::zero();
        }
        let core = S::from_u32(self.support_index).unwrap().ln();
        let excess = x.ln().abs() - core;
        if excess <= S::zero() {
            return S::one();
        }
        let width = self.ramp.recip().ln();
        if excess >= width {
            S::zero()
        } else {
            S::one() - excess / width
        }
    }

    /// Outer support `[ramp/n, n/ramp]` of the cutoff.
    pub fn outer_support(&self) -> (S, S) {
        let n = S::from_u32(self.support_index).unwrap();
        (self.ramp / n, n / self.ramp)
    }

    /// Core interval `[1/n, n]` where the cutoff is identically 1.
    pub fn core_support(&self) -> (S, S) {
        let n = S::from_u32(self.support_index).unwrap();
        (n.recip(), n)
    }
}
