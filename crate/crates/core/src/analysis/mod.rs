//! Post-run diagnostics: moments, weighted norms, uniform moment bounds, the
//! density envelope check, uniqueness-distance machinery, and the
//! truncation-convergence study.

pub mod envelope;
pub mod moments;
pub mod study;
pub mod uniqueness;

pub use envelope::{envelope_check, envelope_constants, envelope_value, EnvelopeConstants, EnvelopeVerdict};
pub use moments::{
    check_moment_bounds, moment, moment_series, omega_distance, omega_norm, BoundCheck,
    BoundViolation, MomentBoundReport,
};
pub use study::{truncation_study, StudyDistance, StudyReport};
pub use uniqueness::{choose_uniqueness_exponents, uniqueness_distance, UniquenessExponents};
