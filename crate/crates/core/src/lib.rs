//! Rough statistical convergence of order α for sequences in ℝ^d.
//!
//! * [`space`]: points, norms, checkpoint schedules and parameters.
//! * [`seqdsl`]: the sequence expression language and built-in families.
//! * [`density`]: prefix counts, α-order ratios and the zero-limit decision.
//! * [`rough`]: convergence tests, limit sets, cluster points, boundedness,
//!   projections and sequence algebra.
//! * [`verify`]: theorem-by-theorem suites over a built-in corpus.

pub mod density;
pub mod error;
pub mod rough;
pub mod seqdsl;
pub mod space;
pub mod verify;

pub use error::{Error, Result};
