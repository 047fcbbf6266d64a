//! Projection-free online convex optimization.
//!
//! Online Frank-Wolfe with an exact line search ([`learners::Ofw`]) and its
//! strongly convex variant ([`learners::ScOfw`]) run against seeded
//! adversaries over l_p balls and the simplex. The [`harness`] drives
//! experiments, evaluates the regret and surrogate-gap guarantees, and
//! hosts the verification suites behind the `ofw` command line tool.

pub mod error;
pub mod harness;
pub mod learners;
pub mod losses;
pub mod oracle;
pub mod point;
pub mod rng;
pub mod sets;

pub use error::{Error, Result};
pub use learners::{Baseline, BaselineVariant, Learner, Ofw, OgdStep, ScOfw};
pub use losses::{LossKind, LossRound, LossSpec};
pub use oracle::SurrogateSpec;
pub use point::{dot, line_search_quadratic, lp_norm, Point, StepCoefficients};
pub use sets::{FeasibleSet, SetKind};
