//! Online learners driven by gradient feedback.
//!
//! Each learner owns its running state and is updated strictly in round
//! order. Per-step work is `O(dim)` plus one LMO (or one projection for
//! OGD): history enters only through running sums.

mod baseline;
mod ofw;
mod scofw;

pub use baseline::{Baseline, BaselineVariant, OgdStep};
pub use ofw::Ofw;
pub use scofw::ScOfw;

use crate::error::Result;
use crate::oracle::SurrogateSpec;
use crate::point::{dot_unchecked, line_search_quadratic, Point, StepCoefficients};
use crate::sets::FeasibleSet;

/// Distance below which `v_t` and `x_t` coincide and the step is skipped.
pub const DEGENERATE_STEP_TOL: f64 = 1e-12;

/// What one Frank-Wolfe update did.
#[derive(Debug, Clone, PartialEq)]
pub struct FwStep {
    /// Surrogate gradient at the pre-update decision.
    pub surrogate_grad: Point,
    /// LMO output.
    pub vertex: Point,
    pub sigma: f64,
}

pub trait Learner: Send {
    /// The decision committed for the next round.
    fn decision(&self) -> &Point;

    /// Rounds absorbed so far.
    fn rounds(&self) -> usize;

    fn update(&mut self, grad: &Point) -> Result<()>;

    /// Current surrogate, for learners that keep one.
    fn surrogate(&self) -> Option<SurrogateSpec> {
        None
    }

    fn set(&self) -> &FeasibleSet;
}

/// One line-searched Frank-Wolfe step on a surrogate with gradient
/// `surrogate_grad` at `x`; the quadratic model is
/// `sigma a + sigma^2 (curvature / 2) ||v - x||^2`.
pub(crate) fn line_searched_step(
    set: &FeasibleSet,
    x: &Point,
    surrogate_grad: Point,
    curvature: f64,
) -> Result<(Point, FwStep)> {
    let vertex = set.lmo(&surrogate_grad)?;
    let direction = vertex.sub(x);
    let sigma = if direction.norm() <= DEGENERATE_STEP_TOL {
        0.0
    } else {
        let a = dot_unchecked(&surrogate_grad, &direction);
        let b = 0.5 * curvature * direction.norm_sq();
        line_search_quadratic(StepCoefficients::new(a, b))?
    };
    let next = x.toward(&vertex, sigma);
    Ok((
        next,
        FwStep {
            surrogate_grad,
            vertex,
            sigma,
        },
    ))
}
