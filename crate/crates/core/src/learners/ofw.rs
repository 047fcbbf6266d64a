use crate::error::{invalid, Error, Result};
use crate::oracle::SurrogateSpec;
use crate::point::Point;
use crate::sets::FeasibleSet;

use super::{line_searched_step, FwStep, Learner};

/// Online Frank-Wolfe with line search.
///
/// The surrogate after `t` rounds is
/// `F_t(x) = eta <Σ_{τ<=t} g_τ, x> + ||x - x_1||^2` with
/// `eta = D / (2 G (T + 2)^(2/3))`. Each round takes one Frank-Wolfe step
/// on `F_t` with the exact line search over `[0, 1]`.
#[derive(Debug, Clone)]
pub struct Ofw {
    set: FeasibleSet,
    x: Point,
    anchor: Point,
    grad_sum: Point,
    t: usize,
    horizon: usize,
    eta: f64,
}

impl Ofw {
    pub fn new(set: FeasibleSet, horizon: usize, lipschitz: f64) -> Result<Self> {
        if horizon == 0 {
            return Err(invalid("T", "horizon must be at least 1"));
        }
        if !(lipschitz > 0.0) || !lipschitz.is_finite() {
            return Err(invalid("G", format!("Lipschitz constant must be positive, got {lipschitz}")));
        }
        let eta = Self::step_parameter(set.diameter(), lipschitz, horizon);
        Ok(Self::with_eta(set, horizon, eta))
    }

    /// `D / (2 G (T + 2)^(2/3))`.
    pub fn step_parameter(diameter: f64, lipschitz: f64, horizon: usize) -> f64 {
        diameter / (2.0 * lipschitz * (horizon as f64 + 2.0).powf(2.0 / 3.0))
    }

    pub(crate) fn with_eta(set: FeasibleSet, horizon: usize, eta: f64) -> Self {
        let anchor = set.anchor();
        Self {
            x: anchor.clone(),
            grad_sum: Point::zeros(set.dim()),
            anchor,
            set,
            t: 0,
            horizon,
            eta,
        }
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn anchor(&self) -> &Point {
        &self.anchor
    }

    pub fn grad_sum(&self) -> &Point {
        &self.grad_sum
    }

    /// Absorbs `g_t = grad f_t(x_t)` and moves to `x_{t+1}`.
    pub fn step(&mut self, grad: &Point) -> Result<FwStep> {
        grad.check_dim(self.set.dim())?;
        if self.t >= self.horizon {
            return Err(Error::HorizonExceeded {
                horizon: self.horizon,
            });
        }
        self.grad_sum.add_assign(grad);
        let mut surrogate_grad = self.grad_sum.scale(self.eta);
        surrogate_grad.axpy(2.0, &self.x.sub(&self.anchor));
        let (next, step) = line_searched_step(&self.set, &self.x, surrogate_grad, 2.0)?;
        self.x = next;
        self.t += 1;
        Ok(step)
    }
}

impl Learner for Ofw {
    fn decision(&self) -> &Point {
        &self.x
    }

    fn rounds(&self) -> usize {
        self.t
    }

    fn update(&mut self, grad: &Point) -> Result<()> {
        self.step(grad).map(|_| ())
    }

    fn surrogate(&self) -> Option<SurrogateSpec> {
        Some(SurrogateSpec::Ofw {
            set: self.set.clone(),
            eta: self.eta,
            grad_sum: self.grad_sum.clone(),
            anchor: self.anchor.clone(),
            t: self.t,
        })
    }

    fn set(&self) -> &FeasibleSet {
        &self.set
    }
}
