use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::oracle::SurrogateSpec;
use crate::point::Point;
use crate::sets::FeasibleSet;

use super::Learner;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineVariant {
    /// OFW surrogate with the classical decaying step `min(1, t^(-1/2))` and
    /// `eta = D / (2 G T^(3/4))`.
    OfwDecay,
    /// Projected online gradient descent.
    Ogd,
}

/// OGD step schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OgdStep {
    /// `D / (G sqrt(t))`.
    Convex { lipschitz: f64, diameter: f64 },
    /// `1 / (lambda t)`.
    StronglyConvex { lambda: f64 },
}

impl OgdStep {
    pub fn at(&self, t: usize) -> f64 {
        let t = t as f64;
        match *self {
            OgdStep::Convex {
                lipschitz,
                diameter,
            } => diameter / (lipschitz * t.sqrt()),
            OgdStep::StronglyConvex { lambda } => 1.0 / (lambda * t),
        }
    }
}

/// Reference learners the line-searched methods are compared against.
#[derive(Debug, Clone)]
pub struct Baseline {
    variant: BaselineVariant,
    set: FeasibleSet,
    x: Point,
    anchor: Point,
    grad_sum: Point,
    t: usize,
    horizon: usize,
    eta: f64,
    ogd_step: Option<OgdStep>,
}

impl Baseline {
    pub fn ofw_decay(set: FeasibleSet, horizon: usize, lipschitz: f64) -> Result<Self> {
        if horizon == 0 {
            return Err(invalid("T", "horizon must be at least 1"));
        }
        if !(lipschitz > 0.0) {
            return Err(invalid("G", "Lipschitz constant must be positive"));
        }
        let eta = set.diameter() / (2.0 * lipschitz * (horizon as f64).powf(0.75));
        Ok(Self::build(BaselineVariant::OfwDecay, set, horizon, eta, None))
    }

    pub fn ogd(set: FeasibleSet, horizon: usize, step: OgdStep) -> Result<Self> {
        match step {
            OgdStep::Convex { lipschitz, .. } if !(lipschitz > 0.0) => {
                return Err(invalid("G", "Lipschitz constant must be positive"))
            }
            OgdStep::StronglyConvex { lambda } if !(lambda > 0.0) => {
                return Err(invalid("lambda", "strong convexity must be positive"))
            }
            _ => {}
        }
        Ok(Self::build(BaselineVariant::Ogd, set, horizon, 0.0, Some(step)))
    }

    fn build(
        variant: BaselineVariant,
        set: FeasibleSet,
        horizon: usize,
        eta: f64,
        ogd_step: Option<OgdStep>,
    ) -> Self {
        let anchor = set.anchor();
        Self {
            variant,
            x: anchor.clone(),
            grad_sum: Point::zeros(set.dim()),
            anchor,
            set,
            t: 0,
            horizon,
            eta,
            ogd_step,
        }
    }

    pub fn variant(&self) -> BaselineVariant {
        self.variant
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Decaying Frank-Wolfe step for round `t >= 1`.
    pub fn decay_sigma(t: usize) -> f64 {
        (1.0 / (t as f64).sqrt()).min(1.0)
    }
}

impl Learner for Baseline {
    fn decision(&self) -> &Point {
        &self.x
    }

    fn rounds(&self) -> usize {
        self.t
    }

    fn update(&mut self, grad: &Point) -> Result<()> {
        grad.check_dim(self.set.dim())?;
        if self.horizon > 0 && self.t >= self.horizon {
            return Err(Error::HorizonExceeded {
                horizon: self.horizon,
            });
        }
        self.grad_sum.add_assign(grad);
        self.t += 1;
        match self.variant {
            BaselineVariant::OfwDecay => {
                let mut surrogate_grad = self.grad_sum.scale(self.eta);
                surrogate_grad.axpy(2.0, &self.x.sub(&self.anchor));
                let vertex = self.set.lmo(&surrogate_grad)?;
                self.x = self.x.toward(&vertex, Self::decay_sigma(self.t));
            }
            BaselineVariant::Ogd => {
                let step = self.ogd_step.expect("ogd baseline carries a step schedule");
                let mut y = self.x.clone();
                y.axpy(-step.at(self.t), grad);
                self.x = self.set.project(&y)?;
            }
        }
        Ok(())
    }

    fn surrogate(&self) -> Option<SurrogateSpec> {
        match self.variant {
            BaselineVariant::OfwDecay => Some(SurrogateSpec::Ofw {
                set: self.set.clone(),
                eta: self.eta,
                grad_sum: self.grad_sum.clone(),
                anchor: self.anchor.clone(),
                t: self.t,
            }),
            BaselineVariant::Ogd => None,
        }
    }

    fn set(&self) -> &FeasibleSet {
        &self.set
    }
}
