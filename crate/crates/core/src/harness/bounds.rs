//! Regret and surrogate-gap guarantees.
//!
//! | learner | set | regret at `T` | gap `h_t` |
//! |---|---|---|---|
//! | OFW + line search | strongly convex | `(11/4) G sqrt(C) (T+2)^(2/3)` | `C / (t+2)^(2/3)` |
//! | SC-OFW | strongly convex | `C sqrt(2T) + C ln(T)/2 + G D` | `C` for `t >= 2` |
//! | SC-OFW | any convex | `3 sqrt(2) C T^(2/3) / 8 + C ln(T)/8 + G D` | `C (t-1)^(1/3)` for `t >= 2` |
//!
//! with `C = max(4 D^2, 4096 / (3 alpha^2))`,
//! `C = max(4 (G + lambda D)^2 / lambda, 288 lambda / alpha^2)` and
//! `C = 16 (G + lambda D)^2 / lambda` respectively.

use serde::Serialize;

use crate::error::{Error, Result};

use super::config::{Algo, ExperimentSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Guarantee {
    /// OFW with line search over a strongly convex set.
    OfwStronglyConvexSet,
    /// SC-OFW over a strongly convex set.
    ScOfwStronglyConvexSet,
    /// SC-OFW over a general convex set.
    ScOfwGeneralSet,
}

/// The constants behind one guarantee.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundModel {
    pub guarantee: Guarantee,
    pub c: f64,
    pub lipschitz: f64,
    pub lambda: f64,
    pub diameter: f64,
    pub alpha: f64,
}

impl BoundModel {
    pub fn ofw(lipschitz: f64, diameter: f64, alpha: f64) -> Self {
        let c = (4.0 * diameter * diameter).max(4096.0 / (3.0 * alpha * alpha));
        Self {
            guarantee: Guarantee::OfwStronglyConvexSet,
            c,
            lipschitz,
            lambda: 0.0,
            diameter,
            alpha,
        }
    }

    pub fn scofw_strongly_convex_set(lipschitz: f64, lambda: f64, diameter: f64, alpha: f64) -> Self {
        let s = lipschitz + lambda * diameter;
        let c = (4.0 * s * s / lambda).max(288.0 * lambda / (alpha * alpha));
        Self {
            guarantee: Guarantee::ScOfwStronglyConvexSet,
            c,
            lipschitz,
            lambda,
            diameter,
            alpha,
        }
    }

    pub fn scofw_general_set(lipschitz: f64, lambda: f64, diameter: f64) -> Self {
        let s = lipschitz + lambda * diameter;
        Self {
            guarantee: Guarantee::ScOfwGeneralSet,
            c: 16.0 * s * s / lambda,
            lipschitz,
            lambda,
            diameter,
            alpha: 0.0,
        }
    }

    /// The guarantee covering `spec`, if any.
    pub fn for_spec(spec: &ExperimentSpec) -> Result<Self> {
        let set = spec.feasible_set()?;
        let (g, lambda) = spec.constants()?;
        let d = set.diameter();
        let alpha = set.strong_convexity_modulus();
        match spec.algo {
            Algo::OfwLs if alpha > 0.0 => Ok(Self::ofw(g, d, alpha)),
            Algo::OfwLs => Err(Error::NoBound(format!(
                "ofw_ls carries a regret guarantee only on strongly convex sets; {} has modulus 0",
                set.kind()
            ))),
            Algo::ScOfw if alpha > 0.0 => Ok(Self::scofw_strongly_convex_set(g, lambda, d, alpha)),
            Algo::ScOfw => Ok(Self::scofw_general_set(g, lambda, d)),
            Algo::OfwDecay | Algo::Ogd => Err(Error::NoBound(format!(
                "{} is a baseline without a tracked guarantee",
                spec.algo
            ))),
        }
    }

    /// Regret bound at horizon `t`.
    pub fn regret(&self, t: usize) -> f64 {
        let tf = t as f64;
        let gd = self.lipschitz * self.diameter;
        match self.guarantee {
            Guarantee::OfwStronglyConvexSet => {
                2.75 * self.lipschitz * self.c.sqrt() * (tf + 2.0).powf(2.0 / 3.0)
            }
            Guarantee::ScOfwStronglyConvexSet => {
                self.c * (2.0 * tf).sqrt() + self.c * tf.ln() / 2.0 + gd
            }
            Guarantee::ScOfwGeneralSet => {
                3.0 * std::f64::consts::SQRT_2 * self.c * tf.powf(2.0 / 3.0) / 8.0
                    + self.c * tf.ln() / 8.0
                    + gd
            }
        }
    }

    /// Bound on `h_t = F_{t-1}(x_t) - min F_{t-1}`. The SC-OFW bounds start
    /// at `t = 2`.
    pub fn gap(&self, t: usize) -> Option<f64> {
        let tf = t as f64;
        match self.guarantee {
            Guarantee::OfwStronglyConvexSet if t >= 1 => Some(self.c / (tf + 2.0).powf(2.0 / 3.0)),
            Guarantee::ScOfwStronglyConvexSet if t >= 2 => Some(self.c),
            Guarantee::ScOfwGeneralSet if t >= 2 => Some(self.c * (tf - 1.0).cbrt()),
            _ => None,
        }
    }
}

/// Regret bound for `spec` at horizon `t`, or [`Error::NoBound`].
pub fn theorem_bound(spec: &ExperimentSpec, t: usize) -> Result<f64> {
    Ok(BoundModel::for_spec(spec)?.regret(t))
}

/// Surrogate-gap bound for `spec` at round `t`, or [`Error::NoBound`].
pub fn gap_bound(spec: &ExperimentSpec, t: usize) -> Result<f64> {
    BoundModel::for_spec(spec)?
        .gap(t)
        .ok_or_else(|| Error::NoBound(format!("no gap bound at round {t}")))
}
