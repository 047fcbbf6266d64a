//! The learner-versus-adversary loop.

use serde::Serialize;

use crate::error::Result;
use crate::losses::{make_round, LossForm, LossRound};
use crate::oracle::{offline_comparator, quadratic_total, surrogate_argmin, ORACLE_TOL};
use crate::point::{dot_unchecked, Point};
use crate::sets::{FeasibleSet, FEASIBILITY_TOL};

use super::bounds::BoundModel;
use super::config::{Algo, ExperimentSpec};
use super::slope::loglog_slope;

/// Slack on measured surrogate gaps against their bound.
pub const GAP_SLACK: f64 = 1e-7;

/// How far below zero a measured gap may fall before it counts as an oracle
/// failure.
pub const NEGATIVE_GAP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRow {
    pub t: usize,
    pub loss: f64,
    pub cum_loss: f64,
    /// Best fixed decision's total over rounds `1..=t`.
    pub comparator_cum: f64,
    pub regret: f64,
    pub theorem_bound: Option<f64>,
    pub gap: Option<f64>,
    pub gap_bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceSummary {
    pub horizon: usize,
    pub final_regret: f64,
    pub comparator_total: f64,
    pub comparator: Vec<f64>,
    pub bound: Option<f64>,
    /// Log-log slope of `R(t)` over the logged doubling rounds `t = 8, 16, ...`.
    /// The step size stays tuned to the full horizon, so this is a
    /// within-run curve, not the per-horizon estimate of a sweep.
    pub slope: Option<f64>,
    pub max_gap_ratio: Option<f64>,
}

/// A broken invariant observed during a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub check: &'static str,
    pub t: usize,
    pub value: f64,
    pub limit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegretTrace {
    pub rows: Vec<TraceRow>,
    pub summary: TraceSummary,
    pub violations: Vec<Violation>,
}

impl RegretTrace {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Running comparator over a prefix of the rounds.
enum Prefix {
    Linear { grad_sum: Point },
    Quadratic { lambda: f64, center_sum: Point, center_sq_sum: f64 },
}

impl Prefix {
    fn new(dim: usize) -> Self {
        Prefix::Linear {
            grad_sum: Point::zeros(dim),
        }
    }

    fn absorb(&mut self, round: &LossRound) {
        match (&mut *self, &round.form) {
            (Prefix::Linear { grad_sum }, LossForm::Linear { g }) => grad_sum.add_assign(g),
            (_, LossForm::Quadratic { center, lambda }) => {
                if let Prefix::Linear { .. } = self {
                    *self = Prefix::Quadratic {
                        lambda: *lambda,
                        center_sum: Point::zeros(center.dim()),
                        center_sq_sum: 0.0,
                    };
                }
                if let Prefix::Quadratic {
                    center_sum,
                    center_sq_sum,
                    ..
                } = self
                {
                    center_sum.add_assign(center);
                    *center_sq_sum += center.norm_sq();
                }
            }
            (Prefix::Quadratic { .. }, LossForm::Linear { .. }) => {
                unreachable!("an experiment draws every round from one family")
            }
        }
    }

    /// `min_x Σ_{τ<=t} f_τ(x)`.
    fn value(&self, set: &FeasibleSet, t: usize) -> Result<f64> {
        match self {
            Prefix::Linear { grad_sum } => Ok(dot_unchecked(grad_sum, &set.lmo(grad_sum)?)),
            Prefix::Quadratic {
                lambda,
                center_sum,
                center_sq_sum,
            } => {
                let x = set.project(&center_sum.scale(1.0 / t as f64))?;
                Ok(quadratic_total(*lambda, t, center_sum, *center_sq_sum, &x))
            }
        }
    }
}

/// Plays `spec.horizon` rounds: the learner commits `x_t`, the adversary
/// reveals `f_t`, the loss and gradient at `x_t` are recorded and the learner
/// updates. With `gap_check` on, `h_t = F_{t-1}(x_t) - min F_{t-1}` is
/// measured for `t <= gap_cap` on learners that keep a surrogate.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<RegretTrace> {
    let set = spec.feasible_set()?;
    let loss_spec = spec.loss_spec()?;
    let mut learner = spec.learner()?;
    let model = BoundModel::for_spec(spec).ok();

    let horizon = spec.horizon;
    let mut rows = Vec::with_capacity(horizon);
    let mut rounds = Vec::with_capacity(horizon);
    let mut violations = Vec::new();
    let mut prefix = Prefix::new(set.dim());
    let mut cum_loss = 0.0;
    let mut max_gap_ratio: Option<f64> = None;

    for t in 1..=horizon {
        let x = learner.decision().clone();
        if !set.contains(&x, FEASIBILITY_TOL)? {
            violations.push(Violation {
                check: "feasible_decision",
                t,
                value: f64::NAN,
                limit: FEASIBILITY_TOL,
            });
        }

        let (gap, gap_bound) = if spec.gap_check && t <= spec.gap_cap {
            measure_gap(learner.surrogate(), &x, model.as_ref(), t)?
        } else {
            (None, None)
        };
        if let Some(h) = gap {
            check_gap(spec.algo, t, h, gap_bound, &mut violations);
            if let Some(eps) = gap_bound {
                let ratio = h / eps;
                max_gap_ratio = Some(max_gap_ratio.map_or(ratio, |m| m.max(ratio)));
            }
        }

        let round = make_round(&loss_spec, t, &set)?;
        let loss = round.value_at(&x)?;
        let grad = round.grad_at(&x)?;
        learner.update(&grad)?;

        cum_loss += loss;
        prefix.absorb(&round);
        let comparator_cum = prefix.value(&set, t)?;
        rows.push(TraceRow {
            t,
            loss,
            cum_loss,
            comparator_cum,
            regret: cum_loss - comparator_cum,
            theorem_bound: model.map(|m| m.regret(t)),
            gap,
            gap_bound,
        });
        rounds.push(round);
    }

    let (comparator, comparator_total) = offline_comparator(&set, &rounds, ORACLE_TOL)?;
    let final_regret = cum_loss - comparator_total;
    let bound = model.map(|m| m.regret(horizon));
    if let Some(b) = bound {
        if final_regret > b {
            violations.push(Violation {
                check: "regret_bound",
                t: horizon,
                value: final_regret,
                limit: b,
            });
        }
    }

    let doubling: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.t >= 8 && r.t.is_power_of_two())
        .map(|r| (r.t as f64, r.regret))
        .collect();
    let slope = loglog_slope(&doubling).ok();

    Ok(RegretTrace {
        rows,
        summary: TraceSummary {
            horizon,
            final_regret,
            comparator_total,
            comparator: comparator.into_vec(),
            bound,
            slope,
            max_gap_ratio,
        },
        violations,
    })
}

fn measure_gap(
    surrogate: Option<crate::oracle::SurrogateSpec>,
    x: &Point,
    model: Option<&BoundModel>,
    t: usize,
) -> Result<(Option<f64>, Option<f64>)> {
    let Some(surrogate) = surrogate else {
        return Ok((None, None));
    };
    if let crate::oracle::SurrogateSpec::ScOfw { t: 0, .. } = surrogate {
        // F_0 is identically zero; every point is a minimizer.
        return Ok((None, None));
    }
    let (x_star, _) = surrogate_argmin(&surrogate, ORACLE_TOL)?;
    let h = surrogate.value_gap(x, &x_star)?;
    Ok((Some(h), model.and_then(|m| m.gap(t))))
}

fn check_gap(algo: Algo, t: usize, h: f64, bound: Option<f64>, violations: &mut Vec<Violation>) {
    if h < -NEGATIVE_GAP_TOL {
        violations.push(Violation {
            check: "gap_nonnegative",
            t,
            value: h,
            limit: -NEGATIVE_GAP_TOL,
        });
    }
    if algo == Algo::OfwLs && t == 1 && h.abs() > ORACLE_TOL {
        violations.push(Violation {
            check: "first_gap_zero",
            t,
            value: h,
            limit: ORACLE_TOL,
        });
    }
    if let Some(eps) = bound {
        if h > eps + GAP_SLACK {
            violations.push(Violation {
                check: "gap_bound",
                t,
                value: h,
                limit: eps + GAP_SLACK,
            });
        }
    }
}
