//! High-accuracy reference computations used to measure the learners:
//! surrogate minimizers, the offline comparator and a brute-force line
//! search. These routines may project; the learners never do.

use crate::error::{invalid, Error, Result};
use crate::losses::{LossForm, LossRound};
use crate::point::{dot_unchecked, Point};
use crate::sets::FeasibleSet;

/// Default oracle accuracy.
pub const ORACLE_TOL: f64 = 1e-9;

const MAX_ITERATIONS: usize = 1_000_000;

/// Snapshot of a learner's surrogate objective after `t` absorbed rounds.
#[derive(Debug, Clone, PartialEq)]
pub enum SurrogateSpec {
    /// `eta * <grad_sum, x> + ||x - anchor||^2`.
    Ofw {
        set: FeasibleSet,
        eta: f64,
        grad_sum: Point,
        anchor: Point,
        t: usize,
    },
    /// `Σ_τ <g_τ, x> + (lambda/2) ||x - x_τ||^2`, stored through the running
    /// sums `grad_sum`, `iterate_sum = Σ x_τ` and `iterate_sq_sum = Σ ||x_τ||^2`.
    ScOfw {
        set: FeasibleSet,
        lambda: f64,
        grad_sum: Point,
        iterate_sum: Point,
        iterate_sq_sum: f64,
        t: usize,
    },
}

impl SurrogateSpec {
    pub fn set(&self) -> &FeasibleSet {
        match self {
            SurrogateSpec::Ofw { set, .. } | SurrogateSpec::ScOfw { set, .. } => set,
        }
    }

    /// Number of rounds folded into the surrogate.
    pub fn rounds(&self) -> usize {
        match self {
            SurrogateSpec::Ofw { t, .. } | SurrogateSpec::ScOfw { t, .. } => *t,
        }
    }

    /// Smoothness constant, equal to the strong-convexity constant for these
    /// isotropic quadratics: 2 for OFW, `lambda t` for SC-OFW.
    pub fn curvature(&self) -> f64 {
        match self {
            SurrogateSpec::Ofw { .. } => 2.0,
            SurrogateSpec::ScOfw { lambda, t, .. } => lambda * *t as f64,
        }
    }

    pub fn value(&self, x: &Point) -> Result<f64> {
        x.check_dim(self.set().dim())?;
        Ok(match self {
            SurrogateSpec::Ofw {
                eta,
                grad_sum,
                anchor,
                ..
            } => eta * dot_unchecked(grad_sum, x) + x.sub(anchor).norm_sq(),
            SurrogateSpec::ScOfw {
                lambda,
                grad_sum,
                iterate_sum,
                iterate_sq_sum,
                t,
                ..
            } => {
                dot_unchecked(grad_sum, x)
                    + 0.5
                        * lambda
                        * (*t as f64 * x.norm_sq() - 2.0 * dot_unchecked(iterate_sum, x)
                            + iterate_sq_sum)
            }
        })
    }

    /// `value(x) - value(y)` without forming either value, which avoids the
    /// cancellation of two large totals.
    pub fn value_gap(&self, x: &Point, y: &Point) -> Result<f64> {
        x.check_dim(self.set().dim())?;
        y.check_dim(self.set().dim())?;
        let diff = x.sub(y);
        let sum = x.add(y);
        Ok(match self {
            SurrogateSpec::Ofw {
                eta,
                grad_sum,
                anchor,
                ..
            } => {
                // ||x-a||^2 - ||y-a||^2 = <x - y, x + y - 2a>
                eta * dot_unchecked(grad_sum, &diff)
                    + dot_unchecked(&diff, &sum.sub(&anchor.scale(2.0)))
            }
            SurrogateSpec::ScOfw {
                lambda,
                grad_sum,
                iterate_sum,
                t,
                ..
            } => {
                dot_unchecked(grad_sum, &diff)
                    + 0.5
                        * lambda
                        * (*t as f64 * dot_unchecked(&diff, &sum)
                            - 2.0 * dot_unchecked(iterate_sum, &diff))
            }
        })
    }

    pub fn grad(&self, x: &Point) -> Result<Point> {
        x.check_dim(self.set().dim())?;
        Ok(match self {
            SurrogateSpec::Ofw {
                eta,
                grad_sum,
                anchor,
                ..
            } => {
                let mut g = grad_sum.scale(*eta);
                g.axpy(2.0, &x.sub(anchor));
                g
            }
            SurrogateSpec::ScOfw {
                lambda,
                grad_sum,
                iterate_sum,
                t,
                ..
            } => {
                let mut g = grad_sum.clone();
                g.axpy(*lambda, &x.scale(*t as f64).sub(iterate_sum));
                g
            }
        })
    }

    /// Frank-Wolfe duality gap `max_v <grad F(x), x - v>`, an upper bound on
    /// `F(x) - min F`.
    pub fn fw_gap(&self, x: &Point) -> Result<f64> {
        let g = self.grad(x)?;
        let v = self.set().lmo(&g)?;
        Ok(dot_unchecked(&g, &x.sub(&v)))
    }
}

/// Minimizer of the surrogate by projected gradient descent with step
/// `1 / curvature`, stopped once the Frank-Wolfe gap is at most `tol`.
pub fn surrogate_argmin(spec: &SurrogateSpec, tol: f64) -> Result<(Point, f64)> {
    if !(tol > 0.0) {
        return Err(invalid("tol", "tolerance must be positive"));
    }
    if let SurrogateSpec::ScOfw { t: 0, .. } = spec {
        return Err(invalid("t", "the strongly convex surrogate needs at least one round"));
    }
    let step = 1.0 / spec.curvature();
    let set = spec.set();
    let mut x = set.anchor();
    let mut gap = spec.fw_gap(&x)?;
    let mut iterations = 0;
    while gap > tol {
        if iterations == MAX_ITERATIONS {
            return Err(Error::NoConvergence { iterations, gap });
        }
        let g = spec.grad(&x)?;
        let mut y = x.clone();
        y.axpy(-step, &g);
        x = set.project(&y)?;
        gap = spec.fw_gap(&x)?;
        iterations += 1;
    }
    let value = spec.value(&x)?;
    Ok((x, value))
}

/// Best fixed decision in hindsight and its total loss.
///
/// Linear rounds are solved exactly by one LMO call on the summed gradient.
/// Quadratic rounds collapse to `(lambda T / 2) ||x - mean||^2 + const`,
/// minimized by projecting the mean center. If that point misses the
/// Frank-Wolfe gap `tol` the iterative route [`offline_comparator_pgd`]
/// takes over.
pub fn offline_comparator(set: &FeasibleSet, rounds: &[LossRound], tol: f64) -> Result<(Point, f64)> {
    match summarize(set, rounds)? {
        Summary::Linear { grad_sum } => {
            let x = set.lmo(&grad_sum)?;
            let total = dot_unchecked(&grad_sum, &x);
            Ok((x, total))
        }
        Summary::Quadratic {
            lambda,
            count,
            center_sum,
            center_sq_sum,
        } => {
            let mean = center_sum.scale(1.0 / count as f64);
            let x = set.project(&mean)?;
            let g = x.sub(&mean).scale(lambda * count as f64);
            let gap = dot_unchecked(&g, &x.sub(&set.lmo(&g)?));
            if gap > tol {
                return offline_comparator_pgd(set, rounds, tol);
            }
            let total = quadratic_total(lambda, count, &center_sum, center_sq_sum, &x);
            Ok((x, total))
        }
    }
}

/// Projected gradient descent on the summed quadratic losses, run until the
/// Frank-Wolfe gap drops to `tol`. Linear rounds defer to the exact LMO.
pub fn offline_comparator_pgd(set: &FeasibleSet, rounds: &[LossRound], tol: f64) -> Result<(Point, f64)> {
    match summarize(set, rounds)? {
        Summary::Linear { grad_sum } => {
            let x = set.lmo(&grad_sum)?;
            let total = dot_unchecked(&grad_sum, &x);
            Ok((x, total))
        }
        Summary::Quadratic {
            lambda,
            count,
            center_sum,
            center_sq_sum,
        } => {
            let total_grad = |x: &Point| {
                let mut g = x.scale(count as f64);
                g.axpy(-1.0, &center_sum);
                g.scale(lambda)
            };
            let step = 1.0 / (lambda * count as f64);
            let mut x = set.anchor();
            for iterations in 0..=MAX_ITERATIONS {
                let g = total_grad(&x);
                let v = set.lmo(&g)?;
                let gap = dot_unchecked(&g, &x.sub(&v));
                if gap <= tol {
                    let total = quadratic_total(lambda, count, &center_sum, center_sq_sum, &x);
                    return Ok((x, total));
                }
                if iterations == MAX_ITERATIONS {
                    return Err(Error::NoConvergence { iterations, gap });
                }
                let mut y = x.clone();
                y.axpy(-step, &g);
                x = set.project(&y)?;
            }
            unreachable!()
        }
    }
}

/// `Σ (lambda/2) ||x - c_t||^2` from running sums.
pub(crate) fn quadratic_total(
    lambda: f64,
    count: usize,
    center_sum: &Point,
    center_sq_sum: f64,
    x: &Point,
) -> f64 {
    0.5 * lambda * (count as f64 * x.norm_sq() - 2.0 * dot_unchecked(center_sum, x) + center_sq_sum)
}

enum Summary {
    Linear {
        grad_sum: Point,
    },
    Quadratic {
        lambda: f64,
        count: usize,
        center_sum: Point,
        center_sq_sum: f64,
    },
}

fn summarize(set: &FeasibleSet, rounds: &[LossRound]) -> Result<Summary> {
    let first = rounds
        .first()
        .ok_or_else(|| invalid("rounds", "the comparator needs at least one round"))?;
    let dim = set.dim();
    match &first.form {
        LossForm::Linear { .. } => {
            let mut grad_sum = Point::zeros(dim);
            for r in rounds {
                match &r.form {
                    LossForm::Linear { g } => {
                        g.check_dim(dim)?;
                        grad_sum.add_assign(g);
                    }
                    _ => return Err(Error::InconsistentRounds("mixed linear and quadratic rounds".into())),
                }
            }
            Ok(Summary::Linear { grad_sum })
        }
        LossForm::Quadratic { lambda, .. } => {
            let lambda = *lambda;
            let mut center_sum = Point::zeros(dim);
            let mut center_sq_sum = 0.0;
            for r in rounds {
                match &r.form {
                    LossForm::Quadratic { center, lambda: l } => {
                        center.check_dim(dim)?;
                        if *l != lambda {
                            return Err(Error::InconsistentRounds(format!(
                                "rounds mix strong-convexity moduli {lambda} and {l}"
                            )));
                        }
                        center_sum.add_assign(center);
                        center_sq_sum += center.norm_sq();
                    }
                    _ => return Err(Error::InconsistentRounds("mixed linear and quadratic rounds".into())),
                }
            }
            Ok(Summary::Quadratic {
                lambda,
                count: rounds.len(),
                center_sum,
                center_sq_sum,
            })
        }
    }
}

/// Grid point of `{0, 1/(n-1), ..., 1}` minimizing `a s + b s^2`; the first
/// minimizer wins ties.
pub fn grid_line_search(a: f64, b: f64, grid_size: usize) -> Result<f64> {
    if grid_size < 2 {
        return Err(invalid("grid_size", "need at least two grid points"));
    }
    let n = (grid_size - 1) as f64;
    let mut best = (f64::INFINITY, 0.0);
    for i in 0..grid_size {
        let s = i as f64 / n;
        let v = a * s + b * s * s;
        if v < best.0 {
            best = (v, s);
        }
    }
    Ok(best.1)
}
