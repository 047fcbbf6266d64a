use crate::error::{invalid, Result};
use crate::oracle::SurrogateSpec;
use crate::point::Point;
use crate::sets::FeasibleSet;

use super::{line_searched_step, FwStep, Learner};

/// Strongly convex variant of online Frank-Wolfe.
///
/// The surrogate after `t` rounds is
/// `F_t(x) = Σ_{τ<=t} <g_τ, x> + (lambda/2) ||x - x_τ||^2`, whose gradient
/// `grad_sum + lambda (t x - iterate_sum)` needs only two running sums.
/// No horizon is required.
#[derive(Debug, Clone)]
pub struct ScOfw {
    set: FeasibleSet,
    x: Point,
    grad_sum: Point,
    iterate_sum: Point,
    iterate_sq_sum: f64,
    t: usize,
    lambda: f64,
}

impl ScOfw {
    pub fn new(set: FeasibleSet, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(invalid("lambda", format!("strong convexity must be positive, got {lambda}")));
        }
        let dim = set.dim();
        Ok(Self {
            x: set.anchor(),
            grad_sum: Point::zeros(dim),
            iterate_sum: Point::zeros(dim),
            iterate_sq_sum: 0.0,
            set,
            t: 0,
            lambda,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn grad_sum(&self) -> &Point {
        &self.grad_sum
    }

    pub fn iterate_sum(&self) -> &Point {
        &self.iterate_sum
    }

    pub fn step(&mut self, grad: &Point) -> Result<FwStep> {
        grad.check_dim(self.set.dim())?;
        self.iterate_sum.add_assign(&self.x);
        self.iterate_sq_sum += self.x.norm_sq();
        self.grad_sum.add_assign(grad);
        self.t += 1;
        let t = self.t as f64;
        let mut surrogate_grad = self.grad_sum.clone();
        surrogate_grad.axpy(self.lambda, &self.x.scale(t).sub(&self.iterate_sum));
        let (next, step) =
            line_searched_step(&self.set, &self.x, surrogate_grad, self.lambda * t)?;
        self.x = next;
        Ok(step)
    }
}

impl Learner for ScOfw {
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
        Some(SurrogateSpec::ScOfw {
            set: self.set.clone(),
            lambda: self.lambda,
            grad_sum: self.grad_sum.clone(),
            iterate_sum: self.iterate_sum.clone(),
            iterate_sq_sum: self.iterate_sq_sum,
            t: self.t,
        })
    }

    fn set(&self) -> &FeasibleSet {
        &self.set
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::losses::{make_quadratic_round, LossSpec};
    use crate::oracle::{surrogate_argmin, ORACLE_TOL};
    use crate::point::dot_unchecked;
    use approx::assert_relative_eq;

    fn p(v: &[f64]) -> Point {
        Point::new(v.to_vec()).unwrap()
    }

    #[test]
    fn init_examples() {
        let s = FeasibleSet::simplex(3).unwrap();
        let l = ScOfw::new(s, 1.0).unwrap();
        for i in 0..3 {
            assert_relative_eq!(l.decision()[i], 1.0 / 3.0);
        }
        assert_eq!(l.rounds(), 0);
        assert_eq!(l.grad_sum(), &Point::zeros(3));
        assert!(ScOfw::new(FeasibleSet::simplex(3).unwrap(), 0.0).is_err());
    }

    /// Hand trace on [-1, 1] with lambda = 1, g_1 = 1: the step lands on the
    /// oracle minimizer of F_1(x) = x + x^2 / 2.
    #[test]
    fn first_step_on_interval_lands_on_minimizer() {
        let set = FeasibleSet::l2_ball(1, 1.0).unwrap();
        let mut l = ScOfw::new(set, 1.0).unwrap();
        let step = l.step(&p(&[1.0])).unwrap();
        assert_eq!(step.surrogate_grad, p(&[1.0]));
        assert_eq!(step.vertex, p(&[-1.0]));
        assert_eq!(step.sigma, 1.0);
        assert_eq!(l.decision(), &p(&[-1.0]));
        let (x_star, _) = surrogate_argmin(&l.surrogate().unwrap(), ORACLE_TOL).unwrap();
        assert!(x_star.distance(l.decision()) <= 1e-12);
    }

    #[test]
    fn zero_gradients_keep_anchor() {
        for set in [FeasibleSet::l2_ball(3, 1.0).unwrap(), FeasibleSet::simplex(3).unwrap()] {
            let mut l = ScOfw::new(set.clone(), 2.0).unwrap();
            for _ in 0..20 {
                l.update(&Point::zeros(3)).unwrap();
                assert!(l.decision().distance(&set.anchor()) <= 1e-15);
            }
        }
    }

    #[test]
    fn rejects_dimension_mismatch() {
        let mut l = ScOfw::new(FeasibleSet::l2_ball(2, 1.0).unwrap(), 1.0).unwrap();
        assert!(l.update(&p(&[1.0])).is_err());
        assert_eq!(l.rounds(), 0);
    }

    #[test]
    fn feasibility_and_surrogate_identity() {
        for set in [
            FeasibleSet::l2_ball(4, 1.0).unwrap(),
            FeasibleSet::simplex(4).unwrap(),
            FeasibleSet::lp_ball(4, 1.0, 1.5).unwrap(),
        ] {
            let spec = LossSpec::quadratic(&set, 0.9, 2).unwrap();
            let mut l = ScOfw::new(set.clone(), 0.9).unwrap();
            let mut played = Vec::new();
            let mut grads = Vec::new();
            for t in 1..=80 {
                let round = make_quadratic_round(&spec, t, &set).unwrap();
                let g = round.grad_at(l.decision()).unwrap();
                played.push(l.decision().clone());
                grads.push(g.clone());
                l.update(&g).unwrap();
                assert!(set.contains(l.decision(), 1e-9).unwrap());

                let x = set.random_feasible(500 + t as u64);
                let mut naive = Point::zeros(4);
                let mut naive_value = 0.0;
                for (g, xt) in grads.iter().zip(&played) {
                    naive.add_assign(g);
                    naive.axpy(0.9, &x.sub(xt));
                    naive_value += dot_unchecked(g, &x) + 0.45 * x.sub(xt).norm_sq();
                }
                let sur = l.surrogate().unwrap();
                assert!(sur.grad(&x).unwrap().distance(&naive) <= 1e-9);
                assert!((sur.value(&x).unwrap() - naive_value).abs() <= 1e-9);
            }
        }
    }
}
