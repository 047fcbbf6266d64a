//! Seeded adversarial loss sequences with certified constants.
//!
//! Two families are provided: linear losses `<g_t, x>` whose gradients lie
//! on the sphere of radius `G`, and quadratics `(lambda/2) ||x - theta_t||^2`
//! centered at seeded feasible points. Round `t` depends only on
//! `(seed, t)`, so rounds can be generated in any order.

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::point::{dot_unchecked, Point};
use crate::rng::{rng_for, round_seed};
use crate::sets::FeasibleSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    Linear,
    Quadratic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LossSpec {
    pub kind: LossKind,
    /// Lipschitz constant `G`. For quadratics the certified value is
    /// `lambda * D` and this field is informational.
    pub lipschitz: f64,
    /// Strong-convexity modulus; zero for linear losses.
    pub lambda: f64,
    pub dim: usize,
    pub seed: u64,
}

impl LossSpec {
    pub fn linear(dim: usize, lipschitz: f64, seed: u64) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("dim", "dimension must be positive"));
        }
        if !(lipschitz > 0.0) || !lipschitz.is_finite() {
            return Err(invalid("G", format!("Lipschitz constant must be positive, got {lipschitz}")));
        }
        Ok(Self {
            kind: LossKind::Linear,
            lipschitz,
            lambda: 0.0,
            dim,
            seed,
        })
    }

    pub fn quadratic(set: &FeasibleSet, lambda: f64, seed: u64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(invalid("lambda", format!("strong convexity must be positive, got {lambda}")));
        }
        Ok(Self {
            kind: LossKind::Quadratic,
            lipschitz: lambda * set.diameter(),
            lambda,
            dim: set.dim(),
            seed,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LossForm {
    /// `f(x) = <g, x>`.
    Linear { g: Point },
    /// `f(x) = (lambda / 2) ||x - center||^2`.
    Quadratic { center: Point, lambda: f64 },
}

/// The loss revealed at round `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct LossRound {
    pub t: usize,
    pub form: LossForm,
}

impl LossRound {
    pub fn kind(&self) -> LossKind {
        match self.form {
            LossForm::Linear { .. } => LossKind::Linear,
            LossForm::Quadratic { .. } => LossKind::Quadratic,
        }
    }

    pub fn dim(&self) -> usize {
        match &self.form {
            LossForm::Linear { g } => g.dim(),
            LossForm::Quadratic { center, .. } => center.dim(),
        }
    }

    pub fn value_at(&self, x: &Point) -> Result<f64> {
        x.check_dim(self.dim())?;
        Ok(match &self.form {
            LossForm::Linear { g } => dot_unchecked(g, x),
            LossForm::Quadratic { center, lambda } => 0.5 * lambda * x.sub(center).norm_sq(),
        })
    }

    pub fn grad_at(&self, x: &Point) -> Result<Point> {
        x.check_dim(self.dim())?;
        Ok(match &self.form {
            LossForm::Linear { g } => g.clone(),
            LossForm::Quadratic { center, lambda } => x.sub(center).scale(*lambda),
        })
    }
}

/// Linear round: `g_t` uniform on the sphere of radius `G`.
pub fn make_linear_round(spec: &LossSpec, t: usize) -> Result<LossRound> {
    if spec.kind != LossKind::Linear {
        return Err(invalid("kind", "expected a linear loss spec"));
    }
    let mut rng = rng_for(round_seed(spec.seed, t as u64));
    let mut z: Vec<f64> = Vec::new();
    let mut n = 0.0;
    while n == 0.0 {
        z = (0..spec.dim).map(|_| StandardNormal.sample(&mut rng)).collect();
        n = z.iter().fold(0.0, |acc: f64, c| acc + c * c).sqrt();
    }
    let scale = spec.lipschitz / n;
    let g = Point::from_vec(z.into_iter().map(|c| c * scale).collect());
    Ok(LossRound {
        t,
        form: LossForm::Linear { g },
    })
}

/// Quadratic round centered at a seeded feasible point of `set`.
pub fn make_quadratic_round(spec: &LossSpec, t: usize, set: &FeasibleSet) -> Result<LossRound> {
    if spec.kind != LossKind::Quadratic {
        return Err(invalid("kind", "expected a quadratic loss spec"));
    }
    if !(spec.lambda > 0.0) {
        return Err(invalid("lambda", format!("strong convexity must be positive, got {}", spec.lambda)));
    }
    if spec.dim != set.dim() {
        return Err(Error::DimensionMismatch {
            expected: set.dim(),
            got: spec.dim,
        });
    }
    let center = set.random_feasible(round_seed(spec.seed, t as u64));
    Ok(LossRound {
        t,
        form: LossForm::Quadratic {
            center,
            lambda: spec.lambda,
        },
    })
}

/// Round `t` of whichever family `spec` selects.
pub fn make_round(spec: &LossSpec, t: usize, set: &FeasibleSet) -> Result<LossRound> {
    match spec.kind {
        LossKind::Linear => make_linear_round(spec, t),
        LossKind::Quadratic => make_quadratic_round(spec, t, set),
    }
}

/// Certified `(G, lambda)` over `set`.
pub fn certify_constants(spec: &LossSpec, set: &FeasibleSet) -> Result<(f64, f64)> {
    if spec.dim != set.dim() {
        return Err(Error::DimensionMismatch {
            expected: set.dim(),
            got: spec.dim,
        });
    }
    Ok(match spec.kind {
        LossKind::Linear => (spec.lipschitz, 0.0),
        LossKind::Quadratic => (spec.lambda * set.diameter(), spec.lambda),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ball() -> FeasibleSet {
        FeasibleSet::l2_ball(5, 1.0).unwrap()
    }

    #[test]
    fn linear_rounds_have_exact_norm_and_are_deterministic() {
        let spec = LossSpec::linear(5, 1.0, 42).unwrap();
        for t in 1..50 {
            let r = make_linear_round(&spec, t).unwrap();
            let LossForm::Linear { g } = &r.form else { unreachable!() };
            assert_relative_eq!(g.norm(), 1.0, max_relative = 1e-15);
            assert_eq!(r, make_linear_round(&spec, t).unwrap());
            assert_eq!(r.value_at(&Point::zeros(5)).unwrap(), 0.0);
            assert_eq!(&r.grad_at(&ball().random_feasible(t as u64)).unwrap(), g);
        }
        assert_ne!(make_linear_round(&spec, 1).unwrap(), make_linear_round(&spec, 2).unwrap());
    }

    #[test]
    fn kind_mismatch_is_an_error() {
        let lin = LossSpec::linear(5, 1.0, 1).unwrap();
        let quad = LossSpec::quadratic(&ball(), 1.0, 1).unwrap();
        assert!(make_quadratic_round(&lin, 1, &ball()).is_err());
        assert!(make_linear_round(&quad, 1).is_err());
    }

    #[test]
    fn quadratic_rejects_nonpositive_lambda() {
        assert!(LossSpec::quadratic(&ball(), 0.0, 1).is_err());
        let mut spec = LossSpec::quadratic(&ball(), 1.0, 1).unwrap();
        spec.lambda = -1.0;
        assert!(make_quadratic_round(&spec, 1, &ball()).is_err());
    }

    #[test]
    fn quadratic_round_examples() {
        let set = ball();
        let spec = LossSpec::quadratic(&set, 1.0, 3).unwrap();
        let r = make_quadratic_round(&spec, 4, &set).unwrap();
        let LossForm::Quadratic { center, .. } = &r.form else { unreachable!() };
        assert!(set.contains(center, 0.0).unwrap());
        assert_eq!(r.value_at(center).unwrap(), 0.0);
        assert_eq!(r.grad_at(center).unwrap(), Point::zeros(5));

        let mut x = center.clone();
        x.axpy(0.5, &Point::basis(5, 2, 1.0));
        assert_relative_eq!(r.value_at(&x).unwrap(), 0.125, max_relative = 1e-14);

        // exact Taylor identity for quadratics
        let y = set.random_feasible(99);
        let lhs = r.value_at(&y).unwrap();
        let rhs = r.value_at(&x).unwrap()
            + dot_unchecked(&r.grad_at(&x).unwrap(), &y.sub(&x))
            + 0.5 * y.sub(&x).norm_sq();
        assert_relative_eq!(lhs, rhs, epsilon = 1e-14);
    }

    #[test]
    fn certified_constants() {
        let lin = LossSpec::linear(5, 1.0, 1).unwrap();
        assert_eq!(certify_constants(&lin, &ball()).unwrap(), (1.0, 0.0));

        let b = FeasibleSet::l2_ball(5, 1.0).unwrap();
        let q = LossSpec::quadratic(&b, 1.0, 1).unwrap();
        assert_eq!(certify_constants(&q, &b).unwrap(), (2.0, 1.0));

        let s = FeasibleSet::simplex(3).unwrap();
        let q = LossSpec::quadratic(&s, 0.5, 1).unwrap();
        let (g, l) = certify_constants(&q, &s).unwrap();
        assert_relative_eq!(g, 2f64.sqrt() / 2.0, max_relative = 1e-15);
        assert_eq!(l, 0.5);

        assert!(certify_constants(&lin, &FeasibleSet::l2_ball(4, 1.0).unwrap()).is_err());
    }

    fn sample_sets() -> Vec<FeasibleSet> {
        vec![
            FeasibleSet::l2_ball(4, 1.0).unwrap(),
            FeasibleSet::lp_ball(4, 1.0, 1.5).unwrap(),
            FeasibleSet::simplex(4).unwrap(),
        ]
    }

    fn sample_specs(set: &FeasibleSet) -> Vec<LossSpec> {
        vec![
            LossSpec::linear(set.dim(), 1.5, 7).unwrap(),
            LossSpec::quadratic(set, 0.7, 7).unwrap(),
        ]
    }

    #[test]
    fn sampled_lipschitz_bound() {
        for set in sample_sets() {
            for spec in sample_specs(&set) {
                let (g, _) = certify_constants(&spec, &set).unwrap();
                for k in 0..1_000u64 {
                    let r = make_round(&spec, (k % 17) as usize + 1, &set).unwrap();
                    let x = set.random_feasible(3 * k + 1);
                    let y = set.random_feasible(3 * k + 2);
                    let diff = (r.value_at(&x).unwrap() - r.value_at(&y).unwrap()).abs();
                    assert!(diff <= g * x.distance(&y) + 1e-9);
                }
            }
        }
    }

    #[test]
    fn gradients_match_central_differences() {
        let h = 1e-6;
        for set in sample_sets() {
            for spec in sample_specs(&set) {
                for k in 0..100u64 {
                    let r = make_round(&spec, k as usize + 1, &set).unwrap();
                    let x = set.random_feasible(1000 + k);
                    let grad = r.grad_at(&x).unwrap();
                    let fd: Vec<f64> = (0..set.dim())
                        .map(|i| {
                            let e = Point::basis(set.dim(), i, h);
                            (r.value_at(&x.add(&e)).unwrap() - r.value_at(&x.sub(&e)).unwrap())
                                / (2.0 * h)
                        })
                        .collect();
                    let fd = Point::new(fd).unwrap();
                    let err = fd.distance(&grad);
                    assert!(err <= 1e-5 * grad.norm().max(1e-3), "err {err}");
                }
            }
        }
    }

    #[test]
    fn quadratic_rounds_are_strongly_convex() {
        for set in sample_sets() {
            let spec = LossSpec::quadratic(&set, 0.7, 11).unwrap();
            for k in 0..500u64 {
                let r = make_quadratic_round(&spec, k as usize + 1, &set).unwrap();
                let x = set.random_feasible(2 * k);
                let y = set.random_feasible(2 * k + 1);
                let lower = r.value_at(&x).unwrap()
                    + dot_unchecked(&r.grad_at(&x).unwrap(), &y.sub(&x))
                    + 0.5 * spec.lambda * y.sub(&x).norm_sq();
                assert!(r.value_at(&y).unwrap() >= lower - 1e-9);
            }
        }
    }
}
