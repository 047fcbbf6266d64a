//! Feasible regions: membership, linear minimization oracles, Euclidean
//! projections, diameters and strong-convexity moduli.
//!
//! Balls are centered at the origin. The learners only ever call
//! [`FeasibleSet::lmo`]; projections exist for the OGD baseline and the
//! reference oracle.

use std::fmt;

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::point::{lp_norm_unchecked, Point};
use crate::rng::rng_for;

/// Default additive feasibility tolerance.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// Below this Euclidean norm a linear objective is treated as zero and the
/// LMO returns the anchor point.
pub const ZERO_GRADIENT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetKind {
    L2Ball,
    LpBall,
    L1Ball,
    Simplex,
}

impl fmt::Display for SetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SetKind::L2Ball => "l2_ball",
            SetKind::LpBall => "lp_ball",
            SetKind::L1Ball => "l1_ball",
            SetKind::Simplex => "simplex",
        })
    }
}

/// An immutable feasible region.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibleSet {
    kind: SetKind,
    dim: usize,
    radius: f64,
    p: f64,
}

impl FeasibleSet {
    pub fn l2_ball(dim: usize, radius: f64) -> Result<Self> {
        Self::checked(SetKind::L2Ball, dim, radius, 2.0)
    }

    /// The origin-centered `l_p` ball for `p` in `(1, 2]`.
    pub fn lp_ball(dim: usize, radius: f64, p: f64) -> Result<Self> {
        if !(p > 1.0 && p <= 2.0) {
            return Err(invalid("p", format!("expected p in (1, 2], got {p}")));
        }
        Self::checked(SetKind::LpBall, dim, radius, p)
    }

    pub fn l1_ball(dim: usize, radius: f64) -> Result<Self> {
        Self::checked(SetKind::L1Ball, dim, radius, 1.0)
    }

    /// The probability simplex `{x >= 0, Σ x_i = 1}`.
    pub fn simplex(dim: usize) -> Result<Self> {
        Self::checked(SetKind::Simplex, dim, 1.0, 1.0)
    }

    fn checked(kind: SetKind, dim: usize, radius: f64, p: f64) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("dim", "dimension must be positive"));
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(invalid("r", format!("radius must be positive and finite, got {radius}")));
        }
        Ok(Self { kind, dim, radius, p })
    }

    pub fn kind(&self) -> SetKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Ball radius. The simplex reports 1.
    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Norm exponent defining the ball (2 for the Euclidean ball, 1 for the
    /// l1 ball and the simplex).
    pub fn p(&self) -> f64 {
        self.p
    }

    /// Euclidean diameter.
    pub fn diameter(&self) -> f64 {
        match self.kind {
            SetKind::Simplex => std::f64::consts::SQRT_2,
            _ => 2.0 * self.radius,
        }
    }

    /// Strong-convexity modulus with respect to the Euclidean norm;
    /// `(p - 1) d^(1/2 - 1/p) / r` for l_p balls, zero for polytopes.
    pub fn strong_convexity_modulus(&self) -> f64 {
        match self.kind {
            SetKind::L2Ball => 1.0 / self.radius,
            SetKind::LpBall => {
                (self.p - 1.0) * (self.dim as f64).powf(0.5 - 1.0 / self.p) / self.radius
            }
            SetKind::L1Ball | SetKind::Simplex => 0.0,
        }
    }

    pub fn is_strongly_convex(&self) -> bool {
        self.strong_convexity_modulus() > 0.0
    }

    pub fn contains(&self, x: &Point, tol: f64) -> Result<bool> {
        x.check_dim(self.dim)?;
        Ok(self.contains_unchecked(x.coords(), tol))
    }

    fn contains_unchecked(&self, x: &[f64], tol: f64) -> bool {
        match self.kind {
            SetKind::Simplex => {
                let sum = x.iter().fold(0.0, |acc, c| acc + c);
                x.iter().all(|&c| c >= -tol) && (sum - 1.0).abs() <= tol
            }
            _ => lp_norm_unchecked(x, self.p) <= self.radius + tol,
        }
    }

    /// Deterministic starting point: the origin for balls, the barycenter of
    /// the simplex.
    pub fn anchor(&self) -> Point {
        match self.kind {
            SetKind::Simplex => Point::from_vec(vec![1.0 / self.dim as f64; self.dim]),
            _ => Point::zeros(self.dim),
        }
    }

    /// A minimizer of `<g, x>` over the set. Ties (a numerically zero `g`)
    /// resolve to [`FeasibleSet::anchor`]; index ties to the lowest index.
    pub fn lmo(&self, g: &Point) -> Result<Point> {
        g.check_dim(self.dim)?;
        if g.norm() <= ZERO_GRADIENT_TOL {
            return Ok(self.anchor());
        }
        let r = self.radius;
        let out = match self.kind {
            SetKind::L2Ball => g.scale(-r / g.norm()),
            SetKind::LpBall => {
                let q = self.p / (self.p - 1.0);
                let denom = lp_norm_unchecked(g.coords(), q).powf(q - 1.0);
                Point::from_vec(
                    g.coords()
                        .iter()
                        .map(|&gi| -r * gi.signum() * gi.abs().powf(q - 1.0) / denom)
                        .map(|v| if v == 0.0 { 0.0 } else { v })
                        .collect(),
                )
            }
            SetKind::L1Ball => {
                let j = argmax_by(g.coords(), |v| v.abs());
                Point::basis(self.dim, j, -r * g[j].signum())
            }
            SetKind::Simplex => {
                let j = argmax_by(g.coords(), |v| -v);
                Point::basis(self.dim, j, 1.0)
            }
        };
        Ok(out)
    }

    /// Euclidean projection onto the set.
    pub fn project(&self, x: &Point) -> Result<Point> {
        x.check_dim(self.dim)?;
        let out = match self.kind {
            SetKind::L2Ball => {
                let n = x.norm();
                if n <= self.radius {
                    x.clone()
                } else {
                    x.scale(self.radius / n)
                }
            }
            SetKind::Simplex => Point::from_vec(project_simplex(x.coords(), 1.0)),
            SetKind::L1Ball => {
                if lp_norm_unchecked(x.coords(), 1.0) <= self.radius {
                    x.clone()
                } else {
                    let abs: Vec<f64> = x.coords().iter().map(|c| c.abs()).collect();
                    let w = project_simplex(&abs, self.radius);
                    Point::from_vec(
                        w.iter()
                            .zip(x.coords())
                            .map(|(wi, xi)| wi.copysign(*xi))
                            .collect(),
                    )
                }
            }
            SetKind::LpBall => Point::from_vec(project_lp_ball(x.coords(), self.p, self.radius)),
        };
        Ok(out)
    }

    /// A seeded feasible sample. Balls: a Gaussian direction normalized in
    /// the ball's own norm, scaled by `u^(1/d) r`. Simplex: normalized
    /// exponential draws.
    pub fn random_feasible(&self, seed: u64) -> Point {
        let mut rng = rng_for(seed);
        let d = self.dim;
        match self.kind {
            SetKind::Simplex => {
                let draws: Vec<f64> = (0..d).map(|_| Exp1.sample(&mut rng)).collect();
                let total = draws.iter().fold(0.0, |acc: f64, c| acc + c);
                let mut x: Vec<f64> = draws.iter().map(|e| e / total).collect();
                // Close the sum exactly: the last coordinate absorbs rounding.
                let head = x[..d - 1].iter().fold(0.0, |acc: f64, c| acc + c).min(1.0);
                x[d - 1] = 1.0 - head;
                Point::from_vec(x)
            }
            _ => {
                let mut z: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
                let mut n = lp_norm_unchecked(&z, self.p);
                while n == 0.0 {
                    z = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
                    n = lp_norm_unchecked(&z, self.p);
                }
                let u: f64 = rng.random();
                let scale = u.powf(1.0 / d as f64) * self.radius / n;
                let mut x: Vec<f64> = z.iter().map(|c| c * scale).collect();
                while lp_norm_unchecked(&x, self.p) > self.radius {
                    x.iter_mut().for_each(|c| *c *= 1.0 - f64::EPSILON);
                }
                Point::from_vec(x)
            }
        }
    }
}

fn argmax_by(v: &[f64], key: impl Fn(f64) -> f64) -> usize {
    let mut best = 0;
    for i in 1..v.len() {
        if key(v[i]) > key(v[best]) {
            best = i;
        }
    }
    best
}

/// Sort-based projection onto `{x >= 0, Σ x = total}`.
fn project_simplex(y: &[f64], total: f64) -> Vec<f64> {
    let mut sorted = y.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut tau = 0.0;
    for (j, &u) in sorted.iter().enumerate() {
        cumsum += u;
        let candidate = (cumsum - total) / (j + 1) as f64;
        if u - candidate > 0.0 {
            tau = candidate;
        }
    }
    y.iter().map(|&v| (v - tau).max(0.0)).collect()
}

/// Euclidean projection onto `{ ||x||_p <= r }` for `p` in `(1, 2]`.
///
/// Stationarity gives `u_i + mu p u_i^(p-1) = |y_i|` per coordinate; the
/// multiplier `mu` is found by bisection on `Σ u_i(mu)^p = r^p`, each
/// `u_i(mu)` by an inner bisection. Both run to floating-point resolution.
fn project_lp_ball(y: &[f64], p: f64, r: f64) -> Vec<f64> {
    if lp_norm_unchecked(y, p) <= r {
        return y.to_vec();
    }
    if p == 2.0 {
        let n = lp_norm_unchecked(y, 2.0);
        return y.iter().map(|c| c * r / n).collect();
    }
    let abs: Vec<f64> = y.iter().map(|c| c.abs()).collect();
    let target = r.powf(p);
    let mass = |mu: f64| -> f64 {
        abs.iter()
            .fold(0.0, |acc, &a| acc + shrink_coordinate(a, mu, p).powf(p))
    };

    let mut lo = 0.0;
    let mut hi = 1.0;
    while mass(hi) > target {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if mass(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut x: Vec<f64> = abs
        .iter()
        .zip(y)
        .map(|(&a, &yi)| shrink_coordinate(a, hi, p).copysign(yi))
        .collect();
    let n = lp_norm_unchecked(&x, p);
    if n > r {
        x.iter_mut().for_each(|c| *c *= r / n);
    }
    x
}

/// Solves `u + mu p u^(p-1) = a` on `[0, a]`.
fn shrink_coordinate(a: f64, mu: f64, p: f64) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    if mu == 0.0 {
        return a;
    }
    let (mut lo, mut hi) = (0.0, a);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if mid + mu * p * mid.powf(p - 1.0) > a {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    lo
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point::{dot, lp_norm};
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(v: &[f64]) -> Point {
        Point::new(v.to_vec()).unwrap()
    }

    fn all_sets() -> Vec<FeasibleSet> {
        vec![
            FeasibleSet::l2_ball(4, 1.5).unwrap(),
            FeasibleSet::lp_ball(4, 1.0, 1.5).unwrap(),
            FeasibleSet::lp_ball(3, 2.0, 1.2).unwrap(),
            FeasibleSet::l1_ball(4, 2.0).unwrap(),
            FeasibleSet::simplex(4).unwrap(),
        ]
    }

    fn gaussian(rng: &mut ChaCha8Rng, d: usize, scale: f64) -> Point {
        Point::from_vec((0..d).map(|_| { let z: f64 = StandardNormal.sample(rng); scale * z }).collect())
    }

    #[test]
    fn constructors_validate() {
        assert!(FeasibleSet::l2_ball(0, 1.0).is_err());
        assert!(FeasibleSet::l2_ball(2, 0.0).is_err());
        assert!(FeasibleSet::lp_ball(2, 1.0, 1.0).is_err());
        assert!(FeasibleSet::lp_ball(2, 1.0, 2.5).is_err());
        assert!(FeasibleSet::lp_ball(2, 1.0, 2.0).is_ok());
    }

    #[test]
    fn contains_examples() {
        let ball = FeasibleSet::l2_ball(2, 1.0).unwrap();
        assert!(ball.contains(&p(&[0.6, 0.8]), 0.0).unwrap());
        let simplex = FeasibleSet::simplex(3).unwrap();
        assert!(!simplex.contains(&p(&[0.5, 0.5, 0.1]), 1e-9).unwrap());
        let lp = FeasibleSet::lp_ball(2, 1.0, 1.5).unwrap();
        assert!(lp.contains(&p(&[1.0, 0.0]), 0.0).unwrap());
        assert!(ball.contains(&p(&[1.0]), 0.0).is_err());
    }

    #[test]
    fn lmo_examples() {
        let ball = FeasibleSet::l2_ball(2, 1.0).unwrap();
        let v = ball.lmo(&p(&[3.0, 4.0])).unwrap();
        assert_relative_eq!(v[0], -0.6, epsilon = 1e-15);
        assert_relative_eq!(v[1], -0.8, epsilon = 1e-15);

        let simplex = FeasibleSet::simplex(3).unwrap();
        assert_eq!(simplex.lmo(&p(&[0.5, -1.0, 2.0])).unwrap(), p(&[0.0, 1.0, 0.0]));

        let l1 = FeasibleSet::l1_ball(3, 2.0).unwrap();
        assert_eq!(l1.lmo(&p(&[0.5, -3.0, 1.0])).unwrap(), p(&[0.0, 2.0, 0.0]));

        let lp = FeasibleSet::lp_ball(2, 1.0, 1.5).unwrap();
        let v = lp.lmo(&p(&[1.0, 1.0])).unwrap();
        let expected = -(2f64.powf(-2.0 / 3.0));
        assert_relative_eq!(v[0], expected, epsilon = 1e-14);
        assert_relative_eq!(v[1], expected, epsilon = 1e-14);
        assert_relative_eq!(v[0], -0.62996, epsilon = 1e-5);
    }

    /// Independent check of the l_1.5 LMO: scan a fine grid of the l_1.5
    /// unit sphere in 2-D for the minimizer of <(1,1), x>.
    #[test]
    fn lp_lmo_matches_sphere_grid() {
        let pp = 1.5;
        let n = 200_000;
        let mut best = (f64::INFINITY, 0.0, 0.0);
        for k in 0..n {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            let (c, s) = (theta.cos(), theta.sin());
            let scale = (c.abs().powf(pp) + s.abs().powf(pp)).powf(-1.0 / pp);
            let (x, y) = (c * scale, s * scale);
            if x + y < best.0 {
                best = (x + y, x, y);
            }
        }
        assert_relative_eq!(best.1, -0.62996, epsilon = 1e-4);
        assert_relative_eq!(best.2, -0.62996, epsilon = 1e-4);
        let lp = FeasibleSet::lp_ball(2, 1.0, pp).unwrap();
        let v = lp.lmo(&p(&[1.0, 1.0])).unwrap();
        assert!(v[0] + v[1] <= best.0 + 1e-12);
    }

    #[test]
    fn zero_gradient_lmo_returns_anchor() {
        for set in all_sets() {
            let zero = Point::zeros(set.dim());
            assert_eq!(set.lmo(&zero).unwrap(), set.anchor());
            let tiny = Point::basis(set.dim(), 0, 1e-13);
            assert_eq!(set.lmo(&tiny).unwrap(), set.anchor());
        }
    }

    #[test]
    fn project_examples() {
        let ball = FeasibleSet::l2_ball(2, 1.0).unwrap();
        let x = ball.project(&p(&[3.0, 4.0])).unwrap();
        assert_relative_eq!(x[0], 0.6, epsilon = 1e-15);
        assert_relative_eq!(x[1], 0.8, epsilon = 1e-15);

        let s3 = FeasibleSet::simplex(3).unwrap();
        let x = s3.project(&p(&[1.0, 1.0, 1.0])).unwrap();
        for i in 0..3 {
            assert_relative_eq!(x[i], 1.0 / 3.0, epsilon = 1e-15);
        }
        let s2 = FeasibleSet::simplex(2).unwrap();
        let x = s2.project(&p(&[0.7, 0.3])).unwrap();
        assert_relative_eq!(x[0], 0.7, epsilon = 1e-15);
        assert_relative_eq!(x[1], 0.3, epsilon = 1e-15);
    }

    #[test]
    fn l1_projection_soft_thresholds() {
        let l1 = FeasibleSet::l1_ball(3, 1.0).unwrap();
        let x = l1.project(&p(&[2.0, -1.0, 0.1])).unwrap();
        // tau = 1: (1, 0, 0)
        assert_relative_eq!(x[0], 1.0, epsilon = 1e-15);
        assert_eq!(x[1], 0.0);
        assert_eq!(x[2], 0.0);
    }

    /// The l_p projection is checked against its variational inequality:
    /// `<y - P(y), z - P(y)> <= 0` for feasible `z`.
    #[test]
    fn lp_projection_satisfies_variational_inequality() {
        let set = FeasibleSet::lp_ball(3, 1.0, 1.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for k in 0..200 {
            let y = gaussian(&mut rng, 3, 3.0);
            let py = set.project(&y).unwrap();
            assert!(set.contains(&py, 1e-12).unwrap());
            let resid = y.sub(&py);
            for j in 0..20 {
                let z = set.random_feasible(k * 100 + j);
                let v = dot(&resid, &z.sub(&py)).unwrap();
                assert!(v <= 1e-9, "violation {v}");
            }
        }
    }

    #[test]
    fn strong_convexity_modulus_examples() {
        assert_eq!(FeasibleSet::l2_ball(5, 2.0).unwrap().strong_convexity_modulus(), 0.5);
        let lp = FeasibleSet::lp_ball(4, 1.0, 1.5).unwrap();
        assert_relative_eq!(
            lp.strong_convexity_modulus(),
            0.5 * 4f64.powf(-1.0 / 6.0),
            max_relative = 1e-14
        );
        assert_relative_eq!(lp.strong_convexity_modulus(), 0.39685, epsilon = 1e-5);
        assert_eq!(FeasibleSet::simplex(3).unwrap().strong_convexity_modulus(), 0.0);
        assert_eq!(FeasibleSet::l1_ball(3, 1.0).unwrap().strong_convexity_modulus(), 0.0);
        // p = 2 specializes to 1/r
        let lp2 = FeasibleSet::lp_ball(7, 2.0, 2.0).unwrap();
        assert_relative_eq!(lp2.strong_convexity_modulus(), 0.5, max_relative = 1e-15);
    }

    #[test]
    fn diameters() {
        assert_eq!(FeasibleSet::l2_ball(3, 1.5).unwrap().diameter(), 3.0);
        assert_eq!(FeasibleSet::lp_ball(3, 1.5, 1.5).unwrap().diameter(), 3.0);
        assert_eq!(FeasibleSet::l1_ball(3, 1.5).unwrap().diameter(), 3.0);
        assert_eq!(FeasibleSet::simplex(3).unwrap().diameter(), 2f64.sqrt());
    }

    #[test]
    fn anchor_examples() {
        assert_eq!(FeasibleSet::l2_ball(2, 1.0).unwrap().anchor(), p(&[0.0, 0.0]));
        assert_eq!(FeasibleSet::simplex(4).unwrap().anchor(), p(&[0.25; 4]));
        assert_eq!(FeasibleSet::lp_ball(3, 5.0, 1.5).unwrap().anchor(), p(&[0.0; 3]));
    }

    #[test]
    fn random_feasible_contract() {
        for set in all_sets() {
            for seed in 0..500 {
                let x = set.random_feasible(seed);
                assert!(set.contains(&x, 0.0).unwrap(), "{:?} seed {seed}", set.kind());
                assert!(set.contains(&x, 1e-12).unwrap());
            }
        }
        let ball = FeasibleSet::l2_ball(2, 1.0).unwrap();
        assert_eq!(ball.random_feasible(7), ball.random_feasible(7));
        let s = FeasibleSet::simplex(3).unwrap();
        let sum: f64 = s.random_feasible(1).coords().iter().sum();
        assert!((sum - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn lmo_beats_feasible_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for set in all_sets() {
            for k in 0..2_000 {
                let g = gaussian(&mut rng, set.dim(), 1.0);
                let v = set.lmo(&g).unwrap();
                assert!(set.contains(&v, FEASIBILITY_TOL).unwrap());
                let x = set.random_feasible(k);
                assert!(dot(&g, &v).unwrap() <= dot(&g, &x).unwrap() + 1e-9);
            }
        }
    }

    #[test]
    fn projection_is_idempotent_and_nonexpansive() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for set in all_sets() {
            for _ in 0..300 {
                let x = gaussian(&mut rng, set.dim(), 2.0);
                let y = gaussian(&mut rng, set.dim(), 2.0);
                let px = set.project(&x).unwrap();
                let py = set.project(&y).unwrap();
                assert!(set.contains(&px, FEASIBILITY_TOL).unwrap());
                assert!(set.project(&px).unwrap().distance(&px) <= 1e-10);
                assert!(px.distance(&py) <= x.distance(&y) + 1e-10);
            }
        }
    }

    #[test]
    fn strongly_convex_sets_absorb_outward_bumps() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let sets = [
            FeasibleSet::l2_ball(3, 1.0).unwrap(),
            FeasibleSet::lp_ball(3, 1.0, 1.5).unwrap(),
        ];
        for set in sets {
            let alpha = set.strong_convexity_modulus();
            for k in 0..2_000u64 {
                let x = set.random_feasible(2 * k);
                let y = set.random_feasible(2 * k + 1);
                let gamma: f64 = rng.random();
                let z = gaussian(&mut rng, 3, 1.0);
                let z = z.scale(1.0 / z.norm());
                let bump = gamma * (1.0 - gamma) * 0.5 * alpha * x.distance(&y).powi(2);
                let mut w = x.scale(gamma).add(&y.scale(1.0 - gamma));
                w.axpy(bump, &z);
                assert!(set.contains(&w, 1e-9).unwrap());
            }
        }
    }

    #[test]
    fn lp_norm_of_lmo_output_is_radius() {
        let set = FeasibleSet::lp_ball(5, 2.0, 1.3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let g = gaussian(&mut rng, 5, 1.0);
            let v = set.lmo(&g).unwrap();
            assert_relative_eq!(lp_norm(&v, 1.3).unwrap(), 2.0, max_relative = 1e-12);
        }
    }
}
