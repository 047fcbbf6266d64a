//! Dense vectors and the one-dimensional quadratic line search shared by
//! both Frank-Wolfe learners.
//!
//! All reductions sum left to right so results are bit-reproducible on a
//! given platform.

use std::ops::Index;

use crate::error::{invalid, Error, Result};

/// A dense, finite, non-empty real vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Point(Vec<f64>);

impl Point {
    /// Builds a point, rejecting empty or non-finite input.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(invalid("coords", "a point needs at least one coordinate"));
        }
        if let Some(i) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self(coords))
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "dimension must be positive");
        Self(vec![0.0; dim])
    }

    /// Unit basis vector `scale * e_index`.
    pub fn basis(dim: usize, index: usize, scale: f64) -> Self {
        let mut p = Self::zeros(dim);
        p.0[index] = scale;
        p
    }

    pub(crate) fn from_vec(coords: Vec<f64>) -> Self {
        debug_assert!(!coords.is_empty());
        Self(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    pub(crate) fn check_dim(&self, expected: usize) -> Result<()> {
        if self.dim() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: self.dim(),
            });
        }
        Ok(())
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn norm_sq(&self) -> f64 {
        self.0.iter().fold(0.0, |acc, c| acc + c * c)
    }

    /// `self + other`. Panics on dimension mismatch.
    pub fn add(&self, other: &Point) -> Point {
        assert_eq!(self.dim(), other.dim());
        Point(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self - other`. Panics on dimension mismatch.
    pub fn sub(&self, other: &Point) -> Point {
        assert_eq!(self.dim(), other.dim());
        Point(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, factor: f64) -> Point {
        Point(self.0.iter().map(|c| c * factor).collect())
    }

    /// In place `self += alpha * other`.
    pub fn axpy(&mut self, alpha: f64, other: &Point) {
        assert_eq!(self.dim(), other.dim());
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += alpha * b;
        }
    }

    /// In place `self += other`, the accumulation used by the learners'
    /// running sums.
    pub fn add_assign(&mut self, other: &Point) {
        assert_eq!(self.dim(), other.dim());
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += b;
        }
    }

    /// `self + sigma * (target - self)`, the Frank-Wolfe move.
    pub fn toward(&self, target: &Point, sigma: f64) -> Point {
        assert_eq!(self.dim(), target.dim());
        Point(
            self.0
                .iter()
                .zip(&target.0)
                .map(|(x, v)| x + sigma * (v - x))
                .collect(),
        )
    }

    pub fn distance(&self, other: &Point) -> f64 {
        assert_eq!(self.dim(), other.dim());
        self.0
            .iter()
            .zip(&other.0)
            .fold(0.0, |acc, (a, b)| acc + (a - b) * (a - b))
            .sqrt()
    }
}

impl Index<usize> for Point {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl TryFrom<Vec<f64>> for Point {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Point::new(v)
    }
}

/// Inner product, summed left to right.
pub fn dot(u: &Point, v: &Point) -> Result<f64> {
    v.check_dim(u.dim())?;
    Ok(dot_unchecked(u, v))
}

pub(crate) fn dot_unchecked(u: &Point, v: &Point) -> f64 {
    u.0.iter().zip(&v.0).fold(0.0, |acc, (a, b)| acc + a * b)
}

/// `(Σ |v_i|^p)^(1/p)` for `p >= 1`. `p = 2` goes through [`Point::norm`]
/// and `p = 1` is the plain absolute sum.
pub fn lp_norm(v: &Point, p: f64) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(invalid("p", format!("expected p >= 1, got {p}")));
    }
    Ok(lp_norm_unchecked(v.coords(), p))
}

pub(crate) fn lp_norm_unchecked(v: &[f64], p: f64) -> f64 {
    if p == 2.0 {
        v.iter().fold(0.0, |acc, c| acc + c * c).sqrt()
    } else if p == 1.0 {
        v.iter().fold(0.0, |acc, c| acc + c.abs())
    } else {
        v.iter()
            .fold(0.0, |acc, c| acc + c.abs().powf(p))
            .powf(1.0 / p)
    }
}

/// Coefficients of the step model `sigma * a + sigma^2 * b` minimized by the
/// Frank-Wolfe line search. `a` is the directional derivative along
/// `v - x`, `b` the curvature term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepCoefficients {
    pub a: f64,
    pub b: f64,
}

impl StepCoefficients {
    pub fn new(a: f64, b: f64) -> Self {
        Self { a, b }
    }

    pub fn objective(&self, sigma: f64) -> f64 {
        sigma * self.a + sigma * sigma * self.b
    }
}

/// Exact minimizer of `sigma * a + sigma^2 * b` over `[0, 1]`:
/// `clamp(-a / (2b), 0, 1)`.
pub fn line_search_quadratic(c: StepCoefficients) -> Result<f64> {
    if !(c.b > 0.0) || !c.b.is_finite() {
        return Err(invalid("b", format!("curvature must be positive, got {}", c.b)));
    }
    if !c.a.is_finite() {
        return Err(invalid("a", "slope must be finite"));
    }
    Ok((-c.a / (2.0 * c.b)).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn p(v: &[f64]) -> Point {
        Point::new(v.to_vec()).unwrap()
    }

    #[test]
    fn dot_examples() {
        assert_eq!(dot(&p(&[1.0, 0.0]), &p(&[0.0, 1.0])).unwrap(), 0.0);
        assert_eq!(dot(&p(&[3.0, 4.0]), &p(&[3.0, 4.0])).unwrap(), 25.0);
        assert_eq!(dot(&p(&[1.0, 2.0, 3.0]), &p(&[4.0, 5.0, 6.0])).unwrap(), 32.0);
    }

    #[test]
    fn dot_rejects_mismatch() {
        let err = dot(&p(&[1.0, 2.0]), &p(&[1.0])).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { expected: 2, got: 1 }));
    }

    #[test]
    fn lp_norm_examples() {
        assert_eq!(lp_norm(&p(&[3.0, 4.0]), 2.0).unwrap(), 5.0);
        assert_eq!(lp_norm(&p(&[1.0, -1.0, 1.0]), 1.0).unwrap(), 3.0);
        assert_relative_eq!(
            lp_norm(&p(&[1.0, 1.0]), 1.5).unwrap(),
            2f64.powf(2.0 / 3.0),
            max_relative = 1e-14
        );
        assert_relative_eq!(lp_norm(&p(&[1.0, 1.0]), 1.5).unwrap(), 1.58740, epsilon = 1e-5);
    }

    #[test]
    fn lp_norm_rejects_small_p() {
        assert!(lp_norm(&p(&[1.0]), 0.5).is_err());
        assert!(lp_norm(&p(&[1.0]), f64::NAN).is_err());
    }

    #[test]
    fn point_rejects_non_finite_and_empty() {
        assert!(matches!(Point::new(vec![1.0, f64::NAN]), Err(Error::NonFinite(1))));
        assert!(Point::new(vec![f64::INFINITY]).is_err());
        assert!(Point::new(vec![]).is_err());
    }

    #[test]
    fn line_search_examples() {
        assert_eq!(line_search_quadratic(StepCoefficients::new(-1.0, 2.0)).unwrap(), 0.25);
        assert_eq!(line_search_quadratic(StepCoefficients::new(3.0, 5.0)).unwrap(), 0.0);
        assert_eq!(line_search_quadratic(StepCoefficients::new(-4.0, 2.0)).unwrap(), 1.0);
    }

    #[test]
    fn line_search_boundary_ties_are_inclusive() {
        assert_eq!(line_search_quadratic(StepCoefficients::new(0.0, 1.0)).unwrap(), 0.0);
        assert_eq!(line_search_quadratic(StepCoefficients::new(-2.0, 1.0)).unwrap(), 1.0);
    }

    #[test]
    fn line_search_rejects_nonpositive_curvature() {
        assert!(line_search_quadratic(StepCoefficients::new(-1.0, 0.0)).is_err());
        assert!(line_search_quadratic(StepCoefficients::new(-1.0, -2.0)).is_err());
    }

    #[test]
    fn line_search_beats_uniform_grid() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let a: f64 = rng.random_range(-50.0..50.0);
            let b: f64 = 10f64.powf(rng.random_range(-3.0..3.0));
            let c = StepCoefficients::new(a, b);
            let sigma = line_search_quadratic(c).unwrap();
            let grid_min = (0..10_000)
                .map(|i| c.objective(i as f64 / 9_999.0))
                .fold(f64::INFINITY, f64::min);
            assert!(c.objective(sigma) <= grid_min + 1e-12, "a={a} b={b}");
        }
    }

    fn vec3() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-100.0..100.0f64, 3)
    }

    proptest! {
        #[test]
        fn dot_is_symmetric_and_bilinear(u in vec3(), v in vec3(), w in vec3(), s in -10.0..10.0f64) {
            let (u, v, w) = (p(&u), p(&v), p(&w));
            let uv = dot(&u, &v).unwrap();
            prop_assert_eq!(uv, dot(&v, &u).unwrap());
            let lhs = dot(&u.scale(s).add(&w), &v).unwrap();
            let rhs = s * uv + dot(&w, &v).unwrap();
            let scale = (s.abs() * u.norm() + w.norm()) * v.norm();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * scale.max(1.0));
        }

        #[test]
        fn euclidean_norm_matches_dot(u in prop::collection::vec(-1e3..1e3f64, 1..20)) {
            let u = p(&u);
            let n = lp_norm(&u, 2.0).unwrap();
            let d = dot(&u, &u).unwrap();
            prop_assert!((n * n - d).abs() <= 1e-12 * d.max(f64::MIN_POSITIVE));
        }
    }
}
