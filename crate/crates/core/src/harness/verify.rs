//! Invariant suites.
//!
//! Every check samples its own seeded instances and reports the number of
//! samples, the largest excess over its limit (positive means violated) and
//! a witness for the worst violation. Checks are independent and run in
//! parallel.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::learners::{Ofw, ScOfw};
use crate::losses::{make_round, LossSpec};
use crate::oracle::{
    grid_line_search, offline_comparator, offline_comparator_pgd, surrogate_argmin, SurrogateSpec,
    ORACLE_TOL,
};
use crate::point::{dot_unchecked, line_search_quadratic, Point, StepCoefficients};
use crate::rng::rng_for;
use crate::sets::{FeasibleSet, FEASIBILITY_TOL};

use super::config::{parse_config, ExperimentSpec};
use super::run::run_experiment;

/// Slack for invariants measured against oracle outputs.
pub const INVARIANT_SLACK: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scope {
    All,
    Sets,
    Learners,
    Bounds,
}

impl FromStr for Scope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(Scope::All),
            "sets" => Ok(Scope::Sets),
            "learners" => Ok(Scope::Learners),
            "bounds" => Ok(Scope::Bounds),
            _ => Err(invalid("scope", format!("expected all, sets, learners or bounds, got {s:?}"))),
        }
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scope::All => "all",
            Scope::Sets => "sets",
            Scope::Learners => "learners",
            Scope::Bounds => "bounds",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub scope: Scope,
    pub passed: bool,
    pub samples: usize,
    pub failures: usize,
    pub max_excess: f64,
    pub counterexample: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub scope: Scope,
    pub passed: bool,
    pub checks: Vec<CheckReport>,
}

impl VerifyReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn failed(&self) -> impl Iterator<Item = &CheckReport> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Running tally for one check.
pub struct Tally {
    name: String,
    scope: Scope,
    samples: usize,
    failures: usize,
    max_excess: f64,
    counterexample: Option<String>,
}

impl Tally {
    pub fn new(name: impl Into<String>, scope: Scope) -> Self {
        Self {
            name: name.into(),
            scope,
            samples: 0,
            failures: 0,
            max_excess: f64::NEG_INFINITY,
            counterexample: None,
        }
    }

    /// Records `value - limit`; the witness is only rendered for the worst
    /// violation so far.
    pub fn observe(&mut self, value: f64, limit: f64, witness: impl FnOnce() -> String) {
        self.samples += 1;
        let excess = value - limit;
        let violated = !(excess <= 0.0);
        if violated {
            self.failures += 1;
        }
        if violated && (self.counterexample.is_none() || excess > self.max_excess || excess.is_nan()) {
            self.counterexample = Some(witness());
        }
        if excess > self.max_excess || excess.is_nan() {
            self.max_excess = excess;
        }
    }

    fn finish(self, result: Result<()>) -> CheckReport {
        let error = result.err().map(|e| e.to_string());
        let passed = self.failures == 0 && error.is_none();
        CheckReport {
            name: self.name,
            scope: self.scope,
            passed,
            samples: self.samples,
            failures: self.failures,
            max_excess: if self.samples == 0 { 0.0 } else { self.max_excess },
            counterexample: error.map(|e| format!("error: {e}")).or(self.counterexample),
        }
    }
}

fn run_check(name: &str, scope: Scope, body: impl FnOnce(&mut Tally) -> Result<()>) -> CheckReport {
    let mut tally = Tally::new(name, scope);
    let result = body(&mut tally);
    tally.finish(result)
}

fn fmt_point(x: &Point) -> String {
    format!("{:?}", x.coords())
}

fn gaussian(rng: &mut ChaCha8Rng, dim: usize) -> Point {
    let mut z: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
    while z.iter().all(|&c| c == 0.0) {
        z = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
    }
    Point::from_vec(z)
}

fn unit(rng: &mut ChaCha8Rng, dim: usize) -> Point {
    let z = gaussian(rng, dim);
    let n = z.norm();
    z.scale(1.0 / n)
}

/// The four canonical set families at dimension `dim`.
pub fn canonical_sets(dim: usize) -> Vec<(String, FeasibleSet)> {
    vec![
        ("l2_ball".into(), FeasibleSet::l2_ball(dim, 1.0).expect("valid set")),
        ("lp_ball_1.5".into(), FeasibleSet::lp_ball(dim, 1.0, 1.5).expect("valid set")),
        ("l1_ball".into(), FeasibleSet::l1_ball(dim, 1.0).expect("valid set")),
        ("simplex".into(), FeasibleSet::simplex(dim).expect("valid set")),
    ]
}

/// Closed-form line search against [`grid_line_search`] with `10^4 + 1`
/// points on random `(a, b)` pairs; agreement within `1e-4`.
pub fn check_line_search(pairs: usize, seed: u64) -> CheckReport {
    run_check("line_search_matches_grid", Scope::Sets, |tally| {
        let mut rng = rng_for(seed);
        for _ in 0..pairs {
            let a: f64 = rng.random_range(-50.0..50.0);
            let b: f64 = 10f64.powf(rng.random_range(-3.0..3.0));
            let exact = line_search_quadratic(StepCoefficients::new(a, b))?;
            let grid = grid_line_search(a, b, 10_001)?;
            tally.observe((exact - grid).abs(), 1e-4, || {
                format!("a={a:e} b={b:e} closed_form={exact} grid={grid}")
            });
        }
        Ok(())
    })
}

/// `<g, lmo(g)> <= <g, x> + 1e-9` against `points` random feasible `x` for
/// each of `grads` random `g`, plus feasibility of every LMO output. The LMO
/// is injectable so a broken one can be shown to fail.
pub fn check_lmo_optimality(
    name: &str,
    set: &FeasibleSet,
    lmo: &(dyn Fn(&Point) -> Result<Point> + Sync),
    grads: usize,
    points: usize,
    seed: u64,
) -> CheckReport {
    run_check(&format!("lmo_optimality/{name}"), Scope::Sets, |tally| {
        let mut rng = rng_for(seed);
        let samples: Vec<Point> = (0..points)
            .map(|i| set.random_feasible(seed.wrapping_add(1 + i as u64)))
            .collect();
        for _ in 0..grads {
            let g = gaussian(&mut rng, set.dim());
            let v = lmo(&g)?;
            if !set.contains(&v, FEASIBILITY_TOL)? {
                tally.observe(f64::INFINITY, 0.0, || {
                    format!("infeasible LMO output for g={}: v={}", fmt_point(&g), fmt_point(&v))
                });
                continue;
            }
            let gv = dot_unchecked(&g, &v);
            for x in &samples {
                tally.observe(gv, dot_unchecked(&g, x) + 1e-9, || {
                    format!("g={} lmo={} beaten by x={}", fmt_point(&g), fmt_point(&v), fmt_point(x))
                });
            }
        }
        Ok(())
    })
}

/// Sampled strong convexity of the set: for feasible `x, y`, `gamma` in
/// `[0, 1]` and a Euclidean unit `z`,
/// `gamma x + (1 - gamma) y + gamma (1 - gamma) (alpha/2) ||x - y||^2 z`
/// stays in the set up to `1e-9`.
pub fn check_set_strong_convexity(name: &str, set: &FeasibleSet, triples: usize, seed: u64) -> CheckReport {
    run_check(&format!("strongly_convex_set/{name}"), Scope::Sets, |tally| {
        let alpha = set.strong_convexity_modulus();
        if alpha <= 0.0 {
            return Err(invalid("set", format!("{name} is not strongly convex")));
        }
        let mut rng = rng_for(seed);
        for i in 0..triples as u64 {
            let x = set.random_feasible(seed ^ (2 * i + 1).wrapping_mul(0xA24B_AED4_963E_E407));
            let y = set.random_feasible(seed ^ (2 * i + 2).wrapping_mul(0xA24B_AED4_963E_E407));
            let gamma: f64 = rng.random_range(0.0..=1.0);
            let z = unit(&mut rng, set.dim());
            let mut w = y.toward(&x, gamma);
            w.axpy(gamma * (1.0 - gamma) * 0.5 * alpha * x.sub(&y).norm_sq(), &z);
            let inside = set.contains(&w, FEASIBILITY_TOL)?;
            tally.observe(if inside { 0.0 } else { 1.0 }, 0.0, || {
                format!("x={} y={} gamma={gamma} z={}", fmt_point(&x), fmt_point(&y), fmt_point(&z))
            });
        }
        Ok(())
    })
}

/// Projections land in the set and are idempotent.
pub fn check_projection(name: &str, set: &FeasibleSet, samples: usize, seed: u64) -> CheckReport {
    run_check(&format!("projection/{name}"), Scope::Sets, |tally| {
        let mut rng = rng_for(seed);
        for _ in 0..samples {
            let y = gaussian(&mut rng, set.dim()).scale(2.0);
            let p = set.project(&y)?;
            let inside = set.contains(&p, FEASIBILITY_TOL)?;
            tally.observe(if inside { 0.0 } else { 1.0 }, 0.0, || {
                format!("projection of {} left the set: {}", fmt_point(&y), fmt_point(&p))
            });
            let again = set.project(&p)?;
            tally.observe(again.distance(&p), 1e-9, || {
                format!("projection not idempotent at {}", fmt_point(&p))
            });
        }
        Ok(())
    })
}

/// The linear comparator against brute-force feasible sampling on a small
/// instance: the comparator total must not exceed any sampled total.
pub fn check_linear_comparator(name: &str, set: &FeasibleSet, samples: usize, seed: u64) -> CheckReport {
    run_check(&format!("linear_comparator/{name}"), Scope::Sets, |tally| {
        let spec = LossSpec::linear(set.dim(), 1.0, seed)?;
        let rounds = (1..=20)
            .map(|t| make_round(&spec, t, set))
            .collect::<Result<Vec<_>>>()?;
        let (x_star, total) = offline_comparator(set, &rounds, ORACLE_TOL)?;
        let mut grad_sum = Point::zeros(set.dim());
        for r in &rounds {
            grad_sum.add_assign(&r.grad_at(&x_star)?);
        }
        let mut best = f64::INFINITY;
        for i in 0..samples as u64 {
            let x = set.random_feasible(seed.wrapping_mul(31).wrapping_add(i));
            let v = dot_unchecked(&grad_sum, &x);
            best = best.min(v);
            tally.observe(total, v + ORACLE_TOL, || {
                format!("comparator total {total} beaten by x={} with {v}", fmt_point(&x))
            });
        }
        tally.observe(best - total, 0.1 * grad_sum.norm() * set.diameter(), || {
            format!("sampling stays {} above the comparator", best - total)
        });
        Ok(())
    })
}

/// The projected-mean quadratic comparator and its PGD cross-check agree.
pub fn check_quadratic_comparator(name: &str, set: &FeasibleSet, seed: u64) -> CheckReport {
    run_check(&format!("quadratic_comparator_routes/{name}"), Scope::Sets, |tally| {
        let spec = LossSpec::quadratic(set, 1.0, seed)?;
        let rounds = (1..=40)
            .map(|t| make_round(&spec, t, set))
            .collect::<Result<Vec<_>>>()?;
        for k in [1, 5, 40] {
            let (x1, v1) = offline_comparator(set, &rounds[..k], ORACLE_TOL)?;
            let (x2, v2) = offline_comparator_pgd(set, &rounds[..k], ORACLE_TOL)?;
            tally.observe((v1 - v2).abs(), 1e-8 * v1.abs().max(1.0), || {
                format!("{k} rounds: projected mean {} ({v1}) vs pgd {} ({v2})", fmt_point(&x1), fmt_point(&x2))
            });
        }
        Ok(())
    })
}

/// Which learner a learner-level check drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Ofw,
    ScOfw,
}

impl Method {
    fn label(self) -> &'static str {
        match self {
            Method::Ofw => "ofw",
            Method::ScOfw => "sc_ofw",
        }
    }
}

/// One learner with the adversary its guarantee is stated for.
enum Driver {
    Ofw(Ofw),
    ScOfw(ScOfw),
}

struct StepRecord {
    t: usize,
    x_in: Point,
    x_out: Point,
    grad: Point,
    surrogate_grad: Point,
    surrogate: SurrogateSpec,
}

/// Runs `rounds` steps of `method` over `set` against its canonical
/// adversary (linear `G = 1` for OFW, quadratic `lambda = 1` for SC-OFW).
fn drive(method: Method, set: &FeasibleSet, rounds: usize, seed: u64) -> Result<(Vec<StepRecord>, SurrogateSpec)> {
    let (spec, mut driver) = match method {
        Method::Ofw => (
            LossSpec::linear(set.dim(), 1.0, seed)?,
            Driver::Ofw(Ofw::new(set.clone(), rounds, 1.0)?),
        ),
        Method::ScOfw => (
            LossSpec::quadratic(set, 1.0, seed)?,
            Driver::ScOfw(ScOfw::new(set.clone(), 1.0)?),
        ),
    };
    use crate::learners::Learner;
    let initial = match &driver {
        Driver::Ofw(l) => l.surrogate().expect("ofw keeps a surrogate"),
        Driver::ScOfw(l) => l.surrogate().expect("sc-ofw keeps a surrogate"),
    };
    let mut records = Vec::with_capacity(rounds);
    for t in 1..=rounds {
        let round = make_round(&spec, t, set)?;
        let (x_in, step, x_out, surrogate) = match &mut driver {
            Driver::Ofw(l) => {
                let x_in = l.decision().clone();
                let grad = round.grad_at(&x_in)?;
                let step = l.step(&grad)?;
                (x_in, (grad, step), l.decision().clone(), l.surrogate().expect("surrogate"))
            }
            Driver::ScOfw(l) => {
                let x_in = l.decision().clone();
                let grad = round.grad_at(&x_in)?;
                let step = l.step(&grad)?;
                (x_in, (grad, step), l.decision().clone(), l.surrogate().expect("surrogate"))
            }
        };
        let (grad, step) = step;
        records.push(StepRecord {
            t,
            x_in,
            x_out,
            grad,
            surrogate_grad: step.surrogate_grad,
            surrogate,
        });
    }
    Ok((records, initial))
}

/// Running-sum surrogate gradients equal the naive sum over history.
pub fn check_surrogate_gradient(method: Method, set_name: &str, set: &FeasibleSet, seed: u64) -> CheckReport {
    run_check(
        &format!("surrogate_gradient_identity/{}/{set_name}", method.label()),
        Scope::Learners,
        |tally| {
            let (records, _) = drive(method, set, 60, seed)?;
            let mut rng = rng_for(seed ^ 0x5EED);
            for (k, rec) in records.iter().enumerate() {
                let x = set.random_feasible(rng.random());
                let fast = rec.surrogate.grad(&x)?;
                let mut naive = Point::zeros(set.dim());
                match (&rec.surrogate, method) {
                    (SurrogateSpec::Ofw { eta, anchor, .. }, Method::Ofw) => {
                        for r in &records[..=k] {
                            naive.axpy(*eta, &r.grad);
                        }
                        naive.axpy(2.0, &x.sub(anchor));
                    }
                    (SurrogateSpec::ScOfw { lambda, .. }, Method::ScOfw) => {
                        for r in &records[..=k] {
                            naive.add_assign(&r.grad);
                            naive.axpy(*lambda, &x.sub(&r.x_in));
                        }
                    }
                    _ => unreachable!("driver and surrogate agree"),
                }
                let scale = naive.norm().max(1.0);
                tally.observe(fast.distance(&naive), 1e-9 * scale, || {
                    format!("t={} x={} running={} naive={}", rec.t, fmt_point(&x), fmt_point(&fast), fmt_point(&naive))
                });
                // the learner's own step used the same gradient
                let at_x_in = rec.surrogate.grad(&rec.x_in)?;
                tally.observe(at_x_in.distance(&rec.surrogate_grad), 1e-9 * scale, || {
                    format!("t={} step gradient differs from surrogate gradient", rec.t)
                });
            }
            Ok(())
        },
    )
}

/// One line-searched step contracts the surrogate gap:
/// `h_out <= h_in max(1/2, 1 - alpha ||grad F(x_in)|| / (8 beta)) + 1e-7`.
pub fn check_contraction(method: Method, set_name: &str, set: &FeasibleSet, steps: usize, seed: u64) -> CheckReport {
    run_check(
        &format!("contraction/{}/{set_name}", method.label()),
        Scope::Learners,
        |tally| {
            let alpha = set.strong_convexity_modulus();
            let (records, _) = drive(method, set, steps, seed)?;
            for rec in &records {
                let (x_star, _) = surrogate_argmin(&rec.surrogate, ORACLE_TOL)?;
                let h_in = rec.surrogate.value_gap(&rec.x_in, &x_star)?;
                let h_out = rec.surrogate.value_gap(&rec.x_out, &x_star)?;
                let beta = rec.surrogate.curvature();
                let factor = (1.0 - alpha * rec.surrogate_grad.norm() / (8.0 * beta)).max(0.5);
                tally.observe(h_out, h_in * factor + INVARIANT_SLACK, || {
                    format!("t={} h_in={h_in:e} h_out={h_out:e} factor={factor}", rec.t)
                });
            }
            Ok(())
        },
    )
}

/// Consecutive surrogate minimizers stay close: `eta G` for OFW and
/// `2 (G + lambda D) / ((t-1) lambda)` between `x*_{t-1}` and `x*_t` for
/// SC-OFW (`t >= 3`).
pub fn check_comparator_drift(method: Method, set_name: &str, set: &FeasibleSet, rounds: usize, seed: u64) -> CheckReport {
    run_check(
        &format!("comparator_drift/{}/{set_name}", method.label()),
        Scope::Learners,
        |tally| {
            let (records, initial) = drive(method, set, rounds, seed)?;
            let lambda = 1.0;
            let g_cert = match method {
                Method::Ofw => 1.0,
                Method::ScOfw => lambda * set.diameter(),
            };
            // minimizers[k] = argmin F_k, i.e. x*_{k+1}
            let mut minimizers = Vec::with_capacity(rounds + 1);
            if method == Method::Ofw {
                minimizers.push(surrogate_argmin(&initial, ORACLE_TOL)?.0);
            }
            for rec in &records {
                minimizers.push(surrogate_argmin(&rec.surrogate, ORACLE_TOL)?.0);
            }
            match method {
                Method::Ofw => {
                    let SurrogateSpec::Ofw { eta, .. } = initial else { unreachable!() };
                    for (k, w) in minimizers.windows(2).enumerate() {
                        tally.observe(w[0].distance(&w[1]), eta * g_cert + INVARIANT_SLACK, || {
                            format!("x*_{} -> x*_{}: {} vs {}", k + 1, k + 2, fmt_point(&w[0]), fmt_point(&w[1]))
                        });
                    }
                }
                Method::ScOfw => {
                    // minimizers[j] = x*_{j+2}; the pair (x*_{t-1}, x*_t) is
                    // (minimizers[t-3], minimizers[t-2]) for t >= 3
                    let s = g_cert + lambda * set.diameter();
                    for (j, w) in minimizers.windows(2).enumerate() {
                        let t = j + 3;
                        let limit = 2.0 * s / ((t - 1) as f64 * lambda);
                        tally.observe(w[0].distance(&w[1]), limit + INVARIANT_SLACK, || {
                            format!("x*_{} -> x*_{t}: {} vs {}", t - 1, fmt_point(&w[0]), fmt_point(&w[1]))
                        });
                    }
                }
            }
            Ok(())
        },
    )
}

/// Each linearized strongly convex loss
/// `<g_t, x> + (lambda/2) ||x - x_t||^2` is `(G + lambda D)`-Lipschitz on
/// the set.
pub fn check_surrogate_lipschitz(set_name: &str, set: &FeasibleSet, seed: u64) -> CheckReport {
    run_check(&format!("surrogate_lipschitz/{set_name}"), Scope::Learners, |tally| {
        let lambda = 1.0;
        let (records, _) = drive(Method::ScOfw, set, 50, seed)?;
        let lip = lambda * set.diameter() + lambda * set.diameter();
        let mut rng = rng_for(seed ^ 0x11B);
        for rec in &records {
            let f = |x: &Point| dot_unchecked(&rec.grad, x) + 0.5 * lambda * x.sub(&rec.x_in).norm_sq();
            for _ in 0..20 {
                let x = set.random_feasible(rng.random());
                let y = set.random_feasible(rng.random());
                tally.observe((f(&x) - f(&y)).abs(), lip * x.distance(&y) + 1e-9, || {
                    format!("t={} x={} y={}", rec.t, fmt_point(&x), fmt_point(&y))
                });
            }
        }
        Ok(())
    })
}

/// For an `alpha`-strongly convex surrogate with minimizer `x*` over the
/// set: `(alpha/2) ||x - x*||^2 <= F(x) - F(x*)` and
/// `||grad F(x)|| >= sqrt(alpha/2) sqrt(F(x) - F(x*))`.
pub fn check_strong_convexity_consequences(method: Method, set_name: &str, set: &FeasibleSet, seed: u64) -> CheckReport {
    run_check(
        &format!("surrogate_strong_convexity/{}/{set_name}", method.label()),
        Scope::Learners,
        |tally| {
            let (records, _) = drive(method, set, 40, seed)?;
            let mut rng = rng_for(seed ^ 0xC0);
            for rec in &records {
                let s = &rec.surrogate;
                let alpha = s.curvature();
                let (x_star, _) = surrogate_argmin(s, ORACLE_TOL)?;
                for _ in 0..10 {
                    let x = set.random_feasible(rng.random());
                    let h = s.value_gap(&x, &x_star)?;
                    tally.observe(0.5 * alpha * x.distance(&x_star).powi(2), h + INVARIANT_SLACK, || {
                        format!("quadratic growth at t={} x={}", rec.t, fmt_point(&x))
                    });
                    let grad_norm = s.grad(&x)?.norm();
                    tally.observe((0.5 * alpha).sqrt() * h.max(0.0).sqrt(), grad_norm + INVARIANT_SLACK, || {
                        format!("gradient domination at t={} x={}", rec.t, fmt_point(&x))
                    });
                }
            }
            Ok(())
        },
    )
}

/// Be-the-leader: with `x*_{t+1}` minimizing the first `t` linearized
/// losses, `Σ_t f~_t(x*_{t+1}) <= min_x Σ_t f~_t(x) + T tol`.
pub fn check_prefix_optimality(set_name: &str, set: &FeasibleSet, rounds: usize, seed: u64) -> CheckReport {
    run_check(&format!("prefix_optimality/{set_name}"), Scope::Learners, |tally| {
        let lambda = 1.0;
        let (records, _) = drive(Method::ScOfw, set, rounds, seed)?;
        let mut leader_total = 0.0;
        for rec in &records {
            let (x_next, _) = surrogate_argmin(&rec.surrogate, ORACLE_TOL)?;
            leader_total += dot_unchecked(&rec.grad, &x_next) + 0.5 * lambda * x_next.sub(&rec.x_in).norm_sq();
        }
        let last = &records.last().expect("at least one round").surrogate;
        let (x_final, best) = surrogate_argmin(last, ORACLE_TOL)?;
        tally.observe(leader_total, best + rounds as f64 * ORACLE_TOL, || {
            format!("leaders total {leader_total} vs hindsight {best} at {}", fmt_point(&x_final))
        });
        Ok(())
    })
}

/// Runs `config` through the harness and reports every recorded violation
/// (gap schedule, first gap, nonnegative gaps, feasibility, regret bound).
pub fn check_experiment(name: &str, spec: &ExperimentSpec) -> CheckReport {
    run_check(name, Scope::Bounds, |tally| {
        let trace = run_experiment(spec)?;
        for row in &trace.rows {
            if let Some(h) = row.gap {
                let limit = row.gap_bound.map_or(f64::INFINITY, |e| e + INVARIANT_SLACK);
                tally.observe(h, limit, || format!("t={} h={h:e}", row.t));
            }
        }
        if let Some(bound) = trace.summary.bound {
            tally.observe(trace.summary.final_regret, bound, || {
                format!("R({})={} above {bound}", spec.horizon, trace.summary.final_regret)
            });
        }
        for v in &trace.violations {
            tally.observe(1.0, 0.0, || format!("{} at t={}: {} vs {}", v.check, v.t, v.value, v.limit));
        }
        Ok(())
    })
}

/// Canonical configs: unit `l2` ball or simplex in 10 dimensions, linear
/// `G = 1` for OFW and quadratic `lambda = 1` for SC-OFW.
pub fn canonical_spec(algo: &str, set: &str, horizon: usize, seed: u64) -> ExperimentSpec {
    let set_block = match set {
        "simplex" => "set.kind = \"simplex\"\nset.dim = 10".to_string(),
        _ => "set.kind = \"l2_ball\"\nset.dim = 10\nset.r = 1".to_string(),
    };
    let loss_block = match algo {
        "sc_ofw" => "loss.kind = \"quadratic\"\nloss.lambda = 1",
        _ => "loss.kind = \"linear\"\nloss.G = 1",
    };
    parse_config(&format!("algo = \"{algo}\"\nT = {horizon}\nseed = {seed}\n{set_block}\n{loss_block}\n"))
        .expect("canonical config is valid")
}

type Job = Box<dyn Fn() -> CheckReport + Send + Sync>;

fn set_jobs() -> Vec<Job> {
    let mut jobs: Vec<Job> = vec![Box::new(|| check_line_search(1000, 7))];
    for (name, set) in canonical_sets(5) {
        let (n1, s1) = (name.clone(), set.clone());
        jobs.push(Box::new(move || {
            check_lmo_optimality(&n1, &s1, &|g| s1.lmo(g), 100, 10_000, 17)
        }));
        let (n2, s2) = (name.clone(), set.clone());
        jobs.push(Box::new(move || check_projection(&n2, &s2, 1000, 23)));
        let (n3, s3) = (name.clone(), set.clone());
        jobs.push(Box::new(move || check_quadratic_comparator(&n3, &s3, 29)));
        if set.is_strongly_convex() {
            let (n4, s4) = (name.clone(), set.clone());
            jobs.push(Box::new(move || check_set_strong_convexity(&n4, &s4, 10_000, 31)));
        }
    }
    for (name, set) in canonical_sets(3) {
        jobs.push(Box::new(move || check_linear_comparator(&format!("{name}_d3"), &set, 1_000_000, 37)));
    }
    jobs
}

fn learner_jobs() -> Vec<Job> {
    let mut jobs: Vec<Job> = Vec::new();
    let ball = FeasibleSet::l2_ball(10, 1.0).expect("valid set");
    let lp = FeasibleSet::lp_ball(6, 1.0, 1.5).expect("valid set");
    let simplex = FeasibleSet::simplex(10).expect("valid set");
    for method in [Method::Ofw, Method::ScOfw] {
        for (name, set) in [("l2_ball", ball.clone()), ("simplex", simplex.clone())] {
            let s = set.clone();
            jobs.push(Box::new(move || check_surrogate_gradient(method, name, &s, 41)));
            let s = set.clone();
            jobs.push(Box::new(move || check_comparator_drift(method, name, &s, 100, 43)));
            let s = set.clone();
            jobs.push(Box::new(move || check_strong_convexity_consequences(method, name, &s, 47)));
        }
        let s = ball.clone();
        jobs.push(Box::new(move || check_contraction(method, "l2_ball", &s, 100, 53)));
        let s = lp.clone();
        jobs.push(Box::new(move || check_contraction(method, "lp_ball_1.5", &s, 100, 59)));
    }
    for (name, set) in [("l2_ball", ball), ("simplex", simplex)] {
        let s = set.clone();
        jobs.push(Box::new(move || check_surrogate_lipschitz(name, &s, 61)));
        jobs.push(Box::new(move || check_prefix_optimality(name, &set, 64, 67)));
    }
    jobs
}

fn bound_jobs() -> Vec<Job> {
    let mut jobs: Vec<Job> = Vec::new();
    for (label, algo, set) in [
        ("gap_schedule/ofw/l2_ball", "ofw_ls", "l2_ball"),
        ("gap_schedule/sc_ofw/l2_ball", "sc_ofw", "l2_ball"),
        ("gap_schedule/sc_ofw/simplex", "sc_ofw", "simplex"),
    ] {
        jobs.push(Box::new(move || {
            check_experiment(label, &canonical_spec(algo, set, 1024, 1).with_gap_check(512))
        }));
    }
    for (label, algo, set) in [
        ("regret_bound/ofw/l2_ball", "ofw_ls", "l2_ball"),
        ("regret_bound/sc_ofw/l2_ball", "sc_ofw", "l2_ball"),
        ("regret_bound/sc_ofw/simplex", "sc_ofw", "simplex"),
    ] {
        for horizon in [256, 1024, 4096] {
            for seed in 1..=5 {
                jobs.push(Box::new(move || {
                    check_experiment(&format!("{label}/T={horizon}/seed={seed}"), &canonical_spec(algo, set, horizon, seed))
                }));
            }
        }
    }
    jobs
}

/// Runs the suites selected by `scope`.
pub fn verify_suite(scope: Scope) -> VerifyReport {
    let mut jobs = Vec::new();
    if matches!(scope, Scope::All | Scope::Sets) {
        jobs.extend(set_jobs());
    }
    if matches!(scope, Scope::All | Scope::Learners) {
        jobs.extend(learner_jobs());
    }
    if matches!(scope, Scope::All | Scope::Bounds) {
        jobs.extend(bound_jobs());
    }
    let checks: Vec<CheckReport> = jobs.par_iter().map(|job| job()).collect();
    VerifyReport {
        scope,
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scope_parsing() {
        assert_eq!("bounds".parse::<Scope>().unwrap(), Scope::Bounds);
        assert!("everything".parse::<Scope>().is_err());
        assert_eq!(Scope::Learners.to_string(), "learners");
    }

    #[test]
    fn tally_keeps_worst_witness() {
        let mut t = Tally::new("demo", Scope::Sets);
        t.observe(1.0, 2.0, || unreachable!());
        t.observe(3.0, 2.0, || "first".into());
        t.observe(5.0, 2.0, || "worst".into());
        t.observe(4.0, 2.0, || "smaller".into());
        let r = t.finish(Ok(()));
        assert!(!r.passed);
        assert_eq!(r.failures, 3);
        assert_eq!(r.samples, 4);
        assert_eq!(r.max_excess, 3.0);
        assert_eq!(r.counterexample.as_deref(), Some("worst"));
    }

    #[test]
    fn errors_fail_the_check() {
        let r = run_check("boom", Scope::Sets, |_| Err(invalid("x", "broken")));
        assert!(!r.passed);
        assert!(r.counterexample.unwrap().contains("broken"));
    }

    #[test]
    fn sign_flipped_lmo_is_caught() {
        let set = FeasibleSet::l2_ball(3, 1.0).unwrap();
        let r = check_lmo_optimality("l2_ball", &set, &|g| set.lmo(&g.scale(-1.0)), 5, 200, 3);
        assert!(!r.passed);
        let witness = r.counterexample.unwrap();
        assert!(witness.contains("g=") && witness.contains("x="), "{witness}");

        let r = check_lmo_optimality("l2_ball", &set, &|g| set.lmo(g), 5, 200, 3);
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn learner_checks_pass_on_small_instances() {
        let ball = FeasibleSet::l2_ball(4, 1.0).unwrap();
        let simplex = FeasibleSet::simplex(4).unwrap();
        for method in [Method::Ofw, Method::ScOfw] {
            for r in [
                check_surrogate_gradient(method, "l2", &ball, 1),
                check_contraction(method, "l2", &ball, 30, 2),
                check_comparator_drift(method, "l2", &ball, 30, 3),
                check_comparator_drift(method, "simplex", &simplex, 30, 3),
                check_strong_convexity_consequences(method, "simplex", &simplex, 4),
            ] {
                assert!(r.passed, "{r:?}");
                assert!(r.samples > 0);
            }
        }
        assert!(check_prefix_optimality("simplex", &simplex, 16, 5).passed);
        assert!(check_surrogate_lipschitz("l2", &ball, 6).passed);
    }
}
