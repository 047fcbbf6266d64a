//! Experiment configuration.
//!
//! Configs are flat TOML documents with dotted sections:
//!
//! ```toml
//! algo = "ofw_ls"
//! T = 1024
//! gap_check = true
//!
//! set.kind = "l2_ball"
//! set.dim = 10
//! set.r = 1.0
//!
//! loss.kind = "linear"
//! loss.G = 1.0
//! loss.seed = 1
//! ```
//!
//! Unknown keys are rejected.

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learners::{Baseline, Learner, Ofw, OgdStep, ScOfw};
use crate::losses::{certify_constants, LossKind, LossSpec};
use crate::sets::{FeasibleSet, SetKind};

/// Default cap on the number of rounds whose surrogate gap is measured.
pub const DEFAULT_GAP_CAP: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algo {
    OfwLs,
    ScOfw,
    OfwDecay,
    Ogd,
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algo::OfwLs => "ofw_ls",
            Algo::ScOfw => "sc_ofw",
            Algo::OfwDecay => "ofw_decay",
            Algo::Ogd => "ogd",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SetDescriptor {
    pub kind: SetKind,
    pub dim: usize,
    pub radius: f64,
    pub p: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LossDescriptor {
    pub kind: LossKind,
    /// Declared `G` for linear losses; derived as `lambda D` for quadratics.
    pub lipschitz: Option<f64>,
    pub lambda: f64,
    pub seed: u64,
}

/// A validated experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub set: SetDescriptor,
    pub loss: LossDescriptor,
    pub algo: Algo,
    pub horizon: usize,
    pub gap_check: bool,
    pub gap_cap: usize,
    pub output: Option<PathBuf>,
}

impl ExperimentSpec {
    /// A spec built in code rather than parsed; runs the same validation as
    /// [`parse_config`].
    pub fn new(
        set: SetDescriptor,
        loss: LossDescriptor,
        algo: Algo,
        horizon: usize,
    ) -> Result<Self> {
        let spec = Self {
            set,
            loss,
            algo,
            horizon,
            gap_check: false,
            gap_cap: DEFAULT_GAP_CAP,
            output: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_gap_check(mut self, cap: usize) -> Self {
        self.gap_check = true;
        self.gap_cap = cap;
        self
    }

    pub fn with_horizon(mut self, horizon: usize) -> Self {
        self.horizon = horizon;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.loss.seed = seed;
        self
    }

    pub fn feasible_set(&self) -> Result<FeasibleSet> {
        let s = &self.set;
        match s.kind {
            SetKind::L2Ball => FeasibleSet::l2_ball(s.dim, s.radius),
            SetKind::LpBall => FeasibleSet::lp_ball(s.dim, s.radius, s.p.unwrap_or(f64::NAN)),
            SetKind::L1Ball => FeasibleSet::l1_ball(s.dim, s.radius),
            SetKind::Simplex => FeasibleSet::simplex(s.dim),
        }
    }

    pub fn loss_spec(&self) -> Result<LossSpec> {
        let set = self.feasible_set()?;
        match self.loss.kind {
            LossKind::Linear => LossSpec::linear(
                set.dim(),
                self.loss.lipschitz.unwrap_or(f64::NAN),
                self.loss.seed,
            ),
            LossKind::Quadratic => LossSpec::quadratic(&set, self.loss.lambda, self.loss.seed),
        }
    }

    /// Certified `(G, lambda)` for this experiment.
    pub fn constants(&self) -> Result<(f64, f64)> {
        certify_constants(&self.loss_spec()?, &self.feasible_set()?)
    }

    /// A fresh learner for this experiment.
    pub fn learner(&self) -> Result<Box<dyn Learner>> {
        let set = self.feasible_set()?;
        let (g, lambda) = self.constants()?;
        Ok(match self.algo {
            Algo::OfwLs => Box::new(Ofw::new(set, self.horizon, g)?),
            Algo::ScOfw => Box::new(ScOfw::new(set, lambda)?),
            Algo::OfwDecay => Box::new(Baseline::ofw_decay(set, self.horizon, g)?),
            Algo::Ogd => {
                let step = match self.loss.kind {
                    LossKind::Linear => OgdStep::Convex {
                        lipschitz: g,
                        diameter: set.diameter(),
                    },
                    LossKind::Quadratic => OgdStep::StronglyConvex { lambda },
                };
                Box::new(Baseline::ogd(set, self.horizon, step)?)
            }
        })
    }

    fn validate(&self) -> Result<()> {
        let set = self.feasible_set().map_err(|e| config_err("set", e.to_string()))?;
        if self.horizon == 0 {
            return Err(config_err("T", "horizon must be at least 1"));
        }
        match self.loss.kind {
            LossKind::Linear => {
                match self.loss.lipschitz {
                    Some(g) if g > 0.0 && g.is_finite() => {}
                    Some(g) => return Err(config_err("loss.G", format!("must be positive, got {g}"))),
                    None => return Err(config_err("loss.G", "required for linear losses")),
                }
                if self.loss.lambda != 0.0 {
                    return Err(config_err("loss.lambda", "linear losses have lambda = 0"));
                }
            }
            LossKind::Quadratic => {
                let lambda = self.loss.lambda;
                if !(lambda > 0.0) || !lambda.is_finite() {
                    return Err(config_err("loss.lambda", format!("must be positive, got {lambda}")));
                }
                if let Some(g) = self.loss.lipschitz {
                    let certified = lambda * set.diameter();
                    if (g - certified).abs() > 1e-12 * certified {
                        return Err(config_err(
                            "loss.G",
                            format!("quadratic losses certify G = lambda * D = {certified}; got {g}"),
                        ));
                    }
                }
            }
        }
        if self.algo == Algo::ScOfw && self.loss.kind != LossKind::Quadratic {
            return Err(config_err("algo", "sc_ofw requires quadratic losses with lambda > 0"));
        }
        Ok(())
    }
}

fn config_err(path: &str, reason: impl Into<String>) -> Error {
    Error::Config {
        path: path.to_string(),
        reason: reason.into(),
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    set: RawSet,
    loss: RawLoss,
    algo: Algo,
    #[serde(rename = "T")]
    horizon: i64,
    seed: Option<u64>,
    gap_check: Option<bool>,
    gap_cap: Option<usize>,
    output: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSet {
    kind: SetKind,
    dim: usize,
    r: Option<f64>,
    p: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLoss {
    kind: LossKind,
    #[serde(rename = "G")]
    lipschitz: Option<f64>,
    lambda: Option<f64>,
    seed: Option<u64>,
}

/// Parses and validates a config document.
pub fn parse_config(text: &str) -> Result<ExperimentSpec> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config {
        path: "<document>".into(),
        reason: e.message().to_string(),
    })?;

    let radius = match (raw.set.kind, raw.set.r) {
        (SetKind::Simplex, Some(_)) => return Err(config_err("set.r", "the simplex takes no radius")),
        (SetKind::Simplex, None) => 1.0,
        (_, Some(r)) => r,
        (_, None) => return Err(config_err("set.r", "balls need a radius")),
    };
    match (raw.set.kind, raw.set.p) {
        (SetKind::LpBall, None) => return Err(config_err("set.p", "lp_ball needs p in (1, 2]")),
        (SetKind::LpBall, Some(p)) if !(p > 1.0 && p <= 2.0) => {
            return Err(config_err("set.p", format!("expected p in (1, 2], got {p}")))
        }
        (SetKind::LpBall, Some(_)) => {}
        (_, Some(_)) => return Err(config_err("set.p", "only lp_ball takes an exponent")),
        (_, None) => {}
    }
    if raw.set.dim == 0 {
        return Err(config_err("set.dim", "dimension must be positive"));
    }
    if raw.horizon < 1 {
        return Err(config_err("T", format!("horizon must be at least 1, got {}", raw.horizon)));
    }
    let seed = match (raw.seed, raw.loss.seed) {
        (Some(a), Some(b)) if a != b => {
            return Err(config_err("seed", format!("conflicts with loss.seed ({a} vs {b})")))
        }
        (Some(s), _) | (None, Some(s)) => s,
        (None, None) => return Err(config_err("loss.seed", "a seed is required")),
    };
    let lambda = match raw.loss.kind {
        LossKind::Linear => raw.loss.lambda.unwrap_or(0.0),
        LossKind::Quadratic => raw
            .loss
            .lambda
            .ok_or_else(|| config_err("loss.lambda", "required for quadratic losses"))?,
    };

    let spec = ExperimentSpec {
        set: SetDescriptor {
            kind: raw.set.kind,
            dim: raw.set.dim,
            radius,
            p: raw.set.p,
        },
        loss: LossDescriptor {
            kind: raw.loss.kind,
            lipschitz: raw.loss.lipschitz,
            lambda,
            seed,
        },
        algo: raw.algo,
        horizon: raw.horizon as usize,
        gap_check: raw.gap_check.unwrap_or(false),
        gap_cap: raw.gap_cap.unwrap_or(DEFAULT_GAP_CAP),
        output: raw.output,
    };
    spec.validate()?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
algo = "ofw_ls"
T = 1024
set.kind = "l2_ball"
set.dim = 10
set.r = 1
loss.kind = "linear"
loss.G = 1
loss.seed = 1
"#;

    #[test]
    fn minimal_document_round_trips() {
        let spec = parse_config(MINIMAL).unwrap();
        assert_eq!(spec.algo, Algo::OfwLs);
        assert_eq!(spec.horizon, 1024);
        assert_eq!(spec.set.kind, SetKind::L2Ball);
        assert_eq!(spec.set.dim, 10);
        assert_eq!(spec.set.radius, 1.0);
        assert_eq!(spec.loss.kind, LossKind::Linear);
        assert_eq!(spec.loss.lipschitz, Some(1.0));
        assert_eq!(spec.loss.seed, 1);
        assert!(!spec.gap_check);
        assert_eq!(spec.gap_cap, DEFAULT_GAP_CAP);
    }

    #[test]
    fn section_tables_are_equivalent_to_dotted_keys() {
        let text = r#"
algo = "ofw_ls"
T = 1024
[set]
kind = "l2_ball"
dim = 10
r = 1.0
[loss]
kind = "linear"
G = 1.0
seed = 1
"#;
        assert_eq!(parse_config(text).unwrap(), parse_config(MINIMAL).unwrap());
    }

    #[test]
    fn sc_ofw_needs_quadratic_losses() {
        let text = MINIMAL.replace("ofw_ls", "sc_ofw");
        let err = parse_config(&text).unwrap_err();
        assert!(matches!(&err, Error::Config { path, .. } if path == "algo"), "{err}");
    }

    #[test]
    fn unknown_keys_are_named() {
        let err = parse_config(&format!("{MINIMAL}foo = 3\n")).unwrap_err();
        assert!(err.to_string().contains("foo"), "{err}");
        let err = parse_config(&format!("{MINIMAL}set.bar = 3\n")).unwrap_err();
        assert!(err.to_string().contains("bar"), "{err}");
    }

    #[test]
    fn malformed_documents_are_rejected() {
        assert!(parse_config("algo = ").is_err());
        assert!(parse_config(&MINIMAL.replace("T = 1024", "T = 0")).is_err());
        assert!(parse_config(&MINIMAL.replace("l2_ball", "cube")).is_err());
        assert!(parse_config(&MINIMAL.replace("loss.G = 1\n", "")).is_err());
    }

    #[test]
    fn quadratic_configs() {
        let text = r#"
algo = "sc_ofw"
T = 64
gap_check = true
gap_cap = 32
set.kind = "simplex"
set.dim = 5
loss.kind = "quadratic"
loss.lambda = 0.5
seed = 9
"#;
        let spec = parse_config(text).unwrap();
        assert_eq!(spec.loss.seed, 9);
        assert!(spec.gap_check);
        assert_eq!(spec.gap_cap, 32);
        let (g, l) = spec.constants().unwrap();
        assert!((g - 0.5 * 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(l, 0.5);

        assert!(parse_config(&text.replace("loss.lambda = 0.5", "loss.lambda = 0")).is_err());
        assert!(parse_config(&text.replace("set.dim = 5", "set.dim = 5\nset.r = 2")).is_err());
        assert!(parse_config(&format!("{text}loss.seed = 3\n")).is_err());
        assert!(parse_config(&format!("{text}loss.G = 5\n")).is_err());
    }

    #[test]
    fn lp_ball_needs_an_exponent() {
        let text = MINIMAL.replace("l2_ball", "lp_ball");
        assert!(parse_config(&text).is_err());
        let spec = parse_config(&format!("{text}set.p = 1.5\n")).unwrap();
        assert_eq!(spec.set.p, Some(1.5));
        assert!(parse_config(&format!("{text}set.p = 3\n")).is_err());
    }
}
