//! Independent runs over a ladder of horizons.

use std::fmt::Write;
use std::time::Instant;

use serde::Serialize;

use crate::error::{invalid, Result};

use super::config::ExperimentSpec;
use super::csv::real;
use super::run::run_experiment;
use super::slope::loglog_slope;

/// `2^8, 2^9, ..., 2^14`.
pub fn default_horizons() -> Vec<usize> {
    (8..=14).map(|k| 1usize << k).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepCell {
    pub horizon: usize,
    pub seed: u64,
    pub final_regret: f64,
    pub bound: Option<f64>,
    pub elapsed_secs: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub cells: Vec<SweepCell>,
    /// `(T, mean R(T) over seeds)` per horizon.
    pub mean_regret: Vec<(usize, f64)>,
    /// Slope of the mean regret; `None` when fewer than three horizons have
    /// positive mean regret.
    pub slope: Option<f64>,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.cells.iter().all(|c| c.passed)
    }

    /// One line per cell: `T,seed,final_regret,theorem_bound,elapsed_s`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("T,seed,final_regret,theorem_bound,elapsed_s\n");
        for c in &self.cells {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                c.horizon,
                c.seed,
                real(c.final_regret),
                c.bound.map(real).unwrap_or_default(),
                real(c.elapsed_secs)
            );
        }
        out
    }
}

/// Runs `spec` once per `(horizon, seed)` with a fresh learner each time.
/// Runs are sequential so the recorded wall times are not distorted by
/// contention.
pub fn sweep(spec: &ExperimentSpec, horizons: &[usize], seeds: &[u64]) -> Result<SweepReport> {
    if horizons.is_empty() || seeds.is_empty() {
        return Err(invalid("horizons", "a sweep needs at least one horizon and one seed"));
    }
    if horizons.windows(2).any(|w| w[1] <= w[0]) || horizons[0] == 0 {
        return Err(invalid("horizons", "horizons must be positive and strictly increasing"));
    }
    let mut cells = Vec::with_capacity(horizons.len() * seeds.len());
    let mut mean_regret = Vec::with_capacity(horizons.len());
    for &horizon in horizons {
        let mut total = 0.0;
        for &seed in seeds {
            let cell_spec = spec.clone().with_horizon(horizon).with_seed(seed);
            let start = Instant::now();
            let trace = run_experiment(&cell_spec)?;
            let elapsed_secs = start.elapsed().as_secs_f64();
            total += trace.summary.final_regret;
            cells.push(SweepCell {
                horizon,
                seed,
                final_regret: trace.summary.final_regret,
                bound: trace.summary.bound,
                elapsed_secs,
                passed: trace.passed(),
            });
        }
        mean_regret.push((horizon, total / seeds.len() as f64));
    }
    let points: Vec<(f64, f64)> = mean_regret.iter().map(|&(t, r)| (t as f64, r)).collect();
    let slope = loglog_slope(&points).ok();
    Ok(SweepReport {
        cells,
        mean_regret,
        slope,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::parse_config;

    #[test]
    fn cells_cover_the_grid() {
        let spec = parse_config(
            "algo = \"sc_ofw\"\nT = 1\nseed = 1\nset.kind = \"l2_ball\"\nset.dim = 3\nset.r = 1\nloss.kind = \"quadratic\"\nloss.lambda = 1\n",
        )
        .unwrap();
        let report = sweep(&spec, &[16, 32, 64], &[1, 2]).unwrap();
        assert_eq!(report.cells.len(), 6);
        assert_eq!(report.cells[3].horizon, 32);
        assert_eq!(report.cells[3].seed, 2);
        assert_eq!(report.mean_regret.len(), 3);
        assert!(report.passed());
        assert_eq!(report.to_csv().lines().count(), 7);
    }

    #[test]
    fn rejects_bad_ladders() {
        let spec = parse_config(
            "algo = \"ofw_ls\"\nT = 1\nseed = 1\nset.kind = \"l2_ball\"\nset.dim = 3\nset.r = 1\nloss.kind = \"linear\"\nloss.G = 1\n",
        )
        .unwrap();
        assert!(sweep(&spec, &[], &[1]).is_err());
        assert!(sweep(&spec, &[64, 32], &[1]).is_err());
        assert!(sweep(&spec, &[0, 32], &[1]).is_err());
    }

    #[test]
    fn default_ladder() {
        assert_eq!(default_horizons(), vec![256, 512, 1024, 2048, 4096, 8192, 16384]);
    }
}
