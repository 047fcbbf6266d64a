use crate::error::{invalid, Result};

/// Least-squares slope of `ln R` against `ln T`.
///
/// Points with `R <= 0` are dropped. At least three points must survive and
/// the horizons must be strictly increasing.
pub fn loglog_slope(points: &[(f64, f64)]) -> Result<f64> {
    if points.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(invalid("points", "horizons must be strictly increasing"));
    }
    if points.iter().any(|&(t, _)| !(t > 0.0)) {
        return Err(invalid("points", "horizons must be positive"));
    }
    let kept: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(_, r)| r > 0.0 && r.is_finite())
        .map(|&(t, r)| (t.ln(), r.ln()))
        .collect();
    if kept.len() < 3 {
        return Err(invalid(
            "points",
            format!("need at least 3 points with positive regret, got {}", kept.len()),
        ));
    }
    let n = kept.len() as f64;
    let mx = kept.iter().map(|p| p.0).sum::<f64>() / n;
    let my = kept.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = kept.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = kept.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Ok(sxy / sxx)
}
