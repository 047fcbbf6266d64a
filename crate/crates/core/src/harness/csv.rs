//! Trace serialization.
//!
//! Reals are written in scientific notation with 16 fractional digits (17
//! significant), which round-trips every `f64`. Absent values are empty
//! fields.

use std::fmt::Write;

use crate::error::{invalid, Result};

use super::run::{RegretTrace, TraceRow};

pub const CSV_HEADER: &str = "t,loss,cum_loss,comparator_cum,regret,theorem_bound,gap,gap_bound";

pub fn emit_csv(trace: &RegretTrace) -> String {
    let mut out = String::with_capacity(64 + trace.rows.len() * 180);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in &trace.rows {
        let _ = write!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.t,
            real(r.loss),
            real(r.cum_loss),
            real(r.comparator_cum),
            real(r.regret),
            opt(r.theorem_bound),
            opt(r.gap),
            opt(r.gap_bound)
        );
        out.push('\n');
    }
    out
}

pub(crate) fn real(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(real).unwrap_or_default()
}

/// Reads rows written by [`emit_csv`].
pub fn parse_csv(text: &str) -> Result<Vec<TraceRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        other => return Err(invalid("header", format!("unexpected header {other:?}"))),
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 8 {
                return Err(invalid("row", format!("line {}: expected 8 fields, got {}", i + 2, fields.len())));
            }
            let num = |s: &str| -> Result<f64> {
                s.parse::<f64>()
                    .map_err(|e| invalid("row", format!("line {}: {e}: {s:?}", i + 2)))
            };
            let maybe = |s: &str| -> Result<Option<f64>> {
                if s.is_empty() {
                    Ok(None)
                } else {
                    num(s).map(Some)
                }
            };
            Ok(TraceRow {
                t: fields[0]
                    .parse()
                    .map_err(|e| invalid("row", format!("line {}: {e}", i + 2)))?,
                loss: num(fields[1])?,
                cum_loss: num(fields[2])?,
                comparator_cum: num(fields[3])?,
                regret: num(fields[4])?,
                theorem_bound: maybe(fields[5])?,
                gap: maybe(fields[6])?,
                gap_bound: maybe(fields[7])?,
            })
        })
        .collect()
}
