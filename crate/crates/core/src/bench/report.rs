//! Long-format, plot-ready aggregates of a results table.
//!
//! Output columns: `figure,n,rho,rewire,scheme,metric,count,mean,median,min,max`.
//! Each line aggregates one metric over the replicates of one group.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use super::metrics::{mean, median};
use super::{fmt_f64, CSV_COLUMNS};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Figure {
    /// Ticks over the (N, ρ) grid.
    Fig1c,
    /// Min-fill treewidth over the (N, ρ) grid.
    Fig2,
    /// Ticks and root gap per (N, scheme).
    Fig3,
    /// Ticks spread per (N, ρ), for box plots.
    FigA1,
    /// Treewidth and ticks per rewire fraction.
    FigA2,
    /// Truncated gaps per keep fraction.
    Fig4b,
    /// Success probability and shots-to-solution.
    Fig5,
}

impl Figure {
    pub const ALL: [Figure; 7] = [
        Figure::Fig1c,
        Figure::Fig2,
        Figure::Fig3,
        Figure::FigA1,
        Figure::FigA2,
        Figure::Fig4b,
        Figure::Fig5,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig1c => "fig1c",
            Figure::Fig2 => "fig2",
            Figure::Fig3 => "fig3",
            Figure::FigA1 => "figA1",
            Figure::FigA2 => "figA2",
            Figure::Fig4b => "fig4b",
            Figure::Fig5 => "fig5",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Unknown {
                what: "figure",
                name: s.to_string(),
            })
    }

    fn metrics(self) -> &'static [&'static str] {
        match self {
            Figure::Fig1c | Figure::FigA1 => &["ticks"],
            Figure::Fig2 => &["treewidth_est"],
            Figure::Fig3 => &["ticks", "root_gap_pct"],
            Figure::FigA2 => &["treewidth_est", "ticks"],
            Figure::Fig4b => &[
                "gap_keep_100",
                "gap_keep_80",
                "gap_keep_60",
                "gap_keep_40",
                "gap_keep_20",
            ],
            Figure::Fig5 => &["p_mis", "tts_q", "avg_gap"],
        }
    }

    /// Grouping columns; the others are blank in the output.
    fn keys(self) -> [bool; 4] {
        // n, rho, rewire, scheme
        match self {
            Figure::Fig3 => [true, false, false, true],
            Figure::FigA2 => [true, false, true, true],
            _ => [true, true, false, true],
        }
    }
}

type Record = BTreeMap<String, String>;

fn read_records(input: impl Read) -> Result<Vec<Record>> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers()?.clone();
    for col in ["n", "rho", "rewire", "scheme"] {
        if !headers.iter().any(|h| h == col) {
            return Err(Error::InvalidParameter(format!(
                "results table lacks column {col}"
            )));
        }
    }
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        out.push(
            headers
                .iter()
                .zip(rec.iter())
                .map(|(h, v)| (h.to_string(), v.to_string()))
                .collect(),
        );
    }
    Ok(out)
}

fn num(rec: &Record, col: &str) -> Option<f64> {
    rec.get(col).and_then(|v| v.parse::<f64>().ok())
}

/// Numeric grouping key that sorts like the numbers it holds.
fn key_part(rec: &Record, col: &str, on: bool) -> (Option<u64>, String) {
    if !on {
        return (None, String::new());
    }
    let raw = rec.get(col).cloned().unwrap_or_default();
    match raw.parse::<f64>() {
        Ok(x) if x.is_finite() && x >= 0.0 => (Some(x.to_bits()), raw),
        _ => (None, raw),
    }
}

/// Aggregates a results CSV (as written by the benchmark) into `out`.
pub fn report(input: impl Read, figure: Figure, out: impl Write) -> Result<usize> {
    let records = read_records(input)?;
    let [kn, kr, kw, ks] = figure.keys();
    let mut groups: BTreeMap<_, BTreeMap<&str, Vec<f64>>> = BTreeMap::new();
    for rec in &records {
        let key = (
            key_part(rec, "n", kn),
            key_part(rec, "rho", kr),
            key_part(rec, "rewire", kw),
            if ks {
                rec.get("scheme").cloned().unwrap_or_default()
            } else {
                String::new()
            },
        );
        let slot = groups.entry(key).or_default();
        for &m in figure.metrics() {
            if let Some(v) = num(rec, m) {
                slot.entry(m).or_default().push(v);
            }
        }
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "figure", "n", "rho", "rewire", "scheme", "metric", "count", "mean", "median", "min", "max",
    ])?;
    let mut lines = 0;
    for ((n, rho, rewire, scheme), metrics) in &groups {
        for &m in figure.metrics() {
            let Some(v) = metrics.get(m) else { continue };
            let min = v.iter().copied().fold(f64::INFINITY, f64::min);
            let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            w.write_record([
                figure.name().to_string(),
                n.1.clone(),
                rho.1.clone(),
                rewire.1.clone(),
                scheme.clone(),
                m.to_string(),
                v.len().to_string(),
                fmt_f64(mean(v).unwrap_or(f64::NAN)),
                fmt_f64(median(v).unwrap_or(f64::NAN)),
                fmt_f64(min),
                fmt_f64(max),
            ])?;
            lines += 1;
        }
    }
    w.flush()?;
    Ok(lines)
}

/// Column list of the results table, for callers validating inputs.
pub fn results_columns() -> &'static [&'static str] {
    &CSV_COLUMNS
}
