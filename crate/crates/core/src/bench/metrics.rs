//! Quantum-side figures of merit.

use crate::error::{Error, Result};
use crate::graph::{Assignment, Graph};
use crate::quantum::SampleSet;
use crate::scalar::Weight;

/// Target success probability of the time-to-solution.
pub const TTS_TARGET: f64 = 0.99;
/// `1 − TTS_TARGET`, written out so that it is the double nearest 0.01.
const TTS_MISS: f64 = 0.01;
const WEIGHT_TOL: f64 = 1e-9;

fn is_optimal<W: Weight>(value: W, optimum: W) -> bool {
    (value.as_f64() - optimum.as_f64()).abs() <= WEIGHT_TOL * optimum.as_f64().abs().max(1.0)
}

/// Weight of `bits` if it is an independent set of `g`.
pub fn independent_weight<W: Weight>(g: &Graph<W>, bits: &str) -> Result<Option<W>> {
    let x = Assignment::from_bitstring(bits)?;
    let set = x.ones();
    if x.len() != g.n() {
        return Err(Error::LengthMismatch {
            expected: g.n(),
            got: x.len(),
        });
    }
    Ok(if g.is_independent_set(&set)? {
        Some(g.set_weight(&set))
    } else {
        None
    })
}

/// Fraction of shots that are independent sets of optimal weight.
pub fn p_mis<W: Weight>(samples: &SampleSet, g: &Graph<W>, optimum: W) -> Result<f64> {
    if samples.shots == 0 {
        return Ok(0.0);
    }
    let mut hit = 0u64;
    for (k, &c) in &samples.counts {
        if matches!(independent_weight(g, k)?, Some(w) if is_optimal(w, optimum)) {
            hit += c;
        }
    }
    Ok(hit as f64 / samples.shots as f64)
}

/// Probability mass on optimal independent sets of a distribution over the
/// `2ⁿ` basis states (bit `i` of the index is vertex `i`).
pub fn p_mis_distribution<W: Weight>(dist: &[f64], g: &Graph<W>, optimum: W) -> Result<f64> {
    if dist.len() != 1usize << g.n() {
        return Err(Error::LengthMismatch {
            expected: 1 << g.n(),
            got: dist.len(),
        });
    }
    let mut mass = 0.0;
    for (s, &p) in dist.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let set = Assignment::from_index(g.n(), s as u64).ones();
        if g.is_independent_set(&set)? && is_optimal(g.set_weight(&set), optimum) {
            mass += p;
        }
    }
    Ok(mass)
}

/// Shots needed for 99% confidence of seeing the optimum at least once,
/// `ln(1−0.99)/ln(1−p)`; 1 for `p ≥ 0.99`, `+∞` for `p = 0`.
pub fn tts_q(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "success probability must be in [0,1], got {p}"
        )));
    }
    if p >= TTS_TARGET {
        return Ok(1.0);
    }
    if p == 0.0 {
        return Ok(f64::INFINITY);
    }
    // base 10 keeps decimal inputs such as 0.9 (two shots) exact
    Ok(TTS_MISS.log10() / (1.0 - p).log10())
}

/// `|(value − optimum)/optimum|`.
pub fn gap(value: f64, optimum: f64) -> Result<f64> {
    if optimum == 0.0 {
        return Err(Error::Undefined("gap relative to a zero optimum".into()));
    }
    Ok(((value - optimum) / optimum).abs())
}

/// Independent shots as `(qubo cost, bitstring, weight, count)`, best first
/// (cost ascending, ties by bitstring).
fn ranked_valid_shots<W: Weight>(
    samples: &SampleSet,
    g: &Graph<W>,
) -> Result<Vec<(f64, String, f64, u64)>> {
    let alpha = g.default_penalty();
    let mut rows = Vec::new();
    for (k, &c) in &samples.counts {
        if let Some(w) = independent_weight(g, k)? {
            let cost = g
                .qubo_cost(&Assignment::from_bitstring(k)?, alpha)?
                .as_f64();
            rows.push((cost, k.clone(), w.as_f64(), c));
        }
    }
    rows.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    Ok(rows)
}

/// Mean gap over the best `⌈keep·shots⌉` independent shots. Shots that are
/// not independent sets are filtered out first; `None` if none remain.
pub fn truncated_avg_gap<W: Weight>(
    samples: &SampleSet,
    g: &Graph<W>,
    optimum: W,
    keep_fraction: f64,
) -> Result<Option<f64>> {
    if !(keep_fraction > 0.0 && keep_fraction <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "keep fraction must be in (0,1], got {keep_fraction}"
        )));
    }
    let opt = optimum.as_f64();
    let rows = ranked_valid_shots(samples, g)?;
    let valid: u64 = rows.iter().map(|r| r.3).sum();
    if valid == 0 {
        return Ok(None);
    }
    let keep = ((keep_fraction * valid as f64).ceil() as u64).clamp(1, valid);
    let mut left = keep;
    let mut sum = 0.0;
    for (_, _, w, c) in rows {
        let take = c.min(left);
        sum += take as f64 * gap(w, opt)?;
        left -= take;
        if left == 0 {
            break;
        }
    }
    Ok(Some(sum / keep as f64))
}

/// Mean gap over all independent shots.
pub fn avg_gap<W: Weight>(samples: &SampleSet, g: &Graph<W>, optimum: W) -> Result<Option<f64>> {
    truncated_avg_gap(samples, g, optimum, 1.0)
}

/// Median of finite values (mean of the middle pair for even counts).
pub fn median(values: &[f64]) -> Option<f64> {
    let mut v: Vec<f64> = values.to_vec();
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    })
}

pub fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}
