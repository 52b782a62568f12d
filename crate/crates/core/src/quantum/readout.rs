//! Classical per-qubit readout channel and its inverse.
//!
//! On each qubit the channel acts on `(P(0), P(1))` as
//! `Λ = [[1−p, q], [p, 1−q]]` with false-positive rate `p` and
//! false-negative rate `q`; `Λ⁻¹ = [[1−q, −q], [−p, 1−p]] / (1−p−q)`.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::SampleSet;
use crate::error::{Error, Result};
use crate::rng::rng;

pub const MAX_READOUT_QUBITS: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub p: f64,
    pub q: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mitigated {
    /// `Λ⁻¹` applied to the input; may hold negative entries.
    pub raw: Vec<f64>,
    /// `raw` clipped at zero and renormalized.
    pub clipped: Vec<f64>,
}

impl NoiseModel {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        let nm = Self { p, q };
        nm.validate()?;
        Ok(nm)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("p", self.p), ("q", self.q)] {
            if !(0.0..1.0).contains(&v) {
                return Err(Error::InvalidParameter(format!(
                    "readout rate {name} must be in [0,1), got {v}"
                )));
            }
        }
        Ok(())
    }

    pub fn matrix(&self) -> [[f64; 2]; 2] {
        [[1.0 - self.p, self.q], [self.p, 1.0 - self.q]]
    }

    pub fn inverse(&self) -> Result<[[f64; 2]; 2]> {
        let det = 1.0 - self.p - self.q;
        if det <= 0.0 {
            return Err(Error::SingularChannel(det));
        }
        Ok([
            [(1.0 - self.q) / det, -self.q / det],
            [-self.p / det, (1.0 - self.p) / det],
        ])
    }

    /// Parses `p=0.03,q=0.08`.
    pub fn parse(text: &str) -> Result<Self> {
        let (mut p, mut q) = (None, None);
        for part in text.split(',') {
            let (k, v) = part.split_once('=').ok_or_else(|| {
                Error::InvalidParameter(format!("expected key=value, got {part:?}"))
            })?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("bad number {v:?}")))?;
            match k.trim() {
                "p" => p = Some(v),
                "q" => q = Some(v),
                other => {
                    return Err(Error::Unknown {
                        what: "noise parameter",
                        name: other.to_string(),
                    })
                }
            }
        }
        match (p, q) {
            (Some(p), Some(q)) => Self::new(p, q),
            _ => Err(Error::InvalidParameter("noise needs both p and q".into())),
        }
    }
}

fn qubits_of(len: usize) -> Result<usize> {
    if !len.is_power_of_two() {
        return Err(Error::InvalidParameter(format!(
            "distribution length {len} is not a power of two"
        )));
    }
    let n = len.trailing_zeros() as usize;
    if n > MAX_READOUT_QUBITS {
        return Err(Error::TooLarge {
            n,
            max: MAX_READOUT_QUBITS,
        });
    }
    Ok(n)
}

/// Applies a 2×2 matrix on every qubit axis of a length-`2ⁿ` vector.
fn apply_per_qubit(dist: &[f64], m: [[f64; 2]; 2]) -> Result<Vec<f64>> {
    let n = qubits_of(dist.len())?;
    let mut out = dist.to_vec();
    for k in 0..n {
        let bit = 1usize << k;
        for s in 0..out.len() {
            if s & bit == 0 {
                let (a, b) = (out[s], out[s | bit]);
                out[s] = m[0][0] * a + m[0][1] * b;
                out[s | bit] = m[1][0] * a + m[1][1] * b;
            }
        }
    }
    Ok(out)
}

pub fn apply_readout_noise(dist: &[f64], nm: &NoiseModel) -> Result<Vec<f64>> {
    nm.validate()?;
    apply_per_qubit(dist, nm.matrix())
}

pub fn mitigate_readout(dist: &[f64], nm: &NoiseModel) -> Result<Mitigated> {
    nm.validate()?;
    let raw = apply_per_qubit(dist, nm.inverse()?)?;
    let pos: f64 = raw.iter().map(|x| x.max(0.0)).sum();
    let clipped = if pos > 0.0 {
        raw.iter().map(|x| x.max(0.0) / pos).collect()
    } else {
        vec![0.0; raw.len()]
    };
    Ok(Mitigated { raw, clipped })
}

/// Passes every shot through the channel bit by bit.
pub fn corrupt_samples(samples: &SampleSet, nm: &NoiseModel, seed: u64) -> Result<SampleSet> {
    nm.validate()?;
    let mut r = rng(seed);
    let mut out = SampleSet::empty();
    for (bits, &count) in &samples.counts {
        for _ in 0..count {
            let noisy: String = bits
                .chars()
                .map(|c| {
                    let flip = if c == '1' { nm.q } else { nm.p };
                    match (c, r.gen::<f64>() < flip) {
                        ('1', true) => '0',
                        ('0', true) => '1',
                        (c, false) => c,
                        _ => unreachable!(),
                    }
                })
                .collect();
            out.add(noisy, 1);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_qubit_examples() {
        let nm = NoiseModel::new(0.03, 0.08).unwrap();
        let noisy = apply_readout_noise(&[1.0, 0.0], &nm).unwrap();
        assert!((noisy[0] - 0.97).abs() < 1e-15 && (noisy[1] - 0.03).abs() < 1e-15);
        let inv = nm.inverse().unwrap();
        let expect = [[0.92 / 0.89, -0.08 / 0.89], [-0.03 / 0.89, 0.97 / 0.89]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((inv[i][j] - expect[i][j]).abs() < 1e-15);
            }
        }
        let ident = NoiseModel::new(0.0, 0.0).unwrap();
        assert_eq!(
            apply_readout_noise(&[0.2, 0.3, 0.1, 0.4], &ident).unwrap(),
            vec![0.2, 0.3, 0.1, 0.4]
        );
    }

    #[test]
    fn marginals_follow_channel_algebra() {
        let nm = NoiseModel::new(0.05, 0.1).unwrap();
        let d = [0.1, 0.2, 0.3, 0.4];
        let out = apply_readout_noise(&d, &nm).unwrap();
        // qubit 0 is bit 0: excited in states 1 and 3
        let p = d[1] + d[3];
        let p2 = out[1] + out[3];
        assert!((p2 - ((1.0 - nm.q) * p + nm.p * (1.0 - p))).abs() < 1e-15);
    }

    #[test]
    fn clipping_handles_negative_quasi_probabilities() {
        let nm = NoiseModel::new(0.03, 0.08).unwrap();
        // an empirical distribution with no |0⟩ counts pushes mass negative
        let m = mitigate_readout(&[0.0, 1.0], &nm).unwrap();
        assert!(m.raw[0] < 0.0);
        assert!((m.raw.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((m.clipped.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(m.clipped.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn rejections() {
        assert!(NoiseModel::new(1.0, 0.0).is_err());
        let singular = NoiseModel { p: 0.6, q: 0.5 };
        assert!(matches!(
            mitigate_readout(&[1.0, 0.0], &singular),
            Err(Error::SingularChannel(_))
        ));
        assert!(
            apply_readout_noise(&[0.5, 0.25, 0.25], &NoiseModel::new(0.1, 0.1).unwrap()).is_err()
        );
        assert_eq!(
            NoiseModel::parse("p=0.03,q=0.08").unwrap(),
            NoiseModel { p: 0.03, q: 0.08 }
        );
        assert!(NoiseModel::parse("p=0.03").is_err());
    }

    #[test]
    fn corrupted_marginal_is_close() {
        let mut s = SampleSet::empty();
        s.add("0".into(), 20_000);
        let noisy = corrupt_samples(&s, &NoiseModel::new(0.1, 0.0).unwrap(), 1).unwrap();
        let ones = *noisy.counts.get("1").unwrap_or(&0) as f64;
        // 5σ binomial band
        assert!((ones - 2000.0).abs() < 5.0 * (20_000.0f64 * 0.1 * 0.9).sqrt());
        assert_eq!(noisy.shots, 20_000);
    }
}
