//! State-vector emulation of Rydberg annealing, readout noise, mitigation
//! and bitstring repair.

pub mod evolve;
pub mod readout;
pub mod schedule;

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::bitset::Bitset;
use crate::error::{Error, Result};
use crate::graph::{Assignment, Graph};
use crate::rng::rng;
use crate::scalar::Weight;

pub use evolve::{
    build_hamiltonian, evolve, probabilities, HamiltonianSpec, DEFAULT_DT_US, MAX_QUBITS,
};
pub use readout::{apply_readout_noise, corrupt_samples, mitigate_readout, Mitigated, NoiseModel};
pub use schedule::Schedule;

/// Measured bitstrings with counts. Character `i` of a key is qubit `i`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleSet {
    pub shots: u64,
    pub counts: BTreeMap<String, u64>,
}

impl SampleSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn add(&mut self, bits: String, count: u64) {
        if count > 0 {
            *self.counts.entry(bits).or_insert(0) += count;
            self.shots += count;
        }
    }

    /// Checks the count total and that all keys are `0/1` strings of one length.
    pub fn validate(&self) -> Result<Option<usize>> {
        let total: u64 = self.counts.values().sum();
        if total != self.shots {
            return Err(Error::InvalidParameter(format!(
                "counts sum to {total}, shots is {}",
                self.shots
            )));
        }
        let mut len = None;
        for k in self.counts.keys() {
            Assignment::from_bitstring(k)?;
            match len {
                None => len = Some(k.len()),
                Some(l) if l != k.len() => {
                    return Err(Error::LengthMismatch {
                        expected: l,
                        got: k.len(),
                    })
                }
                _ => {}
            }
        }
        Ok(len)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let s: Self = serde_json::from_str(text)?;
        s.validate()?;
        Ok(s)
    }

    /// Empirical distribution over `2ⁿ` basis states.
    pub fn to_distribution(&self, n: usize) -> Result<Vec<f64>> {
        if n > readout::MAX_READOUT_QUBITS {
            return Err(Error::TooLarge {
                n,
                max: readout::MAX_READOUT_QUBITS,
            });
        }
        if self.shots == 0 {
            return Err(Error::InvalidParameter("empty sample set".into()));
        }
        let mut d = vec![0.0; 1 << n];
        for (k, &c) in &self.counts {
            if k.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    got: k.len(),
                });
            }
            d[Assignment::from_bitstring(k)?.to_index() as usize] += c as f64 / self.shots as f64;
        }
        Ok(d)
    }
}

pub fn bitstring(n: usize, index: usize) -> String {
    Assignment::from_index(n, index as u64).to_bitstring()
}

/// `shots` i.i.d. draws from `|ψ|²`.
pub fn sample(psi: &[Complex64], n_shots: u64, seed: u64) -> Result<SampleSet> {
    sample_distribution(&probabilities(psi), n_shots, seed)
}

/// `shots` i.i.d. draws from a nonnegative vector of length `2ⁿ`
/// (normalized internally).
pub fn sample_distribution(p: &[f64], n_shots: u64, seed: u64) -> Result<SampleSet> {
    if !p.len().is_power_of_two() {
        return Err(Error::InvalidParameter(
            "state length is not a power of two".into(),
        ));
    }
    let n = p.len().trailing_zeros() as usize;
    let mut cdf = Vec::with_capacity(p.len());
    let mut acc = 0.0;
    for &x in p {
        if !(x >= 0.0 && x.is_finite()) {
            return Err(Error::InvalidParameter(format!("bad probability {x}")));
        }
        acc += x;
        cdf.push(acc);
    }
    if !(acc > 0.0) {
        return Err(Error::InvalidParameter("distribution has no mass".into()));
    }
    let mut r = rng(seed);
    let mut hits = vec![0u64; p.len()];
    for _ in 0..n_shots {
        let x = r.gen::<f64>() * acc;
        // first index whose cumulative mass exceeds x, skipping zero-mass states
        let i = cdf.partition_point(|&c| c <= x).min(p.len() - 1);
        hits[i] += 1;
    }
    let mut out = SampleSet::empty();
    for (i, &h) in hits.iter().enumerate() {
        out.add(bitstring(n, i), h);
    }
    Ok(out)
}

/// Makes one assignment independent, then maximal.
///
/// Removal: among vertices on violated edges, the one with the most
/// violated incident edges; ties by lowest weight, then lowest index.
/// Augmentation: free vertices by weight descending, index ascending.
pub fn repair_assignment<W: Weight>(g: &Graph<W>, x: &Assignment) -> Result<Assignment> {
    let n = g.n();
    if x.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: x.len(),
        });
    }
    let mut on = Bitset::from_iter(n, x.ones());
    loop {
        let mut pick: Option<(usize, usize)> = None;
        for v in on.iter() {
            let k = g.neighbor_mask(v).intersection_count(&on);
            if k == 0 {
                continue;
            }
            pick = match pick {
                None => Some((v, k)),
                Some((u, ku)) => {
                    let better = k > ku || (k == ku && g.weight(v) < g.weight(u));
                    if better {
                        Some((v, k))
                    } else {
                        Some((u, ku))
                    }
                }
            };
        }
        match pick {
            Some((v, _)) => on.remove(v),
            None => break,
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        g.weight(b)
            .partial_cmp(&g.weight(a))
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    for v in order {
        if !on.contains(v) && !g.neighbor_mask(v).intersects(&on) {
            on.insert(v);
        }
    }
    Ok(Assignment::indicator(n, &on.iter().collect::<Vec<_>>()))
}

/// Repairs every distinct string; each input's count moves to its repair.
pub fn repair_bitstrings<W: Weight>(samples: &SampleSet, g: &Graph<W>) -> Result<SampleSet> {
    let mut out = SampleSet::empty();
    for (k, &c) in &samples.counts {
        let fixed = repair_assignment(g, &Assignment::from_bitstring(k)?)?;
        out.add(fixed.to_bitstring(), c);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_basis_state() {
        let mut psi = vec![Complex64::new(0.0, 0.0); 8];
        psi[2] = Complex64::new(1.0, 0.0);
        let s = sample(&psi, 100, 5).unwrap();
        assert_eq!(s.counts.len(), 1);
        // index 2 sets bit 1, i.e. qubit 1
        assert_eq!(s.counts["010"], 100);
    }

    #[test]
    fn sample_uniform_qubit() {
        let a = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let s = sample(&[a, a], 100_000, 11).unwrap();
        let ones = s.counts["1"] as f64;
        assert!((ones - 50_000.0).abs() < 5.0 * (100_000.0f64 * 0.25).sqrt());
        assert_eq!(s, sample(&[a, a], 100_000, 11).unwrap());
        assert_ne!(s, sample(&[a, a], 100_000, 12).unwrap());
    }

    #[test]
    fn repair_examples() {
        let p3 = Graph::<f64>::build(3, &[(0, 1), (1, 2)], None).unwrap();
        let r = |g: &Graph, s: &str| {
            repair_assignment(g, &Assignment::from_bitstring(s).unwrap())
                .unwrap()
                .to_bitstring()
        };
        // 0 and 1 tie on violated edges and weight; the lower index goes
        assert_eq!(r(&p3, "110"), "010");
        // both edges violated at 1
        assert_eq!(r(&p3, "111"), "101");
        assert_eq!(r(&p3, "100"), "101");
        assert_eq!(r(&p3, "101"), "101");
        let k3 = Graph::<f64>::build(3, &[(0, 1), (1, 2), (0, 2)], None).unwrap();
        assert_eq!(r(&k3, "111"), "001");
        let heavy = Graph::build(3, &[(0, 1), (1, 2)], Some(vec![1.0, 5.0, 1.0])).unwrap();
        assert_eq!(r(&heavy, "110"), "010");
    }

    #[test]
    fn repair_keeps_counts() {
        let p3 = Graph::<f64>::build(3, &[(0, 1), (1, 2)], None).unwrap();
        let mut s = SampleSet::empty();
        s.add("111".into(), 3);
        s.add("101".into(), 2);
        s.add("000".into(), 1);
        let fixed = repair_bitstrings(&s, &p3).unwrap();
        assert_eq!(fixed.shots, 6);
        assert_eq!(fixed.counts["101"], 6);
    }

    #[test]
    fn sample_set_json() {
        let mut s = SampleSet::empty();
        s.add("0101".into(), 4);
        s.add("1000".into(), 1);
        let back = SampleSet::from_json(&s.to_json().unwrap()).unwrap();
        assert_eq!(back, s);
        assert!(SampleSet::from_json(r#"{"shots": 3, "counts": {"01": 2}}"#).is_err());
        assert!(SampleSet::from_json(r#"{"shots": 3, "counts": {"01": 2, "1": 1}}"#).is_err());
        let d = back.to_distribution(4).unwrap();
        assert!((d[0b1010] - 0.8).abs() < 1e-15);
    }
}
