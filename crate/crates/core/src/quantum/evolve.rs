//! Rydberg Hamiltonian and state-vector evolution.
//!
//! `H(t)/ħ = Ω(t)/2 Σ σˣ_i − δ(t) Σ ε_i n_i + Σ_{i<j} U_ij n_i n_j`.
//!
//! Basis index bit `i` is the occupation of atom `i`. One step of size `h`
//! is the fourth-order triple-jump composition of the symmetric splitting
//! `C(h/2) · D(h) · C(h/2)`: the cost part `C` is diagonal at all times, so
//! its flow is the exact phase `exp(i ∫δ · e − i h · u)`; the drive part `D`
//! is a product of single-qubit rotations evaluated at the midpoint of its
//! substep. Every factor is unitary.

use num_complex::Complex64;

use super::schedule::Schedule;
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::scalar::Weight;

/// `C6/h` in GHz·μm⁶.
pub const C6_GHZ_UM6: f64 = 138.0;
/// `C6/ħ` in rad/μs · μm⁶.
pub const C6_RAD_PER_US: f64 = 2.0 * std::f64::consts::PI * C6_GHZ_UM6 * 1e3;
pub const MAX_QUBITS: usize = 22;
/// Physical blockade radius used for instances without a physical length
/// scale (box model, King's lattice): the disk radius maps to this.
pub const DEFAULT_BLOCKADE_RADIUS_UM: f64 = 6.5;
pub const DEFAULT_DT_US: f64 = 0.002;
pub const NORM_TOL: f64 = 1e-8;

/// `U(d)/ħ = C6/d⁶` in rad/μs for `d` in μm.
pub fn interaction(d_um: f64) -> f64 {
    C6_RAD_PER_US / d_um.powi(6)
}

#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianSpec {
    pub n: usize,
    /// Row-major `n × n`, symmetric, zero diagonal, rad/μs.
    pub interactions: Vec<f64>,
    /// `ε_i ∈ [0, 1]`.
    pub site_weights: Vec<f64>,
    pub schedule: Schedule,
}

impl HamiltonianSpec {
    pub fn new(
        positions_um: &[(f64, f64)],
        site_weights: Vec<f64>,
        schedule: Schedule,
    ) -> Result<Self> {
        let n = positions_um.len();
        if n > MAX_QUBITS {
            return Err(Error::TooLarge { n, max: MAX_QUBITS });
        }
        if site_weights.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: site_weights.len(),
            });
        }
        if let Some(i) = site_weights.iter().position(|e| !(0.0..=1.0).contains(e)) {
            return Err(Error::InvalidWeight {
                index: i,
                value: site_weights[i].to_string(),
            });
        }
        let mut interactions = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let (a, b) = (positions_um[i], positions_um[j]);
                let d = (a.0 - b.0).hypot(a.1 - b.1);
                if !(d > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "atoms {i} and {j} coincide"
                    )));
                }
                let u = interaction(d);
                interactions[i * n + j] = u;
                interactions[j * n + i] = u;
            }
        }
        Ok(Self {
            n,
            interactions,
            site_weights,
            schedule,
        })
    }

    pub fn u(&self, i: usize, j: usize) -> f64 {
        self.interactions[i * self.n + j]
    }

    /// Diagonal terms per basis state: `(Σ ε_i n_i, Σ_{i<j} U_ij n_i n_j)`.
    fn diagonal(&self) -> (Vec<f64>, Vec<f64>) {
        let dim = 1usize << self.n;
        let mut e = vec![0.0; dim];
        let mut u = vec![0.0; dim];
        for s in 1..dim {
            let low = s.trailing_zeros() as usize;
            let rest = s & (s - 1);
            e[s] = e[rest] + self.site_weights[low];
            let mut bits = rest;
            let mut acc = u[rest];
            while bits != 0 {
                let j = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                acc += self.u(low, j);
            }
            u[s] = acc;
        }
        (e, u)
    }
}

/// Positions of an instance in μm (see [`DEFAULT_BLOCKADE_RADIUS_UM`]).
pub fn physical_positions<W: Weight>(inst: &Instance<W>) -> Result<Vec<(f64, f64)>> {
    let pos = inst.positions()?;
    let scale = if inst.meta.spacing_um.is_some() {
        1.0
    } else if inst.disk_radius > 0.0 {
        DEFAULT_BLOCKADE_RADIUS_UM / inst.disk_radius
    } else {
        return Err(Error::InvalidParameter(
            "instance has no length scale".into(),
        ));
    };
    Ok(pos.iter().map(|&(x, y)| (x * scale, y * scale)).collect())
}

/// Hamiltonian over all atom pairs of the instance, `ε_i = w_i / max w`.
pub fn build_hamiltonian<W: Weight>(
    inst: &Instance<W>,
    schedule: Schedule,
) -> Result<HamiltonianSpec> {
    if inst.n() > MAX_QUBITS {
        return Err(Error::TooLarge {
            n: inst.n(),
            max: MAX_QUBITS,
        });
    }
    let pos = physical_positions(inst)?;
    let w: Vec<f64> = inst.graph.weights().iter().map(Weight::as_f64).collect();
    let max = w.iter().copied().fold(0.0, f64::max);
    let eps = w
        .iter()
        .map(|&x| if max > 0.0 { x / max } else { 0.0 })
        .collect();
    HamiltonianSpec::new(&pos, eps, schedule)
}

fn apply_cost(psi: &mut [Complex64], e: &[f64], u: &[f64], delta_integral: f64, h: f64) {
    for ((a, &es), &us) in psi.iter_mut().zip(e).zip(u) {
        let phase = delta_integral * es - h * us;
        *a *= Complex64::from_polar(1.0, phase);
    }
}

fn apply_drive(psi: &mut [Complex64], n: usize, theta: f64) {
    let (s, c) = theta.sin_cos();
    let mis = Complex64::new(0.0, -s);
    for q in 0..n {
        let bit = 1usize << q;
        for base in 0..psi.len() {
            if base & bit != 0 {
                continue;
            }
            let (a, b) = (psi[base], psi[base | bit]);
            psi[base] = a * c + b * mis;
            psi[base | bit] = a * mis + b * c;
        }
    }
}

const CBRT2: f64 = 1.259_921_049_894_873_2;
/// Triple-jump weights `(w1, w0, w1)`.
const W1: f64 = 1.0 / (2.0 - CBRT2);
const W0: f64 = -CBRT2 / (2.0 - CBRT2);

pub fn norm_sqr(psi: &[Complex64]) -> f64 {
    psi.iter().map(|a| a.norm_sqr()).sum()
}

/// Evolves `|0…0⟩` over the schedule with steps of at most `dt` μs (the
/// step is shrunk so that an integer number of steps spans the duration).
pub fn evolve(h: &HamiltonianSpec, dt: f64) -> Result<Vec<Complex64>> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "dt must be positive, got {dt}"
        )));
    }
    let sched = &h.schedule;
    let steps = (sched.duration_us / dt).ceil().max(1.0) as usize;
    let step = sched.duration_us / steps as f64;
    let (e, u) = h.diagonal();
    let mut psi = vec![Complex64::new(0.0, 0.0); 1usize << h.n];
    psi[0] = Complex64::new(1.0, 0.0);
    for k in 0..steps {
        let mut t = k as f64 * step;
        for w in [W1, W0, W1] {
            let sub = w * step;
            let mid = t + 0.5 * sub;
            apply_cost(&mut psi, &e, &u, sched.delta.integral(t, mid), 0.5 * sub);
            apply_drive(&mut psi, h.n, 0.5 * sched.omega.value(mid) * sub);
            apply_cost(
                &mut psi,
                &e,
                &u,
                sched.delta.integral(mid, t + sub),
                0.5 * sub,
            );
            t += sub;
        }
    }
    let drift = (norm_sqr(&psi) - 1.0).abs();
    if drift > NORM_TOL {
        return Err(Error::NormDrift { drift });
    }
    Ok(psi)
}

pub fn probabilities(psi: &[Complex64]) -> Vec<f64> {
    psi.iter().map(|a| a.norm_sqr()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn interaction_scale() {
        // 138 GHz·μm⁶ / 5⁶ μm⁶ = 8.832 MHz
        let u = interaction(5.0) / (2.0 * PI);
        assert!((u - 8.832).abs() < 1e-12);
        let ratio = interaction(5.0 * 3f64.sqrt()) / interaction(5.0);
        assert!((ratio - 1.0 / 27.0).abs() < 1e-15);
    }

    #[test]
    fn zero_hamiltonian_is_identity() {
        let s = Schedule::constant(1.0, 0.0, 0.0).unwrap();
        let h = HamiltonianSpec::new(&[(0.0, 0.0), (5.0, 0.0)], vec![1.0, 1.0], s).unwrap();
        let psi = evolve(&h, 0.01).unwrap();
        assert!((psi[0] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn pi_pulse() {
        let omega = 2.0 * PI;
        let s = Schedule::constant(PI / omega, omega, 0.0).unwrap();
        let h = HamiltonianSpec::new(&[(0.0, 0.0)], vec![1.0], s).unwrap();
        let p = probabilities(&evolve(&h, 0.01).unwrap());
        assert!((p[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn diagonal_matches_direct_sum() {
        let pos = [(0.0, 0.0), (5.0, 0.0), (2.5, 4.0), (9.0, 1.0)];
        let s = Schedule::constant(1.0, 0.0, 0.0).unwrap();
        let h = HamiltonianSpec::new(&pos, vec![0.1, 0.2, 0.3, 0.4], s).unwrap();
        let (e, u) = h.diagonal();
        for st in 0..16usize {
            let on: Vec<usize> = (0..4).filter(|i| st >> i & 1 == 1).collect();
            let ee: f64 = on.iter().map(|&i| h.site_weights[i]).sum();
            let uu: f64 = on
                .iter()
                .flat_map(|&i| on.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
                .map(|(i, j)| h.u(i, j))
                .sum();
            assert!((e[st] - ee).abs() < 1e-12);
            assert!((u[st] - uu).abs() < 1e-9 * uu.max(1.0));
        }
    }

    #[test]
    fn rejects_bad_input() {
        let s = Schedule::constant(1.0, 0.0, 0.0).unwrap();
        assert!(HamiltonianSpec::new(&[(0.0, 0.0)], vec![1.5], s.clone()).is_err());
        assert!(
            HamiltonianSpec::new(&[(0.0, 0.0), (0.0, 0.0)], vec![1.0, 1.0], s.clone()).is_err()
        );
        let many: Vec<_> = (0..23).map(|i| (i as f64 * 5.0, 0.0)).collect();
        assert!(matches!(
            HamiltonianSpec::new(&many, vec![1.0; 23], s.clone()),
            Err(Error::TooLarge { .. })
        ));
        let h = HamiltonianSpec::new(&[(0.0, 0.0)], vec![1.0], s).unwrap();
        assert!(evolve(&h, 0.0).is_err());
    }
}
