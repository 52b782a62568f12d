//! Piecewise-linear control schedules `Ω(t)`, `δ(t)` in rad/μs.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default peak Rabi frequency, `2π·2 MHz`.
pub const DEFAULT_OMEGA_MAX: f64 = 2.0 * PI * 2.0;
/// Default detuning sweep endpoint magnitude, `2π·4 MHz`.
pub const DEFAULT_DELTA_MAX: f64 = 2.0 * PI * 4.0;
pub const DEFAULT_DURATION_US: f64 = 4.0;
/// Fraction of the duration spent at the Rabi plateau.
pub const DEFAULT_PLATEAU: f64 = 0.6;

/// Piecewise-linear function through `(t, value)` knots. Outside the knot
/// range it continues the first/last segment linearly, which the
/// integrator's out-of-range substeps rely on.
#[derive(Clone, Debug, PartialEq)]
pub struct Pwl {
    knots: Vec<(f64, f64)>,
}

impl Pwl {
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.is_empty() {
            return Err(Error::InvalidParameter(
                "control needs at least one point".into(),
            ));
        }
        if knots.iter().any(|(t, v)| !t.is_finite() || !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "control points must be finite".into(),
            ));
        }
        if knots.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidParameter(
                "control times must be strictly increasing".into(),
            ));
        }
        Ok(Self { knots })
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    fn segment(&self, t: f64) -> usize {
        let k = self.knots.len();
        if k < 2 {
            return 0;
        }
        // index i of the segment [t_i, t_{i+1}] used at t
        self.knots
            .partition_point(|&(ti, _)| ti <= t)
            .saturating_sub(1)
            .min(k - 2)
    }

    fn line(&self, i: usize) -> (f64, f64, f64) {
        if self.knots.len() < 2 {
            return (self.knots[0].0, self.knots[0].1, 0.0);
        }
        let (t0, v0) = self.knots[i];
        let (t1, v1) = self.knots[i + 1];
        (t0, v0, (v1 - v0) / (t1 - t0))
    }

    pub fn value(&self, t: f64) -> f64 {
        let (t0, v0, slope) = self.line(self.segment(t));
        v0 + slope * (t - t0)
    }

    /// Antiderivative with `F(t_0) = 0`.
    fn antiderivative(&self, t: f64) -> f64 {
        let seg = self.segment(t);
        let mut acc = 0.0;
        for i in 0..seg {
            let (t0, v0) = self.knots[i];
            let (t1, v1) = self.knots[i + 1];
            acc += 0.5 * (v0 + v1) * (t1 - t0);
        }
        let (t0, v0, slope) = self.line(seg);
        let dt = t - t0;
        acc + v0 * dt + 0.5 * slope * dt * dt
    }

    /// `∫_a^b f(t) dt`, exact for the (extended) piecewise-linear function.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        self.antiderivative(b) - self.antiderivative(a)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    pub duration_us: f64,
    pub omega: Pwl,
    pub delta: Pwl,
}

/// JSON form: `{"duration_us", "omega": [[t, v], ...], "delta": [[t, v], ...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleFile {
    pub duration_us: f64,
    pub omega: Vec<[f64; 2]>,
    pub delta: Vec<[f64; 2]>,
}

const TIME_TOL: f64 = 1e-12;

impl Schedule {
    /// Checks the time grids only: both controls run from 0 to the duration.
    pub fn new(duration_us: f64, omega: Vec<(f64, f64)>, delta: Vec<(f64, f64)>) -> Result<Self> {
        if !(duration_us.is_finite() && duration_us > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "duration must be positive, got {duration_us}"
            )));
        }
        let omega = Pwl::new(omega)?;
        let delta = Pwl::new(delta)?;
        for (name, f) in [("omega", &omega), ("delta", &delta)] {
            let k = f.knots();
            let span_ok = k.len() >= 2
                && k[0].0.abs() <= TIME_TOL
                && (k[k.len() - 1].0 - duration_us).abs() <= TIME_TOL * duration_us.max(1.0);
            if !span_ok {
                return Err(Error::InvalidParameter(format!(
                    "{name} points must start at t=0 and end at t=duration"
                )));
            }
        }
        Ok(Self {
            duration_us,
            omega,
            delta,
        })
    }

    /// Constant controls over `[0, duration]`, for tests and calibration.
    pub fn constant(duration_us: f64, omega: f64, delta: f64) -> Result<Self> {
        Self::new(
            duration_us,
            vec![(0.0, omega), (duration_us, omega)],
            vec![(0.0, delta), (duration_us, delta)],
        )
    }

    /// Annealing shape: `Ω` ramps `0 → omega_max`, holds over the middle
    /// `plateau` fraction, ramps back to 0; `δ` sweeps linearly from
    /// `-delta_max` to `+delta_max`.
    pub fn anneal(duration_us: f64, omega_max: f64, delta_max: f64, plateau: f64) -> Result<Self> {
        if !(plateau > 0.0 && plateau < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "plateau fraction must be in (0,1), got {plateau}"
            )));
        }
        let ramp = 0.5 * (1.0 - plateau) * duration_us;
        let s = Self::new(
            duration_us,
            vec![
                (0.0, 0.0),
                (ramp, omega_max),
                (duration_us - ramp, omega_max),
                (duration_us, 0.0),
            ],
            vec![(0.0, -delta_max), (duration_us, delta_max)],
        )?;
        s.validate_annealing()?;
        Ok(s)
    }

    pub fn default_anneal(duration_us: f64) -> Result<Self> {
        Self::anneal(
            duration_us,
            DEFAULT_OMEGA_MAX,
            DEFAULT_DELTA_MAX,
            DEFAULT_PLATEAU,
        )
    }

    /// Same shape, every time stretched by `factor`.
    pub fn stretched(&self, factor: f64) -> Result<Self> {
        let scale = |f: &Pwl| f.knots().iter().map(|&(t, v)| (t * factor, v)).collect();
        Self::new(
            self.duration_us * factor,
            scale(&self.omega),
            scale(&self.delta),
        )
    }

    /// Annealing boundary conditions: `Ω(0) = Ω(T) = 0`, `δ(0) < 0 < δ(T)`.
    pub fn validate_annealing(&self) -> Result<()> {
        let t = self.duration_us;
        if self.omega.value(0.0) != 0.0 || self.omega.value(t) != 0.0 {
            return Err(Error::InvalidParameter(
                "annealing schedule needs omega(0) = omega(T) = 0".into(),
            ));
        }
        if !(self.delta.value(0.0) < 0.0 && self.delta.value(t) > 0.0) {
            return Err(Error::InvalidParameter(
                "annealing schedule needs delta(0) < 0 < delta(T)".into(),
            ));
        }
        Ok(())
    }

    pub fn to_file(&self) -> ScheduleFile {
        let pts = |f: &Pwl| f.knots().iter().map(|&(t, v)| [t, v]).collect();
        ScheduleFile {
            duration_us: self.duration_us,
            omega: pts(&self.omega),
            delta: pts(&self.delta),
        }
    }

    pub fn from_file(file: &ScheduleFile) -> Result<Self> {
        let pts = |v: &[[f64; 2]]| v.iter().map(|p| (p[0], p[1])).collect();
        Self::new(file.duration_us, pts(&file.omega), pts(&file.delta))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_file())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_file(&serde_json::from_str(text)?)
    }
}
