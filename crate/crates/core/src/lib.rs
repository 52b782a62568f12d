//! Generation, hardness analysis, exact solving and annealing emulation for
//! weighted maximum independent set on unit-disk graphs.
//!
//! Graph-level code is generic over the weight scalar ([`Weight`]); the
//! aliases below fix the common choices.

pub mod bench;
pub mod bitset;
pub mod error;
pub mod generate;
pub mod graph;
pub mod hardness;
pub mod instance;
pub mod quantum;
pub mod rng;
pub mod scalar;
pub mod solver;
pub mod weighting;

pub use error::{Error, Result};
pub use graph::{Assignment, Graph};
pub use instance::{Instance, InstanceFile, InstanceMeta};
pub use scalar::Weight;

pub type Rational = num_rational::Rational64;

pub type Graph64 = Graph<f64>;
pub type Graph32 = Graph<f32>;
pub type RationalGraph = Graph<Rational>;

pub type Instance64 = Instance<f64>;
pub type Instance32 = Instance<f32>;
pub type RationalInstance = Instance<Rational>;
