//! Game model, rational target, instance generation, protocol, persuaders,
//! orchestration and analytics for the hidden-information persuasion game.

pub mod fixtures;
pub mod game;
pub mod generator;
pub mod llm;
pub mod metrics;
pub mod model;
pub mod persuaders;
pub mod protocol;
pub mod records;
pub mod scenario;
pub mod stats;
pub mod target;
pub mod view;

pub use stats::{Scalar, WinProbability};

/// Baseline probabilities in floating point.
pub type WinProbabilityF64 = WinProbability<f64>;
/// Baseline probabilities as exact rationals.
pub type ExactWinProbability = WinProbability<num_rational::BigRational>;
