//! Scoring, parameter sweeps and curve fitting.

pub mod logistic;
pub mod score;
pub mod sweep;

pub use logistic::{fit_logistic, LogisticFit};
pub use score::{score, RecoveryReport};
pub use sweep::{run_trial, sweep_knowledge, sweep_scale};
