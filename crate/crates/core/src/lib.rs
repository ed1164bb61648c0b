//! Conservative estimation of conditional probability.
//!
//! Given counts `n` (occurrences of a conditioning item B) and `x` (joint
//! occurrences of A and B), the Beta posterior over `P(A|B)` is summarised by
//! the lower limit `θ_lb` of the one-sided credible interval `[θ_lb, 1]`
//! holding mass `α`. Unlike the maximum likelihood ratio `x / n`, `θ_lb` is
//! discounted heavily when `n` is small but never reaches zero.
//!
//! The crate also carries the baselines it is compared against (MLE with
//! minimum support, Laplace, posterior mean under a fitted Beta prior,
//! Clopper-Pearson) and a small synthetic benchmark: transaction
//! generation from a parent/child relation, pair counting, rule scoring and
//! recall-by-rank evaluation.

pub mod beta;
pub mod cli;
pub mod error;
pub mod estimators;
pub mod evaluation;
pub mod mining;
pub mod synth;
pub mod table;

#[cfg(test)]
#[path = "../tests/common/oracles.rs"]
mod oracles;

pub use beta::{beta_quantile, log_beta_function, reg_inc_beta, BetaParams, Probability};
pub use error::{Error, Result};
pub use estimators::{EstimatorConfig, EstimatorKind, FrequencyPair};
