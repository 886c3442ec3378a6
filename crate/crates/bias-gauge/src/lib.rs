//! bias-gauge: how much inductive bias does a learning task demand?
//!
//! A task that must be solved from `n` training points on an `m`-dimensional
//! data manifold, at spatial resolution `delta` and target error `eps`, admits
//! only a tiny fraction of hypotheses that both fit the data and generalize.
//! This crate computes the negative log of that fraction, the information a
//! model designer has to supply on top of the data, from dataset statistics
//! alone, for classification, RL, meta-learning and combined tasks.
//!
//! The pipeline:
//!
//! 1. [`ingest`] reads IDX / CIFAR-10 binary / numeric CSV data.
//! 2. [`estimators`] extracts the task parameters: intrinsic dimension `m`
//!    (nearest-neighbor MLE), class margin `delta` (exact scan or tail
//!    extrapolation) and input radius `r`.
//! 3. [`spectral`] counts the band-limited hypothesis basis on the manifold.
//! 4. [`transport`] supplies the train/test Wasserstein distance, both as a
//!    closed form and as an exact solver for empirical clouds.
//! 5. [`difficulty`] assembles the per-task information requirement in
//!    log space and reports it in nats and bits.
//! 6. [`sandbox`] Monte-Carlo-checks the probabilistic definition on a toy
//!    hypothesis space where every quantity is known exactly.
//!
//! Every capability has a runnable example under `examples/`; the `bias-gauge`
//! binary exposes the same operations as subcommands.
//!
//! ```text
//! cargo run --release --example difficulty_benchmarks   # four benchmark difficulties
//! cargo run --release --example model_ranking           # information per architecture
//! cargo run --release --example rl_cartpole             # difficulty vs observation count
//! cargo run --release --example meta_omniglot           # few-shot composition
//! cargo run --release --example combine_tasks           # joint-task bounds
//! cargo run --release --example sweeps                  # n / class-count / resolution sweeps
//! cargo run --release --example wasserstein_scaling     # exact-transport decay in n
//! cargo run --release --example toy_theorem_check       # Monte Carlo definition check
//! cargo run --release --example dataset_stats           # estimation pipeline end to end
//! ```

// `!(v > 0.0)` validation guards must reject NaN; `v <= 0.0` would not
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod difficulty;
pub mod estimators;
pub mod ingest;
pub mod numerics;
pub mod sandbox;
pub mod spectral;
pub mod transport;

mod error;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
