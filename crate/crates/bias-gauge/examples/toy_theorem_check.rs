//! Monte Carlo check of the difficulty definition on the toy circle task:
//! samples from the interpolating slice, the measured generalizing fraction
//! against the distance-ball bound, and the per-sample implication audit.
//!
//!     cargo run --release --example toy_theorem_check

use bias_gauge::sandbox::{build_toy, mc_inductive_bias, theorem_constants};

fn main() {
    let mut task = build_toy(4, 3, 2.0, 0.1, 17).unwrap();
    let constants = theorem_constants(&task).unwrap();
    // keep eps inside the band where the radius implication provably holds
    let cap = (constants.l_loss * constants.l_f * constants.wasserstein).powi(2)
        / (task.max_mode as f64 + 1.0);
    task.eps = (0.5f64).min(0.9 * cap);

    let report = mc_inductive_bias(&task, 100_000, 3).unwrap();
    println!("{}", serde_json::to_string_pretty(&report).unwrap());
}
