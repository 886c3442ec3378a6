//! Noisy-Cartpole difficulty against the number of observations T needed to
//! determine the optimal action (m = 2T): log-difficulty grows linearly.
//!
//!     cargo run --release --example rl_cartpole

use bias_gauge::difficulty::difficulty_rl;
use bias_gauge::transport::ols_fit;

fn main() {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    println!("T,m,log10_bits");
    for t in 1..=6u64 {
        let report = difficulty_rl(2 * t, 0.001, 10_000.0, 1, 0.001).unwrap();
        let log10 = report.total_bits.log10_mag();
        println!("{t},{},{log10:.4}", 2 * t);
        xs.push(t as f64);
        ys.push(log10);
    }
    let (slope, intercept, r2) = ols_fit(&xs, &ys);
    println!("# linear fit: slope {slope:.4} decades per observation, intercept {intercept:.4}, r2 {r2:.6}");
}
