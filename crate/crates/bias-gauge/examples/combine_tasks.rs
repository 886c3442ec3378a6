//! Difficulty bounds for solving two benchmarks jointly: each side absorbs
//! the other's manifold as a distractor, and the combined requirement lies
//! between -ln(e^-I1' + e^-I2') and I1' + I2'.
//!
//!     cargo run --release --example combine_tasks

use bias_gauge::difficulty::{combine, TaskSpec};

fn fixture(name: &str) -> TaskSpec {
    let path = format!("{}/fixtures/{name}_task.json", env!("CARGO_MANIFEST_DIR"));
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn main() {
    let names = ["mnist", "svhn", "cifar10"];
    println!("{:<18} {:>14} {:>14}", "pair", "lower(bits)", "upper(bits)");
    for (i, a) in names.iter().enumerate() {
        for b in &names[i..] {
            let out = combine(&fixture(a), &fixture(b)).unwrap();
            println!(
                "{:<18} {:>14} {:>14}",
                format!("{a} x {b}"),
                out.lower.to_bits().to_scientific(),
                out.upper.to_bits().to_scientific()
            );
        }
    }
}
