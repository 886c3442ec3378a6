//! Difficulty of the four standard image classification benchmarks, from
//! their published (m, delta) estimates and error-rate conventions.
//!
//!     cargo run --release --example difficulty_benchmarks

use bias_gauge::difficulty::{evaluate, TaskSpec};

fn fixture(name: &str) -> TaskSpec {
    let path = format!("{}/fixtures/{name}_task.json", env!("CARGO_MANIFEST_DIR"));
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn main() {
    println!("{:<10} {:>12} {:>12}", "task", "bits", "log10(bits)");
    for name in ["mnist", "svhn", "cifar10", "imagenet"] {
        let report = evaluate(&fixture(name)).unwrap();
        println!(
            "{:<10} {:>12} {:>12.3}",
            name,
            report.total_bits.to_scientific(),
            report.total_bits.log10_mag()
        );
    }
}
