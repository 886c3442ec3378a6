//! Information contributed by model architectures: better test error on the
//! same task implies more inductive bias supplied by the model class.
//!
//!     cargo run --release --example model_ranking

use bias_gauge::difficulty::{model_information, TaskSpec};

fn main() {
    let root = env!("CARGO_MANIFEST_DIR");
    for task in ["mnist", "svhn", "cifar10", "imagenet"] {
        let spec: TaskSpec = serde_json::from_str(
            &std::fs::read_to_string(format!("{root}/fixtures/{task}_task.json")).unwrap(),
        )
        .unwrap();
        let errors = std::fs::read_to_string(format!("{root}/fixtures/models_{task}.csv")).unwrap();
        println!("== {task}");
        for line in errors.lines().skip(1) {
            let (name, rate) = line.split_once(',').unwrap();
            let rate: f64 = rate.parse().unwrap();
            let bits = model_information(&spec, rate).unwrap();
            println!("{:<22} error {:<8} -> {} bits", name, rate, bits.to_scientific());
        }
        println!();
    }
}
