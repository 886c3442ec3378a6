//! Parameter sweeps on the large-benchmark fixture: training set size moves
//! difficulty barely, class count moves it by decades, resolution moves it
//! steeply.
//!
//!     cargo run --release --example sweeps

use bias_gauge::difficulty::{sweep, SweepParam, TaskSpec};

fn main() {
    let path = format!("{}/fixtures/imagenet_task.json", env!("CARGO_MANIFEST_DIR"));
    let spec: TaskSpec = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();

    for (param, label, values) in [
        (SweepParam::N, "n", vec![1.281167e6, 1.281167e7, 1.281167e8, 1.281167e9]),
        (SweepParam::D, "d", vec![10.0, 100.0, 1000.0]),
        (SweepParam::Delta, "delta", vec![32.5, 65.0, 130.0, 260.0]),
    ] {
        println!("{label},log10_bits");
        for p in sweep(&spec, param, &values) {
            match p.report {
                Some(r) => println!("{},{:.4}", p.value, r.total_bits.log10_mag()),
                None => println!("{},error: {}", p.value, p.error.unwrap()),
            }
        }
        println!();
    }
}
