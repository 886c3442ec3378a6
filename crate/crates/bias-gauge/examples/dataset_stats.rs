//! The estimation pipeline on a synthetic labeled dataset: intrinsic
//! dimension from neighbor distances, margin exact and tail-extrapolated,
//! radius from the max norm. Point MNIST_DIR at IDX files to run the same
//! pipeline on real data.
//!
//!     cargo run --release --example dataset_stats

use bias_gauge::estimators::LabeledDataset;
use bias_gauge::ingest::{dataset_stats, read_idx, DeltaMode, PixelScale, ScalingRecord};
use bias_gauge::transport::sample_uniform_sphere;

fn main() {
    // two classes on separated 5-spheres: m_hat should come out near 5
    let mut vectors = Vec::new();
    let mut labels = Vec::new();
    for (class, shift) in [(0usize, 0.0f64), (1, 4.0)] {
        for p in sample_uniform_sphere(5, 700, 11 + class as u64).points() {
            let mut v = p.clone();
            v[0] += shift;
            vectors.push(v);
            labels.push(class);
        }
    }
    let data = LabeledDataset::labeled(vectors, labels).unwrap();
    let record = ScalingRecord { pixel_scale: None, notes: vec!["synthetic spheres".into()] };
    let stats = dataset_stats(&data, DeltaMode::Auto, 5, None, 0, record).unwrap();
    println!("{}", serde_json::to_string_pretty(&stats).unwrap());

    if let Ok(dir) = std::env::var("MNIST_DIR") {
        let images = format!("{dir}/train-images-idx3-ubyte");
        let labels = format!("{dir}/train-labels-idx1-ubyte");
        let data = read_idx(images.as_ref(), labels.as_ref(), PixelScale::Unit).unwrap();
        let record = ScalingRecord {
            pixel_scale: Some(PixelScale::Unit),
            notes: vec!["mnist train".into()],
        };
        let stats = dataset_stats(&data, DeltaMode::Auto, 5, None, 0, record).unwrap();
        println!("{}", serde_json::to_string_pretty(&stats).unwrap());
    }
}
