//! Exact transport distances between an n-point cloud and a dense reference
//! cloud on the unit m-sphere: log W falls linearly in log n with slope
//! close to -1/m, flattening as m grows.
//!
//!     cargo run --release --example wasserstein_scaling

use bias_gauge::transport::{scaling_experiment, ScalingConfig};

fn main() {
    let cfg = ScalingConfig {
        m_values: vec![3, 9],
        n_values: vec![10, 25, 50, 100, 250],
        ref_size: 1000,
        trials: 3,
        seed: 7,
    };
    let result = scaling_experiment(&cfg).unwrap();
    let mut rows = Vec::new();
    result.write_rows_csv(&mut rows).unwrap();
    print!("{}", String::from_utf8(rows).unwrap());
    println!();
    let mut fits = Vec::new();
    result.write_fits_csv(&mut fits).unwrap();
    print!("{}", String::from_utf8(fits).unwrap());
}
