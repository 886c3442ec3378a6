//! Few-shot meta-learning difficulty on an Omniglot-style configuration:
//! 20-way 1-shot episodes over the 30 background alphabets. The per-alphabet
//! and whole-dataset dimensions are user estimates, so a small grid shows
//! how the outcome moves with them.
//!
//!     cargo run --release --example meta_omniglot

use bias_gauge::difficulty::{difficulty_meta, MetaTaskSpec};

fn main() {
    let path = format!("{}/fixtures/omniglot_meta.json", env!("CARGO_MANIFEST_DIR"));
    let base: MetaTaskSpec = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();

    let report = difficulty_meta(&base).unwrap();
    println!(
        "fixture (m0={}, m1={}): {} bits (log10 {:.1})",
        base.inner.m_g,
        base.m1,
        report.total_bits.to_scientific(),
        report.total_bits.log10_mag()
    );

    println!("\nm0,m1,log10_bits");
    for m0 in [8u64, 11, 14] {
        for dm in [2.0, 6.0, 10.0] {
            let mut spec = base.clone();
            spec.inner.m_g = m0;
            spec.m1 = m0 as f64 + dm;
            let r = difficulty_meta(&spec).unwrap();
            println!("{m0},{},{:.1}", spec.m1, r.total_bits.log10_mag());
        }
    }
}
