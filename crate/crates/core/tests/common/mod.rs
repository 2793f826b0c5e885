#![allow(dead_code)]

use std::path::PathBuf;

use sixvertex::io::GoldenRecord;
use sixvertex::sampling::{draw_model, stream_rng, Draw, DEFAULT_CLEARANCE};
use sixvertex::{Matrix, C64};

/// `count` independent draws at length `len`, reproducible per `seed`.
pub fn draws(seed: u64, len: usize, count: usize) -> Vec<Draw<f64>> {
    let mut rng = stream_rng(seed, len as u64);
    (0..count)
        .map(|_| draw_model(&mut rng, len, DEFAULT_CLEARANCE).expect("clear draw"))
        .collect()
}

pub fn max_entry_diff(a: &Matrix<f64>, b: &Matrix<f64>) -> f64 {
    assert_eq!((a.rows(), a.cols()), (b.rows(), b.cols()));
    a.entries().iter().zip(b.entries()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn golden_corpus() -> Vec<GoldenRecord> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/golden.json");
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    serde_json::from_str(&text).expect("corpus schema")
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}
