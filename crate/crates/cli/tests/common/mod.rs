#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

use cur_spca::cursampler::seeded_rng;
use cur_spca::DenseMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

pub fn gaussian(n: usize, p: usize, seed: u64) -> DenseMatrix {
    let mut rng = seeded_rng(seed);
    DenseMatrix::from_fn(n, p, |_, _| rng.sample::<f64, _>(StandardNormal))
}

pub fn curspca(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_curspca")).args(args).output().expect("binary runs")
}

pub fn json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

pub fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Report text with the wall-clock field blanked.
pub fn without_timing(text: &str) -> serde_json::Value {
    let mut v: serde_json::Value = serde_json::from_str(text).unwrap();
    v["timing_ms"] = serde_json::Value::Null;
    v
}

pub fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}
