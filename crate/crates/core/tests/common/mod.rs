#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::seq::index::sample;
use rand::Rng;
use sse_core::cli::format::{to_json, MatrixFile};
use sse_core::exactmat::{Rat, RatMatrix};
use sse_core::stochastic::ProbVector;

pub fn ex43() -> RatMatrix {
    RatMatrix::from_scaled_ints(&[[7, 2, 1], [2, 7, 1], [2, 2, 6]], 10)
}

/// A uniformly random composition of `d` into `n` positive parts.
pub fn composition<R: Rng>(rng: &mut R, d: i64, n: usize) -> Vec<i64> {
    assert!(d >= n as i64 && n >= 1);
    let mut cuts: Vec<i64> = sample(rng, (d - 1) as usize, n - 1).into_iter().map(|c| c as i64 + 1).collect();
    cuts.sort_unstable();
    let mut prev = 0;
    let mut parts = Vec::with_capacity(n);
    for c in cuts {
        parts.push(c - prev);
        prev = c;
    }
    parts.push(d - prev);
    parts
}

/// Positive stochastic `n x n` with every row a random composition of `d`,
/// divided by `d`.
pub fn positive_stochastic<R: Rng>(rng: &mut R, n: usize, d: i64) -> RatMatrix {
    let rows = (0..n).map(|_| composition(rng, d, n).into_iter().map(|k| Rat::ratio(k, d)).collect()).collect();
    RatMatrix::from_rows(rows).unwrap()
}

/// Positive stochastic with `n` in `2..=n_max` and a denominator in `n..=d_max`.
pub fn random_positive_stochastic<R: Rng>(rng: &mut R, n_max: usize, d_max: i64) -> RatMatrix {
    let n = rng.gen_range(2..=n_max);
    let d = rng.gen_range(n as i64..=d_max.max(n as i64));
    positive_stochastic(rng, n, d)
}

/// Positive stochastic whose rows stay within `spread / d` of uniform.
pub fn near_uniform<R: Rng>(rng: &mut R, n: usize, d: i64, spread: i64) -> RatMatrix {
    let base = d / n as i64;
    let rows = (0..n)
        .map(|_| loop {
            let mut parts: Vec<i64> = (0..n - 1).map(|_| base + rng.gen_range(-spread..=spread)).collect();
            let last = d - parts.iter().sum::<i64>();
            if last > 0 && parts.iter().all(|&p| p > 0) {
                parts.push(last);
                break parts.into_iter().map(|k| Rat::ratio(k, d)).collect();
            }
        })
        .collect();
    RatMatrix::from_rows(rows).unwrap()
}

pub fn random_prob_vector<R: Rng>(rng: &mut R, n: usize, d_max: i64) -> ProbVector {
    let d = rng.gen_range(n as i64..=d_max.max(n as i64));
    ProbVector::new(composition(rng, d, n).into_iter().map(|k| Rat::ratio(k, d)).collect()).unwrap()
}

/// Random nonnegative `rows x cols` with row sums 1.
pub fn random_row_stochastic<R: Rng>(rng: &mut R, rows: usize, cols: usize, d: i64) -> RatMatrix {
    let data = (0..rows)
        .map(|_| {
            // Compositions of d + cols into cols parts, shifted down by one,
            // allow zero entries.
            composition(rng, d + cols as i64, cols).into_iter().map(|k| Rat::ratio(k - 1, d)).collect()
        })
        .collect();
    RatMatrix::from_rows(data).unwrap()
}

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_sse")
}

pub fn sse(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("binary runs")
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

pub fn write_matrix(dir: &Path, name: &str, m: &RatMatrix) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, to_json(&MatrixFile::from_matrix(m))).unwrap();
    path
}

pub fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}
