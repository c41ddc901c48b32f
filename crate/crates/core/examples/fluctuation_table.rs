//! Simulates one-sided 10% critical values of the fluctuation test,
//! `sup_s [W(s + mu) - W(s)] / sqrt(mu)` over `s` in `[0, 1 - mu]`,
//! on a fine Gaussian random-walk grid. The printed table is the one
//! embedded in `fluctuation.rs`.
//!
//! cargo run --release -p figas-core --example fluctuation_table [paths] [steps] [seed]

use figas_core::rng::stream;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

const MUS: [f64; 10] = [0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40, 0.45, 0.50];

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let paths: usize = args.get(1).map_or(40_000, |s| s.parse().unwrap());
    let steps: usize = args.get(2).map_or(10_000, |s| s.parse().unwrap());
    let seed: u64 = args.get(3).map_or(20_100_101, |s| s.parse().unwrap());

    let sups: Vec<[f64; 10]> = (0..paths)
        .into_par_iter()
        .map(|p| {
            let mut rng = stream(seed, p as u64);
            let dt = (1.0 / steps as f64).sqrt();
            let mut w = Vec::with_capacity(steps + 1);
            w.push(0.0);
            let mut acc = 0.0;
            for _ in 0..steps {
                let z: f64 = StandardNormal.sample(&mut rng);
                acc += z * dt;
                w.push(acc);
            }
            let mut out = [0.0; 10];
            for (k, &mu) in MUS.iter().enumerate() {
                let lag = (mu * steps as f64).round() as usize;
                let best = (lag..=steps).map(|i| w[i] - w[i - lag]).fold(f64::NEG_INFINITY, f64::max);
                out[k] = best / mu.sqrt();
            }
            out
        })
        .collect();

    println!("# paths={paths} steps={steps} seed={seed}");
    println!("mu,cv_10");
    for (k, mu) in MUS.iter().enumerate() {
        let mut v: Vec<f64> = sups.iter().map(|s| s[k]).collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let q = v[((0.9 * paths as f64).ceil() as usize) - 1];
        println!("{mu:.2},{q:.3}");
    }
}
