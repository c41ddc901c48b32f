use figas_core::aspa::{aspa_test, AspaOptions, LossPanel};
use figas_core::fluctuation::{dm_statistic, fluctuation_test};
use figas_core::linalg::Matrix;
use figas_core::loss::{loss, LossKind};
use figas_core::metrics::fit_metrics;
use figas_core::rng::stream;
use proptest::prelude::*;
use rand_distr::{Distribution, Normal};

fn normal_panel(seed: u64, n: usize, h: usize, mean: f64) -> LossPanel<f64> {
    let mut rng = stream(seed, 0);
    let dist = Normal::new(mean, 1.0).unwrap();
    let data: Vec<f64> = (0..n * h).map(|_| dist.sample(&mut rng)).collect();
    LossPanel::new((1..=h).collect(), (0..n).map(|t| format!("t{t}")).collect(), Matrix::from_row_major(n, h, data))
        .unwrap()
}

/// Bartlett long-run variance written out directly.
fn dm_oracle(d: &[f64]) -> f64 {
    let n = d.len();
    let lags = (4.0 * (n as f64 / 100.0).powf(2.0 / 9.0)).floor() as usize;
    let m = d.iter().sum::<f64>() / n as f64;
    let u: Vec<f64> = d.iter().map(|v| v - m).collect();
    let gamma = |k: usize| (k..n).map(|t| u[t] * u[t - k]).sum::<f64>() / n as f64;
    let mut lrv = gamma(0);
    for k in 1..=lags {
        lrv += 2.0 * (1.0 - k as f64 / (lags + 1) as f64) * gamma(k);
    }
    (n as f64).sqrt() * m / lrv.sqrt()
}

#[test]
fn aspa_is_bit_reproducible() {
    let panel = normal_panel(1, 120, 4, 0.1);
    let opts = AspaOptions { seed: 2024, ..Default::default() };
    let a = aspa_test(&panel, &opts).unwrap();
    let b = aspa_test(&panel, &opts).unwrap();
    assert_eq!(a.p_value.to_bits(), b.p_value.to_bits());
    assert_eq!(a.statistic.to_bits(), b.statistic.to_bits());
    let c = aspa_test(&panel, &AspaOptions { seed: 2025, ..Default::default() }).unwrap();
    assert_eq!(a.statistic.to_bits(), c.statistic.to_bits());
}

#[test]
fn aspa_detects_strong_alternative() {
    let panel = normal_panel(3, 200, 3, 0.5);
    let r = aspa_test(&panel, &AspaOptions { seed: 3, ..Default::default() }).unwrap();
    assert!(r.p_value < 0.01);
    let r = aspa_test(&normal_panel(3, 200, 3, -0.5), &AspaOptions::default()).unwrap();
    assert!(r.p_value > 0.9);
}

#[test]
fn benchmark_against_itself_is_degenerate() {
    let losses = Matrix::from_row_major(30, 2, (0..60).map(|i| (i % 7) as f64).collect());
    let panel = LossPanel::from_losses(vec![1, 8], (0..30).map(|t| t.to_string()).collect(), &losses, &losses).unwrap();
    let r = aspa_test(&panel, &AspaOptions::default()).unwrap();
    assert!(r.degenerate);
    assert_eq!(r.p_value, 1.0);
}

#[test]
fn fluctuation_windows_match_slice_recompute() {
    let mut rng = stream(17, 0);
    let dist = Normal::new(0.0, 1.0).unwrap();
    let d: Vec<f64> = (0..100).map(|_| dist.sample(&mut rng)).collect();
    let res = fluctuation_test(&d, 10).unwrap();
    for (j, &s) in res.statistics.iter().enumerate() {
        assert!((s - dm_oracle(&d[j..j + 10])).abs() < 1e-10);
        assert!((s - dm_statistic(&d[j..j + 10])).abs() < 1e-10);
    }
    assert_eq!(res.midpoints.len(), 91);
}

#[test]
fn fit_metrics_match_recomputation() {
    let y = [0.3, -1.2, 0.8, 2.1, 0.0, -0.4, 1.1];
    let f = [0.1, -1.0, 0.9, 1.7, 0.2, -0.3, 0.8];
    let b = [0.0, -0.5, 0.4, 1.0, 0.1, 0.0, 0.6];
    let fm = fit_metrics(&y, &f, &b).unwrap();
    let n = y.len() as f64;
    let my = y.iter().sum::<f64>() / n;
    let sst: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let ssr = |g: &[f64]| y.iter().zip(g).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
    let (r2, rb) = (1.0 - ssr(&f) / sst, 1.0 - ssr(&b) / sst);
    let (e, eb) = ((ssr(&f) / n).sqrt(), (ssr(&b) / n).sqrt());
    assert!((fm.r2 - r2).abs() < 1e-10 && (fm.bench_r2 - rb).abs() < 1e-10);
    assert!((fm.delta_r2 - (r2 - rb)).abs() < 1e-10);
    assert!((fm.pct_delta_rmse - 100.0 * (e / eb - 1.0)).abs() < 1e-10);
}

proptest! {
    #[test]
    fn check_loss_properties(e in -50.0f64..50.0, tau in 0.01f64..0.99, k in 0.0f64..10.0) {
        let l = loss(LossKind::Check, e, Some(tau)).unwrap();
        prop_assert!(l >= 0.0);
        prop_assert_eq!(l == 0.0, e == 0.0);
        let lk = loss(LossKind::Check, k * e, Some(tau)).unwrap();
        prop_assert!((lk - k * l).abs() <= 1e-9 * (1.0 + lk.abs()));
    }

    #[test]
    fn constant_series_gives_identical_windows(c in -5.0f64..5.0, n in 20usize..80) {
        let d = vec![c; n];
        let res = fluctuation_test(&d, 8).unwrap();
        let first = res.statistics[0];
        prop_assert!(res.statistics.iter().all(|s| s.to_bits() == first.to_bits()));
    }
}
