use figas_core::fdr::{adjust_adaptive_bh, adjust_bh, rejections, FdrMethod, PValueSet};
use proptest::prelude::*;

/// Direct formula: adj_i = min over ranks k >= rank(i) of min(1, p_(k) S / k).
fn bh_oracle(raw: &[f64], m: f64) -> Vec<f64> {
    let s = raw.len();
    let mut order: Vec<usize> = (0..s).collect();
    order.sort_by(|&a, &b| raw[a].partial_cmp(&raw[b]).unwrap());
    let mut out = vec![0.0; s];
    for (rank, &i) in order.iter().enumerate() {
        out[i] = (rank..s).map(|k| (raw[order[k]] * (m / (k + 1) as f64)).min(1.0)).fold(1.0, f64::min);
    }
    out
}

#[test]
fn pvalue_set_labels() {
    let set = PValueSet::new(vec!["h1".into(), "h8".into(), "h15".into()], vec![0.01, 0.02, 0.05], FdrMethod::Bh, 0.1)
        .unwrap();
    assert_eq!(set.adjusted, vec![0.03, 0.03, 0.05]);
    assert!(PValueSet::new(vec!["h1".into()], vec![0.1, 0.2], FdrMethod::Bh, 0.1).is_err());
}

fn pvec() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![0.0f64..1.0, 0.0f64..0.01, Just(1.0)], 1..40)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(5000))]

    #[test]
    fn bh_matches_formula_and_bounds(raw in pvec()) {
        let adj = adjust_bh(&raw).unwrap();
        let oracle = bh_oracle(&raw, raw.len() as f64);
        for i in 0..raw.len() {
            prop_assert!((adj[i] - oracle[i]).abs() < 1e-15);
            prop_assert!(adj[i] >= raw[i] && adj[i] <= 1.0);
        }
    }

    #[test]
    fn monotone_in_each_raw_value(raw in pvec(), idx in 0usize..40, bump in 0.0f64..0.5) {
        let i = idx % raw.len();
        let mut raised = raw.clone();
        raised[i] = (raised[i] + bump).min(1.0);
        let (a, b) = (adjust_bh(&raw).unwrap(), adjust_bh(&raised).unwrap());
        let (c, d) = (adjust_adaptive_bh(&raw, 0.1).unwrap(), adjust_adaptive_bh(&raised, 0.1).unwrap());
        for j in 0..raw.len() {
            prop_assert!(b[j] >= a[j]);
            // Raising one p-value can lower R, which raises S0: never lowers output.
            prop_assert!(d[j] >= c[j] - 1e-15);
        }
    }

    #[test]
    fn adaptive_never_exceeds_plain(raw in pvec()) {
        let plain = adjust_bh(&raw).unwrap();
        let adaptive = adjust_adaptive_bh(&raw, 0.1).unwrap();
        let r = rejections(&plain, 0.1);
        for j in 0..raw.len() {
            prop_assert!(adaptive[j] <= plain[j] + 1e-15);
            if r == 0 {
                prop_assert_eq!(adaptive[j], plain[j]);
            }
        }
        let s0 = (raw.len() - r).max(1) as f64;
        if r > 0 {
            let oracle = bh_oracle(&raw, s0);
            for j in 0..raw.len() {
                prop_assert!((adaptive[j] - oracle[j]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn order_invariant(raw in pvec(), rot in 0usize..40) {
        let k = rot % raw.len();
        let mut rotated = raw.clone();
        rotated.rotate_left(k);
        let a = adjust_bh(&raw).unwrap();
        let mut b = adjust_bh(&rotated).unwrap();
        b.rotate_right(k);
        prop_assert_eq!(a, b);
    }
}
