use proptest::prelude::*;
use strucdecomp::bench::{compare_methods, score_indices, DEFAULT_TOLERANCE};
use strucdecomp::{
    generate_synthetic, AnomalyMethod, ChangepointMethod, Model, PipelineConfig, SyntheticSpec,
    TrendBreak,
};

fn one_break(seed: u64) -> SyntheticSpec {
    SyntheticSpec {
        n: 240,
        base_level: 5.0,
        trend_breaks: vec![TrendBreak {
            index: 120,
            new_slope: 0.0,
            level_jump: 6.0,
        }],
        noise_sd: 1.0,
        seed,
        ..Default::default()
    }
}

#[test]
fn noise_free_series_scores_perfectly() {
    let data = generate_synthetic(&SyntheticSpec {
        n: 120,
        base_level: 2.0,
        ..Default::default()
    })
    .unwrap();
    let rows = compare_methods(
        &data,
        &[("default".into(), PipelineConfig::default())],
        DEFAULT_TOLERANCE,
    );
    assert_eq!(rows.len(), 1);
    assert!(rows[0].trend_rmse < 1e-6, "{}", rows[0].trend_rmse);
    assert_eq!(rows[0].changepoint_f1, 1.0);
    assert!(rows[0].runtime_ms >= 0.0);
}

#[test]
fn pelt_beats_unsegmented_on_a_break() {
    for seed in 0..10 {
        let data = generate_synthetic(&one_break(seed)).unwrap();
        let rows = compare_methods(
            &data,
            &[
                ("pelt".into(), PipelineConfig::default()),
                (
                    "none".into(),
                    PipelineConfig {
                        changepoint_method: ChangepointMethod::None,
                        ..Default::default()
                    },
                ),
            ],
            DEFAULT_TOLERANCE,
        );
        assert_eq!(rows[0].config_id, "pelt");
        assert!(rows[0].trend_rmse < rows[1].trend_rmse, "seed {seed}");
    }
}

#[test]
fn failing_config_is_isolated() {
    let mut spec = one_break(1);
    spec.base_level = -20.0;
    let data = generate_synthetic(&spec).unwrap();
    let configs = vec![
        ("additive".to_string(), PipelineConfig::default()),
        (
            "multiplicative".to_string(),
            PipelineConfig {
                model: Model::Multiplicative,
                anomaly_method: AnomalyMethod::None,
                ..Default::default()
            },
        ),
        (
            "mad".to_string(),
            PipelineConfig {
                anomaly_method: AnomalyMethod::Mad,
                ..Default::default()
            },
        ),
    ];
    let rows = compare_methods(&data, &configs, DEFAULT_TOLERANCE);
    let ids: Vec<&str> = rows.iter().map(|r| r.config_id.as_str()).collect();
    assert_eq!(ids, ["additive", "multiplicative", "mad"]);
    assert!(!rows[0].failed() && !rows[2].failed());
    assert!(rows[1].failed());
    assert!(rows[1].error.as_deref().unwrap().contains("index 0"));
    assert!(rows[0].trend_rmse.is_finite() && rows[2].trend_rmse.is_finite());
}

fn separated(raw: Vec<usize>, gap: usize) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::new();
    let mut sorted = raw;
    sorted.sort_unstable();
    for v in sorted {
        if out.last().is_none_or(|&l| v >= l + gap) {
            out.push(v);
        }
    }
    out
}

proptest! {
    #[test]
    fn swapping_sets_swaps_precision_and_recall(
        a in proptest::collection::vec(0usize..2000, 0..15),
        b in proptest::collection::vec(0usize..2000, 0..15),
        tol in 0usize..10,
    ) {
        // Separation beyond 2·tol keeps the greedy matching unambiguous.
        let a = separated(a, 2 * tol + 1);
        let b = separated(b, 2 * tol + 1);
        let ab = score_indices(&a, &b, tol);
        let ba = score_indices(&b, &a, tol);
        prop_assert_eq!(ab.precision, ba.recall);
        prop_assert_eq!(ab.recall, ba.precision);
        prop_assert_eq!(ab.f1, ba.f1);
    }

    #[test]
    fn f1_is_bounded_and_one_only_on_full_match(
        a in proptest::collection::vec(0usize..500, 0..10),
        b in proptest::collection::vec(0usize..500, 0..10),
        tol in 0usize..6,
    ) {
        let a = separated(a, 1);
        let b = separated(b, 1);
        let s = score_indices(&a, &b, tol);
        prop_assert!((0.0..=1.0).contains(&s.f1));
        if s.f1 == 1.0 {
            prop_assert_eq!(a.len(), b.len());
        }
        let spread = separated(a, 2 * tol + 1);
        let shifted: Vec<usize> = spread.iter().map(|v| v + tol).collect();
        prop_assert_eq!(score_indices(&shifted, &spread, tol).f1, 1.0);
    }
}
