use corrgrow::estimate::{batch_estimate, fine_estimate, EstimatorConfig, EstimatorReport};
use corrgrow::{grow_correlated, CorrelatedPair, GrowingTree, GrowthRule, RngSpec, SeedTree};

/// Order-statistic 95% interval for the median of `values`.
fn median_interval(mut values: Vec<f64>) -> (f64, f64) {
    values.sort_by(f64::total_cmp);
    let m = values.len() as f64;
    let half = 1.96 * m.sqrt() / 2.0;
    let lo = (m / 2.0 - half).floor().max(0.0) as usize;
    let hi = ((m / 2.0 + half).ceil() as usize).min(values.len() - 1);
    (values[lo], values[hi])
}

#[test]
fn reports_survive_a_file_round_trip() {
    for rule in [GrowthRule::Uniform, GrowthRule::Preferential] {
        let pair = grow_correlated(&SeedTree::pair(), rule, 3000, 120, &RngSpec::new(4)).unwrap();
        let dir = std::env::temp_dir().join(format!("corrgrow-roundtrip-{}-{rule}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let (p1, p2) = (dir.join("t1.txt"), dir.join("t2.txt"));
        std::fs::write(&p1, pair.first.to_string()).unwrap();
        std::fs::write(&p2, pair.second.to_string()).unwrap();
        let t1: GrowingTree = std::fs::read_to_string(&p1).unwrap().parse().unwrap();
        let t2: GrowingTree = std::fs::read_to_string(&p2).unwrap().parse().unwrap();
        std::fs::remove_dir_all(&dir).unwrap();
        let reloaded = CorrelatedPair::from_trees(t1, t2, 120).unwrap();
        let cfg = EstimatorConfig::default();
        let before = fine_estimate(&pair.first, &pair.second, &cfg).unwrap();
        let after = fine_estimate(&reloaded.first, &reloaded.second, &cfg).unwrap();
        assert_eq!(before, after);

        let json = serde_json::to_string(&before).unwrap();
        let back: EstimatorReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, before);
    }
}

#[test]
fn both_rules_give_finite_medians() {
    for rule in [GrowthRule::Uniform, GrowthRule::Preferential] {
        let b = batch_estimate(&SeedTree::pair(), rule, 8000, 200, 100, &RngSpec::new(31), &EstimatorConfig::default())
            .unwrap();
        let coarse = b.summary.coarse.as_ref().unwrap();
        let fine = b.summary.fine.as_ref().unwrap();
        assert!(coarse.median.is_finite() && fine.median.is_finite());
        assert_eq!(coarse.count + b.summary.degenerate, 100);
        assert!(coarse.q10 <= coarse.median && coarse.median <= coarse.q90);
    }
}

#[test]
fn fine_error_does_not_grow_with_t_star() {
    let cfg = EstimatorConfig::default();
    let mut previous: Option<(f64, f64)> = None;
    for t in [250usize, 500, 1000] {
        let b = batch_estimate(&SeedTree::pair(), GrowthRule::Uniform, 40 * t, t, 200, &RngSpec::new(t as u64), &cfg)
            .unwrap();
        let errors: Vec<f64> = b
            .successful()
            .map(|r| (r.t_hat_fine - t as f64).abs() / t as f64)
            .collect();
        let ci = median_interval(errors);
        if let Some(prev) = previous {
            assert!(ci.0 <= prev.1, "t* = {t}: {ci:?} above {prev:?}");
        }
        previous = Some(ci);
    }
}
