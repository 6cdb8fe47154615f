use corrgrow::detect::{sample_statistic, Model, TestStatistic};
use corrgrow::estimate::{batch_estimate, EstimatorConfig};
use corrgrow::oracle::ks_two_sample;
use corrgrow::stats::{h_statistic, max_degree};
use corrgrow::{grow, grow_correlated, GrowthRule, RngSpec, SeedTree};
use rayon::prelude::*;

fn pool(threads: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap()
}

#[test]
fn first_tree_of_a_pair_has_the_marginal_law() {
    for rule in [GrowthRule::Uniform, GrowthRule::Preferential] {
        let seed = SeedTree::pair();
        let rng = RngSpec::new(11);
        let from_pairs: Vec<f64> = (0..3000u64)
            .into_par_iter()
            .map(|i| {
                let p = grow_correlated(&seed, rule, 300, 40, &rng.substream(0).substream(i)).unwrap();
                h_statistic(&p.first)
            })
            .collect();
        let direct: Vec<f64> = (0..3000u64)
            .into_par_iter()
            .map(|i| h_statistic(&grow(&seed, rule, 300, &rng.substream(1).substream(i)).unwrap()))
            .collect();
        let ks = ks_two_sample(&from_pairs, &direct);
        assert!(ks.p_value > 0.01, "{rule}: {ks:?}");
    }
}

#[test]
fn pa_attaches_proportionally_to_degree() {
    // vertex 0 as the fixed vertex, step t = 30 (tree of 30 vertices receives vertex 30)
    let t = 30;
    let rng = RngSpec::new(5);
    let (hits, expected, var) = (0..10_000u64)
        .into_par_iter()
        .map(|i| {
            let tree = grow(&SeedTree::pair(), GrowthRule::Preferential, t + 1, &rng.substream(i)).unwrap();
            let d = tree.prefix(t).unwrap().degree(0) as f64;
            let p = d / (2.0 * t as f64 - 2.0);
            (usize::from(tree.attachment(t) == Some(0)), p, p * (1.0 - p))
        })
        .reduce(|| (0, 0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
    assert!((hits as f64 - expected).abs() <= 3.0 * var.sqrt(), "{hits} vs {expected}");
}

#[test]
fn ua4_is_a_path_two_thirds_of_the_time() {
    let rng = RngSpec::new(17);
    let trials = 100_000;
    let paths = (0..trials as u64)
        .into_par_iter()
        .filter(|&i| max_degree(&grow(&SeedTree::pair(), GrowthRule::Uniform, 4, &rng.substream(i)).unwrap()) == 2)
        .count();
    let freq = paths as f64 / trials as f64;
    let sigma = (2.0 / 9.0 / trials as f64).sqrt();
    assert!((freq - 2.0 / 3.0).abs() <= 3.0 * sigma, "{freq}");
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let model = Model {
        seed: SeedTree::star(3).unwrap(),
        rule: GrowthRule::Preferential,
        n: 400,
    };
    let rng = RngSpec::new(99);
    let run = |threads: usize| {
        pool(threads).install(|| {
            let stats = sample_statistic(TestStatistic::HProduct, &model, 50, 64, &rng).unwrap();
            let batch = batch_estimate(
                &SeedTree::pair(),
                GrowthRule::Uniform,
                500,
                60,
                64,
                &rng,
                &EstimatorConfig::default(),
            )
            .unwrap();
            let trees: Vec<String> = (0..16u64)
                .into_par_iter()
                .map(|i| grow(&model.seed, model.rule, 300, &rng.substream(i)).unwrap().to_string())
                .collect();
            (stats.iter().map(|x| x.to_bits()).collect::<Vec<_>>(), batch, trees)
        })
    };
    let one = run(1);
    assert_eq!(one, run(4));
    assert_eq!(one, run(3));
}
