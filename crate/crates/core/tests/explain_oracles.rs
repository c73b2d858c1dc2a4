use frfx_core::explain::importance::{permutation_for, permuted_error};
use frfx_core::explain::*;
use frfx_core::forest::ProbabilityMode;
use frfx_core::rng;
use frfx_core::{fit_forest, ForestConfig, FunctionalRandomForest, Matrix, Predictor};
use proptest::prelude::*;
use rand::Rng;

fn random_scores(seed: u64, n: usize, k: usize) -> (Matrix, Vec<u8>) {
    let mut r = rng::stream(seed, 99, 0);
    let mut data = Vec::with_capacity(n * k);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let row: Vec<f64> = (0..k).map(|_| r.random::<f64>() * 2.0 - 1.0).collect();
        labels.push(if i < 2 { i as u8 } else { u8::from(row[0] + 0.5 * row[1] > 0.0) });
        data.extend(row);
    }
    (Matrix::from_vec(n, k, data).unwrap(), labels)
}

fn small_forest(scores: &Matrix, labels: &[u8], n_trees: usize) -> FunctionalRandomForest {
    let config = ForestConfig {
        n_trees,
        seed: 11,
        ..ForestConfig::default()
    };
    fit_forest(scores, labels, &config).unwrap()
}

#[test]
fn fpdp_matches_brute_force_double_loop() {
    let (scores, labels) = random_scores(1, 5, 3);
    let forest = small_forest(&scores, &labels, 7);
    let g = 4;
    for k in 0..3 {
        let curve = compute_fpdp(&forest, &scores, k, g, PdpScale::Probability).unwrap();
        let col: Vec<f64> = (0..5).map(|i| scores.get(i, k)).collect();
        let lo = col.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = col.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        for m in 0..g {
            let v = if m == g - 1 { hi } else { lo + (hi - lo) / (g - 1) as f64 * m as f64 };
            assert_eq!(curve.score_grid[m], v);
            let mut sum = 0.0;
            for i in 0..5 {
                let mut row = scores.row(i).to_vec();
                row[k] = v;
                sum += forest.predict_proba(&row);
            }
            assert_eq!(curve.values[m], sum / 5.0);
            assert!((0.0..=1.0).contains(&curve.values[m]));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fpdp_oracle_equivalence(seed in any::<u64>(), n in 3usize..=20, g in 2usize..=10) {
        let (scores, labels) = random_scores(seed, n, 3);
        let forest = small_forest(&scores, &labels, 5);
        let curve = compute_fpdp(&forest, &scores, 1, g, PdpScale::Logit).unwrap();
        for (m, &v) in curve.score_grid.iter().enumerate() {
            let mut sum = 0.0;
            for i in 0..n {
                let mut row = scores.row(i).to_vec();
                row[1] = v;
                sum += forest.predict_proba(&row);
            }
            prop_assert_eq!(curve.values[m], logit(sum / n as f64));
        }
    }

    #[test]
    fn quadrants_survive_monotone_transforms(
        ints in proptest::collection::vec(-5.0f64..5.0, 1..12),
        seed in any::<u64>(),
    ) {
        let mut r = rng::stream(seed, 3, 0);
        let exts: Vec<f64> = ints.iter().map(|_| r.random::<f64>()).collect();
        let table = |f: &dyn Fn(f64) -> f64| ImportanceTable {
            rows: ints.iter().zip(&exts).enumerate().map(|(k, (&i, &e))| ImportanceRow {
                fpc: k,
                mdg: f(i),
                permutation_importance: 0.0,
                f_statistic: 0.0,
                p_value: 1.0,
                eta_squared: f(e),
                explained_variance_fraction: 0.1,
            }).collect(),
        };
        let plain = bubble_data(&table(&|x| x), InternalMetric::Mdg, ExternalMetric::EtaSquared).unwrap();
        let f = |x: f64| x * x * x + 2.0 * x;
        for p in &plain.points {
            let q = Quadrant::classify(f(p.internal), f(p.external), f(plain.median_internal), f(plain.median_external));
            prop_assert_eq!(q, p.quadrant);
        }
        // an odd count puts the median on a sample value, so the transformed
        // table reproduces the labels directly
        if ints.len() % 2 == 1 {
            let moved = bubble_data(&table(&f), InternalMetric::Mdg, ExternalMetric::EtaSquared).unwrap();
            for (a, b) in plain.points.iter().zip(&moved.points) {
                prop_assert_eq!(a.quadrant, b.quadrant);
            }
        }
    }
}

#[test]
fn heatmap_cells_are_reevaluations() {
    let (scores, labels) = random_scores(2, 40, 4);
    let forest = small_forest(&scores, &labels, 25);
    let hm = compute_fpcph(&forest, &scores, &[0, 1, 2, 3], 9).unwrap();
    let means: Vec<f64> = (0..4)
        .map(|k| (0..40).map(|i| scores.get(i, k)).sum::<f64>() / 40.0)
        .collect();
    for (c, &k) in hm.fpcs.iter().enumerate() {
        for (m, &v) in hm.score_grids[c].iter().enumerate() {
            let mut row = means.clone();
            row[k] = v;
            let p = forest.predict_proba(&row);
            assert_eq!(hm.probabilities[c][m], p);
            assert!((0.0..=1.0).contains(&p));
        }
    }
}

#[test]
fn single_leaf_forest() {
    let (scores, labels) = random_scores(3, 30, 3);
    let config = ForestConfig {
        n_trees: 6,
        max_depth: Some(0),
        bootstrap: false,
        probability: ProbabilityMode::LeafFraction,
        ..ForestConfig::default()
    };
    let forest = fit_forest(&scores, &labels, &config).unwrap();
    assert_eq!(mdg_importance(&forest, MdgWeighting::NodeFraction), vec![0.0; 3]);
    assert_eq!(mdg_importance(&forest, MdgWeighting::Unweighted), vec![0.0; 3]);
    let frac = labels.iter().filter(|&&y| y == 1).count() as f64 / 30.0;
    let hm = compute_fpcph(&forest, &scores, &[0, 2], 5).unwrap();
    for &p in hm.probabilities.iter().flatten() {
        assert!((p - frac).abs() < 1e-15);
    }
}

#[test]
fn one_split_of_half_a_unit() {
    let scores = Matrix::from_rows(&[[0.0, 1.0], [0.1, 1.0], [0.9, 1.0], [1.0, 1.0]]).unwrap();
    let config = ForestConfig {
        n_trees: 1,
        bootstrap: false,
        mtry: Some(2),
        ..ForestConfig::default()
    };
    let forest = fit_forest(&scores, &[0, 0, 1, 1], &config).unwrap();
    assert_eq!(mdg_importance(&forest, MdgWeighting::NodeFraction), vec![0.5, 0.0]);
    assert_eq!(mdg_importance(&forest, MdgWeighting::Unweighted), vec![0.5, 0.0]);
}

#[test]
fn mdg_sums_to_recorded_total() {
    let (scores, labels) = random_scores(4, 60, 5);
    let forest = small_forest(&scores, &labels, 40);
    for w in [MdgWeighting::NodeFraction, MdgWeighting::Unweighted] {
        let mdg = mdg_importance(&forest, w);
        let total: f64 = forest
            .trees()
            .iter()
            .flat_map(|t| t.splits())
            .map(|s| match w {
                MdgWeighting::NodeFraction => s.decrease * s.node_fraction,
                MdgWeighting::Unweighted => s.decrease,
            })
            .sum();
        let sum: f64 = mdg.iter().sum();
        assert!((sum - total / 40.0).abs() < 1e-12 * total.max(1.0));
        assert!(mdg.iter().all(|&v| v >= 0.0));
    }
}

const ALL_PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// Thresholds on the first feature.
struct Step;

impl Predictor for Step {
    fn n_features(&self) -> usize {
        2
    }
    fn predict_proba(&self, row: &[f64]) -> f64 {
        if row[0] > 0.5 {
            1.0
        } else {
            0.0
        }
    }
}

#[test]
fn permutation_importance_against_exhaustive_enumeration() {
    let scores = Matrix::from_rows(&[[0.0, 5.0], [1.0, 6.0], [0.2, 7.0]]).unwrap();
    let labels = [0u8, 1, 1];
    // hand count: unpermuted predictions 0,1,0 against labels 0,1,1
    let baseline = 1.0 / 3.0;
    let mut exhaustive = Vec::new();
    for perm in ALL_PERMS {
        let mut wrong = 0;
        for i in 0..3 {
            let x0 = scores.get(perm[i], 0);
            let pred = u8::from(x0 > 0.5);
            wrong += usize::from(pred != labels[i]);
        }
        let e = wrong as f64 / 3.0;
        assert_eq!(permuted_error(&Step, &scores, &labels, 0, &perm), e);
        exhaustive.push(e - baseline);
    }
    let exact_mean = exhaustive.iter().sum::<f64>() / 6.0;

    let repeats = 3000;
    let pi = permutation_importance(&Step, &scores, &labels, repeats, 8).unwrap();
    assert_eq!(pi.baseline_error, baseline);
    for r in 0..repeats {
        let perm = permutation_for(8, 0, r, 3);
        let slot = ALL_PERMS.iter().position(|p| p[..] == perm[..]).unwrap();
        assert_eq!(pi.per_repeat[0][r], exhaustive[slot]);
    }
    // 3000 uniform draws over 6 permutations: standard error near 0.008
    assert!((pi.importances[0] - exact_mean).abs() < 0.04);
    assert!(pi.per_repeat[1].iter().all(|&d| d == 0.0));
}

#[test]
fn anova_f_is_pooled_t_squared() {
    let (scores, labels) = random_scores(5, 37, 3);
    let rows = anova_fpc(&scores, &labels).unwrap();
    for (k, row) in rows.iter().enumerate() {
        let g: [Vec<f64>; 2] = [0u8, 1].map(|c| {
            (0..37)
                .filter(|&i| labels[i] == c)
                .map(|i| scores.get(i, k))
                .collect()
        });
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let ss = |v: &[f64]| {
            let m = mean(v);
            v.iter().map(|x| (x - m) * (x - m)).sum::<f64>()
        };
        let (n0, n1) = (g[0].len() as f64, g[1].len() as f64);
        let pooled = (ss(&g[0]) + ss(&g[1])) / (n0 + n1 - 2.0);
        let t = (mean(&g[0]) - mean(&g[1])) / (pooled * (1.0 / n0 + 1.0 / n1)).sqrt();
        assert!((row.f_statistic - t * t).abs() <= 1e-10 * row.f_statistic.max(1.0));
        assert!((0.0..=1.0).contains(&row.p_value));
        assert!((0.0..=1.0).contains(&row.eta_squared));
    }
}

#[test]
fn anova_p_value_against_statrs() {
    use statrs::distribution::{ContinuousCDF, FisherSnedecor};
    let (scores, labels) = random_scores(6, 25, 4);
    for row in anova_fpc(&scores, &labels).unwrap() {
        let dist = FisherSnedecor::new(1.0, 23.0).unwrap();
        let expected = 1.0 - dist.cdf(row.f_statistic);
        assert!((row.p_value - expected).abs() < 1e-9, "{} vs {}", row.p_value, expected);
    }
}

#[test]
fn unused_feature_has_zero_importances() {
    let (mut scores, labels) = random_scores(7, 50, 3);
    for i in 0..50 {
        scores.set(i, 2, 0.125);
    }
    let forest = small_forest(&scores, &labels, 30);
    assert_eq!(mdg_importance(&forest, MdgWeighting::NodeFraction)[2], 0.0);
    let pi = permutation_importance_oob(&forest, &scores, &labels, 10, 1).unwrap();
    assert!(pi.per_repeat[2].iter().all(|&d| d == 0.0));
    let curve = compute_fpdp(&forest, &scores, 2, 6, PdpScale::Probability);
    // the grid collapses to a single value
    let curve = curve.unwrap();
    assert!(curve.values.windows(2).all(|w| w[0] == w[1]));
}
