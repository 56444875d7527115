use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use tagdesc_core::bench::{generate_synthetic, SyntheticSpec};
use tagdesc_core::pipeline::{elbow_curve, kmeans, standardize, NumericMatrix};
use tagdesc_core::table::Table;
use tagdesc_core::tagging::{apply_tags, derive_threshold_pair, threshold_pair, Basis};

fn blobs(centers: &[(f64, f64)], per: usize, spread: f64, seed: u64) -> NumericMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, spread).unwrap();
    let mut rows = Vec::new();
    for &(x, y) in centers {
        for _ in 0..per {
            rows.push(vec![x + noise.sample(&mut rng), y + noise.sample(&mut rng)]);
        }
    }
    NumericMatrix::new(vec!["x".into(), "y".into()], rows).unwrap()
}

#[test]
fn three_blobs_show_an_elbow_at_three() {
    let data = blobs(&[(0.0, 0.0), (10.0, 0.0), (5.0, 9.0)], 40, 0.8, 11);
    let curve = elbow_curve(&data, 1..=6, 42, 300, 5).unwrap();
    let sse: Vec<f64> = curve.iter().map(|(_, s)| *s).collect();
    for w in sse.windows(2) {
        assert!(w[1] <= w[0] + 1e-9, "SSE increased: {sse:?}");
    }
    let drop_to_3 = sse[1] - sse[2];
    let drop_to_4 = sse[2] - sse[3];
    assert!(drop_to_3 > 10.0 * drop_to_4, "no elbow at k=3: {sse:?}");
}

#[test]
fn kmeans_is_seed_stable() {
    let data = blobs(&[(0.0, 0.0), (3.0, 3.0)], 30, 1.5, 2);
    let a = kmeans(&data, 4, 9, 100).unwrap();
    let b = kmeans(&data, 4, 9, 100).unwrap();
    assert_eq!(a, b);
}

#[test]
fn synthetic_mean_set_size_matches_binomial_expectation() {
    let c = generate_synthetic(&SyntheticSpec {
        n_items: 1000,
        n_tags: 50,
        density: 0.2,
        seed: 2024,
    })
    .unwrap();
    let mean = c.items().iter().map(|i| i.tags.len()).sum::<usize>() as f64 / 1000.0;
    // Binomial(50, 0.2) has mean 10 and sd 2.83; the mean of 1000 draws has
    // sd 0.09, so +-1 is a wide band.
    assert!((mean - 10.0).abs() <= 1.0, "mean tag-set size {mean}");
}

fn matrix_strategy() -> impl Strategy<Value = NumericMatrix> {
    (2usize..40, 1usize..4).prop_flat_map(|(n, w)| {
        prop::collection::vec(prop::collection::vec(-100.0f64..100.0, w), n).prop_map(move |rows| {
            NumericMatrix::new((0..w).map(|j| format!("c{j}")).collect(), rows).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lloyd_sse_never_increases(data in matrix_strategy(), k in 1usize..6, seed in any::<u64>()) {
        let k = k.min(data.rows());
        let r = kmeans(&data, k, seed, 100).unwrap();
        for w in r.sse_history.windows(2) {
            prop_assert!(w[1] <= w[0] * (1.0 + 1e-12) + 1e-9);
        }
        prop_assert_eq!(r.labels.len(), data.rows());
        let mut used = vec![false; k];
        r.labels.iter().for_each(|&l| used[l] = true);
        prop_assert!(used.iter().all(|&u| u));
    }

    #[test]
    fn standardized_columns_have_unit_scale(data in matrix_strategy()) {
        let Ok(s) = standardize(&data) else { return Ok(()); };
        for j in 0..s.width() {
            let col = s.column(j);
            let n = col.len() as f64;
            let mean = col.iter().sum::<f64>() / n;
            let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
            prop_assert!(mean.abs() < 1e-9);
            prop_assert!((var - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn threshold_pairs_partition_rows(values in prop::collection::vec(-50i32..50, 1..60), mean in any::<bool>()) {
        let column: Vec<f64> = values.iter().map(|&v| v as f64).collect();
        let basis = if mean { Basis::Mean } else { Basis::Median };
        let (below, above) = derive_threshold_pair("v", &column, basis, ("lo", "hi")).unwrap();
        let table = Table::new(
            vec!["v".into()],
            values.iter().map(|v| vec![v.to_string()]).collect(),
        ).unwrap();
        let labels: Vec<String> = (0..values.len()).map(|i| (i % 3).to_string()).collect();
        let set = apply_tags(&table, &labels, &[below, above], None).unwrap();
        let total: usize = set.clusters.iter().map(|c| c.len()).sum();
        prop_assert_eq!(total, values.len());
        let mut upper = 0;
        for c in &set.clusters {
            for item in c.items() {
                prop_assert_eq!(item.tags.len(), 1);
                upper += usize::from(item.tags.contains(1));
            }
        }
        let mut distinct = values.clone();
        distinct.sort_unstable();
        distinct.dedup();
        if !mean && distinct.len() == values.len() {
            prop_assert!(upper >= values.len().div_ceil(2));
        }
    }
}

#[test]
fn several_pairs_give_one_tag_per_pair() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let rows: Vec<Vec<String>> = (0..25)
        .map(|_| (0..4).map(|_| rng.gen_range(0..5).to_string()).collect())
        .collect();
    let table = Table::new((1..=4).map(|q| format!("q{q}")).collect(), rows).unwrap();
    let rules: Vec<_> = (1..=4)
        .flat_map(|q| {
            let (lo, hi) = threshold_pair(
                &format!("q{q}"),
                3.0,
                Basis::Explicit,
                (&format!("t{}", 2 * q - 1), &format!("t{}", 2 * q)),
            );
            [lo, hi]
        })
        .collect();
    let labels = vec!["1".to_string(); 25];
    let set = apply_tags(&table, &labels, &rules, None).unwrap();
    assert!(set.clusters[0].items().iter().all(|i| i.tags.len() == 4));
}
