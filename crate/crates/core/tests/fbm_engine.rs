use chaoslab::fbm::properties::property_suite;
use chaoslab::fbm::{sample_paths, FbmGrid, IncrementSampler, SamplingMethod};
use chaoslab::stats::{mean, MeanEstimate};

#[test]
fn grid_inequalities_hold() {
    for r in property_suite(11).unwrap() {
        assert!(r.passed(), "{}: {} > {} ({:?})", r.name, r.statistic, r.threshold, r.details);
    }
}

#[test]
fn brownian_increment_covariance_is_diagonal() {
    let grid = FbmGrid::new(0.5, 4).unwrap();
    let sampler = IncrementSampler::new(grid, SamplingMethod::Cholesky).unwrap();
    let m = 1_000_000;
    let rows = sampler.map_paths(3, m, |_, _, inc| {
        let mut out = [0.0; 16];
        for i in 0..4 {
            for j in 0..4 {
                out[i * 4 + j] = inc[i] * inc[j];
            }
        }
        out
    });
    for i in 0..4 {
        for j in 0..4 {
            let xs: Vec<f64> = rows.iter().map(|r| r[i * 4 + j]).collect();
            let est = MeanEstimate::of(&xs);
            let target = if i == j { 0.25 } else { 0.0 };
            assert!(est.z_score(target).abs() < 3.0, "({i},{j}): {est:?}");
        }
    }
}

#[test]
fn both_samplers_reproduce_lag_one_correlation() {
    let h = 0.3;
    let grid = FbmGrid::new(h, 256).unwrap();
    let target = chaoslab::fbm::rho(h, 1) * grid.increment_variance();
    for method in [SamplingMethod::Cholesky, SamplingMethod::Circulant] {
        let sampler = IncrementSampler::new(grid, method).unwrap();
        // one product per path at a fixed position keeps the replicas independent
        let xs = sampler.map_paths(5, 100_000, |_, _, inc| inc[100] * inc[101]);
        let est = MeanEstimate::of(&xs);
        assert!(est.z_score(target).abs() < 3.0, "{method}: {est:?} vs {target}");
    }
}

#[test]
fn batches_do_not_depend_on_thread_count() {
    let grid = FbmGrid::new(0.3, 1024).unwrap();
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let a = one.install(|| sample_paths(grid, 64, 99, SamplingMethod::Circulant).unwrap());
    let b = four.install(|| sample_paths(grid, 64, 99, SamplingMethod::Circulant).unwrap());
    assert_eq!(a, b);
    let means: Vec<f64> = (0..64).map(|i| mean(a.levels(i))).collect();
    assert!(means.iter().all(|m| m.is_finite()));
}
