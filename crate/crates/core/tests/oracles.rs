//! Transform and fit results checked against brute-force references.

use featxform_core::transform::{
    fit_lloyd_max, fit_optimal_dp, forward_transform, transform_distortion, FitMode, LloydParams, TransformCodebook,
};
use featxform_core::FeatureTensor;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn tensor(values: Vec<f32>) -> FeatureTensor {
    FeatureTensor::from_vec(values, "oracle").unwrap()
}

/// Minimum squared error over every split of sorted data into `k` contiguous runs.
fn enumerate_partitions(sorted: &[f64], k: usize) -> f64 {
    fn sse(xs: &[f64]) -> f64 {
        let m = xs.iter().sum::<f64>() / xs.len() as f64;
        xs.iter().map(|x| (x - m) * (x - m)).sum()
    }
    fn go(xs: &[f64], k: usize) -> f64 {
        if k == 1 {
            return sse(xs);
        }
        (1..=xs.len() - (k - 1)).map(|i| sse(&xs[..i]) + go(&xs[i..], k - 1)).fold(f64::INFINITY, f64::min)
    }
    go(sorted, k) / sorted.len() as f64
}

fn argmin_scan(x: f32, centers: &[f64]) -> u32 {
    let mut best = 0;
    for (k, &c) in centers.iter().enumerate() {
        if (x as f64 - c).abs() < (x as f64 - centers[best]).abs() {
            best = k;
        }
    }
    best as u32
}

#[test]
fn forward_matches_exhaustive_argmin() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let levels = rng.gen_range(2..40);
        let mut centers: Vec<f64> = (0..levels).map(|_| rng.gen_range(-50.0f32..50.0) as f64).collect();
        centers.sort_by(f64::total_cmp);
        centers.dedup();
        if centers.len() < 2 {
            continue;
        }
        let cb = TransformCodebook::new(centers.clone(), FitMode::LloydMax, 0, "").unwrap();
        let mut values: Vec<f32> = (0..300).map(|_| rng.gen_range(-60.0f32..60.0)).collect();
        // Exact ties and the centers themselves.
        values.extend(centers.windows(2).map(|w| ((w[0] + w[1]) * 0.5) as f32));
        values.extend(centers.iter().map(|&c| c as f32));
        let plane = forward_transform(&tensor(values.clone()), &cb);
        for (&x, &s) in values.iter().zip(plane.symbols()) {
            let expect = argmin_scan(x, &centers);
            let (dx, ds) = ((x as f64 - centers[expect as usize]).abs(), (x as f64 - centers[s as usize]).abs());
            assert_eq!(dx, ds, "x={x} picked {s}, argmin {expect}");
            assert!(s <= expect, "ties must go to the lower index");
        }
    }
}

#[test]
fn dp_matches_partition_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let n = rng.gen_range(2..12);
        let levels = rng.gen_range(2..=n.min(5));
        let values: Vec<f32> = (0..n).map(|_| rng.gen_range(-10i32..10) as f32 * 0.5).collect();
        let mut sorted: Vec<f64> = values.iter().map(|&x| x as f64).collect();
        sorted.sort_by(f64::total_cmp);
        let mut distinct = sorted.clone();
        distinct.dedup();
        let data = tensor(values);
        if distinct.len() < levels {
            assert_eq!(fit_optimal_dp(&data, levels as u32).unwrap_err().kind(), "degenerate-input");
            continue;
        }
        let (_, dp) = fit_optimal_dp(&data, levels as u32).unwrap();
        let exact = enumerate_partitions(&sorted, levels);
        assert!((dp - exact).abs() <= 1e-9 * exact.max(1e-12), "dp {dp} vs enumeration {exact}");
    }
}

#[test]
fn dp_hand_examples() {
    let (cb, d) = fit_optimal_dp(&tensor(vec![1.0, 2.0, 3.0, 4.0]), 2).unwrap();
    assert_eq!(cb.centers(), &[1.5, 3.5]);
    assert_eq!(d, 0.25);
    let (cb, d) = fit_optimal_dp(&tensor(vec![0.0, 0.0, 0.0, 10.0]), 2).unwrap();
    assert_eq!(cb.centers(), &[0.0, 10.0]);
    assert_eq!(d, 0.0);
}

#[test]
fn dp_size_limits() {
    let big = tensor((0..5000).map(|i| i as f32).collect());
    assert_eq!(fit_optimal_dp(&big, 4).unwrap_err().kind(), "size-error");
    let small = tensor((0..100).map(|i| i as f32).collect());
    assert_eq!(fit_optimal_dp(&small, 65).unwrap_err().kind(), "size-error");
}

#[test]
fn dp_never_worse_than_lloyd() {
    let mut rng = ChaCha8Rng::seed_from_u64(64);
    for trial in 0..20 {
        let values: Vec<f32> = (0..64).map(|_| rng.gen_range(-1.0f32..1.0).powi(3)).collect();
        let data = tensor(values);
        let (_, dp) = fit_optimal_dp(&data, 8).unwrap();
        let params = LloydParams { seed: trial, ..LloydParams::with_levels(8) };
        let (cb, rep) = fit_lloyd_max(&data, &params).unwrap();
        assert!(dp <= rep.final_distortion * (1.0 + 1e-12));
        let d = transform_distortion(&data, &cb);
        assert!((rep.final_distortion - d).abs() <= 1e-12 * d);
    }
}
