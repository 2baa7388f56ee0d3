//! Lloyd-Max codebook fitting.
//!
//! Each restart alternates nearest-center assignment with a region-mean
//! update until the relative change in mean squared distortion drops to
//! `tol`. The data is sorted once up front; because nearest-center regions
//! are contiguous on the real line, assignment is a single merge walk over the
//! sorted values and the sorted centers.
//!
//! Restart 0 starts from equal-frequency centers. Restart 1 starts from
//! centers spread with density proportional to `p(x)^(1/3)`, the high-rate
//! optimum for squared error; on peaky data the quantile start crowds nearly
//! every center into the peak and Lloyd iterations rarely move them back out.
//! Later restarts use seeded greedy D² (k-means++) seeding. Small jitter around the
//! quantile start almost always falls back into the same local optimum.

use alloc::vec;
use alloc::vec::Vec;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::equal_freq::equal_freq_centers;
use super::{check_levels, midpoint, round_f32, sorted_values, FitMode, TransformCodebook, DEFAULT_LEVELS};
use crate::error::{Error, Result};
use crate::tensor::FeatureTensor;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LloydParams {
    pub levels: u32,
    pub seed: u64,
    pub restarts: u32,
    pub tol: f64,
    pub max_iters: u32,
}

impl Default for LloydParams {
    fn default() -> Self {
        Self { levels: DEFAULT_LEVELS, seed: 0, restarts: 10, tol: 1e-6, max_iters: 200 }
    }
}

impl LloydParams {
    pub fn with_levels(levels: u32) -> Self {
        Self { levels, ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    /// Assignment steps taken by the winning restart.
    pub iterations: u32,
    /// Per-iteration mean squared distortion of the winning restart.
    pub distortion_trace: Vec<f64>,
    pub final_distortion: f64,
    /// Empty-region repairs performed by the winning restart.
    pub reseed_events: u32,
    pub best_restart: u32,
    /// Traces of every restart, in restart order.
    pub restart_traces: Vec<Vec<f64>>,
}

struct RestartOutcome {
    centers: Vec<f64>,
    trace: Vec<f64>,
    reseeds: u32,
}

pub fn fit_lloyd_max(data: &FeatureTensor, params: &LloydParams) -> Result<(TransformCodebook, FitReport)> {
    check_levels(params.levels)?;
    if params.restarts == 0 {
        return Err(Error::param("restarts must be >= 1"));
    }
    if !(params.tol > 0.0 && params.tol.is_finite()) {
        return Err(Error::param("tol must be positive"));
    }
    if params.max_iters == 0 {
        return Err(Error::param("max_iters must be >= 1"));
    }
    let levels = params.levels as usize;
    let sorted32 = sorted_values(data);
    let distinct = distinct_sorted(&sorted32);
    if distinct.len() < levels {
        return Err(Error::degenerate(alloc::format!(
            "{} distinct values cannot fill {levels} levels",
            distinct.len()
        )));
    }
    let xs: Vec<f64> = sorted32.iter().map(|&x| x as f64).collect();
    let base = equal_freq_centers(&sorted32, levels).unwrap_or_else(|_| spread_over_distinct(&distinct, levels));
    let range = xs[xs.len() - 1] - xs[0];

    let mut best: Option<(u32, RestartOutcome)> = None;
    let mut traces = Vec::with_capacity(params.restarts as usize);
    for r in 0..params.restarts {
        let init = match r {
            0 => base.clone(),
            1 => cube_root_density_centers(&xs, levels).unwrap_or_else(|| jittered(&base, range, params.seed, r)),
            _ => d2_seeded(&xs, levels, params.seed, r).unwrap_or_else(|| jittered(&base, range, params.seed, r)),
        };
        let outcome = run_restart(&xs, init, params.tol, params.max_iters);
        traces.push(outcome.trace.clone());
        let d = *outcome.trace.last().expect("trace has at least one entry");
        let better = match &best {
            None => true,
            Some((_, b)) => d < *b.trace.last().expect("non-empty"),
        };
        if better {
            best = Some((r, outcome));
        }
    }
    let (best_restart, outcome) = best.expect("at least one restart");
    let report = FitReport {
        iterations: outcome.trace.len() as u32,
        final_distortion: *outcome.trace.last().expect("non-empty"),
        distortion_trace: outcome.trace,
        reseed_events: outcome.reseeds,
        best_restart,
        restart_traces: traces,
    };
    let cb = TransformCodebook::new(outcome.centers, FitMode::LloydMax, params.seed, data.source_tag())?;
    Ok((cb, report))
}

fn distinct_sorted(sorted: &[f32]) -> Vec<f32> {
    let mut d = sorted.to_vec();
    d.dedup();
    d
}

fn spread_over_distinct(distinct: &[f32], levels: usize) -> Vec<f64> {
    let m = distinct.len();
    (0..levels).map(|i| distinct[(2 * i + 1) * m / (2 * levels)] as f64).collect()
}

fn jittered(base: &[f64], range: f64, seed: u64, restart: u32) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    let amp = 0.01 * range;
    let mut centers: Vec<f64> = base
        .iter()
        .map(|&c| round_f32(c + amp * (2.0 * unit_f64(&mut rng) - 1.0)))
        .collect();
    centers.sort_unstable_by(f64::total_cmp);
    if centers.windows(2).all(|w| w[0] < w[1]) {
        centers
    } else {
        base.to_vec()
    }
}

fn unit_f64(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Greedy D² seeding. Each step draws `2 + ln L` candidate samples with
/// probability proportional to squared distance from the nearest chosen
/// center and keeps the one that lowers the total squared distance most.
fn d2_seeded(xs: &[f64], levels: usize, seed: u64, restart: u32) -> Option<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    let n = xs.len();
    let trials = 2 + libm::log(levels as f64) as usize;
    let first = xs[((unit_f64(&mut rng) * n as f64) as usize).min(n - 1)];
    let mut centers = vec![first];
    let mut dist: Vec<f64> = xs.iter().map(|&x| (x - first) * (x - first)).collect();
    let mut scratch = vec![0.0; n];
    let mut best = vec![0.0; n];
    while centers.len() < levels {
        let total: f64 = dist.iter().sum();
        if !(total > 0.0) {
            return None;
        }
        let mut best_pot = f64::INFINITY;
        let mut best_c = None;
        for _ in 0..trials {
            let target = unit_f64(&mut rng) * total;
            let mut acc = 0.0;
            let mut pick = None;
            for (i, &d) in dist.iter().enumerate() {
                if d > 0.0 {
                    pick = Some(i);
                    acc += d;
                    if acc > target {
                        break;
                    }
                }
            }
            let c = xs[pick?];
            let mut pot = 0.0;
            for ((s, &d), &x) in scratch.iter_mut().zip(&dist).zip(xs) {
                *s = d.min((x - c) * (x - c));
                pot += *s;
            }
            if pot < best_pot {
                best_pot = pot;
                best_c = Some(c);
                core::mem::swap(&mut best, &mut scratch);
            }
        }
        centers.push(best_c?);
        core::mem::swap(&mut dist, &mut best);
    }
    centers.sort_unstable_by(f64::total_cmp);
    centers.windows(2).all(|w| w[0] < w[1]).then_some(centers)
}

/// Centers at equal steps of the cumulative `p^(1/3)` mass, with the density
/// estimated over equal-count runs of the sorted data. `None` when rounding
/// leaves the centers not strictly increasing.
fn cube_root_density_centers(xs: &[f64], levels: usize) -> Option<Vec<f64>> {
    let n = xs.len();
    let segments = (n - 1).min(32 * levels);
    if segments == 0 {
        return None;
    }
    let idx = |i: usize| i * (n - 1) / segments;
    let mut cum = Vec::with_capacity(segments + 1);
    cum.push(0.0);
    for i in 0..segments {
        let (a, b) = (idx(i), idx(i + 1));
        let width = xs[b] - xs[a];
        let mass = libm::cbrt((b - a) as f64) * libm::pow(width, 2.0 / 3.0);
        cum.push(cum[i] + mass);
    }
    let total = cum[segments];
    if !(total > 0.0) {
        return None;
    }
    let mut centers = Vec::with_capacity(levels);
    for k in 0..levels {
        let target = (k as f64 + 0.5) / levels as f64 * total;
        let i = (cum.partition_point(|&c| c < target) - 1).min(segments - 1);
        let span = cum[i + 1] - cum[i];
        let frac = if span > 0.0 { (target - cum[i]) / span } else { 0.0 };
        let (lo, hi) = (xs[idx(i)], xs[idx(i + 1)]);
        centers.push(round_f32(lo + frac * (hi - lo)));
    }
    centers.windows(2).all(|w| w[0] < w[1]).then_some(centers)
}

/// Per-region accumulators from one assignment pass.
struct Assignment {
    counts: Vec<usize>,
    sums: Vec<f64>,
    sse: f64,
    boundaries: Vec<f64>,
    /// Sample with the largest squared error against its own center.
    farthest: usize,
}

fn assign(xs: &[f64], centers: &[f64], out: &mut Assignment) {
    out.counts.iter_mut().for_each(|c| *c = 0);
    out.sums.iter_mut().for_each(|s| *s = 0.0);
    out.sse = 0.0;
    out.farthest = 0;
    let mut worst = -1.0;
    out.boundaries.clear();
    out.boundaries.extend(centers.windows(2).map(|w| midpoint(w[0], w[1])));
    let mut k = 0usize;
    let last = centers.len() - 1;
    for (i, &x) in xs.iter().enumerate() {
        while k < last && x > out.boundaries[k] {
            k += 1;
        }
        let d = x - centers[k];
        let e = d * d;
        out.counts[k] += 1;
        out.sums[k] += x;
        out.sse += e;
        if e > worst {
            worst = e;
            out.farthest = i;
        }
    }
}

fn run_restart(xs: &[f64], mut centers: Vec<f64>, tol: f64, max_iters: u32) -> RestartOutcome {
    let levels = centers.len();
    let n = xs.len() as f64;
    let mut a = Assignment {
        counts: vec![0; levels],
        sums: vec![0.0; levels],
        sse: 0.0,
        boundaries: Vec::with_capacity(levels),
        farthest: 0,
    };
    let mut trace: Vec<f64> = Vec::new();
    let mut reseeds = 0u32;
    loop {
        assign(xs, &centers, &mut a);
        // Each reseed zeroes the error of the farthest sample, so the
        // distortion strictly drops and the loop terminates.
        while let Some(empty) = a.counts.iter().position(|&c| c == 0) {
            centers[empty] = xs[a.farthest];
            centers.sort_unstable_by(f64::total_cmp);
            reseeds += 1;
            assign(xs, &centers, &mut a);
        }
        let d = a.sse / n;
        let converged = trace.last().is_some_and(|&prev| (prev - d).abs() <= tol * d.max(1e-30));
        trace.push(d);
        if converged || d == 0.0 || trace.len() >= max_iters as usize {
            break;
        }
        for k in 0..levels {
            centers[k] = round_f32(a.sums[k] / a.counts[k] as f64);
        }
        debug_assert!(centers.windows(2).all(|w| w[0] < w[1]));
    }
    RestartOutcome { centers, trace, reseeds }
}
