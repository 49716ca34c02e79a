//! Independent brute-force and quadrature oracles.
//!
//! Every oracle avoids the code path it validates: interference samples are
//! summed by a naive loop rather than through the field evaluator, the
//! connect-count simulation never touches the closed forms, and the
//! objective minimizer is a plain grid scan. The `validate` suite bundles
//! the cross-checks that must pass before table experiments are considered
//! meaningful.

use rayon::prelude::*;

use crate::analytic::{erfcx, erfc, expected_connect_count, half_pi_3_2, isolation_objective};
use crate::error::{Error, Result};
use crate::ppp::{derive_replicate_seed, sample_homogeneous, streams, PointLabel, SeedSpec, Window};
use crate::quad;
use crate::tilt::{optimal_pair, pair_constraint_residual, solve_lambda_opt};

/// Aggregate α = 4 interference at the origin, `Σ_j |X_j|^{-4}`, sampled
/// over a Poisson process of the given intensity on a disk of radius
/// `disk_radius`. The truncation bias of the finite disk is bounded by
/// `E[tail] = π·mu_t/disk_radius²`.
pub fn mc_interference_samples(
    mu_t: f64,
    disk_radius: f64,
    n_samples: u64,
    seed: u64,
) -> Result<Vec<f64>> {
    if !(disk_radius >= 10.0) {
        return Err(Error::invalid(format!(
            "disk radius must be at least 10 to keep the tail bias small, got {disk_radius}"
        )));
    }
    let disk = Window::disk(disk_radius)?;
    (0..n_samples)
        .into_par_iter()
        .map(|i| -> Result<f64> {
            let s = derive_replicate_seed(
                &SeedSpec { master_seed: seed, stream_tag: streams::ORACLE_INTERFERENCE },
                i,
            );
            let pattern = sample_homogeneous(&disk, mu_t, s, PointLabel::Transmitter)?;
            let mut sum = 0.0;
            for p in &pattern.points {
                let d2 = p.norm2();
                sum += 1.0 / (d2 * d2);
            }
            Ok(sum)
        })
        .collect()
}

/// Direct simulation of the expected connectable-receiver count of a
/// transmitter at the origin at w = t = 1: interferers of intensity `mu_t`
/// on a disk of radius 50, receivers of intensity `mu_r` on the unit disk.
/// Returns (mean, standard error).
pub fn mc_expected_connect_count(
    mu_r: f64,
    mu_t: f64,
    n_replicates: u64,
    seed: u64,
) -> Result<(f64, f64)> {
    let interferer_disk = Window::disk(50.0)?;
    let receiver_disk = Window::disk(1.0)?;
    let counts: Vec<u32> = (0..n_replicates)
        .into_par_iter()
        .map(|i| -> Result<u32> {
            let s_tx = derive_replicate_seed(
                &SeedSpec { master_seed: seed, stream_tag: streams::ORACLE_CONNECT_TX },
                i,
            );
            let s_rx = derive_replicate_seed(
                &SeedSpec { master_seed: seed, stream_tag: streams::ORACLE_CONNECT_RX },
                i,
            );
            let tx = sample_homogeneous(&interferer_disk, mu_t, s_tx, PointLabel::Transmitter)?;
            let rx = sample_homogeneous(&receiver_disk, mu_r, s_rx, PointLabel::Receiver)?;
            let mut count = 0u32;
            for y in &rx.points {
                let d2 = y.norm2();
                if d2 == 0.0 {
                    count += 1;
                    continue;
                }
                let budget = 1.0 / (d2 * d2) - 1.0;
                if budget <= 0.0 {
                    continue;
                }
                let mut interference = 0.0;
                let mut connected = true;
                for x in &tx.points {
                    let e2 = x.dist2(*y);
                    interference += 1.0 / (e2 * e2);
                    if interference > budget {
                        connected = false;
                        break;
                    }
                }
                if connected {
                    count += 1;
                }
            }
            Ok(count)
        })
        .collect::<Result<Vec<u32>>>()?;
    let n = counts.len() as f64;
    let mean = counts.iter().map(|&c| c as f64).sum::<f64>() / n;
    let var = counts.iter().map(|&c| (c as f64 - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok((mean, (var / n).sqrt()))
}

/// Grid argmin of the radial tilt objective over λ in [1, 10] with step
/// 1e-3; the independent check for the stationarity-equation root.
pub fn brute_objective_min(r: f64) -> f64 {
    let mut best_lam = 1.0;
    let mut best_val = f64::INFINITY;
    for k in 0..=9000u32 {
        let lam = 1.0 + k as f64 * 1e-3;
        let v = isolation_objective(r, lam);
        if v < best_val {
            best_val = v;
            best_lam = lam;
        }
    }
    best_lam
}

/// Absolute gap between the adaptive quadrature of
/// `∫₀¹ erfc(c·u/√(1−u²)) du` and the closed form `erfcx(c)`.
pub fn quad_identity_check(c: f64) -> f64 {
    debug_assert!(c >= 0.0);
    let integral = quad::integrate(
        &|u: f64| {
            let s = 1.0 - u * u;
            if s <= 0.0 {
                return if c == 0.0 { 1.0 } else { 0.0 };
            }
            erfc(c * u / s.sqrt())
        },
        0.0,
        1.0,
        1e-12,
    );
    (integral - erfcx(c)).abs()
}

/// Kolmogorov–Smirnov distance between sorted samples and a CDF.
pub fn ks_distance<F: Fn(f64) -> f64>(sorted: &[f64], cdf: F) -> f64 {
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        d = d.max((f - i as f64 / n).abs());
        d = d.max(((i + 1) as f64 / n - f).abs());
    }
    d
}

/// One validation check: name, observed statistic, bound, verdict.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub statistic: f64,
    pub bound: f64,
    pub pass: bool,
}

impl CheckResult {
    fn close(name: &'static str, statistic: f64, bound: f64) -> CheckResult {
        CheckResult { name, statistic, bound, pass: statistic < bound }
    }
}

/// Parameters for the validation suite.
#[derive(Debug, Clone, Copy)]
pub struct ValidateConfig {
    pub mc_samples: u64,
    pub disk_radius: f64,
    pub seed: u64,
}

impl Default for ValidateConfig {
    fn default() -> Self {
        ValidateConfig { mc_samples: 100_000, disk_radius: 50.0, seed: 0 }
    }
}

/// Median of the unit-intensity interference law by bisection of the
/// closed-form CDF.
pub fn interference_median_from_cdf() -> f64 {
    let cdf = |m: f64| erfc(half_pi_3_2() / m.sqrt());
    let (mut lo, mut hi) = (1.0f64, 1000.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if cdf(mid) < 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Runs every oracle cross-check and returns one result per check.
pub fn validate_suite(cfg: &ValidateConfig) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();

    // Inverse-gamma interference law: KS distance of simulated sums
    // against the closed-form CDF.
    let mut samples = mc_interference_samples(1.0, cfg.disk_radius, cfg.mc_samples, cfg.seed)?;
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let c = half_pi_3_2();
    let ks = ks_distance(&samples, |x| if x <= 0.0 { 0.0 } else { erfc(c / x.sqrt()) });
    out.push(CheckResult::close("inverse-gamma-ks", ks, 0.01));

    // Median as the location statistic (the law has no mean).
    let emp_median = samples[samples.len() / 2];
    let med = interference_median_from_cdf();
    out.push(CheckResult::close(
        "interference-median",
        (emp_median - med).abs(),
        1.0,
    ));

    // Closed-form count against direct simulation.
    let closed = expected_connect_count(1.0, 1.0);
    let (mc, se) = mc_expected_connect_count(1.0, 1.0, cfg.mc_samples, cfg.seed)?;
    out.push(CheckResult::close("connect-count-mc-vs-closed", (mc - closed).abs(), 3.0 * se));

    // Quadrature identity behind the closed-form count.
    let quad_gap = [0.1, 0.5, 1.0, 2.784163, 5.0]
        .iter()
        .map(|&c| quad_identity_check(c))
        .fold(0.0, f64::max);
    out.push(CheckResult::close("quad-identity-max-gap", quad_gap, 1e-8));

    // Stationarity root against the grid argmin of the objective.
    let solver_gap = [0.3, 0.5816, 0.7]
        .iter()
        .map(|&r| {
            let root = solve_lambda_opt(r, 1e-12).expect("solver converges on (0,1)");
            (root - brute_objective_min(r)).abs()
        })
        .fold(0.0, f64::max);
    out.push(CheckResult::close("lambda-root-vs-grid-argmin", solver_gap, 1e-3));

    // Entropy-optimal pair: constraint residual and the reported optimum.
    let pair = optimal_pair(0.5)?;
    out.push(CheckResult::close(
        "optimal-pair-constraint-residual",
        pair_constraint_residual(&pair, 0.5).abs(),
        1e-8,
    ));
    let pair_gap = (pair.mu_r - 0.832).abs().max((pair.mu_t - 0.984).abs());
    out.push(CheckResult::close("optimal-pair-reference", pair_gap, 0.05));

    Ok(out)
}
