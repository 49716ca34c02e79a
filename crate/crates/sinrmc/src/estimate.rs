//! Likelihood-ratio weighted estimators: the window-event estimator, the
//! conditional Monte Carlo isolation estimator, and replicate statistics.
//!
//! Replicates are embarrassingly parallel; each owns its RNG streams via
//! the seeding contract, and reduction into the report happens in
//! replicate-index order, so results are bit-identical across worker
//! counts.

use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ppp::{
    derive_replicate_seed, sample_annulus, sample_homogeneous, sample_radial, streams, Point2,
    PointLabel, PointPattern, SeedSpec, Window,
};
use crate::sinr::{evaluate_functional, good_region_area, EventSpec, ModelParams, Truncation};
use crate::tilt::{RadialIntensity, TiltSpec};

/// Guard against overflowing per-replicate weights; exp(700) is within an
/// order of magnitude of f64::MAX.
const LOG_WEIGHT_GUARD: f64 = 700.0;

/// Replicate statistics of an estimator run.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorReport {
    pub n_runs: u64,
    /// Arithmetic mean of the per-replicate values, reduced in
    /// replicate-index order.
    pub estimate: f64,
    /// Unbiased sample variance of the per-replicate estimator values.
    pub single_run_variance: f64,
    /// sqrt(variance / n_runs).
    pub std_error: f64,
    /// Replicates where the event fired (window estimator) or the value
    /// was nonzero (conditional Monte Carlo).
    pub hits: u64,
    pub master_seed: u64,
    pub wall_seconds: f64,
}

/// Natural log of the likelihood ratio dP_base/dP_tilted at a sampled
/// configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogWeight {
    pub log_w: f64,
}

/// Log likelihood ratio of the base unit-intensity pair law with respect
/// to the (μ_R, μ_T)-tilted law, given the point counts inside the tilted
/// window:
///
/// ```text
/// log w = |Λ|(μ_R − 1) + |Λ|(μ_T − 1) − #X(Λ)·ln μ_T − #Y(Λ)·ln μ_R
/// ```
///
/// Each intensity is powered by its own process count (μ_T by the
/// transmitter count); the normalization E_tilted[exp(log w)] = 1 pins
/// the pairing. Kept in log space: for |Λ| = 625 the linear-space factor
/// is far outside f64 range.
pub fn pair_log_weight(
    x_count_in: u64,
    y_count_in: u64,
    area: f64,
    mu_r: f64,
    mu_t: f64,
) -> Result<LogWeight> {
    if mu_t <= 0.0 && x_count_in > 0 {
        return Err(Error::WeightUndefined(format!(
            "mu_t = {mu_t} with {x_count_in} transmitters in the window"
        )));
    }
    if mu_r <= 0.0 && y_count_in > 0 {
        return Err(Error::WeightUndefined(format!(
            "mu_r = {mu_r} with {y_count_in} receivers in the window"
        )));
    }
    let mut log_w = area * (mu_r - 1.0) + area * (mu_t - 1.0);
    if x_count_in > 0 {
        log_w -= x_count_in as f64 * mu_t.ln();
    }
    if y_count_in > 0 {
        log_w -= y_count_in as f64 * mu_r.ln();
    }
    Ok(LogWeight { log_w })
}

fn radial_log_weight_with_integral(
    transmitters: &[Point2],
    profile: &RadialIntensity,
    scale: f64,
    disk_integral: f64,
) -> Result<LogWeight> {
    let mut sum_ln = 0.0;
    for p in transmitters {
        let lam = profile.eval(p.norm2().sqrt() / scale);
        if lam <= 0.0 {
            return Err(Error::WeightUndefined(format!(
                "zero tilted intensity at occupied radius {}",
                p.norm2().sqrt()
            )));
        }
        sum_ln += lam.ln();
    }
    Ok(LogWeight { log_w: disk_integral - sum_ln })
}

/// Log likelihood ratio of the base unit-intensity law with respect to the
/// radially tilted law on the disk of the given scale:
///
/// ```text
/// log w = ∫_disk (λ(|y|/scale) − 1) dy − Σ_j ln λ(|X_j|/scale)
/// ```
///
/// The disk integral reduces to `2π·scale²·∫₀¹ r(λ(r) − 1) dr`, evaluated
/// exactly on the piecewise-linear profile.
pub fn radial_log_weight(
    transmitters: &[Point2],
    profile: &RadialIntensity,
    scale: f64,
) -> Result<LogWeight> {
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::invalid(format!("scale must be positive, got {scale}")));
    }
    let integral = std::f64::consts::TAU * scale * scale * profile.weight_integral();
    radial_log_weight_with_integral(transmitters, profile, scale, integral)
}

/// Mean, unbiased sample variance and standard error of the values,
/// accumulated in index order (Welford).
pub fn summarize(values: &[f64]) -> Result<(f64, f64, f64)> {
    if values.len() < 2 {
        return Err(Error::invalid(format!(
            "need at least 2 values to summarize, got {}",
            values.len()
        )));
    }
    let mut mean = 0.0f64;
    let mut m2 = 0.0f64;
    for (i, &v) in values.iter().enumerate() {
        let delta = v - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (v - mean);
    }
    let n = values.len() as f64;
    let variance = m2 / (n - 1.0);
    Ok((mean, variance, (variance / n).sqrt()))
}

pub(crate) struct EventReplicate {
    pub indicator: bool,
    pub x_in: u64,
    pub y_in: u64,
}

fn default_margin(params: &ModelParams) -> Result<f64> {
    match params.trunc {
        Truncation::Finite(b) => Ok(params.connection_radius() + b),
        Truncation::Unbounded => Err(Error::invalid(
            "margin width must be given explicitly when the path loss is untruncated",
        )),
    }
}

/// One replicate of the window experiment: tilted sampling inside Λ_n,
/// base-intensity sampling in the margin annulus, functional evaluation
/// over the transmitters in Λ_n.
fn event_replicate(
    event: &EventSpec,
    params: &ModelParams,
    inner: &Window,
    outer: Option<&Window>,
    mu_r: f64,
    mu_t: f64,
    master_seed: u64,
    rep: u64,
) -> Result<EventReplicate> {
    let seed_for = |tag: u64| derive_replicate_seed(&SeedSpec { master_seed, stream_tag: tag }, rep);

    let tx_in = sample_homogeneous(inner, mu_t, seed_for(streams::TX_INNER), PointLabel::Transmitter)?;
    let rx_in = sample_homogeneous(inner, mu_r, seed_for(streams::RX_INNER), PointLabel::Receiver)?;
    let x_in = tx_in.points.len() as u64;
    let y_in = rx_in.points.len() as u64;

    let mut tx_points = tx_in.points;
    let mut rx_points = rx_in.points;
    let mut window = *inner;
    if let Some(outer) = outer {
        let tx_margin = sample_homogeneous(
            outer,
            params.lambda_t,
            seed_for(streams::TX_MARGIN),
            PointLabel::Transmitter,
        )?;
        let rx_margin = sample_homogeneous(
            outer,
            params.lambda_r,
            seed_for(streams::RX_MARGIN),
            PointLabel::Receiver,
        )?;
        tx_points.extend(tx_margin.points.into_iter().filter(|p| !inner.contains(*p)));
        rx_points.extend(rx_margin.points.into_iter().filter(|p| !inner.contains(*p)));
        window = *outer;
    }
    let tx = PointPattern { points: tx_points, window, label: PointLabel::Transmitter };
    let rx = PointPattern { points: rx_points, window, label: PointLabel::Receiver };
    let value = evaluate_functional(&tx, &rx, inner, params, event.functional);
    Ok(EventReplicate { indicator: event.occurs(value), x_in, y_in })
}

/// Runs untilted-or-tilted window replicates and returns them in
/// replicate-index order. Shared by the event estimator and the
/// cross-entropy pilot.
#[allow(clippy::too_many_arguments)]
pub(crate) fn run_event_replicates(
    event: &EventSpec,
    params: &ModelParams,
    n: f64,
    mu_r: f64,
    mu_t: f64,
    n_runs: u64,
    master_seed: u64,
    margin: Option<f64>,
) -> Result<Vec<EventReplicate>> {
    params.validate()?;
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::invalid(format!("window side must be positive, got {n}")));
    }
    let margin = match margin {
        Some(m) if m >= 0.0 && m.is_finite() => m,
        Some(m) => return Err(Error::invalid(format!("margin must be nonnegative, got {m}"))),
        None => default_margin(params)?,
    };
    let inner = Window::square(n)?;
    let outer = if margin > 0.0 { Some(Window::square(n + 2.0 * margin)?) } else { None };
    (0..n_runs)
        .into_par_iter()
        .map(|rep| event_replicate(event, params, &inner, outer.as_ref(), mu_r, mu_t, master_seed, rep))
        .collect()
}

/// Importance-sampling estimator of the probability of a window event,
/// with an optional homogeneous pair tilt.
///
/// Margin width defaults to `connection_radius + trunc_b`, which fully
/// determines both connectability and truncated interference for every
/// transmitter in the window. A pair tilt requires unit base intensities,
/// matching the likelihood ratio it is weighted with.
pub fn estimate_event(
    event: &EventSpec,
    params: &ModelParams,
    n: f64,
    tilt: &TiltSpec,
    n_runs: u64,
    seed: u64,
    margin: Option<f64>,
) -> Result<EstimatorReport> {
    let start = Instant::now();
    if n_runs < 2 {
        return Err(Error::invalid("need at least 2 replicates"));
    }
    let (mu_r, mu_t) = match tilt {
        TiltSpec::None => (params.lambda_r, params.lambda_t),
        TiltSpec::Pair { mu_r, mu_t } => {
            if params.lambda_r != 1.0 || params.lambda_t != 1.0 {
                return Err(Error::invalid(
                    "pair tilt requires unit base intensities; the weight is a base-1 likelihood ratio",
                ));
            }
            if !(mu_r > &0.0) || !(mu_t > &0.0) || !mu_r.is_finite() || !mu_t.is_finite() {
                return Err(Error::invalid(format!("tilted intensities must be positive, got ({mu_r}, {mu_t})")));
            }
            (*mu_r, *mu_t)
        }
        TiltSpec::Radial(_) => {
            return Err(Error::invalid("radial tilt applies to the isolation estimator only"));
        }
    };
    let reps = run_event_replicates(event, params, n, mu_r, mu_t, n_runs, seed, margin)?;
    let area = n * n;
    let tilted = matches!(tilt, TiltSpec::Pair { .. });
    let mut values = Vec::with_capacity(reps.len());
    let mut hits: u64 = 0;
    for rep in &reps {
        let log_w = if tilted {
            let w = pair_log_weight(rep.x_in, rep.y_in, area, mu_r, mu_t)?.log_w;
            if w > LOG_WEIGHT_GUARD {
                return Err(Error::TiltTooAggressive(w));
            }
            w
        } else {
            0.0
        };
        if rep.indicator {
            hits += 1;
            values.push(log_w.exp());
        } else {
            values.push(0.0);
        }
    }
    let (estimate, single_run_variance, std_error) = summarize(&values)?;
    Ok(EstimatorReport {
        n_runs,
        estimate,
        single_run_variance,
        std_error,
        hits,
        master_seed: seed,
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Conditional Monte Carlo estimator of the isolation probability
/// `p_t = E exp(−λ_R · A)`, where `A` is the good-connection-region area
/// of a transmitter at the origin.
///
/// Transmitters are sampled on the disk of the connection radius under the
/// tilt and at base intensity on the annulus out to `r_out`; the receiver
/// expectation is taken analytically through the void probability, so no
/// receivers are ever sampled. A radial tilt requires unit base
/// transmitter intensity.
pub fn estimate_isolation(
    params: &ModelParams,
    tilt: &TiltSpec,
    n_runs: u64,
    grid_h: f64,
    seed: u64,
    r_out: Option<f64>,
) -> Result<EstimatorReport> {
    let start = Instant::now();
    params.validate()?;
    if n_runs < 2 {
        return Err(Error::invalid("need at least 2 replicates"));
    }
    if !(grid_h > 0.0) || !grid_h.is_finite() {
        return Err(Error::invalid(format!("grid_h must be positive, got {grid_h}")));
    }
    let scale = params.connection_radius();
    let r_out = r_out.unwrap_or(35.0);
    if !(r_out > scale) {
        return Err(Error::invalid(format!(
            "outer sampling radius {r_out} must exceed the connection radius {scale}"
        )));
    }
    let profile: Option<(&RadialIntensity, f64)> = match tilt {
        TiltSpec::None => None,
        TiltSpec::Radial(p) => {
            if params.lambda_t != 1.0 {
                return Err(Error::invalid(
                    "radial tilt requires unit base transmitter intensity; the weight is a base-1 likelihood ratio",
                ));
            }
            let integral = std::f64::consts::TAU * scale * scale * p.weight_integral();
            Some((p, integral))
        }
        TiltSpec::Pair { .. } => {
            return Err(Error::invalid("pair tilt applies to the window-event estimator only"));
        }
    };
    let disk = Window::disk(scale)?;
    let origin = Point2::new(0.0, 0.0);

    let values: Vec<f64> = (0..n_runs)
        .into_par_iter()
        .map(|rep| -> Result<f64> {
            let seed_for =
                |tag: u64| derive_replicate_seed(&SeedSpec { master_seed: seed, stream_tag: tag }, rep);
            let inner = match profile {
                None => sample_homogeneous(
                    &disk,
                    params.lambda_t,
                    seed_for(streams::TX_INNER),
                    PointLabel::Transmitter,
                )?,
                Some((p, _)) => sample_radial(
                    &disk,
                    p,
                    scale,
                    seed_for(streams::TX_INNER),
                    PointLabel::Transmitter,
                )?,
            };
            let log_w = match profile {
                None => 0.0,
                Some((p, integral)) => {
                    radial_log_weight_with_integral(&inner.points, p, scale, integral)?.log_w
                }
            };
            if log_w > LOG_WEIGHT_GUARD {
                return Err(Error::TiltTooAggressive(log_w));
            }
            let annulus = sample_annulus(
                origin,
                scale,
                r_out,
                params.lambda_t,
                seed_for(streams::TX_MARGIN),
                PointLabel::Transmitter,
            )?;
            let mut tx = inner.points;
            tx.extend_from_slice(&annulus.points);
            let area = good_region_area(&tx, params, grid_h)?;
            Ok((log_w - params.lambda_r * area).exp())
        })
        .collect::<Result<Vec<f64>>>()?;

    let hits = values.iter().filter(|&&v| v > 0.0).count() as u64;
    let (estimate, single_run_variance, std_error) = summarize(&values)?;
    Ok(EstimatorReport {
        n_runs,
        estimate,
        single_run_variance,
        std_error,
        hits,
        master_seed: seed,
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sinr::{Comparison, NetworkFunctional};

    #[test]
    fn pair_weight_reference_values() {
        assert_eq!(pair_log_weight(3, 5, 625.0, 1.0, 1.0).unwrap().log_w, 0.0);
        let e = std::f64::consts::E;
        let w = pair_log_weight(1, 0, 1.0, 1.0, e).unwrap().log_w;
        assert!((w - (e - 2.0)).abs() < 1e-15, "{w}");
    }

    #[test]
    fn pair_weight_undefined_cases() {
        assert!(pair_log_weight(1, 0, 1.0, 1.0, 0.0).is_err());
        assert!(pair_log_weight(0, 2, 1.0, -1.0, 1.0).is_err());
        // zero counts make the point terms vanish; no error
        assert!(pair_log_weight(0, 0, 1.0, 1.0, 0.0).is_ok());
    }

    #[test]
    fn radial_weight_reference_values() {
        let unit = RadialIntensity::constant(1.0).unwrap();
        let pts = [Point2::new(0.3, 0.1), Point2::new(-0.5, 0.2)];
        assert_eq!(radial_log_weight(&pts, &unit, 1.0).unwrap().log_w, 0.0);
        let two = RadialIntensity::constant(2.0).unwrap();
        let one = [Point2::new(0.25, 0.25)];
        let w = radial_log_weight(&one, &two, 1.0).unwrap().log_w;
        let want = std::f64::consts::PI - 2f64.ln();
        assert!((w - want).abs() < 1e-12, "{w} vs {want}");
    }

    #[test]
    fn summarize_reference_values() {
        let (m, v, se) = summarize(&[1.0, 1.0, 1.0]).unwrap();
        assert_eq!((m, v), (1.0, 0.0));
        assert_eq!(se, 0.0);
        let (m, v, _) = summarize(&[0.0, 2.0]).unwrap();
        assert_eq!((m, v), (1.0, 2.0));
        assert!(summarize(&[1.0]).is_err());
    }

    #[test]
    fn summarize_matches_two_pass_oracle() {
        let mut s = 3u64;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (s >> 11) as f64 / (1u64 << 53) as f64
        };
        let values: Vec<f64> = (0..1000).map(|_| next() * 10.0 - 3.0).collect();
        let (m, v, se) = summarize(&values).unwrap();
        let mean: f64 = values.iter().sum::<f64>() / values.len() as f64;
        let var: f64 = values.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>()
            / (values.len() - 1) as f64;
        assert!((m - mean).abs() <= 1e-12 * mean.abs());
        assert!((v - var).abs() <= 1e-12 * var);
        assert!((se * se * values.len() as f64 - v).abs() <= 1e-12 * v);
    }

    #[test]
    fn event_estimate_certain_event_is_normalized() {
        // threshold +inf with < comparison: the event always occurs, so the
        // untilted estimate is exactly 1
        let params = ModelParams::default();
        let event = EventSpec {
            functional: NetworkFunctional::AvgConnectCount,
            comparison: Comparison::Less,
            threshold: f64::INFINITY,
        };
        let rep =
            estimate_event(&event, &params, 5.0, &TiltSpec::None, 50, 7, Some(1.0)).unwrap();
        assert_eq!(rep.estimate, 1.0);
        assert_eq!(rep.hits, 50);
        assert_eq!(rep.single_run_variance, 0.0);
    }

    #[test]
    fn estimator_rejects_bad_configs() {
        let params = ModelParams::default();
        let event = EventSpec {
            functional: NetworkFunctional::AvgConnectCount,
            comparison: Comparison::Less,
            threshold: 0.5,
        };
        assert!(estimate_event(&event, &params, 5.0, &TiltSpec::None, 1, 7, Some(1.0)).is_err());
        let radial = TiltSpec::Radial(RadialIntensity::constant(1.2).unwrap());
        assert!(estimate_event(&event, &params, 5.0, &radial, 10, 7, Some(1.0)).is_err());
        let tilted_base = ModelParams { lambda_t: 2.0, ..params };
        let pair = TiltSpec::Pair { mu_r: 0.9, mu_t: 0.9 };
        assert!(estimate_event(&event, &tilted_base, 5.0, &pair, 10, 7, Some(1.0)).is_err());
        // unbounded truncation needs an explicit margin
        let unb = ModelParams { trunc: Truncation::Unbounded, ..params };
        assert!(estimate_event(&event, &unb, 5.0, &TiltSpec::None, 10, 7, None).is_err());
        assert!(estimate_event(&event, &unb, 5.0, &TiltSpec::None, 10, 7, Some(2.0)).is_ok());
    }

    #[test]
    fn isolation_zero_transmitter_value() {
        // lambda_t = 0: every replicate is the bare disk area
        let params = ModelParams { lambda_t: 0.0, threshold: 0.002, ..ModelParams::default() };
        let rep = estimate_isolation(&params, &TiltSpec::None, 4, 0.05, 3, None).unwrap();
        let expected_area = std::f64::consts::PI / (0.002f64).sqrt();
        // midpoint-rule quantization is within 1% of the exact disk area
        let log_est = rep.estimate.ln();
        assert!(
            (log_est + expected_area).abs() < 0.01 * expected_area,
            "ln p = {log_est}, want about {}",
            -expected_area
        );
        assert_eq!(rep.hits, 4);
        assert_eq!(rep.single_run_variance, 0.0);
    }

    #[test]
    fn isolation_rejects_bad_configs() {
        let params = ModelParams { threshold: 0.002, ..ModelParams::default() };
        let pair = TiltSpec::Pair { mu_r: 0.9, mu_t: 0.9 };
        assert!(estimate_isolation(&params, &pair, 10, 0.05, 3, None).is_err());
        assert!(estimate_isolation(&params, &TiltSpec::None, 10, 0.0, 3, None).is_err());
        // outer radius must clear the connection radius
        assert!(estimate_isolation(&params, &TiltSpec::None, 10, 0.05, 3, Some(2.0)).is_err());
        let tilted_base = ModelParams { lambda_t: 2.0, ..params };
        let radial = TiltSpec::Radial(RadialIntensity::constant(1.2).unwrap());
        assert!(estimate_isolation(&tilted_base, &radial, 10, 0.05, 3, None).is_err());
    }
}
