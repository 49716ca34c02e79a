//! Importance-sampling changes of measure: the entropy-minimal intensity
//! pair under the average-count constraint, the radially optimal tilting
//! profile, and the cross-entropy pilot.

use crate::analytic::{expected_connect_count, poisson_entropy, stationarity_residual};
use crate::error::{Error, Result};
use crate::estimate;
use crate::sinr::{EventSpec, ModelParams};

/// A tabulated radial intensity profile on [0, 1] with piecewise-linear
/// interpolation. Evaluation beyond 1 returns the value at 1 (the tilt
/// reverts to the base intensity outside the connection-feasible disk);
/// below 0 it returns the value at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialIntensity {
    radii: Vec<f64>,
    values: Vec<f64>,
    sup: f64,
}

impl RadialIntensity {
    /// Builds a profile from strictly increasing radii `0 = r_0 < … < r_m = 1`
    /// and finite, strictly positive values.
    pub fn new(radii: Vec<f64>, values: Vec<f64>) -> Result<RadialIntensity> {
        if radii.len() != values.len() || radii.len() < 2 {
            return Err(Error::invalid("profile needs at least two matching knots"));
        }
        if radii[0] != 0.0 || *radii.last().unwrap() != 1.0 {
            return Err(Error::invalid("profile radii must span [0, 1] exactly"));
        }
        if radii.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::invalid("profile radii must be strictly increasing"));
        }
        if values.iter().any(|v| !v.is_finite() || *v <= 0.0) {
            return Err(Error::invalid("profile values must be finite and positive"));
        }
        let sup = values.iter().cloned().fold(f64::MIN, f64::max);
        Ok(RadialIntensity { radii, values, sup })
    }

    /// Constant profile λ(r) ≡ c.
    pub fn constant(c: f64) -> Result<RadialIntensity> {
        RadialIntensity::new(vec![0.0, 1.0], vec![c, c])
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Cached maximum of the profile (attained at a knot).
    pub fn sup_value(&self) -> f64 {
        self.sup
    }

    /// Piecewise-linear evaluation with flat extension outside [0, 1].
    pub fn eval(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return self.values[0];
        }
        if r >= 1.0 {
            return *self.values.last().unwrap();
        }
        let hi = self.radii.partition_point(|&x| x < r).max(1);
        let (r0, r1) = (self.radii[hi - 1], self.radii[hi]);
        let (v0, v1) = (self.values[hi - 1], self.values[hi]);
        v0 + (v1 - v0) * (r - r0) / (r1 - r0)
    }

    /// Exact `∫₀¹ r·(λ(r) − 1) dr` over the piecewise-linear segments.
    pub fn weight_integral(&self) -> f64 {
        self.mean_count_integral() - 0.5
    }

    /// Exact `∫₀¹ r·λ(r) dr` over the piecewise-linear segments.
    pub fn mean_count_integral(&self) -> f64 {
        let mut acc = 0.0;
        for k in 1..self.radii.len() {
            let (r0, r1) = (self.radii[k - 1], self.radii[k]);
            let (v0, v1) = (self.values[k - 1], self.values[k]);
            let slope = (v1 - v0) / (r1 - r0);
            let sq = (r1 * r1 - r0 * r0) * 0.5;
            let cube = (r1 * r1 * r1 - r0 * r0 * r0) / 3.0;
            acc += v0 * sq + slope * (cube - r0 * sq);
        }
        acc
    }
}

/// Change of measure applied to the sampled point processes.
#[derive(Debug, Clone, PartialEq)]
pub enum TiltSpec {
    /// Identity change of measure; all weights are exactly 1.
    None,
    /// Homogeneous receiver/transmitter intensities (μ_R, μ_T).
    Pair { mu_r: f64, mu_t: f64 },
    /// Radially inhomogeneous transmitter intensity.
    Radial(RadialIntensity),
}

/// Tilted receiver/transmitter intensity pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntensityPair {
    pub mu_r: f64,
    pub mu_t: f64,
}

/// Expected connectable receivers per unit area and unit receiver
/// intensity: `μ_T · π · erfcx(μ_T·π^{3/2}/2)`. This is the law-of-large-
/// numbers limit of the averaged-count functional per μ_R, i.e. the
/// per-transmitter count times the transmitter intensity.
fn per_area_count_per_mu_r(mu_t: f64) -> f64 {
    mu_t * expected_connect_count(1.0, mu_t)
}

fn entropy(mu: f64) -> f64 {
    poisson_entropy(mu).expect("entropy argument is nonnegative by construction")
}

/// Golden-section minimizer of a unimodal function on [lo, hi].
fn golden_section_min<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

/// Entropy-minimal intensity pair whose average connectable-receiver count
/// per unit area equals `a`.
///
/// If the base pair (1, 1) already satisfies the count bound, it is the
/// unconstrained entropy minimum and is returned as-is. Otherwise the
/// entropy is strictly convex with minimum at (1, 1), so the optimum lies
/// on the active constraint; μ_R is eliminated through the constraint and
/// μ_T found by golden-section over [1e-3, 10].
pub fn optimal_pair(a: f64) -> Result<IntensityPair> {
    if !(a > 0.0) {
        return Err(Error::invalid(format!("count threshold must be positive, got {a}")));
    }
    let base = per_area_count_per_mu_r(1.0);
    if base <= a {
        return Ok(IntensityPair { mu_r: 1.0, mu_t: 1.0 });
    }
    let objective = |mu_t: f64| {
        let mu_r = a / per_area_count_per_mu_r(mu_t);
        entropy(mu_r) + entropy(mu_t)
    };
    let mu_t = golden_section_min(objective, 1e-3, 10.0, 1e-8);
    let mu_r = a / per_area_count_per_mu_r(mu_t);
    Ok(IntensityPair { mu_r, mu_t })
}

/// Constraint residual of a pair against the count threshold `a`; zero at
/// the output of [`optimal_pair`] up to floating-point error.
pub fn pair_constraint_residual(pair: &IntensityPair, a: f64) -> f64 {
    pair.mu_r * per_area_count_per_mu_r(pair.mu_t) - a
}

/// Solves the stationarity equation of the radial tilt objective at
/// distance `r`:
///
/// ```text
/// ln λ = (π/√(r^{-4}−1)) · exp(−π³λ²/(4(r^{-4}−1)))
/// ```
///
/// The right-hand side is positive, so the root satisfies λ >= 1. The
/// bracket [1, hi] is grown by doubling until the residual changes sign,
/// then bisected until the residual magnitude drops below `tol`.
pub fn solve_lambda_opt(r: f64, tol: f64) -> Result<f64> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::invalid(format!("radius must be in (0, 1), got {r}")));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid(format!("tolerance must be positive, got {tol}")));
    }
    let mut lo = 1.0f64;
    if stationarity_residual(r, lo).abs() < tol {
        return Ok(lo);
    }
    let mut hi = 2.0f64;
    while stationarity_residual(r, hi) <= 0.0 {
        hi *= 2.0;
        if hi > 1024.0 {
            return Err(Error::Solver(format!(
                "no sign change of the stationarity residual in [1, 1024] at r = {r}"
            )));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let res = stationarity_residual(r, mid);
        if res.abs() < tol {
            return Ok(mid);
        }
        if res < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::Solver(format!("bisection failed to reach tolerance {tol} at r = {r}")))
}

/// Tabulates the optimal radial profile on `m` uniformly spaced radii,
/// the endpoints pinned to the limit value 1.
pub fn tabulate_lambda_profile(m: usize, tol: f64) -> Result<RadialIntensity> {
    if m < 2 {
        return Err(Error::invalid(format!("profile needs at least 2 points, got {m}")));
    }
    let mut radii = Vec::with_capacity(m);
    let mut values = Vec::with_capacity(m);
    for k in 0..m {
        let r = k as f64 / (m - 1) as f64;
        radii.push(r);
        if k == 0 || k == m - 1 {
            values.push(1.0);
        } else {
            values.push(solve_lambda_opt(r, tol)?);
        }
    }
    RadialIntensity::new(radii, values)
}

/// Single-shot cross-entropy pilot: runs `pilot_n` untilted replicates of
/// the window experiment and returns the mean empirical intensities of the
/// transmitter and receiver processes in the window, conditioned on the
/// event occurring.
pub fn cross_entropy_pilot(
    event: &EventSpec,
    params: &ModelParams,
    n: f64,
    pilot_n: u64,
    seed: u64,
    margin: Option<f64>,
) -> Result<IntensityPair> {
    if pilot_n < 1 {
        return Err(Error::invalid("pilot needs at least one replicate"));
    }
    let reps = estimate::run_event_replicates(
        event,
        params,
        n,
        params.lambda_r,
        params.lambda_t,
        pilot_n,
        seed,
        margin,
    )?;
    let mut hits: u64 = 0;
    let mut x_sum: u64 = 0;
    let mut y_sum: u64 = 0;
    for rep in &reps {
        if rep.indicator {
            hits += 1;
            x_sum += rep.x_in;
            y_sum += rep.y_in;
        }
    }
    if hits == 0 {
        return Err(Error::NoPilotHits(pilot_n));
    }
    let area = n * n;
    Ok(IntensityPair {
        mu_r: y_sum as f64 / (hits as f64 * area),
        mu_t: x_sum as f64 / (hits as f64 * area),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic;
    use crate::sinr::{Comparison, NetworkFunctional};

    #[test]
    fn profile_validation() {
        assert!(RadialIntensity::new(vec![0.0, 1.0], vec![1.0, 1.0]).is_ok());
        assert!(RadialIntensity::new(vec![0.1, 1.0], vec![1.0, 1.0]).is_err());
        assert!(RadialIntensity::new(vec![0.0, 0.9], vec![1.0, 1.0]).is_err());
        assert!(RadialIntensity::new(vec![0.0, 0.0, 1.0], vec![1.0, 1.0, 1.0]).is_err());
        assert!(RadialIntensity::new(vec![0.0, 1.0], vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn profile_interpolation_and_extension() {
        let p = RadialIntensity::new(vec![0.0, 0.5, 1.0], vec![1.0, 2.0, 1.5]).unwrap();
        assert_eq!(p.eval(0.0), 1.0);
        assert_eq!(p.eval(0.25), 1.5);
        assert_eq!(p.eval(0.5), 2.0);
        assert_eq!(p.eval(2.0), 1.5);
        assert_eq!(p.eval(-1.0), 1.0);
        assert_eq!(p.sup_value(), 2.0);
    }

    #[test]
    fn profile_integrals_exact() {
        let c = RadialIntensity::constant(2.0).unwrap();
        assert!((c.weight_integral() - 0.5).abs() < 1e-15);
        assert!((c.mean_count_integral() - 1.0).abs() < 1e-15);
        // linear λ(r) = 1 + r: ∫ r(1+r) dr = 1/2 + 1/3
        let lin = RadialIntensity::new(vec![0.0, 1.0], vec![1.0, 2.0]).unwrap();
        assert!((lin.mean_count_integral() - (0.5 + 1.0 / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn optimal_pair_feasible_cases() {
        let p = optimal_pair(0.7).unwrap();
        assert_eq!((p.mu_r, p.mu_t), (1.0, 1.0));
        let boundary = analytic::expected_connect_count(1.0, 1.0);
        let p2 = optimal_pair(boundary).unwrap();
        assert_eq!((p2.mu_r, p2.mu_t), (1.0, 1.0));
        assert!(optimal_pair(0.0).is_err());
        assert!(optimal_pair(-1.0).is_err());
    }

    #[test]
    fn optimal_pair_half_regression() {
        // frozen from a 30-digit offline minimization of the same objective
        let p = optimal_pair(0.5).unwrap();
        assert!((p.mu_r - 0.832332027674).abs() < 1e-4, "mu_r = {}", p.mu_r);
        assert!((p.mu_t - 0.984201480241).abs() < 1e-4, "mu_t = {}", p.mu_t);
        assert!(pair_constraint_residual(&p, 0.5).abs() < 1e-8);
    }

    #[test]
    fn lambda_solver_limits_and_reference() {
        assert!((solve_lambda_opt(1e-3, 1e-12).unwrap() - 1.0).abs() < 1e-3);
        assert!((solve_lambda_opt(0.999, 1e-12).unwrap() - 1.0).abs() < 1e-3);
        // frozen from the offline root of the same equation
        let lam = solve_lambda_opt(0.5816, 1e-12).unwrap();
        assert!((lam - 1.25939354174).abs() < 1e-6, "{lam}");
        assert!(stationarity_residual(0.5816, lam).abs() < 1e-12);
        assert!(solve_lambda_opt(1.2, 1e-12).is_err());
    }

    #[test]
    fn lambda_solver_returns_at_least_one() {
        for r in [0.05, 0.2, 0.42, 0.6, 0.8, 0.95] {
            assert!(solve_lambda_opt(r, 1e-10).unwrap() >= 1.0);
        }
    }

    #[test]
    fn profile_tabulation_shape() {
        let prof = tabulate_lambda_profile(100, 1e-10).unwrap();
        assert_eq!(prof.values()[0], 1.0);
        assert_eq!(*prof.values().last().unwrap(), 1.0);
        for w in prof.values().windows(2) {
            assert!((w[1] - w[0]).abs() < 0.1, "profile must be continuous");
        }
        // unimodal with an interior maximum (observed near r = 0.42)
        let (imax, max) = prof
            .values()
            .iter()
            .enumerate()
            .fold((0, f64::MIN), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
        assert!(imax > 0 && imax < prof.values().len() - 1);
        assert!((max - 1.4096).abs() < 2e-3, "max = {max}");
        assert!(tabulate_lambda_profile(1, 1e-10).is_err());
    }

    #[test]
    fn pilot_unconditional_event_recovers_base_intensities() {
        let params = ModelParams::default();
        let event = EventSpec {
            functional: NetworkFunctional::AvgConnectCount,
            comparison: Comparison::Less,
            threshold: f64::INFINITY,
        };
        let pair = cross_entropy_pilot(&event, &params, 4.0, 3000, 11, Some(1.0)).unwrap();
        // per-replicate intensity estimate has sd 1/4; 3 SE at 3000 reps
        assert!((pair.mu_t - 1.0).abs() < 0.02, "mu_t = {}", pair.mu_t);
        assert!((pair.mu_r - 1.0).abs() < 0.02, "mu_r = {}", pair.mu_r);
    }

    #[test]
    fn pilot_without_hits_errors() {
        let params = ModelParams::default();
        let event = EventSpec {
            functional: NetworkFunctional::AvgConnectCount,
            comparison: Comparison::Less,
            threshold: 0.0,
        };
        let err = cross_entropy_pilot(&event, &params, 4.0, 1, 5, Some(1.0)).unwrap_err();
        assert!(matches!(err, Error::NoPilotHits(1)));
    }
}
