//! Special functions and closed forms for the α = 4 planar model:
//! the interference distribution, connection probability, expected
//! connectable-receiver count, Poisson relative entropy and the radial
//! tilt objective.
//!
//! The closed forms all reduce to the complementary error function. The
//! scaled variant `erfcx(x) = exp(x²)·erfc(x)` is used wherever the naive
//! product would overflow; `exp(c²)` alone exceeds f64 range already for
//! c ≳ 27 while the count formulas need c = μ_T·π^{3/2}/2 at large μ_T.

use std::f64::consts::{FRAC_2_SQRT_PI, PI};

use crate::error::{Error, Result};
use crate::quad;

/// π^{3/2}/2, the constant in the interference CDF argument.
#[inline]
pub(crate) fn half_pi_3_2() -> f64 {
    PI * PI.sqrt() * 0.5
}

/// erf by its Maclaurin series; used for |x| < 2 where it is
/// cancellation-safe to better than 1e-14 absolute.
fn erf_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    for n in 1..60 {
        term *= -x2 / n as f64;
        let add = term / (2 * n + 1) as f64;
        sum += add;
        if add.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    FRAC_2_SQRT_PI * sum
}

/// Laplace continued fraction for erfcx, evaluated by the modified Lentz
/// algorithm:
///
/// ```text
/// erfcx(x) = (1/√π) · 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
/// ```
///
/// Converges for x > 0; used for x >= 2 where fewer than ~60 levels reach
/// f64 precision.
fn erfcx_cf(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut fc: f64 = TINY;
    let mut c: f64 = TINY;
    let mut d: f64 = 0.0;
    let mut n: u32 = 1;
    loop {
        let a = if n == 1 { 1.0 } else { (n as f64 - 1.0) * 0.5 };
        d = x + a * d;
        if d == 0.0 {
            d = TINY;
        }
        c = x + a / c;
        if c == 0.0 {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        fc *= delta;
        if (delta - 1.0).abs() < 1e-17 || n > 300 {
            break;
        }
        n += 1;
    }
    fc / PI.sqrt()
}

/// Scaled complementary error function `exp(x²)·erfc(x)`.
///
/// Free of overflow for arbitrarily large positive x (decays like
/// 1/(x√π)). For negative x the reflection `2·exp(x²) − erfcx(−x)` is used
/// and overflows only once `exp(x²)` itself does.
pub fn erfcx(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x == f64::INFINITY {
        return 0.0;
    }
    if x < 0.0 {
        return 2.0 * (x * x).exp() - erfcx(-x);
    }
    if x < 2.0 {
        (x * x).exp() * (1.0 - erf_series(x))
    } else {
        erfcx_cf(x)
    }
}

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x == f64::INFINITY {
        return 0.0;
    }
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x < 2.0 {
        1.0 - erf_series(x)
    } else {
        (-x * x).exp() * erfcx_cf(x)
    }
}

/// CDF of the aggregate interference `Σ_i |X_i|^{-4}` of a homogeneous
/// planar Poisson process with intensity `mu_t`:
///
/// ```text
/// P(Σ|X_i|^{-4} <= x) = erfc(mu_t·π^{3/2} / (2√x)),   x > 0.
/// ```
///
/// At unit intensity this is the inverse-gamma(1/2, π³/4) law; general
/// `mu_t` enters through the scaling `X(mu_t) ≗ X(1)/√mu_t`, under which
/// the sum picks up a factor `mu_t²`. The scaling is cross-checked against
/// direct simulation in the oracle suite.
pub fn interference_cdf(x: f64, mu_t: f64) -> Result<f64> {
    if !(mu_t > 0.0) || !mu_t.is_finite() {
        return Err(Error::invalid(format!("mu_t must be positive, got {mu_t}")));
    }
    if x <= 0.0 {
        return Ok(0.0);
    }
    Ok(erfc(mu_t * half_pi_3_2() / x.sqrt()))
}

/// Probability that a receiver at distance `r` from a unit-power
/// transmitter is connectable at w = t = 1 under interferer intensity
/// `mu_t`:
///
/// ```text
/// P(r^{-4} >= 1 + I) = erfc(mu_t·π^{3/2}·r² / (2·√(1 − r⁴)))
/// ```
///
/// Zero for r >= 1, one in the r → 0 limit.
pub fn connect_prob(r: f64, mu_t: f64) -> f64 {
    debug_assert!(mu_t >= 0.0);
    if r >= 1.0 {
        return 0.0;
    }
    if r <= 0.0 {
        return 1.0;
    }
    let r2 = r * r;
    let one_minus_r4 = (1.0 - r2 * r2).max(0.0);
    if one_minus_r4 == 0.0 {
        return 0.0;
    }
    erfc(mu_t * half_pi_3_2() * r2 / one_minus_r4.sqrt())
}

/// Expected number of receivers connectable to a typical transmitter at
/// w = t = 1, closed form:
///
/// ```text
/// E#Y = mu_r · π · erfcx(mu_t · π^{3/2}/2)
/// ```
///
/// via the identity `∫₀¹ erfc(c·u/√(1−u²)) du = erfcx(c)`; the quadrature
/// route [`expected_connect_count_quad`] must agree to 1e-8.
pub fn expected_connect_count(mu_r: f64, mu_t: f64) -> f64 {
    debug_assert!(mu_r >= 0.0 && mu_t >= 0.0);
    mu_r * PI * erfcx(mu_t * half_pi_3_2())
}

/// Quadrature route for [`expected_connect_count`]:
/// `mu_r · 2π · ∫₀¹ r·connect_prob(r, mu_t) dr` by adaptive Gauss–Kronrod
/// to 1e-10 absolute.
pub fn expected_connect_count_quad(mu_r: f64, mu_t: f64) -> f64 {
    debug_assert!(mu_r >= 0.0 && mu_t >= 0.0);
    let integral = quad::integrate(&|r| r * connect_prob(r, mu_t), 0.0, 1.0, 1e-10);
    mu_r * 2.0 * PI * integral
}

/// Relative-entropy rate `μ·ln μ − μ + 1` between homogeneous Poisson
/// processes of intensity μ and 1, with the 0·ln 0 = 0 convention.
pub fn poisson_entropy(mu: f64) -> Result<f64> {
    if !(mu >= 0.0) || !mu.is_finite() {
        return Err(Error::invalid(format!("entropy argument must be nonnegative, got {mu}")));
    }
    if mu == 0.0 {
        return Ok(1.0);
    }
    Ok(mu.mul_add(mu.ln(), 1.0 - mu))
}

/// The radial tilt objective at distance r:
///
/// ```text
/// λ ln λ − λ + 1 + P(r^{-4} >= 1 + λ²·Σ|X_i|^{-4})
/// ```
///
/// The probability term equals [`connect_prob`] with λ in place of the
/// interferer intensity.
pub fn isolation_objective(r: f64, lam: f64) -> f64 {
    debug_assert!(r > 0.0 && r < 1.0 && lam > 0.0);
    let entropy = lam.mul_add(lam.ln(), 1.0 - lam);
    entropy + connect_prob(r, lam)
}

/// Derivative of [`isolation_objective`] in λ, in the root-friendly form
///
/// ```text
/// ln λ − (π/√(r^{-4}−1)) · exp(−π³λ² / (4(r^{-4}−1)))
/// ```
///
/// The exponent is negative: the second term is the (positive) magnitude
/// of the derivative of the erfc term, so roots satisfy ln λ >= 0.
pub fn stationarity_residual(r: f64, lam: f64) -> f64 {
    debug_assert!(r > 0.0 && r < 1.0 && lam > 0.0);
    let r2 = r * r;
    let r4 = r2 * r2;
    // r^{-4} - 1 = (1 - r^4)/r^4, kept in factored form for stability near 1
    let s = (1.0 - r4) / r4;
    lam.ln() - (PI / s.sqrt()) * (-PI.powi(3) * lam * lam / (4.0 * s)).exp()
}
