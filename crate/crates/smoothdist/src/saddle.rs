//! Saddle-point machinery for Ψ(x, y): the solution α(x, y) of
//! `Σ_{p<=y} log p / (p^α − 1) = log x`, the restricted Euler product
//! ζ(s, y), the Hildebrand–Tenenbaum main term, and the closed-form
//! approximation to α.

use crate::error::{Error, Result};
use crate::primes::primes_up_to;

/// Default bisection tolerance on the defining-equation residual.
pub const DEFAULT_ALPHA_TOL: f64 = 1e-10;

const ALPHA_FLOOR: f64 = 1e-9;
const ALPHA_CEIL: f64 = 64.0;

/// A solved saddle point for one `(x, y)` pair.
///
/// `residual` is `|Σ_{p<=y} log p/(p^α − 1) − log x|` re-evaluated at the
/// returned `alpha`; the solver guarantees it is at most the requested
/// tolerance.
#[derive(Debug, Clone, Copy)]
pub struct SaddlePoint {
    pub alpha: f64,
    pub residual: f64,
    pub x: u64,
    pub y: u64,
}

/// Σ log p / (p^α − 1) over the given primes, compensated summation.
fn prime_log_sum(alpha: f64, log_primes: &[f64]) -> f64 {
    let mut sum = 0.0f64;
    let mut carry = 0.0f64;
    for &lp in log_primes {
        let term = lp / ((alpha * lp).exp() - 1.0);
        let t = sum + (term + carry);
        carry = (term + carry) - (t - sum);
        sum = t;
    }
    sum
}

/// Solve for α(x, y) by bisection.
///
/// The map `α ↦ Σ log p/(p^α − 1)` is strictly decreasing with limits +∞ at
/// 0+ and 0 at +∞, so a bracket always exists: we start from
/// `[0.01 / log x, 4]`, halving the lower end while the sum there is still
/// below `log x` and doubling the upper end while the sum there is above,
/// inside the hard window `[1e-9, 64]`.
pub fn solve_alpha(x: u64, y: u64, tol: f64) -> Result<SaddlePoint> {
    if x < 3 || y < 2 {
        return Err(Error::domain("solve_alpha requires x >= 3 and y >= 2"));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::domain("solve_alpha requires tol > 0"));
    }
    let log_x = (x as f64).ln();
    let log_primes: Vec<f64> = primes_up_to(y)
        .into_iter()
        .map(|p| (p as f64).ln())
        .collect();
    let f = |alpha: f64| prime_log_sum(alpha, &log_primes) - log_x;

    let mut lo = 0.01 / log_x;
    while f(lo) <= 0.0 {
        lo /= 2.0;
        if lo < ALPHA_FLOOR {
            return Err(Error::Solver(format!(
                "no lower bracket above {ALPHA_FLOOR} for x={x}, y={y}"
            )));
        }
    }
    let mut hi = 4.0f64;
    while f(hi) >= 0.0 {
        hi *= 2.0;
        if hi > ALPHA_CEIL {
            return Err(Error::Solver(format!(
                "no upper bracket below {ALPHA_CEIL} for x={x}, y={y}"
            )));
        }
    }

    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm.abs() <= tol {
            return Ok(SaddlePoint {
                alpha: mid,
                residual: fm.abs(),
                x,
                y,
            });
        }
        if fm > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::Solver(format!(
        "bisection failed to reach tol {tol} for x={x}, y={y}"
    )))
}

/// ζ(s, y) = Π_{p<=y} (1 − p^{−s})^{−1}, the Dirichlet series of the
/// y-smooth numbers at real s > 0.
pub fn zeta_smooth(s: f64, y: u64) -> Result<f64> {
    if s.is_nan() || s <= 0.0 {
        return Err(Error::domain("zeta_smooth requires s > 0"));
    }
    if y < 2 {
        return Err(Error::domain("zeta_smooth requires y >= 2"));
    }
    let mut product = 1.0f64;
    for p in primes_up_to(y) {
        product *= 1.0 / (1.0 - (p as f64).powf(-s));
    }
    Ok(product)
}

/// Hildebrand–Tenenbaum main term
/// `x^α ζ(α,y) / (α sqrt(2π (1 + log x / y) log x log y))`,
/// without the multiplicative error factor.
pub fn ht_estimate(x: u64, y: u64, sp: &SaddlePoint) -> Result<f64> {
    if sp.x != x || sp.y != y {
        return Err(Error::domain(format!(
            "saddle point solved for ({}, {}) used at ({x}, {y})",
            sp.x, sp.y
        )));
    }
    let log_x = (x as f64).ln();
    let log_y = (y as f64).ln();
    let alpha = sp.alpha;
    let zeta = zeta_smooth(alpha, y)?;
    let denom =
        alpha * (2.0 * std::f64::consts::PI * (1.0 + log_x / y as f64) * log_x * log_y).sqrt();
    Ok((alpha * log_x).exp() * zeta / denom)
}

/// Closed-form approximation `α ≈ 1 − log(u log u)/log y`, `u = log x/log y`.
///
/// The approximation is designed for `log x < y <= x^(1/3)`; the formula is
/// evaluated wherever it is well defined, i.e. `log x < y` and `u log u >= 1`
/// (so the correction term is non-negative).
pub fn alpha_approx(x: u64, y: u64) -> Result<f64> {
    if x < 3 || y < 2 {
        return Err(Error::domain("alpha_approx requires x >= 3 and y >= 2"));
    }
    let log_x = (x as f64).ln();
    let log_y = (y as f64).ln();
    if (y as f64) <= log_x {
        return Err(Error::domain(format!(
            "alpha_approx requires y > log x (y = {y}, log x = {log_x:.3})"
        )));
    }
    let u = log_x / log_y;
    let ulogu = u * u.ln();
    if ulogu < 1.0 {
        return Err(Error::domain(format!(
            "alpha_approx requires u log u >= 1 (got {ulogu:.4})"
        )));
    }
    Ok(1.0 - ulogu.ln() / log_y)
}
