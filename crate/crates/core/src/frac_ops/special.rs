//! Gamma and Mittag-Leffler functions.

use crate::error::{Error, Result};

use super::FractionalOrder;

/// Euler gamma function (Lanczos approximation from `statrs`).
pub fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

pub fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

/// Truncation controls for the Mittag-Leffler series.
#[derive(Debug, Clone, Copy)]
pub struct MittagLefflerOptions {
    /// Stop once a term falls below this fraction of the running sum.
    pub rel_tol: f64,
    pub max_terms: usize,
    /// Arguments with larger magnitude are rejected.
    pub max_abs_z: f64,
}

impl Default for MittagLefflerOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-16,
            max_terms: 5000,
            max_abs_z: 50.0,
        }
    }
}

/// One-parameter Mittag-Leffler function `E_α(z) = Σ z^k / Γ(αk + 1)`.
///
/// Direct series summation; meant for moderate real arguments. Large negative
/// arguments lose digits to cancellation and are reported as numeric errors.
pub fn mittag_leffler(alpha: FractionalOrder, z: f64) -> Result<f64> {
    mittag_leffler_raw(alpha.value(), z, MittagLefflerOptions::default())
}

/// Same series for any `alpha > 0`; `alpha = 1` gives `exp(z)`.
pub fn mittag_leffler_raw(alpha: f64, z: f64, opts: MittagLefflerOptions) -> Result<f64> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::invalid(format!("alpha must be positive, got {alpha}")));
    }
    if !z.is_finite() || z.abs() > opts.max_abs_z {
        return Err(Error::invalid(format!(
            "argument {z} outside |z| <= {}",
            opts.max_abs_z
        )));
    }
    if z == 0.0 {
        return Ok(1.0);
    }

    let ln_abs_z = z.abs().ln();
    let mut sum = 1.0;
    let mut largest: f64 = 1.0;
    for k in 1..opts.max_terms {
        let kf = k as f64;
        let arg = alpha * kf + 1.0;
        let sign = if z < 0.0 && k % 2 == 1 { -1.0 } else { 1.0 };
        // Direct Γ keeps full precision; logs only once Γ would overflow.
        let term = if arg < 170.0 && k < 300 {
            z.powi(k as i32) / gamma(arg)
        } else {
            sign * (kf * ln_abs_z - ln_gamma(arg)).exp()
        };
        sum += term;
        largest = largest.max(term.abs());

        // Past the peak the terms shrink monotonically.
        let ln_ratio = ln_abs_z + ln_gamma(alpha * kf + 1.0) - ln_gamma(alpha * (kf + 1.0) + 1.0);
        if ln_ratio < 0.0 && term.abs() <= opts.rel_tol * sum.abs() {
            if !sum.is_finite() {
                break;
            }
            if largest > 1e8 * sum.abs() {
                return Err(Error::Numeric(format!(
                    "Mittag-Leffler series for z={z} cancels catastrophically (peak term {largest:.3e}, sum {sum:.3e})"
                )));
            }
            return Ok(sum);
        }
    }
    Err(Error::Numeric(format!(
        "Mittag-Leffler series for alpha={alpha}, z={z} did not converge in {} terms",
        opts.max_terms
    )))
}
