//! The kernel `p_α(τ) = Γ(α)^{-1} Σ_{0 ≤ j < τ} w_j (τ - j)^{α-1}` and
//! quadratures built on it.
//!
//! On every unit interval `[j, j+1)` the kernel is one singular term
//! `w_j (τ - j)^{α-1}` plus a sum that is smooth there. Quadratures work in the
//! local coordinate `s = τ - j`, integrate the singular term exactly per cell
//! and use the midpoint rule for the smooth remainder.

use crate::error::{Error, Result};

use super::{gamma, FractionalOrder, GLWeightTable};

/// Signed and absolute integrals of `p_α` over `(0, upper)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelIntegral {
    pub signed: f64,
    pub abs: f64,
}

/// A quadrature value with its step-halving error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadEstimate {
    pub value: f64,
    pub error: f64,
}

struct Kernel {
    a: f64,
    inv_gamma: f64,
    weights: GLWeightTable,
}

impl Kernel {
    fn new(alpha: FractionalOrder, upper: f64) -> Self {
        let a = alpha.value();
        Self {
            a,
            inv_gamma: 1.0 / gamma(a),
            weights: GLWeightTable::new(alpha, upper.ceil() as usize + 1),
        }
    }

    /// Coefficient of the singular term on `[j, j+1)`.
    fn singular_coeff(&self, j: usize) -> f64 {
        self.weights.get(j) * self.inv_gamma
    }

    /// Part of `p_α(j + s)` that is smooth for `s ∈ [0, 1]`.
    fn regular(&self, j: usize, s: f64) -> f64 {
        let mut acc = 0.0;
        for i in 0..j {
            acc += self.weights.get(i) * (s + (j - i) as f64).powf(self.a - 1.0);
        }
        acc * self.inv_gamma
    }

    fn eval_local(&self, j: usize, s: f64) -> f64 {
        self.singular_coeff(j) * s.powf(self.a - 1.0) + self.regular(j, s)
    }

    /// `∫_{lo}^{hi} p_α(j + s) ds`, singular part exact, smooth part by midpoint.
    fn cell_signed(&self, j: usize, lo: f64, hi: f64) -> f64 {
        let a = self.a;
        let sing = self.singular_coeff(j) * (hi.powf(a) - lo.powf(a)) / a;
        sing + (hi - lo) * self.regular(j, 0.5 * (lo + hi))
    }

    /// `∫ |p_α|` over a cell; bisects cells on which the kernel changes sign.
    fn cell_abs(&self, j: usize, lo: f64, hi: f64, depth: u32) -> f64 {
        let probe = |s: f64| self.eval_local(j, s).signum();
        let width = hi - lo;
        let left = probe(lo + 1e-9 * width);
        let uniform = left == probe(lo + 0.5 * width) && left == probe(hi);
        if uniform || depth == 0 {
            self.cell_signed(j, lo, hi).abs()
        } else {
            let mid = 0.5 * (lo + hi);
            self.cell_abs(j, lo, mid, depth - 1) + self.cell_abs(j, mid, hi, depth - 1)
        }
    }
}

/// Number of dyadic levels used to grade the first cell of each unit interval.
const GRADING_LEVELS: i32 = 40;

/// Evaluates `p_α(τ)` for `τ > 0`.
pub fn p_alpha_kernel(alpha: FractionalOrder, tau: f64) -> Result<f64> {
    if !(tau.is_finite() && tau > 0.0) {
        return Err(Error::invalid(format!("p_alpha requires tau > 0, got {tau}")));
    }
    let a = alpha.value();
    let weights = GLWeightTable::new(alpha, tau.ceil() as usize);
    let mut acc = 0.0;
    let mut j = 0usize;
    while (j as f64) < tau {
        acc += weights.get(j) * (tau - j as f64).powf(a - 1.0);
        j += 1;
    }
    Ok(acc / gamma(a))
}

/// `∫_0^upper p_α` and `∫_0^upper |p_α|`.
///
/// Each unit interval is cut into cells no wider than `quad_step`; the first
/// cell is further split at dyadic points `2^{-k}` towards the singularity.
pub fn p_alpha_partial_integral(alpha: FractionalOrder, upper: f64, quad_step: f64) -> Result<KernelIntegral> {
    check_positive("upper", upper)?;
    check_positive("quad_step", quad_step)?;
    let kernel = Kernel::new(alpha, upper);
    let mut signed = 0.0;
    let mut abs = 0.0;
    let mut j = 0usize;
    while (j as f64) < upper {
        let s_end = (upper - j as f64).min(1.0);
        let cells = (s_end / quad_step).ceil().max(1.0) as usize;
        let width = s_end / cells as f64;

        // graded first cell
        let mut hi = width;
        for _ in 0..GRADING_LEVELS {
            let lo = 0.5 * hi;
            signed += kernel.cell_signed(j, lo, hi);
            abs += kernel.cell_abs(j, lo, hi, 12);
            hi = lo;
        }
        signed += kernel.cell_signed(j, 0.0, hi);
        abs += kernel.cell_signed(j, 0.0, hi).abs();

        for c in 1..cells {
            let lo = c as f64 * width;
            let hi = if c + 1 == cells { s_end } else { lo + width };
            signed += kernel.cell_signed(j, lo, hi);
            abs += kernel.cell_abs(j, lo, hi, 12);
        }
        j += 1;
    }
    Ok(KernelIntegral { signed, abs })
}

/// `∫_0^{t/h} φ(t - τh) p_α(τ) dτ` with a step-halving error estimate.
///
/// The singular term is integrated against the linear interpolant of `φ` on
/// each cell (product trapezoid); the smooth part uses the midpoint rule. The
/// reported value is the finer of the two passes.
pub fn p_alpha_convolution<F>(phi: F, alpha: FractionalOrder, t: f64, h: f64, quad_step: f64) -> Result<QuadEstimate>
where
    F: Fn(f64) -> f64,
{
    check_positive("h", h)?;
    check_positive("quad_step", quad_step)?;
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::invalid(format!("t must be non-negative, got {t}")));
    }
    if t == 0.0 {
        return Ok(QuadEstimate { value: 0.0, error: 0.0 });
    }
    let upper = t / h;
    let kernel = Kernel::new(alpha, upper);
    let (coarse, _) = convolution_pass(&kernel, &phi, t, h, upper, quad_step);
    let (fine, magnitude) = convolution_pass(&kernel, &phi, t, h, upper, 0.5 * quad_step);
    let roundoff = 64.0 * f64::EPSILON * magnitude;
    Ok(QuadEstimate {
        value: fine,
        error: (fine - coarse).abs().max(roundoff),
    })
}

fn convolution_pass<F>(kernel: &Kernel, phi: &F, t: f64, h: f64, upper: f64, quad_step: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let a = kernel.a;
    let at = |tau: f64| phi((t - tau * h).max(0.0));
    let mut total = 0.0;
    let mut magnitude = 0.0;
    let mut j = 0usize;
    while (j as f64) < upper {
        let jf = j as f64;
        let s_end = (upper - jf).min(1.0);
        let cells = (s_end / quad_step).ceil().max(1.0) as usize;
        let width = s_end / cells as f64;
        let c_sing = kernel.singular_coeff(j);
        for c in 0..cells {
            let lo = c as f64 * width;
            let hi = if c + 1 == cells { s_end } else { lo + width };
            let (f_lo, f_hi) = (at(jf + lo), at(jf + hi));
            let mid = 0.5 * (lo + hi);

            let m0 = (hi.powf(a) - lo.powf(a)) / a;
            let m1 = (hi.powf(a + 1.0) - lo.powf(a + 1.0)) / (a + 1.0);
            let slope = (f_hi - f_lo) / (hi - lo);
            let sing = c_sing * (f_lo * m0 + slope * (m1 - lo * m0));
            let reg = (hi - lo) * kernel.regular(j, mid) * at(jf + mid);

            total += sing + reg;
            magnitude += sing.abs() + reg.abs();
        }
        j += 1;
    }
    (total, magnitude)
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be positive, got {v}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn order(a: f64) -> FractionalOrder {
        FractionalOrder::new(a).unwrap()
    }

    #[test]
    fn kernel_on_first_unit_interval() {
        let half = order(0.5);
        assert_relative_eq!(p_alpha_kernel(half, 1.0).unwrap(), 0.564_189_583_547_756_3, max_relative = 1e-13);
        assert_relative_eq!(p_alpha_kernel(half, 0.25).unwrap(), 1.128_379_167_095_512_6, max_relative = 1e-13);
        assert!(p_alpha_kernel(half, 0.0).is_err());
        assert!(p_alpha_kernel(half, -1.0).is_err());
    }

    #[test]
    fn kernel_three_terms() {
        // 40-digit term-by-term evaluation
        assert_relative_eq!(
            p_alpha_kernel(order(0.3), 2.5).unwrap(),
            0.043_492_392_100_269_307,
            max_relative = 1e-12
        );
    }

    #[test]
    fn integral_over_first_unit() {
        let r = p_alpha_partial_integral(order(0.5), 1.0, 1e-3).unwrap();
        let exact = 2.0 / std::f64::consts::PI.sqrt();
        assert_relative_eq!(r.signed, exact, max_relative = 1e-12);
        assert_relative_eq!(r.abs, exact, max_relative = 1e-12);
    }

    #[test]
    fn signed_integral_matches_closed_form() {
        // ∫_0^U p_α = Σ_{j<U} w_j (U-j)^α / Γ(α+1)
        let a = order(0.3);
        let w = GLWeightTable::new(a, 10);
        for upper in [2.0, 3.5, 7.25] {
            let closed: f64 = (0..10)
                .filter(|&j| (j as f64) < upper)
                .map(|j| w.get(j) * (upper - j as f64).powf(0.3))
                .sum::<f64>()
                / gamma(1.3);
            let r = p_alpha_partial_integral(a, upper, 1e-3).unwrap();
            assert_relative_eq!(r.signed, closed, max_relative = 1e-6);
        }
    }

    #[test]
    fn abs_integral_non_decreasing() {
        let a = order(0.5);
        let mut prev = 0.0;
        for upper in [0.5, 1.0, 1.5, 2.0, 4.0, 8.0] {
            let r = p_alpha_partial_integral(a, upper, 2e-3).unwrap();
            assert!(r.abs >= prev);
            assert!(r.abs >= r.signed.abs() - 1e-12);
            prev = r.abs;
        }
    }

    #[test]
    fn convolution_of_constant_is_signed_integral() {
        let a = order(0.7);
        let q = p_alpha_convolution(|_| 1.0, a, 2.0, 0.5, 1e-3).unwrap();
        let w = GLWeightTable::new(a, 4);
        let closed: f64 = (0..4).map(|j| w.get(j) * (4.0 - j as f64).powf(0.7)).sum::<f64>() / gamma(1.7);
        assert!((q.value - closed).abs() <= q.error, "{} vs {closed} (err {})", q.value, q.error);
        assert!(q.error < 1e-8);
        assert_eq!(p_alpha_convolution(|_| 1.0, a, 0.0, 0.5, 1e-3).unwrap().value, 0.0);
    }
}
