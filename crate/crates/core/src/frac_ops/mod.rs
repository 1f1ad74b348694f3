//! Fractional-calculus operators on sampled trajectories.

mod gl;
mod grid;
mod kernel;
mod rl;
mod special;

pub use gl::{divided_gl_difference, gl_difference, gl_weights, GLWeightTable};
pub(crate) use gl::gl_sum_at;
pub use grid::{Trajectory, UniformGrid};
pub(crate) use grid::{euclidean_norm, integer_ratio};
pub use kernel::{p_alpha_convolution, p_alpha_kernel, p_alpha_partial_integral, KernelIntegral, QuadEstimate};
pub use rl::{caputo_derivative_of_lipschitz, rl_integral, RlWeights};
pub use special::{gamma, ln_gamma, mittag_leffler, mittag_leffler_raw, MittagLefflerOptions};

use crate::error::{Error, Result};

/// Order `α` of a fractional operator, strictly inside `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct FractionalOrder(f64);

impl FractionalOrder {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha > 0.0 && alpha < 1.0 {
            Ok(Self(alpha))
        } else {
            Err(Error::invalid(format!(
                "fractional order must lie in (0, 1), got {alpha}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `1 - α`.
    pub fn complement(self) -> f64 {
        1.0 - self.0
    }

    /// The order `1 - α`, which is again inside `(0, 1)`.
    pub fn complement_order(self) -> FractionalOrder {
        FractionalOrder(1.0 - self.0)
    }
}

impl std::fmt::Display for FractionalOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}
