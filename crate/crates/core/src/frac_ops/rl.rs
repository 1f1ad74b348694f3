//! Riemann-Liouville integral by product-rectangle quadrature.

use crate::error::Result;

use super::{gamma, FractionalOrder, Trajectory};

/// Product-rectangle weights `b_m = step^β [(m+1)^β - m^β] / Γ(β+1)`.
///
/// `b_m` is the exact integral of the kernel `(t - τ)^{β-1} / Γ(β)` over the
/// cell that lies `m` cells behind the evaluation node.
#[derive(Debug, Clone)]
pub struct RlWeights {
    weights: Vec<f64>,
}

impl RlWeights {
    pub fn new(order: f64, step: f64, n: usize) -> Self {
        let scale = step.powf(order) / gamma(order + 1.0);
        let mut weights = Vec::with_capacity(n);
        let mut prev = 0.0f64;
        for m in 0..n {
            let next = ((m + 1) as f64).powf(order);
            weights.push(scale * (next - prev));
            prev = next;
        }
        Self { weights }
    }

    pub fn get(&self, m: usize) -> f64 {
        self.weights[m]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }

    /// `Σ_{k=0}^{m-1} b_{m-1-k} · rows[k]` written into `out`.
    pub(crate) fn convolve(&self, rows: &[f64], m: usize, out: &mut [f64]) {
        let dim = out.len();
        out.iter_mut().for_each(|o| *o = 0.0);
        for k in 0..m {
            let b = self.weights[m - 1 - k];
            for (o, v) in out.iter_mut().zip(&rows[k * dim..(k + 1) * dim]) {
                *o += b * v;
            }
        }
    }
}

/// `(I^α φ)(t_m)` with `φ` held constant on each cell at its left-endpoint
/// value and the weakly singular kernel integrated exactly per cell.
pub fn rl_integral(phi: &Trajectory, alpha: FractionalOrder, t_index: usize) -> Result<Vec<f64>> {
    let grid = phi.grid();
    grid.check_index(t_index)?;
    let weights = RlWeights::new(alpha.value(), grid.step(), t_index);
    let mut out = vec![0.0; phi.dim()];
    weights.convolve(phi.as_slice(), t_index, &mut out);
    Ok(out)
}

/// Caputo derivative of a Lipschitz trajectory as `I^{1-α}` of its forward
/// difference quotient. Constant offsets drop out, so `x(0)` is arbitrary.
pub fn caputo_derivative_of_lipschitz(
    x: &Trajectory,
    alpha: FractionalOrder,
    t_index: usize,
) -> Result<Vec<f64>> {
    let grid = x.grid();
    grid.check_index(t_index)?;
    let dim = x.dim();
    let step = grid.step();
    let mut slopes = Vec::with_capacity(t_index * dim);
    for k in 0..t_index {
        let (a, b) = (x.at(k), x.at(k + 1));
        slopes.extend(a.iter().zip(b).map(|(a, b)| (b - a) / step));
    }
    let weights = RlWeights::new(alpha.complement(), step, t_index);
    let mut out = vec![0.0; dim];
    weights.convolve(&slopes, t_index, &mut out);
    Ok(out)
}
