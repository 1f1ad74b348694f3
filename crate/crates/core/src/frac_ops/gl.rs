//! Grünwald-Letnikov weights and differences.

use crate::error::{Error, Result};

use super::{FractionalOrder, Trajectory};

/// Signed binomial weights `w_j = (-1)^j C(α, j)`, `j = 0..=n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct GLWeightTable {
    alpha: FractionalOrder,
    weights: Vec<f64>,
}

impl GLWeightTable {
    /// Builds the table with the recurrence `w_j = w_{j-1} (j - 1 - α) / j`.
    pub fn new(alpha: FractionalOrder, n_max: usize) -> Self {
        let a = alpha.value();
        let mut weights = Vec::with_capacity(n_max + 1);
        weights.push(1.0);
        for j in 1..=n_max {
            let jf = j as f64;
            let prev = weights[j - 1];
            weights.push(prev * (jf - 1.0 - a) / jf);
        }
        Self { alpha, weights }
    }

    pub fn alpha(&self) -> FractionalOrder {
        self.alpha
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, j: usize) -> f64 {
        self.weights[j]
    }

    /// `Σ_{j=0}^{m} w_j`.
    pub fn partial_sum(&self, m: usize) -> f64 {
        self.weights[..=m].iter().sum()
    }
}

/// Signed G-L weights up to index `n_max`.
///
/// `n_max` is an `i64` so that negative requests surface as argument errors.
pub fn gl_weights(alpha: FractionalOrder, n_max: i64) -> Result<GLWeightTable> {
    if n_max < 0 {
        return Err(Error::invalid(format!("n_max must be non-negative, got {n_max}")));
    }
    Ok(GLWeightTable::new(alpha, n_max as usize))
}

/// Writes `Σ_{j=0}^{k / stride} w_j · x[k - j·stride]` into `out`.
///
/// `values` is row-major with rows of length `out.len()`; only rows `0..=k`
/// are read. The table must hold at least `k / stride + 1` weights.
pub(crate) fn gl_sum_at(weights: &[f64], values: &[f64], stride: usize, k: usize, out: &mut [f64]) {
    let dim = out.len();
    out.iter_mut().for_each(|o| *o = 0.0);
    let terms = k / stride + 1;
    debug_assert!(weights.len() >= terms);
    for (j, w) in weights[..terms].iter().enumerate() {
        let row = (k - j * stride) * dim;
        for (o, x) in out.iter_mut().zip(&values[row..row + dim]) {
            *o += w * x;
        }
    }
}

/// Fractional difference `(Δ_h^α x)(t_k) = Σ_{j=0}^{[t_k/h]} w_j x(t_k - j h)`.
///
/// `h` must be an integer multiple of the trajectory's grid step.
pub fn gl_difference(x: &Trajectory, alpha: FractionalOrder, h: f64, t_index: usize) -> Result<Vec<f64>> {
    let grid = x.grid();
    let stride = grid.steps_in(h)?;
    grid.check_index(t_index)?;
    let table = GLWeightTable::new(alpha, t_index / stride);
    let mut out = vec![0.0; x.dim()];
    gl_sum_at(table.weights(), x.as_slice(), stride, t_index, &mut out);
    Ok(out)
}

/// `h^{-α} (Δ_h^α x)(t_k)`, the G-L approximation of the R-L derivative.
pub fn divided_gl_difference(
    x: &Trajectory,
    alpha: FractionalOrder,
    h: f64,
    t_index: usize,
) -> Result<Vec<f64>> {
    let mut d = gl_difference(x, alpha, h, t_index)?;
    let scale = h.powf(-alpha.value());
    d.iter_mut().for_each(|v| *v *= scale);
    Ok(d)
}
