//! Uniform time grids and trajectories sampled on them.

use crate::error::{Error, Result};

/// Relative slack allowed when checking that one step is an integer multiple
/// of another.
const COMMENSURATE_RTOL: f64 = 1e-9;

/// Discretization of `[0, t_end]` with a constant step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformGrid {
    t_end: f64,
    step: f64,
    count: usize,
}

impl UniformGrid {
    /// `t_end` must be an integer multiple of `step`.
    pub fn new(t_end: f64, step: f64) -> Result<Self> {
        if !(t_end.is_finite() && t_end > 0.0) {
            return Err(Error::invalid(format!("horizon must be positive, got {t_end}")));
        }
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::invalid(format!("grid step must be positive, got {step}")));
        }
        let intervals = integer_ratio(t_end, step).ok_or_else(|| {
            Error::GridMismatch(format!(
                "horizon {t_end} is not an integer multiple of step {step}"
            ))
        })?;
        Ok(Self {
            t_end,
            step,
            count: intervals + 1,
        })
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// Number of nodes, including both `0` and `t_end`.
    pub fn count(&self) -> usize {
        self.count
    }

    pub fn node(&self, k: usize) -> f64 {
        debug_assert!(k < self.count);
        if k + 1 == self.count {
            self.t_end
        } else {
            k as f64 * self.step
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(move |k| self.node(k))
    }

    /// Number of grid steps spanned by `span`, which must be a positive
    /// integer multiple of the step.
    pub fn steps_in(&self, span: f64) -> Result<usize> {
        if !(span.is_finite() && span > 0.0) {
            return Err(Error::invalid(format!("lag must be positive, got {span}")));
        }
        match integer_ratio(span, self.step) {
            Some(r) if r >= 1 => Ok(r),
            _ => Err(Error::GridMismatch(format!(
                "{span} is not an integer multiple of grid step {}",
                self.step
            ))),
        }
    }

    /// Index of the node at time `t`, which must lie on the grid.
    pub fn index_of(&self, t: f64) -> Result<usize> {
        if t == 0.0 {
            return Ok(0);
        }
        let k = self.steps_in(t)?;
        if k >= self.count {
            return Err(Error::GridMismatch(format!(
                "time {t} lies beyond the horizon {}",
                self.t_end
            )));
        }
        Ok(k)
    }

    pub(crate) fn check_index(&self, k: usize) -> Result<()> {
        if k < self.count {
            Ok(())
        } else {
            Err(Error::invalid(format!(
                "time index {k} out of range for grid with {} nodes",
                self.count
            )))
        }
    }
}

/// `Some(n)` when `num / den` is within rounding of the integer `n`.
pub(crate) fn integer_ratio(num: f64, den: f64) -> Option<usize> {
    let r = num / den;
    let n = r.round();
    if n < 0.0 || (r - n).abs() > COMMENSURATE_RTOL * n.max(1.0) {
        None
    } else {
        Some(n as usize)
    }
}

/// Vector-valued function sampled at every node of a [`UniformGrid`].
///
/// Values are stored row-major: node `k` occupies `values[k*dim..(k+1)*dim]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    grid: UniformGrid,
    dim: usize,
    values: Vec<f64>,
}

impl Trajectory {
    pub fn new(grid: UniformGrid, dim: usize, values: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("trajectory dimension must be at least 1"));
        }
        if values.len() != grid.count() * dim {
            return Err(Error::invalid(format!(
                "expected {} values ({} nodes x dim {dim}), got {}",
                grid.count() * dim,
                grid.count(),
                values.len()
            )));
        }
        Ok(Self { grid, dim, values })
    }

    /// Samples `f` at every grid node.
    pub fn from_fn<F>(grid: UniformGrid, dim: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(f64) -> Vec<f64>,
    {
        let mut values = Vec::with_capacity(grid.count() * dim);
        for t in grid.nodes() {
            let v = f(t);
            if v.len() != dim {
                return Err(Error::invalid(format!(
                    "sample at t={t} has length {}, expected {dim}",
                    v.len()
                )));
            }
            values.extend_from_slice(&v);
        }
        Self::new(grid, dim, values)
    }

    /// Scalar trajectory from a scalar function.
    pub fn scalar<F>(grid: UniformGrid, mut f: F) -> Self
    where
        F: FnMut(f64) -> f64,
    {
        let values = grid.nodes().map(&mut f).collect();
        Self {
            grid,
            dim: 1,
            values,
        }
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.grid.count()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn at(&self, k: usize) -> &[f64] {
        &self.values[k * self.dim..(k + 1) * self.dim]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.dim)
    }

    pub fn component(&self, i: usize) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().skip(i).step_by(self.dim).copied()
    }

    pub(crate) fn same_shape(&self, other: &Trajectory) -> Result<()> {
        if self.dim != other.dim || self.grid != other.grid {
            return Err(Error::GridMismatch(format!(
                "trajectories differ in shape: dim {} on {:?} vs dim {} on {:?}",
                self.dim, self.grid, other.dim, other.grid
            )));
        }
        Ok(())
    }
}

pub(crate) fn euclidean_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
