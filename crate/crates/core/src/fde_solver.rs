//! Explicit steppers for the Caputo Cauchy problem and for the retarded
//! equation that approximates it.
//!
//! With `y = I^{1-α}(x - x0)` the Caputo problem `ᶜD^α x = f(t, x)` turns into
//! `ẏ = f(t, x0 + D^{1-α} y)`. Replacing `D^{1-α}` by the divided G-L
//! difference with lag `h` gives an ordinary equation with finitely many
//! delays, which is integrated step by step.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::frac_ops::{euclidean_norm, gl_sum_at, FractionalOrder, GLWeightTable, RlWeights, Trajectory, UniformGrid};

/// Right-hand side `f(t, x)` written into the output slice.
pub type VectorField = Arc<dyn Fn(f64, &[f64], &mut [f64]) + Send + Sync>;

pub const DEFAULT_GROWTH_BOUND: f64 = 1e6;

/// `ᶜD^α x = f(t, x)`, `x(0) = x0` on `[0, horizon]`.
#[derive(Clone)]
pub struct CaputoProblem {
    field: VectorField,
    x0: Vec<f64>,
    alpha: FractionalOrder,
    horizon: f64,
    growth_bound: f64,
}

impl fmt::Debug for CaputoProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CaputoProblem")
            .field("x0", &self.x0)
            .field("alpha", &self.alpha)
            .field("horizon", &self.horizon)
            .field("growth_bound", &self.growth_bound)
            .finish_non_exhaustive()
    }
}

impl CaputoProblem {
    pub fn new<F>(field: F, x0: Vec<f64>, alpha: FractionalOrder, horizon: f64) -> Result<Self>
    where
        F: Fn(f64, &[f64], &mut [f64]) + Send + Sync + 'static,
    {
        Self::from_shared(Arc::new(field), x0, alpha, horizon)
    }

    pub fn from_shared(field: VectorField, x0: Vec<f64>, alpha: FractionalOrder, horizon: f64) -> Result<Self> {
        if x0.is_empty() {
            return Err(Error::invalid("initial state must have at least one component"));
        }
        if x0.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("initial state must be finite"));
        }
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::invalid(format!("horizon must be positive, got {horizon}")));
        }
        Ok(Self {
            field,
            x0,
            alpha,
            horizon,
            growth_bound: DEFAULT_GROWTH_BOUND,
        })
    }

    /// Sets `c_f` in the runtime guard `‖f(t, x)‖ ≤ (1 + ‖x‖) c_f`.
    pub fn with_growth_bound(mut self, c_f: f64) -> Result<Self> {
        if !(c_f > 0.0) {
            return Err(Error::invalid(format!("growth bound must be positive, got {c_f}")));
        }
        self.growth_bound = c_f;
        Ok(self)
    }

    pub fn x0(&self) -> &[f64] {
        &self.x0
    }

    pub fn dim(&self) -> usize {
        self.x0.len()
    }

    pub fn alpha(&self) -> FractionalOrder {
        self.alpha
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn growth_bound(&self) -> f64 {
        self.growth_bound
    }

    pub fn eval(&self, t: f64, x: &[f64], out: &mut [f64]) {
        (self.field)(t, x, out)
    }

    /// Replaces `x0`, keeping everything else.
    pub fn with_x0(mut self, x0: Vec<f64>) -> Result<Self> {
        if x0.len() != self.x0.len() {
            return Err(Error::invalid("initial state dimension mismatch"));
        }
        self.x0 = x0;
        Ok(self)
    }
}

/// `ẏ = f(t, x0 + h^{α-1} (Δ_h^{1-α} y)(t))`, `y(0) = 0`.
#[derive(Debug, Clone)]
pub struct RetardedProblem {
    base: CaputoProblem,
    h: f64,
}

impl RetardedProblem {
    pub fn new(base: CaputoProblem, h: f64) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::invalid(format!("lag h must be positive, got {h}")));
        }
        Ok(Self { base, h })
    }

    pub fn base(&self) -> &CaputoProblem {
        &self.base
    }

    pub fn h(&self) -> f64 {
        self.h
    }
}

pub(crate) fn check_growth(
    system: &'static str,
    step: usize,
    x: &[f64],
    rhs: &[f64],
    bound: f64,
) -> Result<()> {
    let norm = euclidean_norm(rhs);
    let limit = (1.0 + euclidean_norm(x)) * bound;
    if norm.is_finite() && norm <= limit {
        Ok(())
    } else {
        Err(Error::Diverged {
            system,
            step,
            norm,
            bound: limit,
        })
    }
}

fn check_horizon(grid: &UniformGrid, horizon: f64) -> Result<()> {
    if (grid.t_end() - horizon).abs() > 1e-9 * horizon {
        return Err(Error::GridMismatch(format!(
            "grid ends at {} but the problem horizon is {horizon}",
            grid.t_end()
        )));
    }
    Ok(())
}

/// Explicit product-rectangle fractional Euler recursion
/// `x_{k+1} = x0 + Σ_{j=0}^{k} b_{k-j} F_j`, fed one right-hand side at a time.
pub(crate) struct CaputoStepper {
    x0: Vec<f64>,
    weights: RlWeights,
    rhs: Vec<f64>,
    states: Vec<f64>,
    scratch: Vec<f64>,
}

impl CaputoStepper {
    pub(crate) fn new(x0: &[f64], alpha: FractionalOrder, grid: &UniformGrid) -> Self {
        let dim = x0.len();
        let n = grid.count();
        let mut states = Vec::with_capacity(n * dim);
        states.extend_from_slice(x0);
        Self {
            x0: x0.to_vec(),
            weights: RlWeights::new(alpha.value(), grid.step(), n),
            rhs: Vec::with_capacity(n * dim),
            states,
            scratch: vec![0.0; dim],
        }
    }

    fn dim(&self) -> usize {
        self.x0.len()
    }

    pub(crate) fn current(&self) -> &[f64] {
        let dim = self.dim();
        &self.states[self.states.len() - dim..]
    }

    /// Records `F_k` for the current node and advances to the next one.
    pub(crate) fn advance(&mut self, rhs: &[f64]) {
        self.rhs.extend_from_slice(rhs);
        let m = self.rhs.len() / self.dim();
        self.weights.convolve(&self.rhs, m, &mut self.scratch);
        for (s, x0) in self.scratch.iter_mut().zip(&self.x0) {
            *s += x0;
        }
        self.states.extend_from_slice(&self.scratch);
    }

    pub(crate) fn finish(self, grid: UniformGrid) -> Result<Trajectory> {
        let dim = self.dim();
        Trajectory::new(grid, dim, self.states)
    }
}

/// Classical explicit Euler for the retarded equation, with on-demand
/// reconstruction `x̃_k = x0 + h^{α-1} (Δ_h^{1-α} y)(t_k)`.
pub(crate) struct RetardedStepper {
    x0: Vec<f64>,
    weights: GLWeightTable,
    stride: usize,
    scale: f64,
    step: f64,
    ys: Vec<f64>,
}

impl RetardedStepper {
    pub(crate) fn new(x0: &[f64], alpha: FractionalOrder, h: f64, grid: &UniformGrid) -> Result<Self> {
        let stride = grid.steps_in(h)?;
        let n = grid.count();
        let mut ys = Vec::with_capacity(n * x0.len());
        ys.extend(std::iter::repeat_n(0.0, x0.len()));
        Ok(Self {
            x0: x0.to_vec(),
            weights: GLWeightTable::new(alpha.complement_order(), (n - 1) / stride + 1),
            stride,
            scale: h.powf(alpha.value() - 1.0),
            step: grid.step(),
            ys,
        })
    }

    fn dim(&self) -> usize {
        self.x0.len()
    }

    fn index(&self) -> usize {
        self.ys.len() / self.dim() - 1
    }

    /// `x̃` at the current node, computed from `y_0..=y_k` only.
    pub(crate) fn reconstruct_current(&self, out: &mut [f64]) {
        gl_sum_at(self.weights.weights(), &self.ys, self.stride, self.index(), out);
        for (o, x0) in out.iter_mut().zip(&self.x0) {
            *o = x0 + self.scale * *o;
        }
    }

    pub(crate) fn advance(&mut self, rhs: &[f64]) {
        let dim = self.dim();
        let start = self.ys.len() - dim;
        for (i, r) in rhs.iter().enumerate().take(dim) {
            let next = self.ys[start + i] + self.step * r;
            self.ys.push(next);
        }
    }

    pub(crate) fn finish(self, grid: UniformGrid) -> Result<Trajectory> {
        let dim = self.dim();
        Trajectory::new(grid, dim, self.ys)
    }
}

/// Explicit fractional Euler (product rectangle) solution of the Caputo problem.
pub fn solve_caputo(problem: &CaputoProblem, grid: &UniformGrid) -> Result<Trajectory> {
    check_horizon(grid, problem.horizon)?;
    let dim = problem.dim();
    let mut stepper = CaputoStepper::new(&problem.x0, problem.alpha, grid);
    let mut rhs = vec![0.0; dim];
    for k in 0..grid.count() - 1 {
        let t = grid.node(k);
        let x = stepper.current();
        problem.eval(t, x, &mut rhs);
        check_growth("fractional system", k, x, &rhs, problem.growth_bound)?;
        stepper.advance(&rhs);
    }
    stepper.finish(*grid)
}

/// Step-by-step explicit Euler solution `y` of the retarded approximating problem.
pub fn solve_retarded(problem: &RetardedProblem, grid: &UniformGrid) -> Result<Trajectory> {
    let base = &problem.base;
    check_horizon(grid, base.horizon)?;
    let dim = base.dim();
    let mut stepper = RetardedStepper::new(&base.x0, base.alpha, problem.h, grid)?;
    let mut x_tilde = vec![0.0; dim];
    let mut rhs = vec![0.0; dim];
    for k in 0..grid.count() - 1 {
        stepper.reconstruct_current(&mut x_tilde);
        base.eval(grid.node(k), &x_tilde, &mut rhs);
        check_growth("retarded system", k, &x_tilde, &rhs, base.growth_bound)?;
        stepper.advance(&rhs);
    }
    stepper.finish(*grid)
}

/// `x̃(t_k) = x0 + h^{α-1} (Δ_h^{1-α} y)(t_k)` at every node of `y`'s grid.
pub fn reconstruct(problem: &RetardedProblem, y: &Trajectory) -> Result<Trajectory> {
    let base = &problem.base;
    if y.dim() != base.dim() {
        return Err(Error::invalid(format!(
            "delay state has dimension {} but the problem has {}",
            y.dim(),
            base.dim()
        )));
    }
    let grid = y.grid();
    let stride = grid.steps_in(problem.h)?;
    let n = grid.count();
    let weights = GLWeightTable::new(base.alpha.complement_order(), (n - 1) / stride + 1);
    let scale = problem.h.powf(base.alpha.value() - 1.0);
    let dim = y.dim();
    let mut values = Vec::with_capacity(n * dim);
    let mut buf = vec![0.0; dim];
    for k in 0..n {
        gl_sum_at(weights.weights(), y.as_slice(), stride, k, &mut buf);
        values.extend(buf.iter().zip(&base.x0).map(|(d, x0)| x0 + scale * d));
    }
    Trajectory::new(*grid, dim, values)
}

/// Largest Euclidean distance between two trajectories over the grid nodes.
pub fn sup_error(a: &Trajectory, b: &Trajectory) -> Result<f64> {
    a.same_shape(b)?;
    Ok(a
        .rows()
        .zip(b.rows())
        .map(|(p, q)| p.iter().zip(q).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt())
        .fold(0.0, f64::max))
}

/// `max_k ‖y_{k+1} - y_k‖ / step`, an empirical Lipschitz constant.
pub fn max_slope(y: &Trajectory) -> f64 {
    let step = y.grid().step();
    y.rows()
        .zip(y.rows().skip(1))
        .map(|(a, b)| {
            a.iter().zip(b).map(|(p, q)| (q - p) * (q - p)).sum::<f64>().sqrt() / step
        })
        .fold(0.0, f64::max)
}
