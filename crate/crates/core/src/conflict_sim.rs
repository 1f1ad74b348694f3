//! Conflict-controlled fractional system, its retarded approximation and the
//! mutual aiming procedure that couples them.
//!
//! Control sets are finite grids. At each partition node `τ_j` the procedure
//! forms the shift `s̃_j = x(τ_j) - x̃(τ_j)` between the fractional motion and
//! the reconstruction from the delay state, then holds
//!
//! - `u_j ∈ argmin_{u∈P} max_{v∈Q} ⟨s̃_j, g(τ_j, x(τ_j), u, v)⟩` in the fractional system,
//! - `ṽ_j ∈ argmax_{ṽ∈Q} min_{ũ∈P} ⟨s̃_j, g(τ_j, x̃(τ_j), ũ, ṽ)⟩` in the approximating one,
//!
//! until the next node. Ties go to the lowest grid index.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fde_solver::{check_growth, sup_error, CaputoStepper, RetardedStepper, DEFAULT_GROWTH_BOUND};
use crate::frac_ops::{FractionalOrder, Trajectory, UniformGrid};

/// `g(t, x, u, v)` written into the output slice.
pub type ConflictField = Arc<dyn Fn(f64, &[f64], &[f64], &[f64], &mut [f64]) + Send + Sync>;

/// Finite stand-in for a compact control set. Order is fixed at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlGrid {
    dim: usize,
    points: Vec<Vec<f64>>,
}

impl ControlGrid {
    /// Drops exact duplicates, keeping the first occurrence.
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let dim = points
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::invalid("control grid must be nonempty"))?;
        if dim == 0 {
            return Err(Error::invalid("control vectors must have at least one component"));
        }
        let mut unique: Vec<Vec<f64>> = Vec::with_capacity(points.len());
        for p in points {
            if p.len() != dim {
                return Err(Error::invalid("control vectors must share one dimension"));
            }
            if p.iter().any(|c| !c.is_finite()) {
                return Err(Error::invalid("control vectors must be finite"));
            }
            if !unique.contains(&p) {
                unique.push(p);
            }
        }
        Ok(Self { dim, points: unique })
    }

    /// `n` equally spaced scalars from `lo` to `hi`, endpoints included.
    pub fn uniform(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if n == 0 || !(lo <= hi) {
            return Err(Error::invalid(format!("bad uniform control grid [{lo}, {hi}] with {n} points")));
        }
        if n == 1 {
            return Self::new(vec![vec![0.5 * (lo + hi)]]);
        }
        let span = hi - lo;
        let last = (n - 1) as f64;
        Self::new(
            (0..n)
                .map(|i| {
                    if i + 1 == n {
                        vec![hi]
                    } else {
                        vec![lo + span * i as f64 / last]
                    }
                })
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        self.points.iter().any(|q| q.as_slice() == p)
    }

    /// Componentwise `(min, max)` over the grid points.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let mut lo = self.points[0].clone();
        let mut hi = self.points[0].clone();
        for p in &self.points[1..] {
            for i in 0..self.dim {
                lo[i] = lo[i].min(p[i]);
                hi[i] = hi[i].max(p[i]);
            }
        }
        (lo, hi)
    }
}

/// `ᶜD^α x = g(t, x, u, v)` with `u ∈ P`, `v ∈ Q`.
#[derive(Clone)]
pub struct ConflictDynamics {
    g: ConflictField,
    dim: usize,
    p: ControlGrid,
    q: ControlGrid,
    growth_bound: f64,
}

impl fmt::Debug for ConflictDynamics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConflictDynamics")
            .field("dim", &self.dim)
            .field("p_points", &self.p.len())
            .field("q_points", &self.q.len())
            .field("growth_bound", &self.growth_bound)
            .finish_non_exhaustive()
    }
}

impl ConflictDynamics {
    pub fn new<G>(g: G, dim: usize, p: ControlGrid, q: ControlGrid) -> Result<Self>
    where
        G: Fn(f64, &[f64], &[f64], &[f64], &mut [f64]) + Send + Sync + 'static,
    {
        Self::from_shared(Arc::new(g), dim, p, q)
    }

    pub fn from_shared(g: ConflictField, dim: usize, p: ControlGrid, q: ControlGrid) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("state dimension must be at least 1"));
        }
        Ok(Self {
            g,
            dim,
            p,
            q,
            growth_bound: DEFAULT_GROWTH_BOUND,
        })
    }

    /// Sets `c_g` in the runtime guard `‖g(t, x, u, v)‖ ≤ (1 + ‖x‖) c_g`.
    pub fn with_growth_bound(mut self, c_g: f64) -> Result<Self> {
        if !(c_g > 0.0) {
            return Err(Error::invalid(format!("growth bound must be positive, got {c_g}")));
        }
        self.growth_bound = c_g;
        Ok(self)
    }

    /// Same dynamics with different control grids.
    pub fn with_controls(mut self, p: ControlGrid, q: ControlGrid) -> Self {
        self.p = p;
        self.q = q;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn p(&self) -> &ControlGrid {
        &self.p
    }

    pub fn q(&self) -> &ControlGrid {
        &self.q
    }

    pub fn growth_bound(&self) -> f64 {
        self.growth_bound
    }

    pub fn eval(&self, t: f64, x: &[f64], u: &[f64], v: &[f64], out: &mut [f64]) {
        (self.g)(t, x, u, v, out)
    }

    /// `⟨s, g(t, x, P_i, Q_l)⟩` for every pair, row `i` per `u`.
    fn payoffs(&self, t: f64, x: &[f64], s: &[f64]) -> Result<PayoffMatrix> {
        if x.len() != self.dim || s.len() != self.dim {
            return Err(Error::invalid(format!(
                "state and shift must have dimension {}, got {} and {}",
                self.dim,
                x.len(),
                s.len()
            )));
        }
        let cols = self.q.len();
        let mut values = Vec::with_capacity(self.p.len() * cols);
        let mut out = vec![0.0; self.dim];
        for u in self.p.points() {
            for v in self.q.points() {
                self.eval(t, x, u, v, &mut out);
                check_growth("conflict dynamics", 0, x, &out, self.growth_bound)?;
                values.push(s.iter().zip(&out).map(|(a, b)| a * b).sum());
            }
        }
        Ok(PayoffMatrix { cols, values })
    }
}

struct PayoffMatrix {
    cols: usize,
    values: Vec<f64>,
}

impl PayoffMatrix {
    fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.cols)
    }

    /// `(argmin_i max_l, min_i max_l)`, lowest index on ties.
    fn min_max(&self) -> (usize, f64) {
        let mut best = (0, f64::INFINITY);
        for (i, row) in self.rows().enumerate() {
            let worst = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if worst < best.1 {
                best = (i, worst);
            }
        }
        best
    }

    /// `(argmax_l min_i, max_l min_i)`, lowest index on ties.
    fn max_min(&self) -> (usize, f64) {
        let mut col_min = vec![f64::INFINITY; self.cols];
        for row in self.rows() {
            for (m, v) in col_min.iter_mut().zip(row) {
                *m = m.min(*v);
            }
        }
        let mut best = (0, f64::NEG_INFINITY);
        for (l, &m) in col_min.iter().enumerate() {
            if m > best.1 {
                best = (l, m);
            }
        }
        best
    }
}

/// `H(t, x, s) = min_{u∈P} max_{v∈Q} ⟨s, g(t, x, u, v)⟩` over the grids.
pub fn hamiltonian(d: &ConflictDynamics, t: f64, x: &[f64], s: &[f64]) -> Result<f64> {
    Ok(d.payoffs(t, x, s)?.min_max().1)
}

/// `max_{v∈Q} min_{u∈P} ⟨s, g(t, x, u, v)⟩` over the grids.
pub fn lower_value(d: &ConflictDynamics, t: f64, x: &[f64], s: &[f64]) -> Result<f64> {
    Ok(d.payoffs(t, x, s)?.max_min().1)
}

/// Index into `P` of the minimax control.
pub fn extremal_u_index(d: &ConflictDynamics, t: f64, x: &[f64], s: &[f64]) -> Result<usize> {
    Ok(d.payoffs(t, x, s)?.min_max().0)
}

/// Index into `Q` of the maximin disturbance.
pub fn extremal_v_index(d: &ConflictDynamics, t: f64, x_tilde: &[f64], s: &[f64]) -> Result<usize> {
    Ok(d.payoffs(t, x_tilde, s)?.max_min().0)
}

/// Control from `P` minimising the worst-case `⟨s, g⟩`.
pub fn extremal_u(d: &ConflictDynamics, t: f64, x: &[f64], s: &[f64]) -> Result<Vec<f64>> {
    Ok(d.p.point(extremal_u_index(d, t, x, s)?).to_vec())
}

/// Disturbance from `Q` maximising the best-case `⟨s, g⟩`, evaluated at the
/// approximating state.
pub fn extremal_v(d: &ConflictDynamics, t: f64, x_tilde: &[f64], s: &[f64]) -> Result<Vec<f64>> {
    Ok(d.q.point(extremal_v_index(d, t, x_tilde, s)?).to_vec())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SaddleSample {
    pub t: f64,
    pub x: Vec<f64>,
    pub s: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SaddleReport {
    /// `minmax - maxmin` per sample; never negative on finite grids.
    pub gaps: Vec<f64>,
    pub max_gap: f64,
    pub tolerance: f64,
    /// Indices of samples whose gap exceeds `tolerance`.
    pub violations: Vec<usize>,
}

impl SaddleReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Samples the saddle condition `min max ⟨s, g⟩ = max min ⟨s, g⟩`.
pub fn saddle_check(d: &ConflictDynamics, samples: &[SaddleSample], tolerance: f64) -> Result<SaddleReport> {
    if samples.is_empty() {
        return Err(Error::invalid("saddle check needs at least one sample"));
    }
    let mut gaps = Vec::with_capacity(samples.len());
    for sample in samples {
        let m = d.payoffs(sample.t, &sample.x, &sample.s)?;
        gaps.push(m.min_max().1 - m.max_min().1);
    }
    let max_gap = gaps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let violations = gaps
        .iter()
        .enumerate()
        .filter(|(_, &g)| g > tolerance)
        .map(|(i, _)| i)
        .collect();
    Ok(SaddleReport {
        gaps,
        max_gap,
        tolerance,
        violations,
    })
}

/// Control or disturbance signal sampled at every node of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization(Trajectory);

impl Realization {
    pub fn from_fn<F>(grid: UniformGrid, dim: usize, f: F) -> Result<Self>
    where
        F: FnMut(f64) -> Vec<f64>,
    {
        Ok(Self(Trajectory::from_fn(grid, dim, f)?))
    }

    pub fn from_trajectory(samples: Trajectory) -> Self {
        Self(samples)
    }

    pub fn constant(grid: UniformGrid, value: Vec<f64>) -> Result<Self> {
        let dim = value.len();
        Self::from_fn(grid, dim, move |_| value.clone())
    }

    pub fn samples(&self) -> &Trajectory {
        &self.0
    }

    pub fn at(&self, k: usize) -> &[f64] {
        self.0.at(k)
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn grid(&self) -> &UniformGrid {
        self.0.grid()
    }

    /// Every sample lies in the grid's bounding box (up to `1e-12`).
    pub fn within_box_of(&self, set: &ControlGrid) -> bool {
        let (lo, hi) = set.bounding_box();
        self.dim() == set.dim()
            && self.0.rows().all(|r| {
                r.iter()
                    .zip(lo.iter().zip(&hi))
                    .all(|(c, (l, h))| *c >= l - 1e-12 && *c <= h + 1e-12)
            })
    }

    /// Every sample is a grid point.
    pub fn members_of(&self, set: &ControlGrid) -> bool {
        self.0.rows().all(|r| set.contains(r))
    }
}

/// Partition `0 = τ_1 < … < τ_{k+1} = T` whose nodes sit on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct AimingPartition {
    nodes: Vec<f64>,
    indices: Vec<usize>,
}

impl AimingPartition {
    pub fn new(nodes: Vec<f64>, grid: &UniformGrid) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::invalid("partition needs at least two nodes"));
        }
        if nodes[0] != 0.0 {
            return Err(Error::invalid("partition must start at 0"));
        }
        let mut indices = Vec::with_capacity(nodes.len());
        for &t in &nodes {
            indices.push(grid.index_of(t)?);
        }
        if indices.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("partition nodes must be strictly increasing"));
        }
        if *indices.last().unwrap() != grid.count() - 1 {
            return Err(Error::invalid("partition must end at the horizon"));
        }
        Ok(Self { nodes, indices })
    }

    /// Constant step `delta`, which must divide the horizon into grid steps.
    pub fn uniform(delta: f64, grid: &UniformGrid) -> Result<Self> {
        let stride = grid.steps_in(delta)?;
        let last = grid.count() - 1;
        if !last.is_multiple_of(stride) {
            return Err(Error::GridMismatch(format!(
                "partition step {delta} does not divide the horizon {}",
                grid.t_end()
            )));
        }
        let indices: Vec<usize> = (0..=last).step_by(stride).collect();
        let nodes = indices.iter().map(|&k| grid.node(k)).collect();
        Ok(Self { nodes, indices })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Grid indices of the nodes.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn diameter(&self) -> f64 {
        self.nodes.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }
}

/// Numerical setup shared by both motions in an aiming run.
#[derive(Debug, Clone)]
pub struct AimingSetup {
    pub alpha: FractionalOrder,
    pub x0: Vec<f64>,
    pub grid: UniformGrid,
    /// Lag of the G-L difference in the approximating system.
    pub h: f64,
    pub partition: AimingPartition,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AimingResult {
    /// Fractional motion.
    pub x: Trajectory,
    /// Delay state of the approximating system.
    pub y: Trajectory,
    /// Reconstruction `x0 + h^{α-1} Δ_h^{1-α} y`.
    pub x_tilde: Trajectory,
    pub u: Realization,
    pub v: Realization,
    pub u_tilde: Realization,
    pub v_tilde: Realization,
    pub sup_error: f64,
}

/// Co-simulates the fractional motion under `(u, v_exo)` and the approximating
/// motion under `(u_tilde_exo, ṽ)`, with `u` and `ṽ` formed by mutual aiming.
pub fn run_aiming(
    d: &ConflictDynamics,
    setup: &AimingSetup,
    v_exo: &Realization,
    u_tilde_exo: &Realization,
) -> Result<AimingResult> {
    let grid = setup.grid;
    let n = d.dim();
    if setup.x0.len() != n {
        return Err(Error::invalid(format!("x0 has dimension {}, dynamics {n}", setup.x0.len())));
    }
    for (name, r, set) in [("v", v_exo, &d.q), ("u_tilde", u_tilde_exo, &d.p)] {
        if *r.grid() != grid {
            return Err(Error::GridMismatch(format!("realization {name} is sampled on a different grid")));
        }
        if r.dim() != set.dim() {
            return Err(Error::invalid(format!("realization {name} has the wrong control dimension")));
        }
    }
    if *setup.partition.indices().last().unwrap() != grid.count() - 1 {
        return Err(Error::GridMismatch("partition does not end at the grid horizon".into()));
    }

    let mut fractional = CaputoStepper::new(&setup.x0, setup.alpha, &grid);
    let mut retarded = RetardedStepper::new(&setup.x0, setup.alpha, setup.h, &grid)?;

    let count = grid.count();
    let mut x_tilde_vals = Vec::with_capacity(count * n);
    let mut u_vals = Vec::with_capacity(count * d.p.dim());
    let mut v_tilde_vals = Vec::with_capacity(count * d.q.dim());

    let mut x_tilde = vec![0.0; n];
    let mut shift = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    let mut u_idx = 0usize;
    let mut v_idx = 0usize;
    let mut next_node = setup.partition.indices().iter().peekable();

    for k in 0..count {
        let t = grid.node(k);
        retarded.reconstruct_current(&mut x_tilde);
        x_tilde_vals.extend_from_slice(&x_tilde);

        if next_node.peek() == Some(&&k) {
            next_node.next();
            if k + 1 < count {
                let x = fractional.current();
                for i in 0..n {
                    shift[i] = x[i] - x_tilde[i];
                }
                u_idx = extremal_u_index(d, t, x, &shift).map_err(|e| at_step(e, k))?;
                v_idx = extremal_v_index(d, t, &x_tilde, &shift).map_err(|e| at_step(e, k))?;
            }
        }
        let u = d.p.point(u_idx);
        let v_tilde = d.q.point(v_idx);
        u_vals.extend_from_slice(u);
        v_tilde_vals.extend_from_slice(v_tilde);

        if k + 1 == count {
            break;
        }

        let x = fractional.current();
        d.eval(t, x, u, v_exo.at(k), &mut rhs);
        check_growth("fractional system", k, x, &rhs, d.growth_bound)?;
        fractional.advance(&rhs);

        d.eval(t, &x_tilde, u_tilde_exo.at(k), v_tilde, &mut rhs);
        check_growth("approximating system", k, &x_tilde, &rhs, d.growth_bound)?;
        retarded.advance(&rhs);
    }

    let x = fractional.finish(grid)?;
    let y = retarded.finish(grid)?;
    let x_tilde = Trajectory::new(grid, n, x_tilde_vals)?;
    let sup = sup_error(&x, &x_tilde)?;
    Ok(AimingResult {
        x,
        y,
        x_tilde,
        u: Realization(Trajectory::new(grid, d.p.dim(), u_vals)?),
        v: v_exo.clone(),
        u_tilde: u_tilde_exo.clone(),
        v_tilde: Realization(Trajectory::new(grid, d.q.dim(), v_tilde_vals)?),
        sup_error: sup,
    })
}

fn at_step(e: Error, k: usize) -> Error {
    match e {
        Error::Diverged { system, norm, bound, .. } => Error::Diverged {
            system,
            step: k,
            norm,
            bound,
        },
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Pendulum-like game with separable controls.
    fn pendulum(points: usize) -> ConflictDynamics {
        let grid = ControlGrid::uniform(-1.0, 1.0, points).unwrap();
        ConflictDynamics::new(
            |_, x: &[f64], u: &[f64], v: &[f64], out: &mut [f64]| {
                out[0] = x[1];
                out[1] = -0.5 * x[0].sin() + 0.5 * u[0] + 0.5 * v[0];
            },
            2,
            grid.clone(),
            grid,
        )
        .unwrap()
    }

    #[test]
    fn control_grid_construction() {
        let g = ControlGrid::new(vec![vec![1.0], vec![0.0], vec![1.0]]).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g.point(0), &[1.0]);
        assert!(ControlGrid::new(vec![]).is_err());
        assert!(ControlGrid::new(vec![vec![1.0], vec![1.0, 2.0]]).is_err());
        let u = ControlGrid::uniform(-1.0, 1.0, 201).unwrap();
        assert_eq!(u.len(), 201);
        assert_eq!(u.point(0), &[-1.0]);
        assert_eq!(u.point(200), &[1.0]);
        assert!(u.contains(&[0.0]));
        assert_eq!(u.bounding_box(), (vec![-1.0], vec![1.0]));
    }

    #[test]
    fn hamiltonian_examples() {
        let d = pendulum(201);
        assert_eq!(hamiltonian(&d, 0.0, &[0.3, -1.0], &[0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(hamiltonian(&d, 0.0, &[0.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
    }

    #[test]
    fn extremal_selectors() {
        let d = pendulum(201);
        let x = [0.0, 0.0];
        assert_eq!(extremal_u(&d, 0.0, &x, &[0.0, 1.0]).unwrap(), vec![-1.0]);
        assert_eq!(extremal_u(&d, 0.0, &x, &[0.0, -1.0]).unwrap(), vec![1.0]);
        assert_eq!(extremal_u(&d, 0.0, &x, &[0.0, 0.0]).unwrap(), vec![-1.0]);
        assert_eq!(extremal_v(&d, 0.0, &x, &[0.0, 1.0]).unwrap(), vec![1.0]);
        assert_eq!(extremal_v(&d, 0.0, &x, &[0.0, -1.0]).unwrap(), vec![-1.0]);
        assert_eq!(extremal_v(&d, 0.0, &x, &[0.0, 0.0]).unwrap(), vec![-1.0]);
    }

    #[test]
    fn saddle_gap_detects_non_separable_payoff() {
        // g = (u - v)^2 on {-1, 1}^2: min_u max_v = 4, max_v min_u = 0
        let set = ControlGrid::new(vec![vec![-1.0], vec![1.0]]).unwrap();
        let d = ConflictDynamics::new(
            |_, _: &[f64], u: &[f64], v: &[f64], out: &mut [f64]| out[0] = (u[0] - v[0]).powi(2),
            1,
            set.clone(),
            set,
        )
        .unwrap();
        let samples = vec![
            SaddleSample { t: 0.0, x: vec![0.0], s: vec![1.0] },
            SaddleSample { t: 0.0, x: vec![0.0], s: vec![0.0] },
        ];
        let r = saddle_check(&d, &samples, 1e-12).unwrap();
        assert_eq!(r.gaps, vec![4.0, 0.0]);
        assert_eq!(r.violations, vec![0]);
        assert!(!r.holds());
        assert!(saddle_check(&d, &[], 0.0).is_err());
    }

    #[test]
    fn partition_validation() {
        let g = UniformGrid::new(1.0, 0.01).unwrap();
        let p = AimingPartition::uniform(0.25, &g).unwrap();
        assert_eq!(p.indices(), &[0, 25, 50, 75, 100]);
        assert!((p.diameter() - 0.25).abs() < 1e-12);
        assert!(AimingPartition::uniform(0.3, &g).is_err());
        assert!(AimingPartition::uniform(0.015, &g).is_err());
        assert!(AimingPartition::new(vec![0.0, 0.4, 1.0], &g).is_ok());
        assert!(AimingPartition::new(vec![0.0, 0.4, 0.4, 1.0], &g).is_err());
        assert!(AimingPartition::new(vec![0.1, 1.0], &g).is_err());
        assert!(AimingPartition::new(vec![0.0, 0.5], &g).is_err());
        assert!(AimingPartition::new(vec![0.0, 0.405, 1.0], &g).is_err());
    }

    #[test]
    fn short_aiming_run_invariants() {
        let d = pendulum(21);
        let grid = UniformGrid::new(1.0, 0.001).unwrap();
        let setup = AimingSetup {
            alpha: FractionalOrder::new(0.7).unwrap(),
            x0: vec![0.0, 0.5],
            grid,
            h: 0.1,
            partition: AimingPartition::uniform(0.02, &grid).unwrap(),
        };
        let v = Realization::from_fn(grid, 1, |t| vec![(3.0 * t).sin()]).unwrap();
        let ut = Realization::from_fn(grid, 1, |t| vec![(2.0 * t).cos()]).unwrap();
        let r = run_aiming(&d, &setup, &v, &ut).unwrap();
        assert_eq!(r.x.at(0), &[0.0, 0.5]);
        assert_eq!(r.y.at(0), &[0.0, 0.0]);
        assert_eq!(r.x_tilde.at(0), &[0.0, 0.5]);
        assert!(r.u.members_of(d.p()));
        assert!(r.v_tilde.members_of(d.q()));
        assert!(v.within_box_of(d.q()));
        for w in setup.partition.indices().windows(2) {
            for k in w[0]..w[1] {
                assert_eq!(r.u.at(k), r.u.at(w[0]));
                assert_eq!(r.v_tilde.at(k), r.v_tilde.at(w[0]));
            }
        }
        assert_eq!(r.sup_error, sup_error(&r.x, &r.x_tilde).unwrap());
        let again = run_aiming(&d, &setup, &v, &ut).unwrap();
        assert_eq!(r, again);
    }

    #[test]
    fn realization_grid_must_match() {
        let d = pendulum(3);
        let grid = UniformGrid::new(1.0, 0.01).unwrap();
        let other = UniformGrid::new(1.0, 0.02).unwrap();
        let setup = AimingSetup {
            alpha: FractionalOrder::new(0.5).unwrap(),
            x0: vec![0.0, 0.0],
            grid,
            h: 0.1,
            partition: AimingPartition::uniform(0.1, &grid).unwrap(),
        };
        let good = Realization::constant(grid, vec![0.0]).unwrap();
        let bad = Realization::constant(other, vec![0.0]).unwrap();
        assert!(run_aiming(&d, &setup, &bad, &good).is_err());
        let wide = Realization::constant(grid, vec![0.0, 0.0]).unwrap();
        assert!(run_aiming(&d, &setup, &good, &wide).is_err());
    }
}
