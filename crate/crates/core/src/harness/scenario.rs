//! Built-in scenarios and exogenous waveforms.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::conflict_sim::{ConflictDynamics, ConflictField, ControlGrid, Realization};
use crate::error::{Error, Result};
use crate::fde_solver::{CaputoProblem, VectorField};
use crate::frac_ops::{FractionalOrder, UniformGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveShape {
    Constant,
    Sine,
    Cosine,
}

impl std::str::FromStr for WaveShape {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "constant" => Ok(Self::Constant),
            "sine" | "sin" => Ok(Self::Sine),
            "cosine" | "cos" => Ok(Self::Cosine),
            other => Err(format!("unknown waveform shape `{other}` (expected constant, sine or cosine)")),
        }
    }
}

/// `offset + amplitude · shape(frequency · t)`, where the constant shape is `1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Waveform {
    pub shape: WaveShape,
    pub amplitude: f64,
    pub frequency: f64,
    pub offset: f64,
}

impl Waveform {
    pub fn sine(amplitude: f64, frequency: f64) -> Self {
        Self {
            shape: WaveShape::Sine,
            amplitude,
            frequency,
            offset: 0.0,
        }
    }

    pub fn cosine(amplitude: f64, frequency: f64) -> Self {
        Self {
            shape: WaveShape::Cosine,
            amplitude,
            frequency,
            offset: 0.0,
        }
    }

    pub fn constant(value: f64) -> Self {
        Self {
            shape: WaveShape::Constant,
            amplitude: value,
            frequency: 0.0,
            offset: 0.0,
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        let base = match self.shape {
            WaveShape::Constant => 1.0,
            WaveShape::Sine => (self.frequency * t).sin(),
            WaveShape::Cosine => (self.frequency * t).cos(),
        };
        self.offset + self.amplitude * base
    }

    /// Samples on `grid`, clamped to `[lo, hi]`.
    pub fn realize(&self, grid: UniformGrid, lo: f64, hi: f64) -> Result<Realization> {
        Realization::from_fn(grid, 1, |t| vec![self.value(t).clamp(lo, hi)])
    }
}

#[derive(Clone)]
pub enum ScenarioDynamics {
    /// `ᶜD^α x = f(t, x)`.
    Plain(VectorField),
    /// `ᶜD^α x = g(t, x, u, v)` with scalar `u ∈ [u_lo, u_hi]`, `v ∈ [v_lo, v_hi]`.
    Conflict {
        field: ConflictField,
        u_bounds: (f64, f64),
        v_bounds: (f64, f64),
        v_default: Waveform,
        u_tilde_default: Waveform,
    },
}

#[derive(Clone)]
pub struct Scenario {
    pub name: String,
    pub alpha: FractionalOrder,
    pub horizon: f64,
    pub x0: Vec<f64>,
    pub dynamics: ScenarioDynamics,
    pub default_h: Vec<f64>,
    /// Partition steps paired with `default_h` (conflict scenarios only).
    pub default_delta: Vec<f64>,
}

impl std::fmt::Debug for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Scenario")
            .field("name", &self.name)
            .field("alpha", &self.alpha)
            .field("horizon", &self.horizon)
            .field("x0", &self.x0)
            .field("conflict", &self.is_conflict())
            .finish_non_exhaustive()
    }
}

impl Scenario {
    pub fn is_conflict(&self) -> bool {
        matches!(self.dynamics, ScenarioDynamics::Conflict { .. })
    }

    pub fn dim(&self) -> usize {
        self.x0.len()
    }

    /// Caputo problem for a plain scenario.
    pub fn caputo_problem(&self, alpha: FractionalOrder, horizon: f64) -> Result<CaputoProblem> {
        match &self.dynamics {
            ScenarioDynamics::Plain(f) => CaputoProblem::from_shared(f.clone(), self.x0.clone(), alpha, horizon),
            ScenarioDynamics::Conflict { .. } => Err(Error::invalid(format!(
                "scenario `{}` is a conflict scenario",
                self.name
            ))),
        }
    }

    /// Conflict dynamics with uniform control grids of the given sizes.
    pub fn conflict_dynamics(&self, p_points: usize, q_points: usize) -> Result<ConflictDynamics> {
        match &self.dynamics {
            ScenarioDynamics::Conflict {
                field,
                u_bounds,
                v_bounds,
                ..
            } => {
                let p = ControlGrid::uniform(u_bounds.0, u_bounds.1, p_points)?;
                let q = ControlGrid::uniform(v_bounds.0, v_bounds.1, q_points)?;
                ConflictDynamics::from_shared(field.clone(), self.dim(), p, q)
            }
            ScenarioDynamics::Plain(_) => Err(Error::invalid(format!(
                "scenario `{}` has no controls",
                self.name
            ))),
        }
    }
}

/// ᶜD^{0.3} x1 = x1 - x2 + cos 2t, ᶜD^{0.3} x2 = t x1 + exp(cos x2) + sin 2t on [0, 5].
pub fn example1() -> Scenario {
    let f: VectorField = Arc::new(|t, x: &[f64], out: &mut [f64]| {
        out[0] = x[0] - x[1] + (2.0 * t).cos();
        out[1] = t * x[0] + x[1].cos().exp() + (2.0 * t).sin();
    });
    Scenario {
        name: "example1".into(),
        alpha: FractionalOrder::new(0.3).expect("valid order"),
        horizon: 5.0,
        x0: vec![0.5, -1.0],
        dynamics: ScenarioDynamics::Plain(f),
        default_h: vec![0.1, 0.01, 0.001],
        default_delta: vec![],
    }
}

/// ᶜD^{0.7} x1 = x2, ᶜD^{0.7} x2 = -0.5 sin x1 + 0.5 u + 0.5 v on [0, 10],
/// `u, v ∈ [-1, 1]`.
pub fn example2() -> Scenario {
    let g: ConflictField = Arc::new(|_, x: &[f64], u: &[f64], v: &[f64], out: &mut [f64]| {
        out[0] = x[1];
        out[1] = -0.5 * x[0].sin() + 0.5 * u[0] + 0.5 * v[0];
    });
    Scenario {
        name: "example2".into(),
        alpha: FractionalOrder::new(0.7).expect("valid order"),
        horizon: 10.0,
        x0: vec![0.0, 0.5],
        dynamics: ScenarioDynamics::Conflict {
            field: g,
            u_bounds: (-1.0, 1.0),
            v_bounds: (-1.0, 1.0),
            v_default: Waveform::sine(1.0, 3.0),
            u_tilde_default: Waveform::cosine(1.0, 2.0),
        },
        default_h: vec![0.1, 0.01],
        default_delta: vec![0.02, 0.005],
    }
}

/// Scenarios addressable by name.
#[derive(Debug, Clone)]
pub struct ScenarioRegistry {
    scenarios: BTreeMap<String, Scenario>,
}

impl ScenarioRegistry {
    pub fn builtin() -> Self {
        let mut scenarios = BTreeMap::new();
        for s in [example1(), example2()] {
            scenarios.insert(s.name.clone(), s);
        }
        Self { scenarios }
    }

    pub fn register(&mut self, scenario: Scenario) -> Result<()> {
        if self.scenarios.contains_key(&scenario.name) {
            return Err(Error::invalid(format!("scenario `{}` already registered", scenario.name)));
        }
        self.scenarios.insert(scenario.name.clone(), scenario);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&Scenario> {
        self.scenarios.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.scenarios.keys().map(String::as_str)
    }
}
