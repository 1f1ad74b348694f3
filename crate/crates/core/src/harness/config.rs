//! `key = value` run configuration with `[section]` headers and `#` comments.

use std::path::PathBuf;

use super::scenario::{ScenarioDynamics, ScenarioRegistry, WaveShape, Waveform};
use crate::error::{Error, Result};
use crate::frac_ops::{integer_ratio, FractionalOrder, UniformGrid};

pub const DEFAULT_EULER_STEP: f64 = 0.001;
pub const DEFAULT_GRID_POINTS: usize = 201;

const SECTIONS: &[(&str, &[&str])] = &[
    ("scenario", &["scenario", "alpha_override", "horizon"]),
    ("numerics", &["euler_step", "h", "delta"]),
    (
        "controls",
        &[
            "p_grid_points",
            "q_grid_points",
            "v_shape",
            "v_amplitude",
            "v_frequency",
            "v_offset",
            "u_tilde_shape",
            "u_tilde_amplitude",
            "u_tilde_frequency",
            "u_tilde_offset",
        ],
    ),
    ("output", &["out_dir"]),
];

/// Validated experiment configuration with defaults filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: String,
    pub alpha: FractionalOrder,
    pub horizon: f64,
    pub euler_step: f64,
    pub h_values: Vec<f64>,
    /// One partition step per entry of `h_values` (conflict scenarios).
    pub deltas: Vec<f64>,
    pub p_grid_points: usize,
    pub q_grid_points: usize,
    pub v_waveform: Option<Waveform>,
    pub u_tilde_waveform: Option<Waveform>,
    pub out_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn grid(&self) -> Result<UniformGrid> {
        UniformGrid::new(self.horizon, self.euler_step)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct WaveformKeys {
    shape: Option<WaveShape>,
    amplitude: Option<f64>,
    frequency: Option<f64>,
    offset: Option<f64>,
}

impl WaveformKeys {
    fn is_set(&self) -> bool {
        *self != Self::default()
    }

    fn over(&self, base: Waveform) -> Waveform {
        Waveform {
            shape: self.shape.unwrap_or(base.shape),
            amplitude: self.amplitude.unwrap_or(base.amplitude),
            frequency: self.frequency.unwrap_or(base.frequency),
            offset: self.offset.unwrap_or(base.offset),
        }
    }

    fn merge(&mut self, other: &Self) {
        self.shape = other.shape.or(self.shape);
        self.amplitude = other.amplitude.or(self.amplitude);
        self.frequency = other.frequency.or(self.frequency);
        self.offset = other.offset.or(self.offset);
    }
}

/// Unvalidated settings as read from a document or from command-line flags.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigDraft {
    scenario: Option<String>,
    alpha_override: Option<f64>,
    horizon: Option<f64>,
    euler_step: Option<f64>,
    h: Vec<f64>,
    delta: Vec<f64>,
    p_grid_points: Option<usize>,
    q_grid_points: Option<usize>,
    v: WaveformKeys,
    u_tilde: WaveformKeys,
    out_dir: Option<PathBuf>,
}

fn num(key: &str, value: &str) -> std::result::Result<f64, String> {
    value
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| format!("`{key}` expects a number, got `{value}`"))
}

fn count(key: &str, value: &str) -> std::result::Result<usize, String> {
    value
        .parse::<usize>()
        .map_err(|_| format!("`{key}` expects a non-negative integer, got `{value}`"))
}

impl ConfigDraft {
    pub fn new() -> Self {
        Self::default()
    }

    /// Applies one `key = value` setting. Repeatable keys (`h`, `delta`) append.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        match key {
            "scenario" => self.scenario = Some(value.to_string()),
            "alpha_override" => self.alpha_override = Some(num(key, value)?),
            "horizon" => self.horizon = Some(num(key, value)?),
            "euler_step" => self.euler_step = Some(num(key, value)?),
            "h" => self.h.push(num(key, value)?),
            "delta" => self.delta.push(num(key, value)?),
            "p_grid_points" => self.p_grid_points = Some(count(key, value)?),
            "q_grid_points" => self.q_grid_points = Some(count(key, value)?),
            "v_shape" => self.v.shape = Some(value.parse()?),
            "v_amplitude" => self.v.amplitude = Some(num(key, value)?),
            "v_frequency" => self.v.frequency = Some(num(key, value)?),
            "v_offset" => self.v.offset = Some(num(key, value)?),
            "u_tilde_shape" => self.u_tilde.shape = Some(value.parse()?),
            "u_tilde_amplitude" => self.u_tilde.amplitude = Some(num(key, value)?),
            "u_tilde_frequency" => self.u_tilde.frequency = Some(num(key, value)?),
            "u_tilde_offset" => self.u_tilde.offset = Some(num(key, value)?),
            "out_dir" => self.out_dir = Some(PathBuf::from(value)),
            other => return Err(format!("unknown key `{other}`")),
        }
        Ok(())
    }

    /// Settings in `over` win; a nonempty `h` or `delta` list replaces ours.
    pub fn merge(mut self, over: ConfigDraft) -> Self {
        self.scenario = over.scenario.or(self.scenario);
        self.alpha_override = over.alpha_override.or(self.alpha_override);
        self.horizon = over.horizon.or(self.horizon);
        self.euler_step = over.euler_step.or(self.euler_step);
        if !over.h.is_empty() {
            self.h = over.h;
        }
        if !over.delta.is_empty() {
            self.delta = over.delta;
        }
        self.p_grid_points = over.p_grid_points.or(self.p_grid_points);
        self.q_grid_points = over.q_grid_points.or(self.q_grid_points);
        self.v.merge(&over.v);
        self.u_tilde.merge(&over.u_tilde);
        self.out_dir = over.out_dir.or(self.out_dir);
        self
    }

    pub fn has_scenario(&self) -> bool {
        self.scenario.is_some()
    }

    pub fn out_dir(&self) -> Option<&PathBuf> {
        self.out_dir.as_ref()
    }

    /// Fills defaults from the scenario and applies every commensurability check.
    pub fn finish(self, registry: &ScenarioRegistry) -> Result<RunConfig> {
        let name = self
            .scenario
            .ok_or_else(|| Error::config("scenario", "no scenario given"))?;
        let scenario = registry.get(&name).ok_or_else(|| {
            Error::config(
                "scenario",
                format!(
                    "unknown scenario `{name}` (available: {})",
                    registry.names().collect::<Vec<_>>().join(", ")
                ),
            )
        })?;

        let alpha = match self.alpha_override {
            Some(a) => FractionalOrder::new(a).map_err(|e| Error::config("alpha_override", e.to_string()))?,
            None => scenario.alpha,
        };
        let horizon = self.horizon.unwrap_or(scenario.horizon);
        if !(horizon > 0.0) {
            return Err(Error::config("horizon", "must be positive"));
        }
        let euler_step = self.euler_step.unwrap_or(DEFAULT_EULER_STEP);
        if !(euler_step > 0.0) {
            return Err(Error::config("euler_step", "must be positive"));
        }
        if integer_ratio(horizon, euler_step).is_none() {
            return Err(Error::config(
                "euler_step",
                format!("{euler_step} does not divide the horizon {horizon}"),
            ));
        }

        let h_values = if self.h.is_empty() { scenario.default_h.clone() } else { self.h };
        for &h in &h_values {
            check_multiple("h", h, euler_step)?;
        }

        let (deltas, v_waveform, u_tilde_waveform) = match &scenario.dynamics {
            ScenarioDynamics::Conflict {
                v_default,
                u_tilde_default,
                ..
            } => {
                let given = if self.delta.is_empty() {
                    scenario.default_delta.clone()
                } else {
                    self.delta
                };
                let deltas = match given.len() {
                    1 => vec![given[0]; h_values.len()],
                    n if n == h_values.len() => given,
                    n => {
                        return Err(Error::config(
                            "delta",
                            format!("{n} values given for {} values of h (give one, or one per h)", h_values.len()),
                        ))
                    }
                };
                for &d in &deltas {
                    check_multiple("delta", d, euler_step)?;
                    if integer_ratio(horizon, d).is_none() {
                        return Err(Error::config("delta", format!("{d} does not divide the horizon {horizon}")));
                    }
                }
                (deltas, Some(self.v.over(*v_default)), Some(self.u_tilde.over(*u_tilde_default)))
            }
            ScenarioDynamics::Plain(_) => {
                if !self.delta.is_empty() {
                    return Err(Error::config("delta", format!("scenario `{name}` has no controls")));
                }
                if self.v.is_set() || self.u_tilde.is_set() {
                    return Err(Error::config("v_shape", format!("scenario `{name}` has no controls")));
                }
                (Vec::new(), None, None)
            }
        };

        let p_grid_points = self.p_grid_points.unwrap_or(DEFAULT_GRID_POINTS);
        let q_grid_points = self.q_grid_points.unwrap_or(DEFAULT_GRID_POINTS);
        if p_grid_points == 0 {
            return Err(Error::config("p_grid_points", "must be at least 1"));
        }
        if q_grid_points == 0 {
            return Err(Error::config("q_grid_points", "must be at least 1"));
        }

        Ok(RunConfig {
            scenario: name,
            alpha,
            horizon,
            euler_step,
            h_values,
            deltas,
            p_grid_points,
            q_grid_points,
            v_waveform,
            u_tilde_waveform,
            out_dir: self.out_dir,
        })
    }
}

fn check_multiple(key: &str, value: f64, step: f64) -> Result<()> {
    if !(value > 0.0) {
        return Err(Error::config(key, format!("{value} must be positive")));
    }
    match integer_ratio(value, step) {
        Some(n) if n >= 1 => Ok(()),
        _ => Err(Error::config(
            key,
            format!("{value} is not an integer multiple of euler_step {step}"),
        )),
    }
}

/// Reads a configuration document without validating it.
pub fn parse_document(text: &str) -> Result<ConfigDraft> {
    let mut draft = ConfigDraft::new();
    let mut section: Option<&'static [&'static str]> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let err = |message: String| Error::ConfigParse { line: line_no, message };
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| err(format!("malformed section header `{line}`")))?
                .trim();
            let keys = SECTIONS
                .iter()
                .find(|(s, _)| *s == name)
                .map(|(_, k)| *k)
                .ok_or_else(|| err(format!("unknown section `[{name}]`")))?;
            section = Some(keys);
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || value.is_empty() {
            return Err(err(format!("expected `key = value`, got `{line}`")));
        }
        if let Some(keys) = section {
            if !keys.contains(&key) && SECTIONS.iter().any(|(_, k)| k.contains(&key)) {
                return Err(err(format!("key `{key}` does not belong in this section")));
            }
        }
        draft.set(key, value).map_err(err)?;
    }
    Ok(draft)
}

/// Parses and validates a configuration against the built-in scenarios.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    parse_document(text)?.finish(&ScenarioRegistry::builtin())
}
