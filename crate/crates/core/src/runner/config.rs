//! Scenario files: TOML with a base model, optional variants, a time grid,
//! sweep axes and circuit settings.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::circuit::{error_probability, CircuitRunConfig};
use crate::error::{Error, Result};
use crate::model::ModelConfig;
use crate::observables::ObservableKind;

/// Model parameters that a sweep axis may vary.
pub const SWEEPABLE: [&str; 11] = ["j_a", "j_f", "c1", "c2", "c3", "c4", "lambda", "g", "gamma", "gamma_c", "n_sites"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    Evolve,
    Steady,
    Sweep,
    Trotter,
    Spectrum,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::Evolve => "evolve",
            ScenarioKind::Steady => "steady",
            ScenarioKind::Sweep => "sweep",
            ScenarioKind::Trotter => "trotter",
            ScenarioKind::Spectrum => "spectrum",
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub t_final: f64,
    /// Spacing of the output samples.
    pub dt: f64,
}

/// Values of one swept parameter: an explicit list or a generated range.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub name: String,
    #[serde(default)]
    pub values: Option<Vec<f64>>,
    /// `[first, last, count]`, geometrically spaced.
    #[serde(default)]
    pub geomspace: Option<(f64, f64, usize)>,
    /// `[first, last, count]`, evenly spaced.
    #[serde(default)]
    pub linspace: Option<(f64, f64, usize)>,
}

impl Axis {
    pub fn points(&self) -> Result<Vec<f64>> {
        if !SWEEPABLE.contains(&self.name.as_str()) {
            return Err(Error::InvalidConfig(format!(
                "sweep axis '{}' is not a model parameter (one of {})",
                self.name,
                SWEEPABLE.join(", ")
            )));
        }
        let given = [self.values.is_some(), self.geomspace.is_some(), self.linspace.is_some()];
        if given.iter().filter(|&&g| g).count() != 1 {
            return Err(Error::InvalidConfig(format!(
                "axis '{}' needs exactly one of values, geomspace, linspace",
                self.name
            )));
        }
        let pts = if let Some(v) = &self.values {
            v.clone()
        } else if let Some((a, b, n)) = self.geomspace {
            if a <= 0.0 || b <= 0.0 {
                return Err(Error::InvalidConfig(format!("geomspace of '{}' needs positive ends", self.name)));
            }
            let mut v: Vec<f64> = spaced(a.ln(), b.ln(), n).into_iter().map(f64::exp).collect();
            if let Some(first) = v.first_mut() {
                *first = a;
            }
            if n > 1 {
                v[n - 1] = b;
            }
            v
        } else if let Some((a, b, n)) = self.linspace {
            spaced(a, b, n)
        } else {
            unreachable!()
        };
        if pts.is_empty() {
            return Err(Error::InvalidConfig(format!("axis '{}' has no values", self.name)));
        }
        if let Some(v) = pts.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig(format!("axis '{}' has non-finite value {v}", self.name)));
        }
        Ok(pts)
    }
}

fn spaced(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|k| if k + 1 == n { b } else { a + (b - a) * k as f64 / (n - 1) as f64 }).collect(),
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default, rename = "axis")]
    pub axes: Vec<Axis>,
    /// Also write the transition energies of `H0` next to the sweep output.
    #[serde(default)]
    pub transition_energies: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrotterSpec {
    /// Also integrate the equivalent master equation for every variant.
    #[serde(default)]
    pub lindblad_reference: bool,
}

/// Overrides applied on top of the base tables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Variant {
    pub label: String,
    #[serde(default)]
    pub model: Table,
    #[serde(default)]
    pub circuit: Table,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub kind: Option<ScenarioKind>,
    #[serde(default)]
    pub description: Option<String>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_observables")]
    pub observables: Vec<ObservableKind>,
    #[serde(default)]
    pub model: Table,
    #[serde(default)]
    pub time: Option<TimeGrid>,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub circuit: Table,
    #[serde(default)]
    pub trotter: Option<TrotterSpec>,
    #[serde(default, rename = "variant")]
    pub variants: Vec<Variant>,
}

fn default_observables() -> Vec<ObservableKind> {
    vec![ObservableKind::Epsilon]
}

/// One fully specified variant.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Resolved {
    pub label: String,
    pub model: ModelConfig,
    pub circuit: CircuitRunConfig,
}

/// Typed view of the override tables, used only to locate schema errors.
#[allow(dead_code)]
#[derive(Deserialize)]
struct Schema {
    #[serde(default)]
    model: Option<ModelConfig>,
    #[serde(default)]
    circuit: Option<CircuitRunConfig>,
    #[serde(default)]
    variant: Vec<VariantSchema>,
}

#[derive(Deserialize)]
#[allow(dead_code)]
struct VariantSchema {
    #[serde(default)]
    model: Option<ModelConfig>,
    #[serde(default)]
    circuit: Option<CircuitRunConfig>,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].bytes().filter(|&b| b == b'\n').count() + 1
}

fn merged(base: &Table, over: &Table) -> Table {
    let mut t = base.clone();
    for (k, v) in over {
        t.insert(k.clone(), v.clone());
    }
    t
}

fn model_from(table: Table, context: &str) -> Result<ModelConfig> {
    let cfg: ModelConfig = Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| Error::InvalidConfig(format!("{context}: {}", e.message())))?;
    cfg.validate().map_err(|e| Error::InvalidConfig(format!("{context}: {e}")))?;
    Ok(cfg)
}

impl ScenarioConfig {
    /// Parses TOML; syntax and schema errors carry the line they occur on.
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Parse {
            line: e.span().map(|s| line_of(text, s.start)).unwrap_or(0),
            message: e.message().to_string(),
        })?;
        toml::from_str::<Schema>(text).map_err(|e| Error::Parse {
            line: e.span().map(|s| line_of(text, s.start)).unwrap_or(0),
            message: e.message().to_string(),
        })?;
        // locate semantic errors at the offending table header
        cfg.validate().map_err(|e| match Self::header_line(text, &e) {
            Some(line) => Error::Parse { line, message: e.to_string() },
            None => e,
        })?;
        Ok(cfg)
    }

    fn header_line(text: &str, err: &Error) -> Option<usize> {
        let msg = err.to_string();
        let header = if msg.contains("axis") {
            "[[sweep.axis]]"
        } else if msg.contains("variant") {
            "[[variant]]"
        } else if msg.contains("circuit") {
            "[circuit]"
        } else if msg.contains("time") {
            "[time]"
        } else {
            "[model]"
        };
        text.lines().position(|l| l.trim_start().starts_with(header)).map(|i| i + 1)
    }

    /// Checks everything that can be checked before any computation.
    pub fn validate(&self) -> Result<()> {
        if self.observables.is_empty() {
            return Err(Error::InvalidConfig("observables list is empty".into()));
        }
        let mut labels = std::collections::HashSet::new();
        for v in &self.variants {
            if !labels.insert(v.label.as_str()) {
                return Err(Error::InvalidConfig(format!("duplicate variant label '{}'", v.label)));
            }
        }
        self.resolve()?;
        if let Some(time) = &self.time {
            if !(time.t_final.is_finite() && time.t_final >= 0.0 && time.dt > 0.0) {
                return Err(Error::InvalidConfig("time grid needs t_final >= 0 and dt > 0".into()));
            }
        }
        if let Some(sweep) = &self.sweep {
            if sweep.axes.len() > 2 {
                return Err(Error::InvalidConfig(format!("a sweep takes 1 or 2 axes, got {}", sweep.axes.len())));
            }
            for axis in &sweep.axes {
                axis.points()?;
            }
        }
        Ok(())
    }

    /// Checks that the sections needed by `kind` are present.
    pub fn check_kind(&self, kind: ScenarioKind) -> Result<()> {
        if let Some(k) = self.kind {
            if k != kind {
                return Err(Error::InvalidConfig(format!("config is a '{k}' scenario, not '{kind}'")));
            }
        }
        match kind {
            ScenarioKind::Evolve if self.time.is_none() => {
                Err(Error::InvalidConfig("evolve needs a [time] section".into()))
            }
            ScenarioKind::Sweep if self.sweep.as_ref().is_none_or(|s| s.axes.is_empty()) => {
                Err(Error::InvalidConfig("sweep needs at least one [[sweep.axis]]".into()))
            }
            _ => Ok(()),
        }
    }

    /// Base tables merged with each variant; a single variant labelled `base` when none are given.
    pub fn resolve(&self) -> Result<Vec<Resolved>> {
        let base = [Variant { label: "base".into(), model: Table::new(), circuit: Table::new() }];
        let variants = if self.variants.is_empty() { &base[..] } else { &self.variants[..] };
        variants
            .iter()
            .map(|v| {
                let context = format!("variant '{}'", v.label);
                let model = model_from(merged(&self.model, &v.model), &context)?;
                let circuit = self.circuit_for(&model, merged(&self.circuit, &v.circuit), &context)?;
                Ok(Resolved { label: v.label.clone(), model, circuit })
            })
            .collect()
    }

    /// The error probability defaults to `γ·dt/8` from the model's error rate.
    fn circuit_for(&self, model: &ModelConfig, mut table: Table, context: &str) -> Result<CircuitRunConfig> {
        if table.contains_key("seed") {
            return Err(Error::InvalidConfig(format!("{context}: circuit seed is set by the top-level seed")));
        }
        table.insert("seed".into(), Value::Integer(self.seed as i64));
        let explicit_p = table.contains_key("p");
        let mut run: CircuitRunConfig = Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| Error::InvalidConfig(format!("{context}: circuit {}", e.message())))?;
        if !explicit_p {
            run.p = error_probability(model.gamma, run.dt);
        }
        run.seed = self.seed;
        Ok(run)
    }

    pub fn axes(&self) -> Result<Vec<(String, Vec<f64>)>> {
        self.sweep
            .iter()
            .flat_map(|s| &s.axes)
            .map(|a| Ok((a.name.clone(), a.points()?)))
            .collect()
    }
}

impl FromStr for ScenarioConfig {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

/// Sets a model parameter by name.
pub fn set_parameter(cfg: &ModelConfig, name: &str, value: f64) -> Result<ModelConfig> {
    let mut table = match Value::try_from(cfg) {
        Ok(Value::Table(t)) => t,
        _ => return Err(Error::InvalidConfig("model does not serialize to a table".into())),
    };
    let v = if name == "n_sites" {
        if value.fract() != 0.0 || value < 0.0 {
            return Err(Error::InvalidConfig(format!("n_sites must be a whole number, got {value}")));
        }
        Value::Integer(value as i64)
    } else {
        Value::Float(value)
    };
    if !SWEEPABLE.contains(&name) {
        return Err(Error::InvalidConfig(format!("'{name}' is not a sweepable parameter")));
    }
    table.insert(name.to_string(), v);
    model_from(table, &format!("{name} = {value}"))
}
