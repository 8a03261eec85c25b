//! Scenario execution: figure presets, parameter sweeps, CSV output and
//! reproducibility metadata.

mod config;
mod presets;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

pub use config::{set_parameter, Axis, Resolved, ScenarioConfig, ScenarioKind, SweepSpec, TimeGrid, TrotterSpec, Variant, SWEEPABLE};
pub use presets::{preset, PRESETS};

use crate::circuit::{lindblad_reference, run_trajectories};
use crate::engine::{evolve_with, steady_state_with, EvolutionProblem, SteadyStateOptions};
use crate::error::{Error, Result};
use crate::model::{self, ModelConfig};
use crate::observables::{h0_transition_energies, ObservableKind, Observables};

/// A rectangular table ready to be written as CSV.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: Vec<String>) -> Self {
        Self { header, rows: Vec::new() }
    }

    /// Values of the column named `name`, parsed as numbers.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[k].parse().unwrap_or(f64::NAN)).collect())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
    }
}

/// Shortest representation that parses back to the same number.
fn num(v: f64) -> String {
    format!("{v:?}")
}

/// Everything a scenario produced: the main table plus named side tables.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioOutput {
    pub kind: ScenarioKind,
    pub table: Table,
    pub extra: Vec<(String, Table)>,
}

fn column_name(obs: &str, label: &str, single: bool) -> String {
    if single {
        obs.to_string()
    } else {
        format!("{obs}[{label}]")
    }
}

/// Runs a validated scenario.
pub fn run_scenario(cfg: &ScenarioConfig, kind: ScenarioKind) -> Result<ScenarioOutput> {
    cfg.check_kind(kind)?;
    let variants = cfg.resolve()?;
    let (table, extra) = match kind {
        ScenarioKind::Evolve => (run_evolve(cfg, &variants)?, Vec::new()),
        ScenarioKind::Steady => (run_steady(cfg, &variants)?, Vec::new()),
        ScenarioKind::Sweep => run_sweep(cfg, &variants)?,
        ScenarioKind::Trotter => (run_trotter(cfg, &variants)?, Vec::new()),
        ScenarioKind::Spectrum => run_spectrum(&variants)?,
    };
    Ok(ScenarioOutput { kind, table, extra })
}

fn evolve_series(model: &ModelConfig, time: &TimeGrid, kinds: &[ObservableKind]) -> Result<Vec<Vec<f64>>> {
    let h = model::build_full_hamiltonian(model)?;
    let jumps = model::build_all_jumps(model)?;
    let rho0 = model::initial_state(model)?;
    let obs = Observables::new(model)?;
    let problem = EvolutionProblem::new(h, jumps, rho0, EvolutionProblem::uniform_samples(time.t_final, time.dt));
    let mut series = vec![Vec::new(); kinds.len()];
    evolve_with(&problem, |_, rho| {
        for (s, &k) in series.iter_mut().zip(kinds) {
            s.push(obs.evaluate(k, rho)?);
        }
        Ok(())
    })?;
    Ok(series)
}

fn run_evolve(cfg: &ScenarioConfig, variants: &[Resolved]) -> Result<Table> {
    let time = cfg.time.as_ref().expect("checked by check_kind");
    let results: Vec<Vec<Vec<f64>>> =
        variants.par_iter().map(|v| evolve_series(&v.model, time, &cfg.observables)).collect::<Result<_>>()?;
    let times = EvolutionProblem::uniform_samples(time.t_final, time.dt);
    let single = variants.len() == 1;
    let mut header = vec!["t".to_string()];
    for v in variants {
        header.extend(cfg.observables.iter().map(|k| column_name(k.name(), &v.label, single)));
    }
    let mut table = Table::new(header);
    for (i, t) in times.iter().enumerate() {
        let mut row = vec![num(*t)];
        for series in &results {
            row.extend(series.iter().map(|s| num(s[i])));
        }
        table.rows.push(row);
    }
    Ok(table)
}

/// Steady-state observables, or the reason they could not be computed.
fn steady_point(model: &ModelConfig, kinds: &[ObservableKind]) -> std::result::Result<Vec<f64>, String> {
    let compute = || -> Result<Vec<f64>> {
        let h = model::build_full_hamiltonian(model)?;
        let jumps = model::build_all_jumps(model)?;
        let ss = steady_state_with(&h, &jumps, &SteadyStateOptions::default())?;
        let obs = Observables::new(model)?;
        kinds.iter().map(|&k| obs.evaluate(k, &ss.rho)).collect()
    };
    compute().map_err(|e| e.to_string())
}

fn point_row(prefix: Vec<String>, result: std::result::Result<Vec<f64>, String>, n_obs: usize) -> Vec<String> {
    let mut row = prefix;
    match result {
        Ok(values) => {
            row.extend(values.into_iter().map(num));
            row.push("ok".into());
        }
        Err(msg) => {
            row.extend(std::iter::repeat_n("NaN".to_string(), n_obs));
            row.push(msg);
        }
    }
    row
}

fn run_steady(cfg: &ScenarioConfig, variants: &[Resolved]) -> Result<Table> {
    let results: Vec<_> = variants.par_iter().map(|v| steady_point(&v.model, &cfg.observables)).collect();
    let mut header = vec!["variant".to_string()];
    header.extend(cfg.observables.iter().map(|k| k.name().to_string()));
    header.push("status".into());
    let mut table = Table::new(header);
    for (v, r) in variants.iter().zip(results) {
        table.rows.push(point_row(vec![v.label.clone()], r, cfg.observables.len()));
    }
    Ok(table)
}

fn run_sweep(cfg: &ScenarioConfig, variants: &[Resolved]) -> Result<(Table, Vec<(String, Table)>)> {
    let axes = cfg.axes()?;
    // grid points in output order: variant, then first axis, then second axis
    let mut points: Vec<(usize, Vec<f64>)> = Vec::new();
    for (vi, _) in variants.iter().enumerate() {
        let mut combos: Vec<Vec<f64>> = vec![Vec::new()];
        for (_, values) in &axes {
            combos = combos.into_iter().flat_map(|c| values.iter().map(move |&x| [c.clone(), vec![x]].concat())).collect();
        }
        points.extend(combos.into_iter().map(|c| (vi, c)));
    }
    let results: Vec<_> = points
        .par_iter()
        .map(|(vi, coords)| {
            let mut m = variants[*vi].model.clone();
            for ((name, _), &x) in axes.iter().zip(coords) {
                m = match set_parameter(&m, name, x) {
                    Ok(m) => m,
                    Err(e) => return Err(e.to_string()),
                };
            }
            steady_point(&m, &cfg.observables)
        })
        .collect();

    let mut header: Vec<String> = axes.iter().map(|(n, _)| n.clone()).collect();
    header.push("variant".into());
    header.extend(cfg.observables.iter().map(|k| k.name().to_string()));
    header.push("status".into());
    let mut table = Table::new(header);
    for ((vi, coords), r) in points.iter().zip(results) {
        let mut prefix: Vec<String> = coords.iter().map(|&x| num(x)).collect();
        prefix.push(variants[*vi].label.clone());
        table.rows.push(point_row(prefix, r, cfg.observables.len()));
    }

    let mut extra = Vec::new();
    if cfg.sweep.as_ref().is_some_and(|s| s.transition_energies) {
        extra.push(("transitions".to_string(), transitions_table(&variants[0].model)?));
    }
    Ok((table, extra))
}

fn transitions_table(model: &ModelConfig) -> Result<Table> {
    let mut t = Table::new(vec!["energy".into()]);
    t.rows = h0_transition_energies(model)?.into_iter().map(|e| vec![num(e)]).collect();
    Ok(t)
}

fn run_trotter(cfg: &ScenarioConfig, variants: &[Resolved]) -> Result<Table> {
    let with_reference = cfg.trotter.as_ref().is_some_and(|t| t.lindblad_reference);
    let single = variants.len() == 1;
    let mut columns: Vec<(String, Vec<f64>)> = Vec::new();
    let mut times: Option<Vec<f64>> = None;
    for v in variants {
        let run = crate::circuit::CircuitRunConfig { observables: cfg.observables.clone(), ..v.circuit.clone() };
        let rec = run_trajectories(&v.model, &run)?;
        let ses = rec.std_errors.as_ref().expect("trajectory averages carry standard errors");
        for (k, name) in rec.names.iter().enumerate() {
            columns.push((column_name(name, &v.label, single), rec.values[k].clone()));
            columns.push((column_name(&format!("{name}_se"), &v.label, single), ses[k].clone()));
        }
        if with_reference {
            let problem = lindblad_reference(&v.model, &run)?;
            let obs = Observables::new(&v.model)?;
            let mut series = vec![Vec::new(); cfg.observables.len()];
            evolve_with(&problem, |_, rho| {
                for (s, &k) in series.iter_mut().zip(&cfg.observables) {
                    s.push(obs.evaluate(k, rho)?);
                }
                Ok(())
            })?;
            for (k, s) in cfg.observables.iter().zip(series) {
                columns.push((column_name(&format!("{}_lindblad", k.name()), &v.label, single), s));
            }
        }
        if let Some(t) = &times {
            if t.len() != rec.times.len() {
                return Err(Error::InvalidConfig("variants must share one time grid".into()));
            }
        } else {
            times = Some(rec.times.clone());
        }
    }
    let times = times.unwrap_or_default();
    let mut header = vec!["t".to_string()];
    header.extend(columns.iter().map(|(n, _)| n.clone()));
    let mut table = Table::new(header);
    for (i, t) in times.iter().enumerate() {
        let mut row = vec![num(*t)];
        row.extend(columns.iter().map(|(_, s)| num(s[i])));
        table.rows.push(row);
    }
    Ok(table)
}

fn run_spectrum(variants: &[Resolved]) -> Result<(Table, Vec<(String, Table)>)> {
    let single = variants.len() == 1;
    let spectra: Vec<Vec<f64>> = variants.iter().map(|v| model::physical_spectrum(&v.model)).collect::<Result<_>>()?;
    if spectra.windows(2).any(|w| w[0].len() != w[1].len()) {
        return Err(Error::InvalidConfig("spectrum variants must share the number of sites".into()));
    }
    let mut header = vec!["index".to_string()];
    header.extend(variants.iter().map(|v| column_name("energy", &v.label, single)));
    let mut table = Table::new(header);
    for i in 0..spectra[0].len() {
        let mut row = vec![i.to_string()];
        row.extend(spectra.iter().map(|s| num(s[i])));
        table.rows.push(row);
    }
    Ok((table, vec![("transitions".to_string(), transitions_table(&variants[0].model)?)]))
}

/// Reproducibility record written next to every CSV.
#[derive(Clone, Debug, Serialize)]
pub struct Metadata {
    pub kind: ScenarioKind,
    pub preset: Option<String>,
    pub version: String,
    pub seed: u64,
    pub workers: usize,
    pub wall_time_seconds: f64,
    pub csv_sha256: String,
    pub outputs: Vec<PathBuf>,
    pub config: serde_json::Value,
    pub resolved: serde_json::Value,
}

/// Path of a side table: `out.csv` → `out_<name>.csv`.
pub fn side_path(out: &Path, name: &str) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "out".into());
    out.with_file_name(format!("{stem}_{name}.csv"))
}

/// Path of the metadata sidecar: `out.csv` → `out.csv.meta.json`.
pub fn metadata_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

/// Runs the scenario and writes the CSV, its side tables and the metadata sidecar.
pub fn run_to_files(cfg: &ScenarioConfig, kind: ScenarioKind, out: &Path, preset: Option<&str>) -> Result<Metadata> {
    let start = Instant::now();
    let output = run_scenario(cfg, kind)?;
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let body = output.table.to_csv()?;
    fs::write(out, &body)?;
    let mut outputs = vec![out.to_path_buf()];
    for (name, table) in &output.extra {
        let p = side_path(out, name);
        fs::write(&p, table.to_csv()?)?;
        outputs.push(p);
    }
    let meta = Metadata {
        kind,
        preset: preset.map(str::to_string),
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: cfg.seed,
        workers: rayon::current_num_threads(),
        wall_time_seconds: start.elapsed().as_secs_f64(),
        csv_sha256: hex::encode(Sha256::digest(body.as_bytes())),
        outputs,
        config: serde_json::to_value(cfg).map_err(|e| Error::InvalidConfig(e.to_string()))?,
        resolved: serde_json::to_value(cfg.resolve()?).map_err(|e| Error::InvalidConfig(e.to_string()))?,
    };
    let json = serde_json::to_string_pretty(&meta).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    fs::write(metadata_path(out), json)?;
    Ok(meta)
}
