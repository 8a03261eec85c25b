use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use z2lgt::runner::{self, ScenarioConfig, ScenarioKind};
use z2lgt::{Error, Result};

/// Lindblad, steady-state and noisy-circuit simulations of a Z2 lattice gauge theory.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Time evolution under the master equation.
    Evolve(Common),
    /// Steady state of every variant.
    Steady(Common),
    /// Steady states over a grid of one or two parameters.
    Sweep(Common),
    /// Noisy Trotter circuit trajectories.
    Trotter(Common),
    /// Physical-sector spectrum and transition energies.
    Spectrum(Common),
}

#[derive(Args)]
struct Common {
    /// Scenario file (TOML).
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    config: Option<PathBuf>,
    /// Built-in figure preset (fig2 … fig9).
    #[arg(long)]
    preset: Option<String>,
    /// Output CSV path; defaults to `<preset or config stem>.csv`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; defaults to the number of cores.
    #[arg(long)]
    workers: Option<usize>,
}

fn run(kind: ScenarioKind, args: Common) -> Result<()> {
    let (mut cfg, name) = match (&args.config, &args.preset) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)?;
            let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "out".into());
            (ScenarioConfig::parse(&text)?, stem)
        }
        (None, Some(p)) => (runner::preset(p)?, p.clone()),
        (None, None) => return Err(Error::InvalidConfig("either --config or --preset is required".into())),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(w) = args.workers {
        if w == 0 {
            return Err(Error::InvalidConfig("--workers must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .map_err(|e| Error::InvalidConfig(e.to_string()))?;
    }
    let out = args.out.unwrap_or_else(|| PathBuf::from(format!("{name}.csv")));
    log::info!("running {kind} scenario '{name}' -> {}", out.display());
    let meta = runner::run_to_files(&cfg, kind, &out, args.preset.as_deref())?;
    log::info!("finished in {:.1} s", meta.wall_time_seconds);
    for p in &meta.outputs {
        println!("{}", p.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let (kind, args) = match cli.command {
        Command::Evolve(a) => (ScenarioKind::Evolve, a),
        Command::Steady(a) => (ScenarioKind::Steady, a),
        Command::Sweep(a) => (ScenarioKind::Sweep, a),
        Command::Trotter(a) => (ScenarioKind::Trotter, a),
        Command::Spectrum(a) => (ScenarioKind::Spectrum, a),
    };
    match run(kind, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let mut line = serde_json::json!({ "error": { "kind": e.kind(), "message": e.to_string() } });
            if let Error::Parse { line: l, .. } = &e {
                line["error"]["line"] = (*l).into();
            }
            eprintln!("{line}");
            ExitCode::FAILURE
        }
    }
}
