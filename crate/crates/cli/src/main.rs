use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hybridcat_cli::{estimate, resolve, run, CliError, ExperimentConfig, RawConfig, RawValue, MAX_DIM_ENV};

/// Heralded hybrid DV-CV entanglement, swapping and teleportation in a
/// truncated Fock space.
#[derive(Parser)]
#[command(name = "hybridcat", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Heralded generation of a hybrid Bell state.
    Generate(Flags),
    /// Swapping with a DV output node.
    SwapDv(Flags),
    /// Swapping with two CV output nodes.
    SwapCv(Flags),
    /// Teleportation of a polarization qubit onto a cat qubit.
    Teleport(Flags),
    /// Wigner grids of the cat components of the generated state.
    Wigner(Flags),
    /// Runs the protocol named by --protocol or the config file.
    Run(Flags),
    /// Prints resolved cutoffs and memory estimates without running.
    Validate(Flags),
}

#[derive(Args, Default)]
struct Flags {
    #[arg(long)]
    protocol: Option<String>,
    /// Coherent amplitude, or a sweep start:stop:steps.
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    /// Tap reflectivity, or a sweep start:stop:steps.
    #[arg(long, allow_hyphen_values = true)]
    r: Option<String>,
    /// Detector efficiency.
    #[arg(long, allow_hyphen_values = true)]
    eta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    variant: Option<i64>,
    /// projector | physical
    #[arg(long)]
    model: Option<String>,
    /// pnr | onoff
    #[arg(long)]
    detectors: Option<String>,
    /// Teleportation input amplitude of H, e.g. 0.6 or 0.3+0.4i.
    #[arg(long, allow_hyphen_values = true)]
    ch: Option<String>,
    /// Teleportation input amplitude of V.
    #[arg(long, allow_hyphen_values = true)]
    cv: Option<String>,
    /// ideal | generated
    #[arg(long)]
    resource: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// TOML file with the same keys as these flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Points per axis of the Wigner grids.
    #[arg(long)]
    wigner_grid: Option<usize>,
    /// CV cutoff override.
    #[arg(long)]
    cutoff: Option<usize>,
    /// Include conditional state vectors in report.json.
    #[arg(long)]
    states: bool,
}

impl Flags {
    fn raw(&self, protocol: Option<&str>) -> RawConfig {
        let text = |s: &Option<String>| s.clone().map(RawValue::Text);
        RawConfig {
            protocol: protocol.map(str::to_string).or_else(|| self.protocol.clone()),
            alpha: text(&self.alpha),
            r: text(&self.r),
            eta: self.eta,
            variant: self.variant,
            model: self.model.clone(),
            detectors: self.detectors.clone(),
            ch: text(&self.ch),
            cv: text(&self.cv),
            resource: self.resource.clone(),
            seed: self.seed,
            cutoff: self.cutoff,
            out: self.out.clone(),
            wigner_grid: self.wigner_grid,
            states: self.states.then_some(true),
        }
    }

    fn resolve(&self, protocol: Option<&str>) -> Result<ExperimentConfig, CliError> {
        let file = match &self.config {
            Some(path) => RawConfig::from_file(path)?,
            None => RawConfig::default(),
        };
        let env = std::env::var(MAX_DIM_ENV).ok();
        resolve(file.overlay(self.raw(protocol)), env.as_deref())
    }
}

fn validate(cfg: &ExperimentConfig) -> Result<(), CliError> {
    println!("protocol {}: {} point(s), guard {} amplitudes", cfg.protocol.name(), cfg.points().len(), cfg.max_dim);
    for e in estimate(cfg)? {
        println!(
            "alpha={} r={}: cv cutoff {}, largest register {} amplitudes (~{:.1} MiB)",
            e.alpha,
            e.r,
            e.cutoff,
            e.dim,
            e.bytes as f64 / (1 << 20) as f64
        );
        if e.over_guard {
            println!("WARNING: dimension {} exceeds the guard {}; set {MAX_DIM_ENV} to raise it", e.dim, cfg.max_dim);
        }
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let (flags, protocol, dry) = match &cli.command {
        Command::Generate(f) => (f, Some("generate"), false),
        Command::SwapDv(f) => (f, Some("swap-dv"), false),
        Command::SwapCv(f) => (f, Some("swap-cv"), false),
        Command::Teleport(f) => (f, Some("teleport"), false),
        Command::Wigner(f) => (f, Some("wigner"), false),
        Command::Run(f) => (f, None, false),
        Command::Validate(f) => (f, None, true),
    };
    let cfg = flags.resolve(protocol)?;
    if dry {
        return validate(&cfg);
    }
    let written = run(&cfg)?;
    println!("wrote {} row(s) to {}", written.rows, written.results.display());
    println!("wrote {}", written.report.display());
    for w in &written.wigner {
        println!("wrote {}", w.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
