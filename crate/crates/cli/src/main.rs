use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use deepwave_cli::commands::{run, Command, EXIT_INPUT};
use deepwave_cli::RunConfig;

#[derive(Parser)]
#[command(
    name = "deepwave",
    version,
    about = "Solve and verify deep-water gravity-capillary solitary waves"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve for a depression wave and export it.
    Solve(Common),
    /// Run the identity pipeline on a wave file.
    Verify(Common),
    /// Check the identities on analytic fields in two and three dimensions.
    OracleSuite(Common),
    /// Fit the far-field decay of a wave file.
    TailFit(Common),
}

#[derive(Args)]
struct Common {
    /// JSON configuration file; missing keys take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (must exist).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Wave file to read (verify, tail-fit).
    #[arg(long)]
    wave: Option<PathBuf>,
    /// Wave speed as a fraction of c_min.
    #[arg(long)]
    c_fraction: Option<f64>,
    /// Absolute wave speed.
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    g: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    half_length: Option<f64>,
    /// Linear solver: auto, dense-fd or newton-krylov.
    #[arg(long)]
    strategy: Option<String>,
    /// Tail window as `lo,hi`.
    #[arg(long, value_parser = parse_window)]
    window: Option<(f64, f64)>,
}

fn parse_window(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected lo,hi")?;
    let lo = a.trim().parse::<f64>().map_err(|e| e.to_string())?;
    let hi = b.trim().parse::<f64>().map_err(|e| e.to_string())?;
    Ok((lo, hi))
}

impl Common {
    fn config(&self) -> deepwave_core::Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(v) = &self.out {
            cfg.out = v.clone();
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.c_fraction {
            cfg.physics.c_fraction = v;
            cfg.physics.c = None;
        }
        if let Some(v) = self.c {
            cfg.physics.c = Some(v);
        }
        if let Some(v) = self.g {
            cfg.physics.g = v;
        }
        if let Some(v) = self.sigma {
            cfg.physics.sigma = v;
        }
        if let Some(v) = self.grid {
            cfg.solver.grid = v;
        }
        if let Some(v) = self.half_length {
            cfg.solver.half_length = v;
        }
        if let Some(v) = &self.strategy {
            cfg.solver.strategy = v.clone();
        }
        if let Some(w) = self.window {
            cfg.verify.tail_window = w;
        }
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cmd, common) = match &cli.command {
        Cmd::Solve(c) => (Command::Solve, c),
        Cmd::Verify(c) => (Command::Verify, c),
        Cmd::OracleSuite(c) => (Command::OracleSuite, c),
        Cmd::TailFit(c) => (Command::TailFit, c),
    };
    let cfg = match common.config() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error {}: {e}", e.code());
            let code = if matches!(e, deepwave_core::Error::Io(_)) {
                3
            } else {
                EXIT_INPUT
            };
            return ExitCode::from(code as u8);
        }
    };
    let outcome = run(cmd, &cfg, common.wave.clone(), common.window);
    if outcome.exit == 0 {
        println!("{}", outcome.message);
    } else {
        eprintln!("{}", outcome.message);
    }
    ExitCode::from(outcome.exit as u8)
}
