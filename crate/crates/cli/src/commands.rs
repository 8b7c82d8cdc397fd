//! The four commands, their output files and exit codes.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use deepwave_core::solver::{export_wave, import_wave, solve_wave, ConformalWave, InitialGuess};
use deepwave_core::Error;

use crate::config::RunConfig;
use crate::oracle_suite::oracle_suite;
use crate::report::{Check, Report};
use crate::verify::{tail_report, verify_wave};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_INTEGRITY: i32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Solve,
    Verify,
    OracleSuite,
    TailFit,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::Verify => "verify",
            Command::OracleSuite => "oracle-suite",
            Command::TailFit => "tail-fit",
        }
    }
}

/// Exit code for an error raised outside the checks themselves.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) => EXIT_IO,
        Error::Json(_) | Error::ChecksumMismatch { .. } | Error::FormatVersion(_) => EXIT_INTEGRITY,
        Error::OutsideSolitaryRange { .. }
        | Error::NonPositiveGravity(_)
        | Error::NegativeSurfaceTension(_)
        | Error::ZeroWaveSpeed
        | Error::VerticalWaveSpeed(_)
        | Error::UnsupportedDimension(_)
        | Error::DecayExponentOutOfRange(_)
        | Error::NotPowerOfTwo(_)
        | Error::PureGravityUnsupported
        | Error::InvalidConfig(_)
        | Error::UnknownStrategy(_)
        | Error::WindowOutsideData { .. }
        | Error::RadiusBeyondData { .. } => EXIT_INPUT,
        _ => EXIT_CHECK_FAILED,
    }
}

/// Result of one command: exit code and a one-line message.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub exit: i32,
    pub message: String,
}

impl Outcome {
    fn error(e: &Error) -> Outcome {
        Outcome {
            exit: exit_code(e),
            message: format!("error {}: {e}", e.code()),
        }
    }
}

/// Reads a wave file; anything wrong with its contents is a data-integrity
/// failure.
fn load_wave(path: &Path) -> Result<Arc<ConformalWave>, Outcome> {
    match import_wave(path) {
        Ok(w) => Ok(Arc::new(w)),
        Err(e @ Error::Io(_)) => Err(Outcome::error(&e)),
        Err(e) => Err(Outcome {
            exit: EXIT_INTEGRITY,
            message: format!("error {}: {e}", e.code()),
        }),
    }
}

fn finish(report: &Report, cmd: Command, cfg: &RunConfig, headline: String) -> Outcome {
    if let Err(e) = report.write(&cfg.out, cmd.name(), cfg) {
        return Outcome::error(&e);
    }
    let failed = report.failures();
    if failed.is_empty() {
        Outcome {
            exit: EXIT_PASS,
            message: headline,
        }
    } else {
        let names: Vec<&str> = failed.iter().map(|c| c.name.as_str()).collect();
        Outcome {
            exit: EXIT_CHECK_FAILED,
            message: format!("{headline}; failed: {}", names.join(" ")),
        }
    }
}

/// Runs `cmd`. `wave` overrides the wave file for verify and tail-fit;
/// `window` overrides the tail window for tail-fit.
pub fn run(
    cmd: Command,
    cfg: &RunConfig,
    wave: Option<PathBuf>,
    window: Option<(f64, f64)>,
) -> Outcome {
    if let Err(e) = cfg.validate() {
        return Outcome::error(&e);
    }
    if let Err(e) = cfg.check_output() {
        return Outcome::error(&e);
    }
    let wave_path = wave.unwrap_or_else(|| cfg.wave_path());
    match cmd {
        Command::Solve => {
            let params = match cfg.physics.params() {
                Ok(p) => p,
                Err(e) => return Outcome::error(&e),
            };
            let w = match solve_wave(&params, &cfg.solver, InitialGuess::Depression) {
                Ok(w) => w,
                Err(e) => return Outcome::error(&e),
            };
            if let Err(e) = export_wave(&w, &cfg.wave_path()) {
                return Outcome::error(&e);
            }
            let mut report = Report::default();
            let (ke, mass) = match (w.wave_energy(), w.wave_mass()) {
                (Ok(k), Ok(m)) => (k, m),
                (Err(e), _) | (_, Err(e)) => return Outcome::error(&e),
            };
            report.note("c", w.c());
            report.note("kinetic_energy", ke);
            report.note("mass", mass);
            report.note("residual_max", w.residual_max());
            report.note("wave_file", cfg.wave_path());
            report.push(Check::below(
                "newton_residual",
                w.residual_max(),
                cfg.solver.tol,
            ));
            let line = format!(
                "c={:e} KE={:e} mass={:e} residual={:e}",
                w.c(),
                ke,
                mass,
                w.residual_max()
            );
            finish(&report, cmd, cfg, line)
        }
        Command::Verify => {
            let w = match load_wave(&wave_path) {
                Ok(w) => w,
                Err(o) => return o,
            };
            match verify_wave(w, &cfg.verify) {
                Ok(report) => {
                    let n = report.checks.len();
                    let passed = report.checks.iter().filter(|c| c.passed()).count();
                    finish(&report, cmd, cfg, format!("{passed}/{n} checks passed"))
                }
                Err(e) => Outcome::error(&e),
            }
        }
        Command::OracleSuite => {
            let report = oracle_suite(&cfg.oracle, cfg.seed);
            let n = report.checks.len();
            let passed = report.checks.iter().filter(|c| c.passed()).count();
            finish(
                &report,
                cmd,
                cfg,
                format!("{passed}/{n} oracle checks passed"),
            )
        }
        Command::TailFit => {
            let w = match load_wave(&wave_path) {
                Ok(w) => w,
                Err(o) => return o,
            };
            let window = window.unwrap_or(cfg.verify.tail_window);
            if !(window.0 > 0.0 && window.1 > window.0) || window.1 > w.half_length() {
                let e = Error::WindowOutsideData {
                    lo: window.0,
                    hi: window.1,
                    extent: w.half_length(),
                };
                return Outcome::error(&e);
            }
            match tail_report(&w, &cfg.verify, window) {
                Ok(report) => {
                    let mut line = String::from("tail fit");
                    for c in &report.checks {
                        line.push_str(&format!(" {}={:e}", c.name, c.value));
                    }
                    for wmsg in &report.warnings {
                        eprintln!("warning: {wmsg}");
                    }
                    finish(&report, cmd, cfg, line)
                }
                Err(e) => Outcome::error(&e),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(
            exit_code(&Error::OutsideSolitaryRange { c: 2.0, c_min: 1.4 }),
            EXIT_INPUT
        );
        assert_eq!(exit_code(&Error::Io(std::io::Error::other("x"))), EXIT_IO);
        assert_eq!(
            exit_code(&Error::ChecksumMismatch {
                stored: "a".into(),
                computed: "b".into()
            }),
            EXIT_INTEGRITY
        );
        assert_eq!(
            exit_code(&Error::NoConvergence {
                what: "x",
                iterations: 1
            }),
            EXIT_CHECK_FAILED
        );
    }

    #[test]
    fn missing_output_directory() {
        let cfg = RunConfig {
            out: PathBuf::from("/nonexistent/deepwave/out"),
            ..Default::default()
        };
        assert_eq!(run(Command::OracleSuite, &cfg, None, None).exit, EXIT_IO);
    }
}
