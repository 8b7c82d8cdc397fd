//! Run configuration: a JSON file with every field optional, plus flag
//! overrides applied on top.

use std::path::{Path, PathBuf};

use deepwave_core::params::c_min;
use deepwave_core::solver::SolverConfig;
use deepwave_core::{Error, Result, WaveParams};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Physics {
    pub g: f64,
    pub sigma: f64,
    /// Wave speed as a fraction of `c_min`. Ignored when `c` is set.
    pub c_fraction: f64,
    pub c: Option<f64>,
    pub eps: f64,
}

impl Default for Physics {
    fn default() -> Self {
        Physics {
            g: 1.0,
            sigma: 1.0,
            c_fraction: 0.99,
            c: None,
            eps: 0.5,
        }
    }
}

impl Physics {
    pub fn speed(&self) -> f64 {
        self.c
            .unwrap_or(self.c_fraction * c_min(self.g, self.sigma))
    }

    pub fn params(&self) -> Result<WaveParams> {
        WaveParams::planar(self.g, self.sigma, self.speed(), self.eps)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub residual: f64,
    pub ke_volume_rel: f64,
    pub dipole_pairwise_rel: f64,
    pub kinetic_identity: f64,
    pub exponent_rel: f64,
    pub mass_rel: f64,
    pub angular_rel: f64,
    pub angular_spread_rel: f64,
    pub shell_a_rel: f64,
    pub balance_rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            residual: 1e-10,
            ke_volume_rel: 5e-3,
            dipole_pairwise_rel: 0.05,
            kinetic_identity: 0.02,
            exponent_rel: 0.05,
            mass_rel: 0.01,
            angular_rel: 0.05,
            angular_spread_rel: 0.02,
            shell_a_rel: 0.02,
            balance_rel: 1e-4,
        }
    }
}

impl Tolerances {
    fn validate(&self) -> Result<()> {
        let all = [
            self.residual,
            self.ke_volume_rel,
            self.dipole_pairwise_rel,
            self.kinetic_identity,
            self.exponent_rel,
            self.mass_rel,
            self.angular_rel,
            self.angular_spread_rel,
            self.shell_a_rel,
            self.balance_rel,
        ];
        if all.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
            return Err(Error::InvalidConfig(
                "every tolerance must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub tail_window: (f64, f64),
    pub kelvin_window: (f64, f64),
    pub shell_radii: Vec<f64>,
    pub flux_radii: Vec<f64>,
    pub volume_radius: f64,
    pub mass_window: f64,
    /// Node spacing of the sampled surface used by the tail fits.
    pub graph_spacing: f64,
    pub quadrature_order: usize,
    pub quadrature_panels: usize,
    pub tolerances: Tolerances,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            tail_window: (30.0, 70.0),
            kelvin_window: (30.0, 70.0),
            shell_radii: vec![30.0, 40.0, 50.0, 60.0, 70.0],
            flux_radii: vec![20.0, 30.0, 40.0, 50.0, 60.0, 70.0],
            volume_radius: 70.0,
            mass_window: 70.0,
            graph_spacing: 0.05,
            quadrature_order: 8,
            quadrature_panels: 96,
            tolerances: Tolerances::default(),
        }
    }
}

impl VerifyConfig {
    pub fn validate(&self) -> Result<()> {
        self.tolerances.validate()?;
        for (name, (lo, hi)) in [
            ("tail_window", self.tail_window),
            ("kelvin_window", self.kelvin_window),
        ] {
            if !(lo > 0.0 && hi > lo) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must satisfy 0 < lo < hi"
                )));
            }
        }
        for radii in [&self.shell_radii, &self.flux_radii] {
            if radii.len() < 3 || radii.windows(2).any(|w| w[1] <= w[0]) || radii[0] <= 0.0 {
                return Err(Error::InvalidConfig(
                    "radii need at least three increasing positive values".into(),
                ));
            }
        }
        if !(self.volume_radius > 0.0 && self.mass_window > 0.0 && self.graph_spacing > 0.0) {
            return Err(Error::InvalidConfig(
                "radii and spacings must be positive".into(),
            ));
        }
        if self.quadrature_order < 2 || self.quadrature_panels < 8 {
            return Err(Error::InvalidConfig(
                "quadrature needs order >= 2 and panels >= 8".into(),
            ));
        }
        Ok(())
    }

    /// Largest radius any check reads.
    pub fn reach(&self) -> f64 {
        let r = [
            self.tail_window.1,
            self.kelvin_window.1,
            self.volume_radius,
            self.mass_window,
        ];
        self.shell_radii
            .iter()
            .chain(&self.flux_radii)
            .chain(&r)
            .fold(0.0, |m: f64, v| m.max(*v))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleConfig {
    pub fields: usize,
    pub points: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            fields: 5,
            points: 20,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub physics: Physics,
    pub solver: SolverConfig,
    pub verify: VerifyConfig,
    pub oracle: OracleConfig,
    pub out: PathBuf,
    pub wave_file: String,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            physics: Physics::default(),
            solver: SolverConfig::default(),
            verify: VerifyConfig::default(),
            oracle: OracleConfig::default(),
            out: PathBuf::from("out"),
            wave_file: "wave.json".into(),
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text)
            .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<()> {
        self.solver.validate()?;
        self.verify.validate()?;
        if self.oracle.fields == 0 || self.oracle.points == 0 {
            return Err(Error::InvalidConfig(
                "oracle battery needs fields and points".into(),
            ));
        }
        Ok(())
    }

    pub fn wave_path(&self) -> PathBuf {
        self.out.join(&self.wave_file)
    }

    /// Fails with an I/O error unless the output directory exists and is
    /// writable.
    pub fn check_output(&self) -> Result<()> {
        let meta = std::fs::metadata(&self.out)?;
        if !meta.is_dir() {
            return Err(Error::Io(std::io::Error::new(
                std::io::ErrorKind::NotADirectory,
                format!("{} is not a directory", self.out.display()),
            )));
        }
        if meta.permissions().readonly() {
            return Err(Error::Io(std::io::Error::new(
                std::io::ErrorKind::PermissionDenied,
                format!("{} is read-only", self.out.display()),
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let c: RunConfig = serde_json::from_str("{}").unwrap();
        assert_eq!(c, RunConfig::default());
        c.validate().unwrap();
        assert!((c.physics.speed() - 0.99 * 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"physics": {"gravity": 1}}"#).is_err());
    }

    #[test]
    fn bad_tolerance_rejected() {
        let mut c = RunConfig::default();
        c.verify.tolerances.mass_rel = 0.0;
        assert_eq!(c.validate().unwrap_err().code(), "E_CONFIG");
    }

    #[test]
    fn reach_covers_all_windows() {
        assert_eq!(VerifyConfig::default().reach(), 70.0);
    }
}
