//! Dipole-moment estimators behind a common trait, selectable by name.

use std::sync::Arc;

use crate::dipole::DipoleEstimate;
use crate::error::{Error, Result};
use crate::identities::dipole_from_kinetic;
use crate::kelvin::{kelvin_potential, KelvinBasis, KelvinFit};
use crate::oracle::HarmonicField;
use crate::params::WaveParams;
use crate::surface::{Surface, SurfaceGraph};
use crate::tail::{extract_dipole_tail, extract_dipole_tail_3d};

/// Everything an estimator may look at.
#[derive(Clone)]
pub struct FarField {
    pub params: WaveParams,
    pub field: Arc<dyn HarmonicField>,
    pub surface: Arc<dyn Surface>,
    /// Sampled planar surface, required by the planar tail fit.
    pub graph: Option<SurfaceGraph>,
    pub kinetic_energy: f64,
    /// Radial window `(lo, hi)` used by the tail and Kelvin fits.
    pub window: (f64, f64),
}

pub trait DipoleEstimator: Send + Sync {
    fn name(&self) -> &'static str;
    fn estimate(&self, data: &FarField) -> Result<DipoleEstimate>;
}

pub struct EnergyEstimator;

impl DipoleEstimator for EnergyEstimator {
    fn name(&self) -> &'static str {
        "energy"
    }
    fn estimate(&self, data: &FarField) -> Result<DipoleEstimate> {
        dipole_from_kinetic(data.kinetic_energy, &data.params.c(), data.params.n())
    }
}

pub struct TailEstimator;

impl DipoleEstimator for TailEstimator {
    fn name(&self) -> &'static str {
        "tail"
    }
    fn estimate(&self, data: &FarField) -> Result<DipoleEstimate> {
        match (data.params.n(), &data.graph) {
            (2, Some(g)) => extract_dipole_tail(g, &data.params, data.window),
            (2, None) => Err(Error::InvalidConfig(
                "planar tail fit needs a sampled surface".into(),
            )),
            _ => extract_dipole_tail_3d(data.surface.as_ref(), &data.params, data.window, 6),
        }
    }
}

/// Fits the transformed potential on four radii spanning the inverted
/// window. Surfaces with a period use the image basis.
pub struct KelvinEstimator;

impl DipoleEstimator for KelvinEstimator {
    fn name(&self) -> &'static str {
        "kelvin"
    }
    fn estimate(&self, data: &FarField) -> Result<DipoleEstimate> {
        let (lo, hi) = data.window;
        if !(lo > 0.0 && hi > lo) {
            return Err(Error::WindowOutsideData {
                lo,
                hi,
                extent: data.surface.extent(),
            });
        }
        let radii: Vec<f64> = (0..4)
            .map(|i| 1.0 / (hi + (lo - hi) * i as f64 / 3.0))
            .collect();
        let basis = match data.surface.period() {
            Some(period) if data.params.n() == 2 => KelvinBasis::Periodic { period },
            _ => KelvinBasis::Quadratic,
        };
        let fit = KelvinFit {
            basis,
            ..KelvinFit::new(radii)
        };
        fit.fit(&kelvin_potential(Arc::clone(&data.field)))
    }
}

pub const ESTIMATORS: [&str; 3] = ["energy", "tail", "kelvin"];

pub fn estimator(name: &str) -> Result<Box<dyn DipoleEstimator>> {
    match name {
        "energy" => Ok(Box::new(EnergyEstimator)),
        "tail" => Ok(Box::new(TailEstimator)),
        "kelvin" => Ok(Box::new(KelvinEstimator)),
        other => Err(Error::UnknownStrategy(other.to_string())),
    }
}

pub fn all_estimators() -> Vec<Box<dyn DipoleEstimator>> {
    ESTIMATORS
        .iter()
        .map(|n| estimator(n).expect("registered"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dipole::Method;
    use crate::oracle::Dipole;
    use crate::params::make_params;
    use crate::surface::AnalyticSurface;
    use crate::tail::eta_tail_model;
    use crate::vector::Vector;

    #[test]
    fn registry_names() {
        for n in ESTIMATORS {
            assert_eq!(estimator(n).unwrap().name(), n);
        }
        assert_eq!(estimator("bogus").err().unwrap().code(), "E_STRATEGY");
    }

    #[test]
    fn spatial_dipole_recovered_by_every_route() {
        let p = make_params(1.0, 1.0, &[1.0, 0.0, 0.0], 3, 0.5).unwrap();
        let a = Vector::new3(-0.5, 0.0, 0.0);
        let pp = p;
        let s = AnalyticSurface::new(3, move |x| {
            (eta_tail_model(x, &a, &pp).unwrap(), Vector::zeros(2))
        });
        let data = FarField {
            params: p,
            field: Arc::new(Dipole::new(a)),
            surface: Arc::new(s),
            graph: None,
            kinetic_energy: 0.5 * std::f64::consts::PI,
            window: (10.0, 20.0),
        };
        for est in all_estimators() {
            let e = est.estimate(&data).unwrap();
            assert!((e.a - a).norm() < 1e-9, "{} {:?}", est.name(), e.a);
        }
        assert_eq!(
            EnergyEstimator.estimate(&data).unwrap().method,
            Method::Energy
        );
    }
}
