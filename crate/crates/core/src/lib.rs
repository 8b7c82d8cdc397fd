//! Deep-water gravity-capillary solitary waves and the far-field structure
//! of their velocity potential.
//!
//! The crate has three layers. [`oracle`] and [`surface`] supply analytic
//! harmonic fields and free surfaces. [`kelvin`], [`identities`] and
//! [`tail`] turn a potential and a surface into dipole-moment estimates and
//! integral checks. [`solver`] computes planar solitary waves in conformal
//! variables and exposes them through the same field and surface traits.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dipole;
pub mod error;
pub mod estimators;
pub mod fit;
pub mod identities;
pub mod images;
pub mod kelvin;
pub mod oracle;
pub mod params;
pub mod quadrature;
pub mod solver;
pub mod surface;
pub mod tail;
pub mod vector;

pub use dipole::{DipoleEstimate, Method};
pub use error::{Error, Result};
pub use oracle::HarmonicField;
pub use params::{angular_constant, kinetic_constant, make_params, WaveParams};
pub use surface::{Surface, SurfaceGraph};
pub use vector::{Point, Vector};
