//! Planar gravity-capillary solitary waves on deep water.

pub mod io;
pub mod newton;
pub mod residual;
pub mod spectral;
pub mod wave;

pub use io::{export_wave, import_wave, WaveFile};
pub use newton::{linear_strategy, LinearStrategy, STRATEGIES};
pub use residual::{bernoulli_residual, flat_symbol, measured_flat_symbol};
pub use spectral::Spectral;
pub use wave::{
    dispersion_speed, solve_wave, ConformalWave, InitialGuess, SolverConfig, WaveField, WaveSurface,
};
