//! Fourier-pseudospectral lab on `T^d`: damped waves, quasimodes, slice
//! estimates and quantization masses.

pub mod grid;
pub mod io;
pub mod quantize;
pub mod quasimode;
pub mod resolvent;
pub mod symbols;
pub mod wave;

pub use grid::{rasterize_damping, FftPlan, Grid, GridField, C64};
pub use quantize::{fourier_multiplier, microlocal_mass, second_microlocal_mass, Factor, Separable, Side, ThirdWindow, Windows};
pub use quasimode::{
    check_nonconcentration, check_slab_estimate, epsilon_of_h, gaussian_beam, helmholtz_solve, plane_wave,
    profile_quasimode, slice_mass, NonConcentration, Quasimode, QuasimodeReport, Regime, TransverseProfile,
};
pub use resolvent::{check_1d_resolvent, resolvent_family, ResolventSample};
pub use wave::{
    constant_damping_rate, energy, fit_decay_rate, mode_propagator, run_simulation, step_damped_wave, DecayFit,
    EnergyTrace, InitialData, Simulation, SimulationConfig, WaveState,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("fields or parameters live on different grids")]
    ResolutionMismatch,
    #[error("resolution {0} is not a power of two >= 8")]
    BadResolution(usize),
    #[error("{0}")]
    BadParameter(String),
    #[error("not resolved on the grid: {0}")]
    Unresolvable(String),
    #[error("profile support exceeds the torus along axis {axis}")]
    ProfileTooWide { axis: usize },
    #[error("every mode lies inside the resonance guard")]
    AllModesExcluded,
    #[error("non-finite energy at step {step} (t = {t})")]
    NonFinite { step: usize, t: f64, last_good: Box<WaveState> },
    #[error("energy {t} is not positive inside the fit window")]
    NonpositiveEnergy { t: f64 },
    #[error("residual {residual:e} exceeds tolerance at scale {scale:e}")]
    ResidualCheck { residual: f64, scale: f64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
