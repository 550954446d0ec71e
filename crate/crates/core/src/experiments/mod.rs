//! Steady-state runs, profile fits and the wall-location studies built on
//! top of the schemes.

pub mod exact;
pub mod fit;
pub mod magic;
pub mod steady;
pub mod transport;

pub use exact::{exact_poiseuille, exact_poisson_1d};
pub use fit::{fit_parabola, wall_location, ParabolaFit, WallLocationResult, WallSide};
pub use magic::{
    find_magic_root, predict_magic, sweep_product, ChannelDrive, MagicRoot, MagicSweep, MagicVariant, RootOptions,
    SigmaPair, SweepSample, WallMeasurement, WallProblem,
};
pub use steady::{run_to_steady, SteadyReport, SteadyStateCriterion};
pub use transport::{measure_diffusivity, measure_sound_speed_squared, measure_viscosity, ModeOptions};
