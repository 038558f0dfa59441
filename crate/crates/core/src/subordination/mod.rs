//! Random clocks, their inverses and subordinated densities.

pub mod clock;
pub mod fractional;
pub mod hitting;
pub mod integral;
pub mod joint;

pub use clock::{sample_subordinator_path, LevyDensity, SubordinatorSpec};
pub use fractional::{
    fractional_derivative_rl, gl_weights, residual_fractional_forward, residual_inverse_equation,
    ResidualGrid, SpaceTimeGrid,
};
pub use hitting::{
    hitting_density_from_g, inverse_stable_density, DriftHitting, GGrid, HittingDensityGrid,
    HittingLaw, HittingProfile, StableHitting, TabulatedHitting,
};
pub use integral::{subordinate_density, subordinate_expectation, subordinate_integral};
