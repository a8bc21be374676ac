//! Planar vectors, three-body state, pair potentials and conserved quantities.

mod potential;
mod state;
mod vec2;

pub use potential::{pair_force, pair_potential, PotentialKind, PotentialSpec};
pub(crate) use state::accelerations_unchecked;
pub use state::{
    accelerations, angular_momentum, center_of_mass, isosceles_state, linear_momentum, total_energy,
    ShootingParams, ThreeBodyState, PHASE_DIM,
};
pub use vec2::Vec2;
