//! Beam geometry, user drops, and the dual-satellite channel matrices.

mod antenna;
mod build;
mod layout;
mod link_budget;
mod users;

pub use antenna::{antenna_gain, BeamPattern, BESSEL_PATTERN_SCALE};
pub use build::{build_channel, DualChannel, PhaseModel};
pub use layout::{build_beam_layout, build_nested_layout, distance, BeamLayout, Point, SatelliteId};
pub use link_budget::{
    db_to_linear, free_space_loss_db, linear_to_db, noise_power_dbw, LinkBudget, LinkBudgetAudit, BOLTZMANN,
    SPEED_OF_LIGHT,
};
pub use users::{drop_users, UserTerminal};
