use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{BeamLayout, LinkBudget, Point};
use crate::error::{invalid, Result};
use crate::seed::{self, stream};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UserTerminal {
    pub position: Point,
    pub home_beam: usize,
    pub rx_gain_dbi: f64,
    pub noise_temperature_k: f64,
}

/// Drops `users_per_beam` terminals uniformly inside each beam's 3-dB disc.
/// Users are ordered beam by beam.
pub fn drop_users(
    layout: &BeamLayout,
    users_per_beam: usize,
    budget: &LinkBudget,
    seed: u64,
) -> Result<Vec<UserTerminal>> {
    if layout.beams_count() == 0 {
        return Err(invalid("layout", "has no beams"));
    }
    if users_per_beam == 0 {
        return Err(invalid("users_per_beam", "must be at least 1"));
    }
    let mut rng = seed::rng(seed, stream::USERS);
    let r = layout.beam_radius_3db;
    let mut users = Vec::with_capacity(layout.beams_count() * users_per_beam);
    for (k, c) in layout.beam_centers.iter().enumerate() {
        for _ in 0..users_per_beam {
            let rho = r * libm::sqrt(rng.gen::<f64>());
            let phi = 2.0 * PI * rng.gen::<f64>();
            let off = Point::polar(rho, phi);
            users.push(UserTerminal {
                position: Point::new(c.x + off.x, c.y + off.y),
                home_beam: k,
                rx_gain_dbi: budget.ut_antenna_gain_dbi,
                noise_temperature_k: budget.clear_sky_temperature_k,
            });
        }
    }
    Ok(users)
}
