use core::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{distance, BeamLayout, BeamPattern, LinkBudget, UserTerminal};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};
use crate::seed::{self, stream};

/// How carrier phases are drawn for the channel coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseModel {
    /// One phase per (user, satellite), shared by all feeds of that satellite.
    #[default]
    PerSatellite,
    /// An independent phase for every coefficient.
    PerCoefficient,
}

/// Complex gains from both satellites' feeds to every user, normalized so that
/// `p |h|^2` is received power in watts for feed power `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualChannel {
    pub h1: CMatrix,
    pub h2: CMatrix,
    /// Thermal noise over the full user bandwidth, W.
    pub noise_power_w: f64,
}

impl DualChannel {
    pub fn users(&self) -> usize {
        self.h1.nrows()
    }

    pub fn satellite(&self, s: usize) -> &CMatrix {
        if s == 0 {
            &self.h1
        } else {
            &self.h2
        }
    }
}

fn gain_matrix(
    layout: &BeamLayout,
    users: &[UserTerminal],
    budget: &LinkBudget,
    phases: PhaseModel,
    rng: &mut impl Rng,
) -> Result<CMatrix> {
    let slant = budget.boresight_distance_m;
    let pattern = BeamPattern::from_geometry(budget.beam_gain_peak_dbi, layout.beam_radius_3db * 1e3, slant);
    let path_loss = super::db_to_linear(budget.path_loss_db()?);
    let k = layout.beams_count();
    let mut h = CMatrix::zeros(users.len(), k);
    for (i, u) in users.iter().enumerate() {
        let rx = super::db_to_linear(u.rx_gain_dbi) / path_loss;
        let common = 2.0 * PI * rng.gen::<f64>();
        for (j, c) in layout.beam_centers.iter().enumerate() {
            let theta = libm::atan(distance(u.position, *c) * 1e3 / slant);
            let amp = libm::sqrt(pattern.gain(theta) * rx);
            let phi = match phases {
                PhaseModel::PerSatellite => common,
                PhaseModel::PerCoefficient if j == 0 => common,
                PhaseModel::PerCoefficient => 2.0 * PI * rng.gen::<f64>(),
            };
            h[(i, j)] = C64::from_polar(amp, phi);
        }
    }
    Ok(h)
}

/// Channel matrices for `users` toward both layouts. Users must lie inside the
/// 3-dB footprint of at least one layout.
pub fn build_channel(
    layout1: &BeamLayout,
    layout2: &BeamLayout,
    users: &[UserTerminal],
    budget: &LinkBudget,
    phases: PhaseModel,
    seed: u64,
) -> Result<DualChannel> {
    budget.validate()?;
    for (i, u) in users.iter().enumerate() {
        if !layout1.covers(u.position) && !layout2.covers(u.position) {
            return Err(Error::OutsideCoverage { user: i });
        }
    }
    let mut rng1 = seed::rng(seed, stream::PHASE_SAT1);
    let mut rng2 = seed::rng(seed, stream::PHASE_SAT2);
    let h1 = gain_matrix(layout1, users, budget, phases, &mut rng1)?;
    let h2 = gain_matrix(layout2, users, budget, phases, &mut rng2)?;
    let noise_power_w = users
        .first()
        .map(|u| super::BOLTZMANN * u.noise_temperature_k * budget.user_bandwidth_hz)
        .unwrap_or_else(|| budget.noise_power_w(1.0));
    Ok(DualChannel { h1, h2, noise_power_w })
}
