use core::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380649e-23;
/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub fn db_to_linear(db: f64) -> f64 {
    libm::pow(10.0, db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * libm::log10(x)
}

/// Free-space path loss `20 log10(4 pi d f / c)` in dB.
pub fn free_space_loss_db(distance_m: f64, frequency_hz: f64) -> Result<f64> {
    if !(distance_m > 0.0) || !distance_m.is_finite() {
        return Err(invalid("distance", "must be positive and finite"));
    }
    if !(frequency_hz > 0.0) || !frequency_hz.is_finite() {
        return Err(invalid("frequency", "must be positive and finite"));
    }
    Ok(20.0 * libm::log10(4.0 * PI * distance_m * frequency_hz / SPEED_OF_LIGHT))
}

/// Thermal noise power `k T B` in dBW.
pub fn noise_power_dbw(temperature_k: f64, bandwidth_hz: f64) -> Result<f64> {
    if !(temperature_k > 0.0) || !temperature_k.is_finite() {
        return Err(invalid("temperature", "must be positive and finite"));
    }
    if !(bandwidth_hz > 0.0) || !bandwidth_hz.is_finite() {
        return Err(invalid("bandwidth", "must be positive and finite"));
    }
    Ok(linear_to_db(BOLTZMANN * temperature_k * bandwidth_hz))
}

/// Per-beam forward link budget. Defaults are the nominal Ka-band system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinkBudget {
    pub carrier_frequency_hz: f64,
    /// Total user-link bandwidth.
    pub user_bandwidth_hz: f64,
    pub boresight_distance_m: f64,
    pub beam_gain_peak_dbi: f64,
    pub ut_antenna_gain_dbi: f64,
    pub clear_sky_temperature_k: f64,
    pub saturated_power_per_beam_w: f64,
    pub output_backoff_db: f64,
    /// Nominal total on-board power (the sweep overrides it).
    pub total_power_dbw: f64,
}

impl Default for LinkBudget {
    fn default() -> Self {
        Self {
            carrier_frequency_hz: 20e9,
            user_bandwidth_hz: 500e6,
            boresight_distance_m: 37_569e3,
            beam_gain_peak_dbi: 54.0,
            ut_antenna_gain_dbi: 41.0,
            clear_sky_temperature_k: 235.34,
            saturated_power_per_beam_w: 55.0,
            output_backoff_db: 5.0,
            total_power_dbw: 29.0,
        }
    }
}

/// Derived link-budget quantities for a boresight user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudgetAudit {
    pub transmit_power_per_beam_w: f64,
    pub eirp_dbw: f64,
    pub path_loss_db: f64,
    pub carrier_power_dbw: f64,
    pub noise_power_dbw: f64,
    pub carrier_to_noise_db: f64,
}

impl LinkBudget {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.carrier_frequency_hz,
            self.user_bandwidth_hz,
            self.boresight_distance_m,
            self.beam_gain_peak_dbi,
            self.ut_antenna_gain_dbi,
            self.clear_sky_temperature_k,
            self.saturated_power_per_beam_w,
            self.output_backoff_db,
            self.total_power_dbw,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(invalid("link_budget", "all entries must be finite"));
        }
        if self.carrier_frequency_hz <= 0.0 {
            return Err(invalid("link_budget.carrier_frequency_hz", "must be positive"));
        }
        if self.user_bandwidth_hz <= 0.0 {
            return Err(invalid("link_budget.user_bandwidth_hz", "must be positive"));
        }
        if self.clear_sky_temperature_k <= 0.0 {
            return Err(invalid("link_budget.clear_sky_temperature_k", "must be positive"));
        }
        if self.boresight_distance_m <= 0.0 {
            return Err(invalid("link_budget.boresight_distance_m", "must be positive"));
        }
        if self.saturated_power_per_beam_w <= 0.0 {
            return Err(invalid("link_budget.saturated_power_per_beam_w", "must be positive"));
        }
        Ok(())
    }

    /// Saturated power backed off by the OBO.
    pub fn transmit_power_per_beam_w(&self) -> f64 {
        self.saturated_power_per_beam_w / db_to_linear(self.output_backoff_db)
    }

    pub fn path_loss_db(&self) -> Result<f64> {
        free_space_loss_db(self.boresight_distance_m, self.carrier_frequency_hz)
    }

    /// Noise power over `bandwidth_fraction` of the user-link bandwidth, in watts.
    pub fn noise_power_w(&self, bandwidth_fraction: f64) -> f64 {
        BOLTZMANN * self.clear_sky_temperature_k * self.user_bandwidth_hz * bandwidth_fraction
    }

    /// `G_rx / L_fs` as a linear factor.
    pub fn receive_factor(&self) -> Result<f64> {
        Ok(db_to_linear(self.ut_antenna_gain_dbi - self.path_loss_db()?))
    }

    pub fn audit(&self) -> Result<LinkBudgetAudit> {
        self.validate()?;
        let p_beam = self.transmit_power_per_beam_w();
        let eirp = linear_to_db(p_beam) + self.beam_gain_peak_dbi;
        let path_loss = self.path_loss_db()?;
        let carrier = eirp - path_loss + self.ut_antenna_gain_dbi;
        let noise = noise_power_dbw(self.clear_sky_temperature_k, self.user_bandwidth_hz)?;
        Ok(LinkBudgetAudit {
            transmit_power_per_beam_w: p_beam,
            eirp_dbw: eirp,
            path_loss_db: path_loss,
            carrier_power_dbw: carrier,
            noise_power_dbw: noise,
            carrier_to_noise_db: carrier - noise,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_loss_matches_nominal_budget() {
        let l = free_space_loss_db(37_569e3, 20e9).unwrap();
        assert!((l - 210.0).abs() <= 0.2, "{l}");
    }

    #[test]
    fn path_loss_scales_with_distance() {
        let a = free_space_loss_db(1.0e6, 12e9).unwrap();
        let b = free_space_loss_db(1.0e7, 12e9).unwrap();
        assert!((b - a - 20.0).abs() < 1e-12);
    }

    #[test]
    fn unit_argument_gives_zero_loss() {
        let f = SPEED_OF_LIGHT / (4.0 * PI);
        assert!(free_space_loss_db(1.0, f).unwrap().abs() < 1e-12);
    }

    #[test]
    fn path_loss_rejects_nonpositive() {
        assert!(free_space_loss_db(0.0, 1e9).is_err());
        assert!(free_space_loss_db(1.0, -1e9).is_err());
    }

    #[test]
    fn noise_power_values() {
        let n = noise_power_dbw(235.34, 500e6).unwrap();
        assert!((n - -117.9).abs() <= 0.2, "{n}");
        let n1 = noise_power_dbw(290.0, 1.0).unwrap();
        assert!((n1 - -203.98).abs() < 0.005, "{n1}");
        let n2 = noise_power_dbw(290.0, 2.0).unwrap();
        assert!((n2 - n1 - 3.0103).abs() < 1e-4);
        assert!(noise_power_dbw(-1.0, 1.0).is_err());
        assert!(noise_power_dbw(1.0, 0.0).is_err());
    }

    #[test]
    fn nominal_audit() {
        let a = LinkBudget::default().audit().unwrap();
        assert!((a.transmit_power_per_beam_w - 17.38).abs() <= 0.1);
        assert!((a.carrier_power_dbw - -103.0).abs() <= 0.5);
        assert!((a.carrier_to_noise_db - 15.0).abs() <= 0.5);
    }
}
