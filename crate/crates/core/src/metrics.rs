//! Spectral efficiency, fairness, power efficiency and rate distributions.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default per-user rate below which a user counts as unavailable, bits/s/Hz.
pub const DEFAULT_UNAVAILABLE_THRESHOLD: f64 = 0.1;

fn check_rates(rates: &[f64]) -> Result<()> {
    match rates.iter().find(|r| !(**r >= 0.0) || !r.is_finite()) {
        Some(r) => Err(Error::NegativeRate(*r)),
        None => Ok(()),
    }
}

pub fn spectral_efficiency(rates: &[f64]) -> Result<f64> {
    check_rates(rates)?;
    Ok(rates.iter().sum())
}

/// Jain's index `(sum r)^2 / (n sum r^2)`.
pub fn jain_index(rates: &[f64]) -> Result<f64> {
    check_rates(rates)?;
    let sum: f64 = rates.iter().sum();
    let sq: f64 = rates.iter().map(|r| r * r).sum();
    if rates.is_empty() || sq == 0.0 {
        return Err(Error::AllZeroRates);
    }
    Ok(sum * sum / (rates.len() as f64 * sq))
}

/// Spectral efficiency per watt of total power.
pub fn power_efficiency(se: f64, total_power_dbw: f64) -> f64 {
    se / libm::pow(10.0, total_power_dbw / 10.0)
}

/// Empirical distribution of per-user rates.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RateCdf {
    samples: Vec<f64>,
}

impl RateCdf {
    pub fn new(rates: &[f64]) -> Result<Self> {
        check_rates(rates)?;
        let mut samples = rates.to_vec();
        samples.sort_by(f64::total_cmp);
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// `P(rate <= x)`.
    pub fn at(&self, x: f64) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        self.samples.partition_point(|r| *r <= x) as f64 / self.samples.len() as f64
    }

    /// `P(rate < x)`.
    pub fn fraction_below(&self, x: f64) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        self.samples.partition_point(|r| *r < x) as f64 / self.samples.len() as f64
    }

    /// Smallest sample whose CDF value reaches `q`.
    pub fn quantile(&self, q: f64) -> Option<f64> {
        if self.samples.is_empty() || !(0.0..=1.0).contains(&q) {
            return None;
        }
        let n = self.samples.len();
        let idx = libm::ceil(q * n as f64) as usize;
        Some(self.samples[idx.clamp(1, n) - 1])
    }
}

pub fn unavailable_fraction(rates: &[f64], threshold: f64) -> f64 {
    if rates.is_empty() {
        return 0.0;
    }
    rates.iter().filter(|r| **r < threshold).count() as f64 / rates.len() as f64
}

/// Per-drop summary of one architecture at one power level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub se_total: f64,
    /// `None` when every rate is zero.
    pub jain: Option<f64>,
    pub pe: f64,
    pub unavailable_frac: f64,
    pub cdf: RateCdf,
}

impl MetricsReport {
    pub fn new(rates: &[f64], total_power_dbw: f64, unavailable_threshold: f64) -> Result<Self> {
        let se_total = spectral_efficiency(rates)?;
        let jain = match jain_index(rates) {
            Ok(j) => Some(j),
            Err(Error::AllZeroRates) => None,
            Err(e) => return Err(e),
        };
        Ok(Self {
            se_total,
            jain,
            pe: power_efficiency(se_total, total_power_dbw),
            unavailable_frac: unavailable_fraction(rates, unavailable_threshold),
            cdf: RateCdf::new(rates)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn se_values() {
        assert_eq!(spectral_efficiency(&[]).unwrap(), 0.0);
        assert_eq!(spectral_efficiency(&[1.5, 0.5]).unwrap(), 2.0);
        assert!(spectral_efficiency(&[1.0, -0.1]).is_err());
    }

    #[test]
    fn jain_values() {
        assert!((jain_index(&[2.0; 5]).unwrap() - 1.0).abs() < 1e-15);
        assert!((jain_index(&[0.0, 3.0, 0.0, 0.0]).unwrap() - 0.25).abs() < 1e-15);
        assert!((jain_index(&[3.0, 1.0]).unwrap() - 0.8).abs() < 1e-15);
        assert_eq!(jain_index(&[0.0, 0.0]), Err(Error::AllZeroRates));
    }

    #[test]
    fn pe_values() {
        assert_eq!(power_efficiency(2.0, 0.0), 2.0);
        assert!((power_efficiency(2.0, 10.0) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn cdf_steps() {
        let c = RateCdf::new(&[2.0, 1.0, 3.0]).unwrap();
        assert_eq!(c.samples(), &[1.0, 2.0, 3.0]);
        assert!((c.at(1.0) - 1.0 / 3.0).abs() < 1e-15);
        let d = RateCdf::new(&[1.0, 2.0, 2.0, 2.0, 5.0]).unwrap();
        assert!((d.at(2.0) - d.at(1.9) - 0.6).abs() < 1e-15);
        assert_eq!(d.quantile(0.5), Some(2.0));
        assert_eq!(d.fraction_below(2.0), 0.2);
        assert_eq!(unavailable_fraction(&[0.0, 0.05, 0.2, 1.0], 0.1), 0.5);
    }
}
