//! Monte Carlo power sweep.
//!
//! Drop `d` at power index `p` is realized from
//! `drop_seed(master, p, d, attempt)`. Every architecture is evaluated on the
//! same realization, so per-drop comparisons between architectures are exact.
//! A drop whose realization or any evaluation fails numerically (a singular
//! scheduled set, a non-converged bound, a ZF residual) is redrawn with the
//! next attempt index. Drops run in parallel and are merged in
//! `(power_index, drop_index)` order, so results do not depend on scheduling.

use dualsat_core::architectures::Architecture;
use dualsat_core::metrics::{jain_index, power_efficiency, unavailable_fraction};
use dualsat_core::seed::drop_seed;
use dualsat_core::system::System;
use dualsat_core::Error as ModelError;
use rayon::prelude::*;

use crate::error::{HarnessError, Result};
use crate::scenario::Scenario;

/// One architecture on one drop.
#[derive(Debug, Clone, PartialEq)]
pub struct DropOutcome {
    pub se: f64,
    pub jain: Option<f64>,
    pub unavailable: f64,
    pub rates: Vec<f64>,
}

/// Aggregate over the drops of one (architecture, power) point.
#[derive(Debug, Clone, PartialEq)]
pub struct ArchStats {
    pub architecture: Architecture,
    pub p_tot_dbw: f64,
    pub drops: usize,
    pub se_mean: f64,
    pub se_stderr: f64,
    /// NaN when every drop had all-zero rates.
    pub jain_mean: f64,
    pub pe_mean: f64,
    pub unavailable_frac: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResults {
    pub scenario: Scenario,
    pub powers: Vec<f64>,
    pub architectures: Vec<Architecture>,
    /// `[power][architecture][drop]`.
    pub outcomes: Vec<Vec<Vec<DropOutcome>>>,
    /// Redraws after numerical failures, as `(power_index, drop_index, attempts)`.
    pub resampled: Vec<(usize, usize, usize)>,
}

fn mean(xs: impl Iterator<Item = f64>) -> (f64, usize) {
    let (s, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        (f64::NAN, 0)
    } else {
        (s / n as f64, n)
    }
}

impl SweepResults {
    pub fn arch_index(&self, arch: Architecture) -> Option<usize> {
        self.architectures.iter().position(|a| *a == arch)
    }

    pub fn power_index(&self, p_tot_dbw: f64) -> Option<usize> {
        self.powers.iter().position(|p| (p - p_tot_dbw).abs() < 1e-9)
    }

    pub fn stats(&self, power_index: usize, arch_index: usize) -> ArchStats {
        let drops = &self.outcomes[power_index][arch_index];
        let n = drops.len();
        let (se_mean, _) = mean(drops.iter().map(|d| d.se));
        let se_stderr = if n > 1 {
            let var = drops.iter().map(|d| (d.se - se_mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            0.0
        };
        let p = self.powers[power_index];
        ArchStats {
            architecture: self.architectures[arch_index],
            p_tot_dbw: p,
            drops: n,
            se_mean,
            se_stderr,
            jain_mean: mean(drops.iter().filter_map(|d| d.jain)).0,
            pe_mean: power_efficiency(se_mean, p),
            unavailable_frac: mean(drops.iter().map(|d| d.unavailable)).0,
        }
    }

    /// One row per (architecture, power), architectures in configured order.
    pub fn rows(&self) -> Vec<ArchStats> {
        (0..self.architectures.len())
            .flat_map(|a| (0..self.powers.len()).map(move |p| (p, a)))
            .map(|(p, a)| self.stats(p, a))
            .collect()
    }

    pub fn se_curve(&self, arch: Architecture) -> Option<Vec<f64>> {
        let a = self.arch_index(arch)?;
        Some((0..self.powers.len()).map(|p| self.stats(p, a).se_mean).collect())
    }

    /// Per-user rates pooled over all drops at a grid power.
    pub fn rate_samples(&self, arch: Architecture, power_index: usize) -> Option<Vec<f64>> {
        let a = self.arch_index(arch)?;
        Some(
            self.outcomes[power_index][a]
                .iter()
                .flat_map(|d| d.rates.iter().copied())
                .collect(),
        )
    }

    /// Grid points nearest to the configured distribution powers.
    pub fn cdf_power_indices(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = self
            .scenario
            .sweep
            .cdf_powers_dbw
            .iter()
            .filter_map(|want| {
                (0..self.powers.len())
                    .min_by(|&a, &b| (self.powers[a] - want).abs().total_cmp(&(self.powers[b] - want).abs()))
            })
            .collect();
        idx.sort_unstable();
        idx.dedup();
        idx
    }
}

fn evaluate_drop(
    system: &System,
    scenario: &Scenario,
    power_index: usize,
    drop_index: usize,
    p_tot_dbw: f64,
) -> Result<(Vec<DropOutcome>, usize)> {
    let s = &scenario.sweep;
    let p_w = 10f64.powf(p_tot_dbw / 10.0);
    let mut last: Option<ModelError> = None;
    for attempt in 0..s.max_attempts {
        let seed = drop_seed(s.seed, power_index, drop_index, attempt);
        let attempt_result = system.realize(seed).and_then(|drop| {
            s.architectures
                .iter()
                .map(|&arch| {
                    let r = system.evaluate(arch, &drop, p_w)?;
                    let jain = match jain_index(&r.per_user_rate) {
                        Ok(j) => Some(j),
                        Err(ModelError::AllZeroRates) => None,
                        Err(e) => return Err(e),
                    };
                    Ok(DropOutcome {
                        se: r.sum_rate(),
                        jain,
                        unavailable: unavailable_fraction(&r.per_user_rate, scenario.metrics.unavailable_threshold),
                        rates: r.per_user_rate,
                    })
                })
                .collect::<std::result::Result<Vec<_>, _>>()
        });
        match attempt_result {
            Ok(out) => return Ok((out, attempt)),
            Err(e) if e.is_numerical() => last = Some(e),
            Err(e) => return Err(e.into()),
        }
    }
    Err(HarnessError::Numerical {
        power_index,
        p_tot_dbw,
        drop_index,
        source: last.expect("at least one attempt ran"),
    })
}

/// Runs the sweep on the current rayon pool.
pub fn run_sweep(scenario: &Scenario) -> Result<SweepResults> {
    scenario.validate()?;
    let system = System::new(scenario.system_config())?;
    let powers = scenario.sweep.powers();
    let drops = scenario.sweep.drops;
    let jobs: Vec<(usize, usize)> = (0..powers.len())
        .flat_map(|p| (0..drops).map(move |d| (p, d)))
        .collect();
    let results: Vec<Result<(Vec<DropOutcome>, usize)>> = jobs
        .par_iter()
        .map(|&(p, d)| evaluate_drop(&system, scenario, p, d, powers[p]))
        .collect();
    let n_arch = scenario.sweep.architectures.len();
    let mut outcomes = vec![vec![Vec::with_capacity(drops); n_arch]; powers.len()];
    let mut resampled = Vec::new();
    for (&(p, d), r) in jobs.iter().zip(results) {
        let (out, attempts) = r?;
        if attempts > 0 {
            resampled.push((p, d, attempts));
        }
        for (a, o) in out.into_iter().enumerate() {
            outcomes[p][a].push(o);
        }
    }
    Ok(SweepResults {
        scenario: scenario.clone(),
        powers,
        architectures: scenario.sweep.architectures.clone(),
        outcomes,
        resampled,
    })
}

/// Runs the sweep on a dedicated pool of `threads` workers.
pub fn run_sweep_with_threads(scenario: &Scenario, threads: usize) -> Result<SweepResults> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| HarnessError::config("--threads", e.to_string()))?;
    pool.install(|| run_sweep(scenario))
}
