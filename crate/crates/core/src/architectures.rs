//! Per-drop evaluation of the four co-location architectures under a common
//! total power budget. Rates are in bits/s/Hz of the total system bandwidth.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::beamhopping::{secondary_power_control, SlotPattern};
use crate::channel::{BeamLayout, DualChannel, UserTerminal};
use crate::error::{invalid, Error, Result};
use crate::linalg::{self, CMatrix};
use crate::precoding::{sum_capacity_bound, PowerAllocation, Precoder, ZF_TOLERANCE};
use crate::scheduling::Allocation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Architecture {
    Conventional,
    Coordinated,
    Cooperative,
    Cognitive,
    CognitivePc,
}

impl Architecture {
    pub const ALL: [Architecture; 5] = [
        Architecture::Conventional,
        Architecture::Coordinated,
        Architecture::Cooperative,
        Architecture::Cognitive,
        Architecture::CognitivePc,
    ];

    /// Identifier used in CSV files and on the command line.
    pub fn tag(self) -> &'static str {
        match self {
            Architecture::Conventional => "conventional",
            Architecture::Coordinated => "coordinated",
            Architecture::Cooperative => "cooperative",
            Architecture::Cognitive => "cognitive",
            Architecture::CognitivePc => "cognitive_pc",
        }
    }

    /// Legend name for plots.
    pub fn label(self) -> &'static str {
        match self {
            Architecture::Conventional => "Conventional 3 Color",
            Architecture::Coordinated => "Coordinated",
            Architecture::Cooperative => "Cooperative (bound)",
            Architecture::Cognitive => "Cognitive (w/o power control)",
            Architecture::CognitivePc => "Cognitive (w/ power control)",
        }
    }

    /// The cooperative curve is a capacity bound, not a transmission scheme.
    pub fn is_realizable(self) -> bool {
        self != Architecture::Cooperative
    }
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Architecture {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Architecture::ALL
            .into_iter()
            .find(|a| a.tag() == s)
            .ok_or(invalid("architecture", "unknown architecture tag"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArchitectureResult {
    pub architecture: Architecture,
    /// One entry per dropped user; unserved users get 0.
    pub per_user_rate: Vec<f64>,
    pub served_user_ids: Vec<usize>,
    /// Peak instantaneous radiated power over both satellites, W.
    pub consumed_power_w: f64,
    pub upper_bound: bool,
}

impl ArchitectureResult {
    pub fn sum_rate(&self) -> f64 {
        self.per_user_rate.iter().sum()
    }
}

fn check_power(total_power_w: f64) -> Result<()> {
    if total_power_w > 0.0 && total_power_w.is_finite() {
        Ok(())
    } else {
        Err(invalid("total_power", "must be positive and finite"))
    }
}

/// Served user of every beam, per satellite. `None` for beams without a user.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BeamService {
    pub sat1: Vec<Option<usize>>,
    pub sat2: Vec<Option<usize>>,
}

impl BeamService {
    fn of(&self, s: usize) -> &[Option<usize>] {
        if s == 0 {
            &self.sat1
        } else {
            &self.sat2
        }
    }
}

/// Beam-to-user mapping of the frequency-split baseline: each satellite serves
/// the first not-yet-served user whose nearest beam is `k`, satellite 1 first.
pub fn conventional_service(users: &[UserTerminal], layout1: &BeamLayout, layout2: &BeamLayout) -> BeamService {
    let mut taken = vec![false; users.len()];
    let mut pick = |layout: &BeamLayout| -> Vec<Option<usize>> {
        let mut served = vec![None; layout.beams_count()];
        for (i, u) in users.iter().enumerate() {
            if taken[i] {
                continue;
            }
            if let Some(k) = layout.nearest_beam(u.position) {
                if served[k].is_none() {
                    served[k] = Some(i);
                    taken[i] = true;
                }
            }
        }
        served
    };
    let sat1 = pick(layout1);
    let sat2 = pick(layout2);
    BeamService { sat1, sat2 }
}

/// Beam-to-user mapping of the cognitive system: the primary serves the first
/// user homed in each large beam; the remaining users go to their nearest
/// sub-beam, first come first served.
pub fn cognitive_service(users: &[UserTerminal], primary: &BeamLayout, secondary: &BeamLayout) -> BeamService {
    let mut sat1 = vec![None; primary.beams_count()];
    let mut taken = vec![false; users.len()];
    for (i, u) in users.iter().enumerate() {
        if u.home_beam < sat1.len() && sat1[u.home_beam].is_none() {
            sat1[u.home_beam] = Some(i);
            taken[i] = true;
        }
    }
    let mut sat2 = vec![None; secondary.beams_count()];
    for (i, u) in users.iter().enumerate() {
        if taken[i] {
            continue;
        }
        if let Some(b) = secondary.nearest_beam(u.position) {
            if sat2[b].is_none() {
                sat2[b] = Some(i);
            }
        }
    }
    BeamService { sat1, sat2 }
}

/// Frequency-split baseline. Each satellite gets half the band and splits it
/// into `colors` sub-bands, one per color class. A user sees noise over its own
/// sub-band and interference only from same-color beams of its own satellite.
pub fn eval_conventional(
    channel: &DualChannel,
    service: &BeamService,
    colors: [&SlotPattern; 2],
    total_power_w: f64,
) -> Result<ArchitectureResult> {
    check_power(total_power_w)?;
    let n = channel.users();
    let mut rate = vec![0.0; n];
    let mut served_ids = Vec::new();
    let mut consumed = 0.0;
    for (s, pattern) in colors.into_iter().enumerate() {
        let h = channel.satellite(s);
        let served = service.of(s);
        if !pattern.is_partition(served.len()) {
            return Err(Error::PatternMismatch("color classes do not partition the beams"));
        }
        let share = 1.0 / (2.0 * pattern.period as f64);
        let noise = channel.noise_power_w * share;
        let active = served.iter().filter(|u| u.is_some()).count();
        if active == 0 {
            continue;
        }
        let p = total_power_w / 2.0 / active as f64;
        consumed += p * active as f64;
        for class in &pattern.active_sets {
            for &k in class {
                let Some(i) = served[k] else { continue };
                let signal = p * h[(i, k)].norm_sqr();
                let interference: f64 = class
                    .iter()
                    .filter(|&&k2| k2 != k && served[k2].is_some())
                    .map(|&k2| p * h[(i, k2)].norm_sqr())
                    .sum();
                rate[i] = share * libm::log2(1.0 + signal / (noise + interference));
                served_ids.push(i);
            }
        }
    }
    served_ids.sort_unstable();
    Ok(ArchitectureResult {
        architecture: Architecture::Conventional,
        per_user_rate: rate,
        served_user_ids: served_ids,
        consumed_power_w: consumed,
        upper_bound: false,
    })
}

/// Coordinated precoding: both satellites reuse the full band, each applies ZF
/// to its own allocated users, and users see the partner's precoded signal as
/// interference. The intra-satellite ZF residual is audited in place.
pub fn eval_coordinated(
    channel: &DualChannel,
    allocation: &Allocation,
    total_power_w: f64,
    mode: PowerAllocation,
) -> Result<ArchitectureResult> {
    check_power(total_power_w)?;
    let n = channel.users();
    let noise = channel.noise_power_w;
    let mut precoders: [Option<Precoder>; 2] = [None, None];
    for (s, slot) in precoders.iter_mut().enumerate() {
        let set = allocation.users(s);
        if set.is_empty() {
            continue;
        }
        let h = channel.satellite(s);
        let p_ant = total_power_w / 2.0 / h.ncols() as f64;
        let hs = linalg::select_rows(h, set);
        *slot = Some(Precoder::new(&hs, p_ant, noise, mode)?);
    }
    let mut rate = vec![0.0; n];
    let mut consumed = 0.0;
    for s in 0..2 {
        let Some(pre) = &precoders[s] else { continue };
        consumed += pre.total_power();
        let h = channel.satellite(s);
        let ho = channel.satellite(1 - s);
        let set = allocation.users(s);
        for (a, &i) in set.iter().enumerate() {
            let own = linalg::row_col_gain(h, i, &pre.directions, a);
            for b in 0..set.len() {
                if b != a {
                    let leak = linalg::row_col_gain(h, i, &pre.directions, b);
                    if leak > ZF_TOLERANCE * ZF_TOLERANCE * own {
                        return Err(Error::ZeroForcingResidual {
                            residual: libm::sqrt(leak / own),
                        });
                    }
                }
            }
            let interference: f64 = match &precoders[1 - s] {
                Some(po) => (0..po.powers.len())
                    .map(|b| po.powers[b] * linalg::row_col_gain(ho, i, &po.directions, b))
                    .sum(),
                None => 0.0,
            };
            rate[i] = libm::log2(1.0 + pre.powers[a] * own / (noise + interference));
        }
    }
    let mut served: Vec<usize> = allocation
        .sat1_users
        .iter()
        .chain(&allocation.sat2_users)
        .copied()
        .collect();
    served.sort_unstable();
    Ok(ArchitectureResult {
        architecture: Architecture::Coordinated,
        per_user_rate: rate,
        served_user_ids: served,
        consumed_power_w: consumed,
        upper_bound: false,
    })
}

/// Cooperative joint processing, represented by the sum-power broadcast
/// capacity of the joint channel. The sum is spread evenly over all users.
pub fn eval_cooperative(channel: &DualChannel, total_power_w: f64) -> Result<ArchitectureResult> {
    check_power(total_power_w)?;
    let joint = linalg::hstack(&channel.h1, &channel.h2);
    let bound = sum_capacity_bound(&joint, total_power_w, channel.noise_power_w)?;
    let n = channel.users();
    Ok(ArchitectureResult {
        architecture: Architecture::Cooperative,
        per_user_rate: vec![bound.sum_rate / n as f64; n],
        served_user_ids: (0..n).collect(),
        consumed_power_w: total_power_w,
        upper_bound: true,
    })
}

/// Inputs of the cognitive evaluator that do not change with the power level.
#[derive(Debug, Clone, Copy)]
pub struct CognitiveSetup<'a> {
    /// Users x primary beams.
    pub primary: &'a CMatrix,
    /// Users x secondary beams.
    pub secondary: &'a CMatrix,
    pub noise_power_w: f64,
    pub service: &'a BeamService,
    pub primary_pattern: &'a SlotPattern,
    pub secondary_pattern: &'a SlotPattern,
}

/// Cognitive beam hopping. Each satellite spends half the budget, split evenly
/// over its lit beams in every slot; lit beams use the full band. With
/// `i_over_n_cap_db` set, secondary powers are capped per slot.
pub fn eval_cognitive(
    setup: &CognitiveSetup<'_>,
    total_power_w: f64,
    i_over_n_cap_db: Option<f64>,
) -> Result<ArchitectureResult> {
    check_power(total_power_w)?;
    let CognitiveSetup {
        primary,
        secondary,
        noise_power_w: noise,
        service,
        primary_pattern: pp,
        secondary_pattern: sp,
    } = *setup;
    if pp.period != sp.period || pp.active_sets.len() != sp.active_sets.len() {
        return Err(Error::PatternMismatch("primary and secondary periods differ"));
    }
    if service.sat1.len() != primary.ncols() || service.sat2.len() != secondary.ncols() {
        return Err(Error::PatternMismatch("beam service does not match the channel"));
    }
    if pp.active_sets.iter().flatten().any(|&b| b >= primary.ncols())
        || sp.active_sets.iter().flatten().any(|&b| b >= secondary.ncols())
    {
        return Err(Error::PatternMismatch("pattern references a beam outside the layout"));
    }
    let n = primary.nrows();
    let period = pp.period as f64;
    let mut rate = vec![0.0; n];
    let mut consumed: f64 = 0.0;
    for (lit_p, lit_s) in pp.active_sets.iter().zip(&sp.active_sets) {
        let pa: Vec<(usize, usize)> = lit_p.iter().filter_map(|&k| service.sat1[k].map(|u| (k, u))).collect();
        let sa: Vec<(usize, usize)> = lit_s.iter().filter_map(|&b| service.sat2[b].map(|u| (b, u))).collect();
        let p_prim = if pa.is_empty() {
            0.0
        } else {
            total_power_w / 2.0 / pa.len() as f64
        };
        let mut p_sec = vec![
            if sa.is_empty() {
                0.0
            } else {
                total_power_w / 2.0 / sa.len() as f64
            };
            sa.len()
        ];
        if let Some(cap) = i_over_n_cap_db {
            let users: Vec<usize> = pa.iter().map(|&(_, u)| u).collect();
            let beams: Vec<usize> = sa.iter().map(|&(b, _)| b).collect();
            p_sec = secondary_power_control(secondary, &users, &beams, &p_sec, noise, cap);
        }
        consumed = consumed.max(p_prim * pa.len() as f64 + p_sec.iter().sum::<f64>());
        let from_secondary = |i: usize, skip: Option<usize>| -> f64 {
            sa.iter()
                .zip(&p_sec)
                .filter(|((b, _), _)| Some(*b) != skip)
                .map(|((b, _), p)| p * secondary[(i, *b)].norm_sqr())
                .sum()
        };
        let from_primary = |i: usize, skip: Option<usize>| -> f64 {
            pa.iter()
                .filter(|(k, _)| Some(*k) != skip)
                .map(|(k, _)| p_prim * primary[(i, *k)].norm_sqr())
                .sum()
        };
        for &(k, i) in &pa {
            let signal = p_prim * primary[(i, k)].norm_sqr();
            let interference = from_primary(i, Some(k)) + from_secondary(i, None);
            rate[i] += libm::log2(1.0 + signal / (noise + interference)) / period;
        }
        for (j, &(b, i)) in sa.iter().enumerate() {
            let signal = p_sec[j] * secondary[(i, b)].norm_sqr();
            let interference = from_secondary(i, Some(b)) + from_primary(i, None);
            rate[i] += libm::log2(1.0 + signal / (noise + interference)) / period;
        }
    }
    let mut served: Vec<usize> = service.sat1.iter().chain(&service.sat2).flatten().copied().collect();
    served.sort_unstable();
    Ok(ArchitectureResult {
        architecture: if i_over_n_cap_db.is_some() {
            Architecture::CognitivePc
        } else {
            Architecture::Cognitive
        },
        per_user_rate: rate,
        served_user_ids: served,
        consumed_power_w: consumed,
        upper_bound: false,
    })
}
