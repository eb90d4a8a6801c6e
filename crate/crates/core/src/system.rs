//! Scenario-level wiring: layouts, patterns and per-drop realizations.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::architectures::{
    cognitive_service, conventional_service, eval_cognitive, eval_conventional, eval_cooperative, eval_coordinated,
    Architecture, ArchitectureResult, BeamService, CognitiveSetup,
};
use crate::beamhopping::{primary_pattern, secondary_pattern, SlotPattern};
use crate::channel::{
    build_beam_layout, build_channel, build_nested_layout, drop_users, BeamLayout, DualChannel, LinkBudget, PhaseModel,
    SatelliteId, UserTerminal,
};
use crate::error::{invalid, Error, Result};
use crate::linalg::CMatrix;
use crate::precoding::PowerAllocation;
use crate::scheduling::{siua_allocate, Allocation, SiuaParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometryConfig {
    pub coverage_radius_km: f64,
    pub primary_beams: usize,
    pub primary_beam_radius_km: f64,
    /// Beams of the second co-located satellite in the conventional,
    /// coordinated and cooperative systems.
    pub secondary_beams: usize,
    pub secondary_beam_radius_km: f64,
    pub users_per_beam: usize,
    /// Colors of the frequency-split baseline.
    pub frequency_reuse: usize,
    pub phase_model: PhaseModel,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self {
            coverage_radius_km: 500.0,
            primary_beams: 7,
            primary_beam_radius_km: 250.0,
            secondary_beams: 7,
            secondary_beam_radius_km: 250.0,
            users_per_beam: 2,
            frequency_reuse: 3,
            phase_model: PhaseModel::PerSatellite,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SchedulerConfig {
    pub alpha: f64,
    pub lambda_interf: f64,
    pub power_allocation: PowerAllocation,
}

impl Default for SchedulerConfig {
    fn default() -> Self {
        let siua = SiuaParams::default();
        Self {
            alpha: siua.alpha,
            lambda_interf: siua.lambda_interf,
            power_allocation: PowerAllocation::Uniform,
        }
    }
}

impl SchedulerConfig {
    pub fn siua(&self) -> SiuaParams {
        SiuaParams {
            alpha: self.alpha,
            lambda_interf: self.lambda_interf,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CognitiveConfig {
    pub sub_beams_per_parent: usize,
    pub slot_reuse: usize,
    pub i_over_n_cap_db: f64,
    /// Simultaneous secondary beams; unlimited when absent.
    pub secondary_beam_budget: Option<usize>,
}

impl Default for CognitiveConfig {
    fn default() -> Self {
        Self {
            sub_beams_per_parent: 4,
            slot_reuse: 3,
            i_over_n_cap_db: 0.0,
            secondary_beam_budget: None,
        }
    }
}

/// Physical and algorithmic parameters shared by every drop.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemConfig {
    pub geometry: GeometryConfig,
    pub link_budget: LinkBudget,
    pub scheduler: SchedulerConfig,
    pub cognitive: CognitiveConfig,
}

/// Re-labels a parameter error with the configuration key it came from.
fn rename(e: Error, key: &'static str) -> Error {
    match e {
        Error::InvalidParameter { reason, .. } => Error::InvalidParameter { name: key, reason },
        other => other,
    }
}

/// Precomputed layouts and patterns.
#[derive(Debug, Clone, PartialEq)]
pub struct System {
    pub config: SystemConfig,
    pub layout1: BeamLayout,
    pub layout2: BeamLayout,
    pub sub_beams: BeamLayout,
    pub colors1: SlotPattern,
    pub colors2: SlotPattern,
    pub primary_hops: SlotPattern,
    pub secondary_hops: SlotPattern,
}

/// Everything about one drop that does not depend on the power level.
#[derive(Debug, Clone, PartialEq)]
pub struct DropRealization {
    pub users: Vec<UserTerminal>,
    pub channel: DualChannel,
    /// Users x cognitive sub-beams.
    pub sub_channel: CMatrix,
    pub allocation: Allocation,
    pub conventional: BeamService,
    pub cognitive: BeamService,
}

impl System {
    pub fn new(config: SystemConfig) -> Result<Self> {
        let g = &config.geometry;
        config.link_budget.validate()?;
        if g.users_per_beam == 0 {
            return Err(invalid("geometry.users_per_beam", "must be at least 1"));
        }
        let layout_at = |prefix: [&'static str; 3]| {
            move |e: Error| match e {
                Error::InvalidParameter { name, reason } => Error::InvalidParameter {
                    name: match name {
                        "beams_count" => prefix[0],
                        "beam_radius_3db" => prefix[1],
                        "coverage_radius" => prefix[2],
                        other => other,
                    },
                    reason,
                },
                other => other,
            }
        };
        let layout1 = build_beam_layout(
            g.coverage_radius_km,
            g.primary_beams,
            g.primary_beam_radius_km,
            SatelliteId::Primary,
        )
        .map_err(layout_at([
            "geometry.primary_beams",
            "geometry.primary_beam_radius_km",
            "geometry.coverage_radius_km",
        ]))?;
        let layout2 = build_beam_layout(
            g.coverage_radius_km,
            g.secondary_beams,
            g.secondary_beam_radius_km,
            SatelliteId::Secondary,
        )
        .map_err(layout_at([
            "geometry.secondary_beams",
            "geometry.secondary_beam_radius_km",
            "geometry.coverage_radius_km",
        ]))?;
        let sub_beams = build_nested_layout(&layout1, config.cognitive.sub_beams_per_parent, SatelliteId::Secondary)
            .map_err(|e| rename(e, "cognitive.sub_beams_per_parent"))?;
        let colors1 =
            primary_pattern(&layout1, g.frequency_reuse).map_err(|e| rename(e, "geometry.frequency_reuse"))?;
        let colors2 =
            primary_pattern(&layout2, g.frequency_reuse).map_err(|e| rename(e, "geometry.frequency_reuse"))?;
        let primary_hops =
            primary_pattern(&layout1, config.cognitive.slot_reuse).map_err(|e| rename(e, "cognitive.slot_reuse"))?;
        let secondary_hops = secondary_pattern(
            &primary_hops,
            &layout1,
            &sub_beams,
            config.cognitive.secondary_beam_budget,
        )?;
        let s = config.scheduler.siua();
        if !(s.alpha > 0.0 && s.alpha < 1.0) {
            return Err(invalid("scheduler.alpha", "must lie strictly between 0 and 1"));
        }
        if !(s.lambda_interf >= 0.0) || !s.lambda_interf.is_finite() {
            return Err(invalid("scheduler.lambda_interf", "must be nonnegative and finite"));
        }
        if config.cognitive.i_over_n_cap_db.is_nan() {
            return Err(invalid("cognitive.i_over_n_cap_db", "must be a number"));
        }
        Ok(Self {
            config,
            layout1,
            layout2,
            sub_beams,
            colors1,
            colors2,
            primary_hops,
            secondary_hops,
        })
    }

    /// Drops users, builds the channels and runs the allocations for `seed`.
    pub fn realize(&self, seed: u64) -> Result<DropRealization> {
        let c = &self.config;
        let users = drop_users(&self.layout1, c.geometry.users_per_beam, &c.link_budget, seed)?;
        let channel = build_channel(
            &self.layout1,
            &self.layout2,
            &users,
            &c.link_budget,
            c.geometry.phase_model,
            seed,
        )?;
        let sub = build_channel(
            &self.layout1,
            &self.sub_beams,
            &users,
            &c.link_budget,
            c.geometry.phase_model,
            seed,
        )?;
        let allocation = siua_allocate(
            &channel.h1,
            &channel.h2,
            &c.scheduler.siua(),
            self.layout1.beams_count(),
            self.layout2.beams_count(),
        )?;
        Ok(DropRealization {
            conventional: conventional_service(&users, &self.layout1, &self.layout2),
            cognitive: cognitive_service(&users, &self.layout1, &self.sub_beams),
            users,
            channel,
            sub_channel: sub.h2,
            allocation,
        })
    }

    pub fn cognitive_setup<'a>(&'a self, drop: &'a DropRealization) -> CognitiveSetup<'a> {
        CognitiveSetup {
            primary: &drop.channel.h1,
            secondary: &drop.sub_channel,
            noise_power_w: drop.channel.noise_power_w,
            service: &drop.cognitive,
            primary_pattern: &self.primary_hops,
            secondary_pattern: &self.secondary_hops,
        }
    }

    pub fn evaluate(
        &self,
        arch: Architecture,
        drop: &DropRealization,
        total_power_w: f64,
    ) -> Result<ArchitectureResult> {
        match arch {
            Architecture::Conventional => eval_conventional(
                &drop.channel,
                &drop.conventional,
                [&self.colors1, &self.colors2],
                total_power_w,
            ),
            Architecture::Coordinated => eval_coordinated(
                &drop.channel,
                &drop.allocation,
                total_power_w,
                self.config.scheduler.power_allocation,
            ),
            Architecture::Cooperative => eval_cooperative(&drop.channel, total_power_w),
            Architecture::Cognitive => eval_cognitive(&self.cognitive_setup(drop), total_power_w, None),
            Architecture::CognitivePc => eval_cognitive(
                &self.cognitive_setup(drop),
                total_power_w,
                Some(self.config.cognitive.i_over_n_cap_db),
            ),
        }
    }
}
