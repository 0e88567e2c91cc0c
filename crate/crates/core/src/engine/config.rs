use serde::{Deserialize, Serialize};

use crate::channel::ChannelParams;
use crate::error::{Error, Result};
use crate::geometry::{PlacementSpec, Position, Terrain};
use crate::mobility::{MobilityParams, SpeedModel, VehicleBody, MAX_SPEED, MIN_SPEED};
use crate::rml::{BlockageThreshold, PolicyParams, SelectionMode, SIXTEEN_FEET_M};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Rml,
    Baseline,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Rml => "rml",
            Mode::Baseline => "baseline",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rml" => Ok(Mode::Rml),
            "baseline" => Ok(Mode::Baseline),
            other => Err(Error::Config(format!(
                "unknown mode `{other}` (expected rml or baseline)"
            ))),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioSection {
    pub seed: u64,
    pub mode: Mode,
    pub selection: SelectionMode,
    pub n_vehicles: usize,
    pub n_blockages: usize,
    pub sim_time_s: f64,
    pub dt_s: f64,
    pub interpacket_ms: f64,
    /// Leading share of the run during which the relay policy explores.
    pub warmup_fraction: f64,
    pub map_refresh_s: f64,
    pub flow_m_constant: u32,
}

impl Default for ScenarioSection {
    fn default() -> Self {
        Self {
            seed: 1,
            mode: Mode::Rml,
            selection: SelectionMode::Learned,
            n_vehicles: 20,
            n_blockages: 10,
            sim_time_s: 50.0,
            dt_s: 0.1,
            interpacket_ms: 200.0,
            warmup_fraction: 0.2,
            map_refresh_s: 1.0,
            flow_m_constant: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BsPlacement {
    /// Terrain center.
    Center,
    /// Position tied to the blockage count: (55,55), (115,115), (175,175),
    /// (235,235), (295,295) for 2, 4, 6, 8, 10 blockages; center otherwise.
    Table,
    /// `bs_x`, `bs_y`.
    Explicit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TerrainSection {
    pub width: f64,
    pub depth: f64,
    pub bs_placement: BsPlacement,
    pub bs_x: f64,
    pub bs_y: f64,
    pub bs_height: f64,
    pub bs_coverage_radius: f64,
}

impl Default for TerrainSection {
    fn default() -> Self {
        Self {
            width: 300.0,
            depth: 300.0,
            bs_placement: BsPlacement::Center,
            bs_x: 150.0,
            bs_y: 150.0,
            bs_height: 25.0,
            bs_coverage_radius: 300.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BlockageSection {
    pub half_width_x: f64,
    pub half_width_y: f64,
    pub height: f64,
    pub gap_m: f64,
    pub threshold_m: f64,
    pub max_attempts: usize,
}

impl Default for BlockageSection {
    fn default() -> Self {
        let p = PlacementSpec::default();
        Self {
            half_width_x: p.half_width_x,
            half_width_y: p.half_width_y,
            height: p.height,
            gap_m: p.gap,
            threshold_m: SIXTEEN_FEET_M,
            max_attempts: p.max_attempts,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpeedKind {
    Constant,
    Uniform,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MobilitySection {
    pub speed_model: SpeedKind,
    pub speed: f64,
    pub speed_min: f64,
    pub speed_max: f64,
    pub pause_s: f64,
    pub large_vehicle_fraction: f64,
    pub car_antenna_height: f64,
    pub car_body_height: f64,
    pub car_length: f64,
    pub car_width: f64,
    pub large_antenna_height: f64,
    pub large_body_height: f64,
    pub large_length: f64,
    pub large_width: f64,
    pub max_attempts: usize,
}

impl Default for MobilitySection {
    fn default() -> Self {
        let p = MobilityParams::default();
        Self {
            speed_model: SpeedKind::Constant,
            speed: MAX_SPEED,
            speed_min: MIN_SPEED,
            speed_max: MAX_SPEED,
            pause_s: p.pause_s,
            large_vehicle_fraction: p.large_vehicle_fraction,
            car_antenna_height: p.car.antenna_height,
            car_body_height: p.car.body_height,
            car_length: p.car.length,
            car_width: p.car.width,
            large_antenna_height: p.large.antenna_height,
            large_body_height: p.large.body_height,
            large_length: p.large.length,
            large_width: p.large.width,
            max_attempts: p.max_attempts,
        }
    }
}

/// Fully resolved scenario. Every field has a default; a config file only
/// needs to name what it changes.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: ScenarioSection,
    pub terrain: TerrainSection,
    pub blockages: BlockageSection,
    pub mobility: MobilitySection,
    pub channel: ChannelParams,
    pub policy: PolicyParams,
}

const TABLE_BS_POSITIONS: [(usize, (f64, f64)); 5] = [
    (2, (55.0, 55.0)),
    (4, (115.0, 115.0)),
    (6, (175.0, 175.0)),
    (8, (235.0, 235.0)),
    (10, (295.0, 295.0)),
];

impl ScenarioConfig {
    pub fn bs_position(&self) -> Position {
        let t = &self.terrain;
        let center = Position::new(t.width / 2.0, t.depth / 2.0);
        match t.bs_placement {
            BsPlacement::Center => center,
            BsPlacement::Explicit => Position::new(t.bs_x, t.bs_y),
            BsPlacement::Table => TABLE_BS_POSITIONS
                .iter()
                .find(|(n, _)| *n == self.scenario.n_blockages)
                .map_or(center, |&(_, (x, y))| Position::new(x, y)),
        }
    }

    pub fn terrain(&self) -> Terrain {
        Terrain {
            width: self.terrain.width,
            depth: self.terrain.depth,
            bs_position: self.bs_position(),
            bs_height: self.terrain.bs_height,
            bs_coverage_radius: self.terrain.bs_coverage_radius,
        }
    }

    pub fn placement(&self) -> PlacementSpec {
        PlacementSpec {
            count: self.scenario.n_blockages,
            half_width_x: self.blockages.half_width_x,
            half_width_y: self.blockages.half_width_y,
            height: self.blockages.height,
            gap: self.blockages.gap_m,
            max_attempts: self.blockages.max_attempts,
        }
    }

    pub fn threshold(&self) -> BlockageThreshold {
        BlockageThreshold {
            epsilon_height: self.blockages.threshold_m,
        }
    }

    pub fn mobility_params(&self) -> MobilityParams {
        let m = &self.mobility;
        MobilityParams {
            speed: match m.speed_model {
                SpeedKind::Constant => SpeedModel::Constant { speed: m.speed },
                SpeedKind::Uniform => SpeedModel::Uniform {
                    min: m.speed_min,
                    max: m.speed_max,
                },
            },
            pause_s: m.pause_s,
            large_vehicle_fraction: m.large_vehicle_fraction,
            car: VehicleBody {
                antenna_height: m.car_antenna_height,
                body_height: m.car_body_height,
                length: m.car_length,
                width: m.car_width,
            },
            large: VehicleBody {
                antenna_height: m.large_antenna_height,
                body_height: m.large_body_height,
                length: m.large_length,
                width: m.large_width,
            },
            max_attempts: m.max_attempts,
        }
    }

    /// Number of broadcasts in the run.
    pub fn message_count(&self) -> u64 {
        let ratio = self.scenario.sim_time_s * 1e3 / self.scenario.interpacket_ms;
        (ratio + 1e-9).floor() as u64
    }

    pub fn step_count(&self) -> u64 {
        (self.scenario.sim_time_s / self.scenario.dt_s - 1e-9).ceil() as u64
    }

    pub fn validate(&self) -> Result<()> {
        let s = &self.scenario;
        let fail = |m: String| Err(Error::Validation(m));
        if !(s.sim_time_s > 0.0 && s.sim_time_s.is_finite()) {
            return fail(format!("scenario.sim_time_s must be > 0, got {}", s.sim_time_s));
        }
        if !(s.dt_s > 0.0 && s.dt_s.is_finite()) {
            return fail(format!("scenario.dt_s must be > 0, got {}", s.dt_s));
        }
        if !(s.interpacket_ms > 0.0 && s.interpacket_ms.is_finite()) {
            return fail(format!("scenario.interpacket_ms must be > 0, got {}", s.interpacket_ms));
        }
        if !(0.0..=1.0).contains(&s.warmup_fraction) {
            return fail(format!(
                "scenario.warmup_fraction must lie in [0, 1], got {}",
                s.warmup_fraction
            ));
        }
        if !(s.map_refresh_s > 0.0) {
            return fail(format!("scenario.map_refresh_s must be > 0, got {}", s.map_refresh_s));
        }
        if !(self.blockages.threshold_m > 0.0) {
            return fail("blockages.threshold_m must be > 0".into());
        }
        if !(self.blockages.height > self.blockages.threshold_m) {
            return fail(format!(
                "blockages.height {} must exceed the permanent threshold {}",
                self.blockages.height, self.blockages.threshold_m
            ));
        }
        if !(self.blockages.gap_m >= 0.0) {
            return fail("blockages.gap_m must be >= 0".into());
        }
        let t = self.terrain();
        t.validate()?;
        if t.bs_height <= self.mobility.car_antenna_height.max(self.mobility.large_antenna_height) {
            return fail("terrain.bs_height must exceed vehicle antenna heights".into());
        }
        self.mobility_params().validate(self.blockages.threshold_m)?;
        self.channel.validate()?;
        self.policy.validate()?;
        Ok(())
    }
}
