//! Random waypoint motion for vehicles and the constant position model for
//! the base station.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Antenna, Blockage, BlockageClass, BlockageId, Position, Terrain};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VehicleId(pub u32);

/// Offset separating vehicle-carried blockage ids from building ids.
pub const TEMPORARY_BLOCKAGE_ID_BASE: u32 = 1 << 20;

pub const MIN_SPEED: f64 = 0.1;
pub const MAX_SPEED: f64 = 15.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VehicleKind {
    Car,
    LargeVehicle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vehicle {
    pub id: VehicleId,
    pub position: Position,
    pub antenna_height: f64,
    pub body_height: f64,
    pub speed: f64,
    pub waypoint: Position,
    pub pause_remaining: f64,
    pub kind: VehicleKind,
    /// Footprint half extents along and across the direction of travel.
    pub half_length: f64,
    pub half_width: f64,
}

impl Vehicle {
    /// A vehicle standing still at `position` with the given body.
    pub fn at_rest(id: VehicleId, position: Position, kind: VehicleKind, body: &VehicleBody) -> Self {
        Self {
            id,
            position,
            antenna_height: body.antenna_height,
            body_height: body.body_height,
            speed: MIN_SPEED,
            waypoint: position,
            pause_remaining: 0.0,
            kind,
            half_length: body.length / 2.0,
            half_width: body.width / 2.0,
        }
    }

    /// A standing car with the default car body.
    pub fn car(id: VehicleId, position: Position) -> Self {
        Self::at_rest(id, position, VehicleKind::Car, &MobilityParams::default().car)
    }

    pub fn antenna(&self) -> Antenna {
        Antenna::new(self.position, self.antenna_height)
    }

    pub fn is_large(&self) -> bool {
        self.kind == VehicleKind::LargeVehicle
    }

    /// The temporary blockage a large vehicle casts, aligned with its
    /// dominant direction of travel.
    pub fn footprint(&self) -> Option<Blockage> {
        if !self.is_large() {
            return None;
        }
        let dx = (self.waypoint.x - self.position.x).abs();
        let dy = (self.waypoint.y - self.position.y).abs();
        let (hx, hy) = if dx >= dy {
            (self.half_length, self.half_width)
        } else {
            (self.half_width, self.half_length)
        };
        Some(Blockage {
            id: BlockageId(TEMPORARY_BLOCKAGE_ID_BASE + self.id.0),
            center: self.position,
            half_width_x: hx,
            half_width_y: hy,
            height: self.body_height,
            class: BlockageClass::Temporary,
            owner: Some(self.id),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpeedModel {
    Constant { speed: f64 },
    Uniform { min: f64, max: f64 },
}

impl SpeedModel {
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            SpeedModel::Constant { speed } => speed,
            SpeedModel::Uniform { min, max } => rng.random_range(min..=max),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VehicleBody {
    pub antenna_height: f64,
    pub body_height: f64,
    pub length: f64,
    pub width: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MobilityParams {
    pub speed: SpeedModel,
    pub pause_s: f64,
    pub large_vehicle_fraction: f64,
    pub car: VehicleBody,
    pub large: VehicleBody,
    pub max_attempts: usize,
}

impl Default for MobilityParams {
    fn default() -> Self {
        Self {
            speed: SpeedModel::Constant { speed: MAX_SPEED },
            pause_s: 5.0,
            large_vehicle_fraction: 0.2,
            car: VehicleBody {
                antenna_height: 1.5,
                body_height: 1.5,
                length: 4.5,
                width: 1.8,
            },
            large: VehicleBody {
                antenna_height: 4.0,
                body_height: 4.0,
                length: 12.0,
                width: 2.6,
            },
            max_attempts: 10_000,
        }
    }
}

impl MobilityParams {
    pub fn validate(&self, permanent_threshold: f64) -> Result<()> {
        let speed_ok = |s: f64| (MIN_SPEED..=MAX_SPEED).contains(&s);
        match self.speed {
            SpeedModel::Constant { speed } if !speed_ok(speed) => {
                return Err(Error::Validation(format!(
                    "vehicle speed {speed} outside [{MIN_SPEED}, {MAX_SPEED}]"
                )))
            }
            SpeedModel::Uniform { min, max } if !(speed_ok(min) && speed_ok(max) && min <= max) => {
                return Err(Error::Validation(format!(
                    "speed range [{min}, {max}] not within [{MIN_SPEED}, {MAX_SPEED}]"
                )))
            }
            _ => {}
        }
        if !(self.pause_s >= 0.0) {
            return Err(Error::Validation("pause time must be non-negative".into()));
        }
        if !(0.0..=1.0).contains(&self.large_vehicle_fraction) {
            return Err(Error::Validation("large_vehicle_fraction must lie in [0, 1]".into()));
        }
        if !(self.car.body_height < self.large.body_height && self.large.body_height < permanent_threshold) {
            return Err(Error::Validation(format!(
                "need car body height {} < large vehicle body height {} < permanent threshold {}",
                self.car.body_height, self.large.body_height, permanent_threshold
            )));
        }
        for body in [self.car, self.large] {
            if !(body.antenna_height > 0.0 && body.length > 0.0 && body.width > 0.0) {
                return Err(Error::Validation("vehicle dimensions must be positive".into()));
            }
        }
        Ok(())
    }
}

fn is_free(terrain: &Terrain, blockages: &[Blockage], p: Position) -> bool {
    terrain.contains(p)
        && !blockages
            .iter()
            .any(|b| b.class == BlockageClass::Permanent && b.contains(p))
}

fn free_position<R: Rng + ?Sized>(
    terrain: &Terrain,
    blockages: &[Blockage],
    attempts: usize,
    rng: &mut R,
) -> Option<Position> {
    (0..attempts).find_map(|_| {
        let p = Position::new(
            rng.random_range(0.0..=terrain.width),
            rng.random_range(0.0..=terrain.depth),
        );
        is_free(terrain, blockages, p).then_some(p)
    })
}

/// Place `n` vehicles uniformly in the free space with fresh waypoints.
/// The first `round(n * large_vehicle_fraction)` ids are large vehicles.
pub fn rwp_init<R: Rng + ?Sized>(
    terrain: &Terrain,
    blockages: &[Blockage],
    n: usize,
    params: &MobilityParams,
    rng: &mut R,
) -> Result<Vec<Vehicle>> {
    let n_large = (n as f64 * params.large_vehicle_fraction).round() as usize;
    let fail = || {
        Error::PlacementFailed(format!(
            "no free space for a vehicle after {} attempts",
            params.max_attempts
        ))
    };
    (0..n)
        .map(|i| {
            let kind = if i < n_large {
                VehicleKind::LargeVehicle
            } else {
                VehicleKind::Car
            };
            let body = match kind {
                VehicleKind::Car => params.car,
                VehicleKind::LargeVehicle => params.large,
            };
            let position = free_position(terrain, blockages, params.max_attempts, rng).ok_or_else(fail)?;
            let waypoint = free_position(terrain, blockages, params.max_attempts, rng).ok_or_else(fail)?;
            Ok(Vehicle {
                id: VehicleId(i as u32),
                position,
                antenna_height: body.antenna_height,
                body_height: body.body_height,
                speed: params.speed.draw(rng),
                waypoint,
                pause_remaining: 0.0,
                kind,
                half_length: body.length / 2.0,
                half_width: body.width / 2.0,
            })
        })
        .collect()
}

/// Advance one vehicle by `dt` seconds.
///
/// A vehicle heading for its waypoint covers `speed * dt`; on arrival it
/// parks for `pause_s` and then draws a new waypoint. A move that would leave
/// the terrain or touch a building is discarded and a new waypoint drawn.
pub fn rwp_step<R: Rng + ?Sized>(
    v: &Vehicle,
    terrain: &Terrain,
    blockages: &[Blockage],
    dt: f64,
    params: &MobilityParams,
    rng: &mut R,
) -> Vehicle {
    debug_assert!(dt > 0.0);
    let mut next = v.clone();

    if next.pause_remaining > 0.0 {
        next.pause_remaining -= dt;
        if next.pause_remaining <= 1e-9 {
            next.pause_remaining = 0.0;
            next.waypoint = redraw_waypoint(&next, terrain, blockages, params, rng);
        }
        return next;
    }

    let remaining = v.position.distance(&v.waypoint);
    let travel = v.speed * dt;
    let arrived = remaining <= travel;
    let target = if arrived {
        v.waypoint
    } else {
        let f = travel / remaining;
        Position::new(
            v.position.x + (v.waypoint.x - v.position.x) * f,
            v.position.y + (v.waypoint.y - v.position.y) * f,
        )
    };

    let collides = !terrain.contains(target)
        || blockages
            .iter()
            .filter(|b| b.class == BlockageClass::Permanent)
            .any(|b| b.footprint_hits_segment(v.position, target));

    if collides {
        next.waypoint = redraw_waypoint(&next, terrain, blockages, params, rng);
    } else {
        next.position = target;
        if arrived {
            next.pause_remaining = params.pause_s;
            if params.pause_s <= 0.0 {
                next.waypoint = redraw_waypoint(&next, terrain, blockages, params, rng);
            }
        }
    }
    next
}

fn redraw_waypoint<R: Rng + ?Sized>(
    v: &Vehicle,
    terrain: &Terrain,
    blockages: &[Blockage],
    params: &MobilityParams,
    rng: &mut R,
) -> Position {
    free_position(terrain, blockages, params.max_attempts, rng).unwrap_or(v.position)
}

/// Constant position model: the entity never moves.
pub fn constant_position_step<E: Clone>(entity: &E, _dt: f64) -> E {
    entity.clone()
}
