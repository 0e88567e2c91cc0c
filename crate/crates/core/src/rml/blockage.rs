//! Blockage identification: height classification and radar-style
//! localization into the base station's persistent blockage map.

use serde::{Deserialize, Serialize};

use crate::channel::SPEED_OF_LIGHT;
use crate::geometry::{Blockage, BlockageClass, BlockageId, Position};

/// 16 ft, the tallest road vehicle considered.
pub const SIXTEEN_FEET_M: f64 = 4.8768;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockageThreshold {
    pub epsilon_height: f64,
}

impl Default for BlockageThreshold {
    fn default() -> Self {
        Self {
            epsilon_height: SIXTEEN_FEET_M,
        }
    }
}

/// Reflections above the threshold come from buildings; anything at or
/// below it is a large vehicle.
pub fn classify_blockage(reflected_height: f64, thr: BlockageThreshold) -> BlockageClass {
    if reflected_height > thr.epsilon_height {
        BlockageClass::Permanent
    } else {
        BlockageClass::Temporary
    }
}

/// Echo range `c * t / 2` projected along bearing `theta` from the BS.
pub fn estimate_blockage_location(bs: Position, round_trip_s: f64, theta: f64) -> Position {
    let range = SPEED_OF_LIGHT * round_trip_s / 2.0;
    Position::new(bs.x + range * theta.cos(), bs.y + range * theta.sin())
}

/// Round trip of a probe fired from `bs` along `theta` that reflects off the
/// nearest face of `blockage`. `None` if the probe misses.
pub fn probe_round_trip(bs: Position, theta: f64, blockage: &Blockage) -> Option<f64> {
    let (dx, dy) = (theta.cos(), theta.sin());
    let lo = blockage.min_corner();
    let hi = blockage.max_corner();
    let mut t0 = 0.0_f64;
    let mut t1 = f64::INFINITY;
    for (o, d, l, h) in [(bs.x, dx, lo.x, hi.x), (bs.y, dy, lo.y, hi.y)] {
        if d.abs() < 1e-15 {
            if o < l || o > h {
                return None;
            }
            continue;
        }
        let (mut a, mut b) = ((l - o) / d, (h - o) / d);
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        t0 = t0.max(a);
        t1 = t1.min(b);
        if t0 > t1 {
            return None;
        }
    }
    Some(2.0 * t0 / SPEED_OF_LIGHT)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MappedBlockage {
    pub id: BlockageId,
    /// Estimated position of the reflecting face.
    pub position: Position,
    pub theta: f64,
    pub range: f64,
    pub class: BlockageClass,
}

/// What the base station has learned about the obstacles in its cell.
/// Only permanent blockages are retained between surveys.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BlockageMap {
    pub entries: Vec<MappedBlockage>,
    pub last_survey_s: Option<f64>,
    /// Temporary reflections seen in the latest survey.
    pub temporary_seen: usize,
}

impl BlockageMap {
    /// Probe every obstacle, classify by reflected height and keep the
    /// permanent ones.
    pub fn survey(&mut self, bs: Position, blockages: &[Blockage], thr: BlockageThreshold, now_s: f64) {
        self.entries.clear();
        self.temporary_seen = 0;
        for blk in blockages {
            let theta = bs.bearing_to(&blk.center);
            let Some(round_trip) = probe_round_trip(bs, theta, blk) else {
                continue;
            };
            match classify_blockage(blk.height, thr) {
                BlockageClass::Permanent => {
                    let position = estimate_blockage_location(bs, round_trip, theta);
                    self.entries.push(MappedBlockage {
                        id: blk.id,
                        position,
                        theta,
                        range: bs.distance(&position),
                        class: BlockageClass::Permanent,
                    });
                }
                _ => self.temporary_seen += 1,
            }
        }
        self.last_survey_s = Some(now_s);
    }

    pub fn is_due(&self, now_s: f64, interval_s: f64) -> bool {
        match self.last_survey_s {
            None => true,
            Some(last) => now_s - last >= interval_s - 1e-9,
        }
    }

    pub fn permanent(&self) -> impl Iterator<Item = &MappedBlockage> {
        self.entries.iter().filter(|e| e.class == BlockageClass::Permanent)
    }
}
