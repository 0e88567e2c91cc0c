//! Terrain, obstacle footprints and line-of-sight geometry.
//!
//! Obstacles are axis-aligned rectangles extruded from the ground to their
//! height. A radio link is blocked when the straight 3-D segment between the
//! two antenna points passes through at least one obstacle volume.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mobility::VehicleId;

/// Ground-plane position in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn distance(&self, other: &Position) -> f64 {
        distance(*self, *other)
    }

    /// Bearing from `self` towards `other`, in `[0, 2π)`, measured
    /// counter-clockwise from the +x axis.
    pub fn bearing_to(&self, other: &Position) -> f64 {
        let theta = (other.y - self.y).atan2(other.x - self.x);
        if theta < 0.0 {
            theta + std::f64::consts::TAU
        } else {
            theta
        }
    }
}

pub fn distance(p: Position, q: Position) -> f64 {
    (p.x - q.x).hypot(p.y - q.y)
}

/// Rectangular simulation area with a single base station.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Terrain {
    pub width: f64,
    pub depth: f64,
    pub bs_position: Position,
    pub bs_height: f64,
    pub bs_coverage_radius: f64,
}

impl Terrain {
    pub fn new(width: f64, depth: f64, bs_position: Position, bs_height: f64, bs_coverage_radius: f64) -> Result<Self> {
        let terrain = Self {
            width,
            depth,
            bs_position,
            bs_height,
            bs_coverage_radius,
        };
        terrain.validate()?;
        Ok(terrain)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width > 0.0 && self.depth > 0.0) || !self.width.is_finite() || !self.depth.is_finite() {
            return Err(Error::Validation(format!(
                "terrain dimensions must be positive, got {}x{}",
                self.width, self.depth
            )));
        }
        if !self.contains(self.bs_position) {
            return Err(Error::Validation(format!(
                "base station ({}, {}) lies outside the terrain",
                self.bs_position.x, self.bs_position.y
            )));
        }
        if !(self.bs_height > 0.0) {
            return Err(Error::Validation("base station height must be positive".into()));
        }
        if !(self.bs_coverage_radius > 0.0) {
            return Err(Error::Validation("coverage radius must be positive".into()));
        }
        Ok(())
    }

    pub fn contains(&self, p: Position) -> bool {
        p.is_finite() && p.x >= 0.0 && p.x <= self.width && p.y >= 0.0 && p.y <= self.depth
    }

    pub fn in_coverage(&self, p: Position) -> bool {
        self.bs_position.distance(&p) <= self.bs_coverage_radius
    }

    pub fn bs_antenna(&self) -> Antenna {
        Antenna::new(self.bs_position, self.bs_height)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BlockageId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BlockageClass {
    Permanent,
    Temporary,
    Unknown,
}

/// Axis-aligned obstacle footprint extruded to `height`.
///
/// Temporary blockages are carried by a large vehicle (`owner`) and are
/// rebuilt from its position every step; permanent ones never move.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Blockage {
    pub id: BlockageId,
    pub center: Position,
    pub half_width_x: f64,
    pub half_width_y: f64,
    pub height: f64,
    pub class: BlockageClass,
    pub owner: Option<VehicleId>,
}

impl Blockage {
    pub fn building(id: u32, center: Position, half_width_x: f64, half_width_y: f64, height: f64) -> Self {
        Self {
            id: BlockageId(id),
            center,
            half_width_x,
            half_width_y,
            height,
            class: BlockageClass::Permanent,
            owner: None,
        }
    }

    pub fn min_corner(&self) -> Position {
        Position::new(self.center.x - self.half_width_x, self.center.y - self.half_width_y)
    }

    pub fn max_corner(&self) -> Position {
        Position::new(self.center.x + self.half_width_x, self.center.y + self.half_width_y)
    }

    /// Closed point-in-footprint test.
    pub fn contains(&self, p: Position) -> bool {
        (p.x - self.center.x).abs() <= self.half_width_x && (p.y - self.center.y).abs() <= self.half_width_y
    }

    /// Footprints overlap once each is grown by `gap / 2`.
    pub fn overlaps(&self, other: &Blockage, gap: f64) -> bool {
        (self.center.x - other.center.x).abs() < self.half_width_x + other.half_width_x + gap
            && (self.center.y - other.center.y).abs() < self.half_width_y + other.half_width_y + gap
    }

    /// Whether the ground-plane segment `a -> b` touches the footprint.
    pub fn footprint_hits_segment(&self, a: Position, b: Position) -> bool {
        let lo = self.min_corner();
        let hi = self.max_corner();
        clip_segment(&[a.x, a.y], &[b.x, b.y], &[lo.x, lo.y], &[hi.x, hi.y]).is_some()
    }

    /// Parametric overlap `(t_in, t_out)` of the 3-D segment with the volume.
    fn volume_overlap(&self, a: Antenna, b: Antenna) -> Option<(f64, f64)> {
        let lo = self.min_corner();
        let hi = self.max_corner();
        clip_segment_with(
            &[a.position.x, a.position.y, a.height],
            &[b.position.x, b.position.y, b.height],
            &[lo.x, lo.y, 0.0],
            &[hi.x, hi.y, self.height],
            true,
        )
    }
}

/// Liang-Barsky clip of segment `a -> b` against the box `[lo, hi]`.
fn clip_segment<const N: usize>(a: &[f64; N], b: &[f64; N], lo: &[f64; N], hi: &[f64; N]) -> Option<(f64, f64)> {
    clip_segment_with(a, b, lo, hi, false)
}

/// `open` treats the box as open: a segment lying in a face plane misses.
fn clip_segment_with<const N: usize>(
    a: &[f64; N],
    b: &[f64; N],
    lo: &[f64; N],
    hi: &[f64; N],
    open: bool,
) -> Option<(f64, f64)> {
    let mut t0 = 0.0_f64;
    let mut t1 = 1.0_f64;
    for axis in 0..N {
        let d = b[axis] - a[axis];
        if d == 0.0 {
            let outside = if open {
                a[axis] <= lo[axis] || a[axis] >= hi[axis]
            } else {
                a[axis] < lo[axis] || a[axis] > hi[axis]
            };
            if outside {
                return None;
            }
            continue;
        }
        let mut ta = (lo[axis] - a[axis]) / d;
        let mut tb = (hi[axis] - a[axis]) / d;
        if ta > tb {
            std::mem::swap(&mut ta, &mut tb);
        }
        t0 = t0.max(ta);
        t1 = t1.min(tb);
        if t0 > t1 {
            return None;
        }
    }
    Some((t0, t1))
}

/// Antenna point: ground position plus height above ground.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Antenna {
    pub position: Position,
    pub height: f64,
}

impl Antenna {
    pub const fn new(position: Position, height: f64) -> Self {
        Self { position, height }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Visibility {
    Los,
    Nlos(BlockageId),
}

impl Visibility {
    pub fn is_los(&self) -> bool {
        matches!(self, Visibility::Los)
    }
}

/// Minimum parametric overlap that counts as passing through a volume, so
/// that grazing a face or an edge does not block the link.
const MIN_OVERLAP: f64 = 1e-12;

/// 3-D segment versus extruded-rectangle test. Returns the lowest-id
/// obstacle the segment passes through.
pub fn los_test(blockages: &[Blockage], a: Antenna, b: Antenna) -> Visibility {
    los_test_filtered(blockages, a, b, |_| false)
}

/// Like [`los_test`] but ignores every blockage for which `skip` is true,
/// e.g. the footprint of the vehicle that carries one of the antennas.
pub fn los_test_filtered(
    blockages: &[Blockage],
    a: Antenna,
    b: Antenna,
    skip: impl Fn(&Blockage) -> bool,
) -> Visibility {
    let mut hit: Option<BlockageId> = None;
    for blk in blockages {
        if skip(blk) || hit.is_some_and(|id| id <= blk.id) {
            continue;
        }
        if let Some((t0, t1)) = blk.volume_overlap(a, b) {
            if t1 - t0 > MIN_OVERLAP {
                hit = Some(blk.id);
            }
        }
    }
    hit.map_or(Visibility::Los, Visibility::Nlos)
}

/// Whether `a -> b` is clear, stopping at the first blocker not skipped.
pub fn is_clear_filtered(blockages: &[Blockage], a: Antenna, b: Antenna, skip: impl Fn(&Blockage) -> bool) -> bool {
    let (pa, pb) = (a.position, b.position);
    let (x0, x1) = if pa.x < pb.x { (pa.x, pb.x) } else { (pb.x, pa.x) };
    let (y0, y1) = if pa.y < pb.y { (pa.y, pb.y) } else { (pb.y, pa.y) };
    !blockages.iter().any(|blk| {
        // Cheap reject on the ground-plane bounding boxes before the clip.
        let disjoint = (x1 <= blk.center.x - blk.half_width_x)
            | (x0 >= blk.center.x + blk.half_width_x)
            | (y1 <= blk.center.y - blk.half_width_y)
            | (y0 >= blk.center.y + blk.half_width_y);
        !disjoint && !skip(blk) && blk.volume_overlap(a, b).is_some_and(|(t0, t1)| t1 - t0 > MIN_OVERLAP)
    })
}

/// Similar-triangles description of one blocker on the BS -> receiver ray.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockageGeometry {
    /// Ground distance from the BS foot to the blocker center on the ray.
    pub omega_m: f64,
    /// Blocker depth along the ray.
    pub w_v: f64,
    pub h_bs: f64,
    /// Blocker height.
    pub h_l: f64,
    /// Receiver antenna height.
    pub h_s: f64,
}

impl BlockageGeometry {
    /// Geometry of `blockage` on the ground ray from the base station
    /// through `receiver`. `None` when the ray misses the footprint.
    pub fn along_ray(terrain: &Terrain, blockage: &Blockage, receiver: Position, h_s: f64) -> Option<Self> {
        let bs = terrain.bs_position;
        let len = bs.distance(&receiver);
        if len == 0.0 {
            return None;
        }
        // Extend the ray far enough to cross the whole footprint.
        let reach = len + 2.0 * (terrain.width + terrain.depth);
        let dir = ((receiver.x - bs.x) / len, (receiver.y - bs.y) / len);
        let far = Position::new(bs.x + dir.0 * reach, bs.y + dir.1 * reach);
        let lo = blockage.min_corner();
        let hi = blockage.max_corner();
        let (t0, t1) = clip_segment(&[bs.x, bs.y], &[far.x, far.y], &[lo.x, lo.y], &[hi.x, hi.y])?;
        Some(Self {
            omega_m: 0.5 * (t0 + t1) * reach,
            w_v: (t1 - t0) * reach,
            h_bs: terrain.bs_height,
            h_l: blockage.height,
            h_s,
        })
    }

    /// Ground distance of the blocker face farthest from the BS.
    pub fn far_face(&self) -> f64 {
        self.omega_m + self.w_v / 2.0
    }

    /// Whether a receiver at ground distance `d` (beyond the far face) sits
    /// inside the blocker's shadow: the ray from the BS antenna clears the
    /// far top edge only once `d` reaches the critical blocking distance.
    pub fn shadows(&self, d: f64) -> Result<bool> {
        let critical = critical_blocking_distance(self)?;
        Ok(d > self.far_face() && d < critical)
    }
}

/// Critical blocking distance `(Ω + w_v/2) / ((H_BS - H_L) / (H_BS - H_S))`.
///
/// This is the far end of the shadow cast by the blocker: a receiver at
/// height `h_s` on the same ray, past the blocker but nearer than this
/// distance, is blocked. Blockers at least as tall as the BS shadow
/// everything behind them, reported as `f64::INFINITY`.
pub fn critical_blocking_distance(g: &BlockageGeometry) -> Result<f64> {
    let finite = [g.omega_m, g.w_v, g.h_bs, g.h_l, g.h_s].iter().all(|v| v.is_finite());
    if !finite || g.omega_m < 0.0 || g.w_v < 0.0 || g.h_l <= 0.0 || g.h_s <= 0.0 {
        return Err(Error::InvalidGeometry(format!("{g:?}")));
    }
    if g.h_bs <= g.h_s {
        return Err(Error::InvalidGeometry(format!(
            "BS height {} must exceed receiver height {}",
            g.h_bs, g.h_s
        )));
    }
    if g.h_l >= g.h_bs {
        return Ok(f64::INFINITY);
    }
    let ratio = (g.h_bs - g.h_l) / (g.h_bs - g.h_s);
    Ok(g.far_face() / ratio)
}

/// Rule for generating permanent blockages.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlacementSpec {
    pub count: usize,
    pub half_width_x: f64,
    pub half_width_y: f64,
    pub height: f64,
    /// Minimum free street width between two footprints.
    pub gap: f64,
    pub max_attempts: usize,
}

impl Default for PlacementSpec {
    fn default() -> Self {
        Self {
            count: 10,
            half_width_x: 25.0,
            half_width_y: 25.0,
            height: 10.0,
            gap: 10.0,
            max_attempts: 10_000,
        }
    }
}

/// Rejection-sample `spec.count` non-overlapping buildings fully inside the
/// terrain, none covering the base station.
pub fn place_blockages<R: Rng + ?Sized>(terrain: &Terrain, spec: &PlacementSpec, rng: &mut R) -> Result<Vec<Blockage>> {
    if !(spec.half_width_x > 0.0 && spec.half_width_y > 0.0 && spec.height > 0.0) {
        return Err(Error::Validation(
            "blockage half-widths and height must be positive".into(),
        ));
    }
    let (hx, hy) = (spec.half_width_x, spec.half_width_y);
    if spec.count > 0 && (2.0 * hx > terrain.width || 2.0 * hy > terrain.depth) {
        return Err(Error::PlacementFailed("footprint larger than the terrain".into()));
    }

    let mut placed: Vec<Blockage> = Vec::with_capacity(spec.count);
    for id in 0..spec.count {
        let mut accepted = None;
        for _ in 0..spec.max_attempts {
            let center = Position::new(
                rng.random_range(hx..=terrain.width - hx),
                rng.random_range(hy..=terrain.depth - hy),
            );
            let candidate = Blockage::building(id as u32, center, hx, hy, spec.height);
            if candidate.contains(terrain.bs_position) {
                continue;
            }
            if placed.iter().any(|b| b.overlaps(&candidate, spec.gap)) {
                continue;
            }
            accepted = Some(candidate);
            break;
        }
        match accepted {
            Some(b) => placed.push(b),
            None => {
                return Err(Error::PlacementFailed(format!(
                    "could not place blockage {} of {} after {} attempts",
                    id + 1,
                    spec.count,
                    spec.max_attempts
                )))
            }
        }
    }
    Ok(placed)
}
