//! Fixtures and independent oracles shared by the integration suites.
#![allow(dead_code)]

use rand::Rng;
use rml_v2x::channel::{link_latency, ChannelParams, HopOutcome};
use rml_v2x::geometry::{los_test, Antenna, Blockage, Position, Terrain};
use rml_v2x::mobility::{MobilityParams, Vehicle, VehicleId, VehicleKind};
use rml_v2x::rml::{delivery_reward, BlockageMap, BlockageThreshold, Candidate};

pub fn default_terrain() -> Terrain {
    Terrain::new(300.0, 300.0, Position::new(150.0, 150.0), 25.0, 300.0).unwrap()
}

/// Segment versus open box by splitting the segment at every plane crossing
/// and testing the midpoint of each piece.
pub fn oracle_blocked(blk: &Blockage, a: Antenna, b: Antenna) -> bool {
    let p0 = [a.position.x, a.position.y, a.height];
    let p1 = [b.position.x, b.position.y, b.height];
    let lo = [blk.center.x - blk.half_width_x, blk.center.y - blk.half_width_y, 0.0];
    let hi = [
        blk.center.x + blk.half_width_x,
        blk.center.y + blk.half_width_y,
        blk.height,
    ];
    let mut ts = vec![0.0, 1.0];
    for axis in 0..3 {
        let d = p1[axis] - p0[axis];
        if d != 0.0 {
            for plane in [lo[axis], hi[axis]] {
                let t = (plane - p0[axis]) / d;
                if t > 0.0 && t < 1.0 {
                    ts.push(t);
                }
            }
        }
    }
    ts.sort_by(f64::total_cmp);
    ts.windows(2).any(|w| {
        if w[1] - w[0] < 1e-9 {
            return false;
        }
        let t = 0.5 * (w[0] + w[1]);
        (0..3).all(|k| {
            let x = p0[k] + t * (p1[k] - p0[k]);
            x > lo[k] && x < hi[k]
        })
    })
}

pub fn oracle_los(blockages: &[Blockage], a: Antenna, b: Antenna, skip: &[VehicleId]) -> bool {
    !blockages
        .iter()
        .filter(|blk| blk.owner.is_none_or(|o| !skip.contains(&o)))
        .any(|blk| oracle_blocked(blk, a, b))
}

/// Nearest vehicle that sees both the base station and `target`, ties by id.
pub fn oracle_nearest_relay(
    terrain: &Terrain,
    blockages: &[Blockage],
    vehicles: &[Vehicle],
    target: VehicleId,
) -> Option<VehicleId> {
    let t = vehicles.iter().find(|v| v.id == target)?;
    vehicles
        .iter()
        .filter(|v| v.id != target)
        .filter(|v| oracle_los(blockages, terrain.bs_antenna(), v.antenna(), &[v.id]))
        .filter(|v| oracle_los(blockages, v.antenna(), t.antenna(), &[v.id, t.id]))
        .map(|v| (v.position.distance(&t.position), v.id))
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
        .map(|(_, id)| id)
}

/// Random static world: seeded buildings and up to `max_vehicles` vehicles,
/// a fifth of them large, none inside a building.
pub fn random_world<R: Rng>(rng: &mut R, max_vehicles: usize) -> (Terrain, Vec<Blockage>, Vec<Vehicle>) {
    let terrain = default_terrain();
    let n_buildings = rng.random_range(0..=8);
    let mut buildings: Vec<Blockage> = Vec::new();
    while buildings.len() < n_buildings {
        let c = Position::new(rng.random_range(25.0..275.0), rng.random_range(25.0..275.0));
        let blk = Blockage::building(buildings.len() as u32, c, 25.0, 25.0, 10.0);
        if !blk.contains(terrain.bs_position) && buildings.iter().all(|b| !b.overlaps(&blk, 10.0)) {
            buildings.push(blk);
        }
    }
    let params = MobilityParams::default();
    let n = rng.random_range(2..=max_vehicles);
    let mut vehicles = Vec::new();
    while vehicles.len() < n {
        let p = Position::new(rng.random_range(0.0..300.0), rng.random_range(0.0..300.0));
        if buildings.iter().any(|b| b.contains(p)) {
            continue;
        }
        let id = VehicleId(vehicles.len() as u32);
        let mut v = if rng.random_bool(0.2) {
            Vehicle::at_rest(id, p, VehicleKind::LargeVehicle, &params.large)
        } else {
            Vehicle::car(id, p)
        };
        v.waypoint = Position::new(p.x + rng.random_range(-1.0..1.0), p.y + rng.random_range(-1.0..1.0));
        vehicles.push(v);
    }
    let mut all = buildings;
    all.extend(vehicles.iter().filter_map(Vehicle::footprint));
    (terrain, all, vehicles)
}

pub fn bs_visibility(terrain: &Terrain, blockages: &[Blockage], vehicles: &[Vehicle]) -> Vec<bool> {
    vehicles
        .iter()
        .map(|v| {
            rml_v2x::geometry::los_test_filtered(blockages, terrain.bs_antenna(), v.antenna(), |b| {
                b.owner == Some(v.id)
            })
            .is_los()
        })
        .collect()
}

/// Static relay-learning world: vehicle 0 is hidden behind a small building
/// and vehicles 1..=3 can relay it; the nearest relay is not the best one.
pub struct RelayFixture {
    pub terrain: Terrain,
    pub blockages: Vec<Blockage>,
    pub vehicles: Vec<Vehicle>,
    pub bs_los: Vec<bool>,
    pub map: BlockageMap,
    pub channel: ChannelParams,
}

impl RelayFixture {
    pub fn new() -> Self {
        let terrain = default_terrain();
        let blockages = vec![Blockage::building(0, Position::new(150.0, 110.0), 10.0, 10.0, 10.0)];
        let spots = [(150.0, 75.0), (150.0, 45.0), (180.0, 100.0), (120.0, 40.0)];
        let vehicles: Vec<Vehicle> = spots
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| Vehicle::car(VehicleId(i as u32), Position::new(x, y)))
            .collect();
        let bs_los: Vec<bool> = vehicles
            .iter()
            .map(|v| los_test(&blockages, terrain.bs_antenna(), v.antenna()).is_los())
            .collect();
        let mut map = BlockageMap::default();
        map.survey(terrain.bs_position, &blockages, BlockageThreshold::default(), 0.0);
        let channel = ChannelParams {
            rx_threshold_dbm: -72.0,
            max_retries: 0,
            ..Default::default()
        };
        Self {
            terrain,
            blockages,
            vehicles,
            bs_los,
            map,
            channel,
        }
    }

    pub fn snapshot(&self) -> rml_v2x::rml::Snapshot<'_> {
        rml_v2x::rml::Snapshot {
            terrain: &self.terrain,
            blockages: &self.blockages,
            vehicles: &self.vehicles,
            bs_los: &self.bs_los,
            map: &self.map,
        }
    }
}

/// Fixture candidates in the order the policy's actions index them.
pub fn ranked_candidates(fx: &RelayFixture) -> Vec<Candidate> {
    let by_distance = rml_v2x::rml::candidate_relays(&fx.snapshot(), VehicleId(0), &fx.channel, 4);
    rml_v2x::rml::metric_order(&by_distance)
        .into_iter()
        .map(|i| by_distance[i])
        .collect()
}

/// Exact expected reward of relaying through `c`, summed over every retry
/// pattern of both legs.
pub fn expected_reward(c: &Candidate, ch: &ChannelParams) -> f64 {
    let r = ch.max_retries;
    let (p1, p2) = (c.bs_link.success_prob, c.target_link.success_prob);
    let hop1 = |k| HopOutcome {
        distance: c.bs_link.distance,
        retries: k,
    };
    let hop2 = |k| HopOutcome {
        distance: c.target_link.distance,
        retries: k,
    };
    let mut e = (1.0 - p1).powi(r as i32 + 1) * delivery_reward(false, link_latency(&[hop1(r)], ch));
    for k1 in 0..=r {
        let first = p1 * (1.0 - p1).powi(k1 as i32);
        for k2 in 0..=r {
            let second = p2 * (1.0 - p2).powi(k2 as i32);
            e += first * second * delivery_reward(true, link_latency(&[hop1(k1), hop2(k2)], ch));
        }
        e += first * (1.0 - p2).powi(r as i32 + 1) * delivery_reward(false, link_latency(&[hop1(k1), hop2(r)], ch));
    }
    e
}

/// Train a fresh policy on the fixture for `episodes` one-step episodes and
/// return the greedy rank.
pub fn train_fixture(fx: &RelayFixture, seed: u64, episodes: usize) -> (usize, usize) {
    use rml_v2x::engine::{relay_attempt, RelayOptions};
    use rml_v2x::rml::{PolicyParams, QPolicy, RelaySelector, SelectionMode};
    use rml_v2x::rng::{stream, Stream};

    let snapshot = fx.snapshot();
    let mut policy = QPolicy::new(PolicyParams::default());
    let mut selector = RelaySelector::default();
    let mut policy_rng = stream(seed, Stream::Policy);
    let mut leg_rng = stream(seed, Stream::Relay);
    let opts = RelayOptions {
        selection: SelectionMode::Learned,
        explore: true,
        learn: true,
    };
    let mut last = None;
    for _ in 0..episodes {
        let a = relay_attempt(
            &snapshot,
            VehicleId(0),
            &mut selector,
            &mut policy,
            &fx.channel,
            opts,
            &mut policy_rng,
            &mut leg_rng,
        );
        last = Some(a.decision);
        policy.replay_train(&mut policy_rng);
        policy.end_episode();
    }
    let d = last.expect("at least one episode");
    (
        policy.greedy_action(d.state_index, d.n_candidates).unwrap(),
        d.n_candidates,
    )
}
