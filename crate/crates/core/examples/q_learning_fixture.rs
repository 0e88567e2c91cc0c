//! Relay policy learning on a static world with one hidden vehicle and three
//! possible relays, checked against the expected reward of each relay.

use rml_v2x::channel::{link_latency, ChannelParams, HopOutcome};
use rml_v2x::engine::{relay_attempt, RelayOptions};
use rml_v2x::geometry::{los_test, Blockage, Position, Terrain};
use rml_v2x::mobility::{Vehicle, VehicleId};
use rml_v2x::rml::{
    candidate_relays, delivery_reward, metric_order, BlockageMap, BlockageThreshold, Candidate, PolicyParams, QPolicy,
    RelaySelector, SelectionMode, Snapshot,
};
use rml_v2x::rng::{stream, Stream};

/// Exact expected reward of relaying through `c`, summing over every retry
/// pattern of the two legs.
fn expected_reward(c: &Candidate, ch: &ChannelParams) -> f64 {
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
        let lost = (1.0 - p2).powi(r as i32 + 1);
        e += first * lost * delivery_reward(false, link_latency(&[hop1(k1), hop2(r)], ch));
    }
    e
}

fn main() -> rml_v2x::Result<()> {
    let terrain = Terrain::new(300.0, 300.0, Position::new(150.0, 150.0), 25.0, 300.0)?;
    let blockages = vec![Blockage::building(0, Position::new(150.0, 110.0), 10.0, 10.0, 10.0)];
    // Hidden target first, then three relays; the nearest relay has a weak
    // link to the base station.
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
    let snapshot = Snapshot {
        terrain: &terrain,
        blockages: &blockages,
        vehicles: &vehicles,
        bs_los: &bs_los,
        map: &map,
    };
    // A tight link budget without retransmissions spreads the relays apart.
    let channel = ChannelParams {
        rx_threshold_dbm: -72.0,
        max_retries: 0,
        ..Default::default()
    };
    assert!(!bs_los[0], "target must be hidden");
    let target = VehicleId(0);

    // The policy's actions index the candidates by path metric.
    let by_distance = candidate_relays(&snapshot, target, &channel, 4);
    let candidates: Vec<Candidate> = metric_order(&by_distance).into_iter().map(|i| by_distance[i]).collect();
    let expected: Vec<f64> = candidates.iter().map(|c| expected_reward(c, &channel)).collect();
    for (rank, (c, e)) in candidates.iter().zip(&expected).enumerate() {
        println!("rank {rank}: relay {:?}, expected reward {e:.4}", c.relay);
    }
    let best = (0..expected.len())
        .max_by(|&a, &b| expected[a].total_cmp(&expected[b]))
        .unwrap();

    let mut hits = 0;
    for seed in 0..100 {
        let mut policy = QPolicy::new(PolicyParams::default());
        let mut selector = RelaySelector::default();
        let mut policy_rng = stream(seed, Stream::Policy);
        let mut leg_rng = stream(seed, Stream::Relay);
        let opts = RelayOptions {
            selection: SelectionMode::Learned,
            explore: true,
            learn: true,
        };
        let mut state = 0;
        for _ in 0..500 {
            let a = relay_attempt(
                &snapshot,
                target,
                &mut selector,
                &mut policy,
                &channel,
                opts,
                &mut policy_rng,
                &mut leg_rng,
            );
            state = a.decision.state_index;
            policy.replay_train(&mut policy_rng);
            policy.end_episode();
        }
        if policy.greedy_action(state, candidates.len())? == best {
            hits += 1;
        }
    }
    println!("greedy action matches rank {best} on {hits} of 100 seeds");
    Ok(())
}
