//! Candidate relays for a vehicle hidden behind a building.

use rml_v2x::channel::ChannelParams;
use rml_v2x::geometry::{los_test, Blockage, Position, Terrain};
use rml_v2x::mobility::{Vehicle, VehicleId};
use rml_v2x::rml::{
    candidate_relays, BlockageMap, BlockageThreshold, PolicyParams, QPolicy, RelaySelector, SelectionMode, Snapshot,
};
use rml_v2x::rng::{stream, Stream};

fn main() -> rml_v2x::Result<()> {
    let terrain = Terrain::new(300.0, 300.0, Position::new(150.0, 150.0), 25.0, 300.0)?;
    let blockages = vec![Blockage::building(0, Position::new(150.0, 80.0), 25.0, 25.0, 10.0)];
    let vehicles: Vec<Vehicle> = [(150.0, 20.0), (110.0, 30.0), (200.0, 40.0), (140.0, 140.0)]
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
    let channel = ChannelParams::default();
    for c in candidate_relays(&snapshot, VehicleId(0), &channel, 4) {
        println!(
            "relay {:?}: {:.1} m to target, P(bs->relay) {:.3}, P(relay->target) {:.3}",
            c.relay, c.distance_to_target, c.bs_link.success_prob, c.target_link.success_prob
        );
    }

    let policy = QPolicy::new(PolicyParams::default());
    let mut selector = RelaySelector::default();
    let decision = selector.select(
        &snapshot,
        VehicleId(0),
        &policy,
        &channel,
        SelectionMode::GreedyNearest,
        false,
        &mut stream(1, Stream::Policy),
    );
    println!(
        "chosen relay {:?}, state {}",
        decision.chosen_relay_id, decision.state_index
    );
    Ok(())
}
