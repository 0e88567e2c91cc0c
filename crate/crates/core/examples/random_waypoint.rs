//! Random-waypoint vehicles moving around seeded buildings.

use rml_v2x::geometry::{place_blockages, PlacementSpec, Position, Terrain};
use rml_v2x::mobility::{rwp_init, rwp_step, MobilityParams};
use rml_v2x::rng::{stream, Stream};

fn main() -> rml_v2x::Result<()> {
    let terrain = Terrain::new(300.0, 300.0, Position::new(150.0, 150.0), 25.0, 300.0)?;
    let spec = PlacementSpec {
        count: 6,
        ..Default::default()
    };
    let buildings = place_blockages(&terrain, &spec, &mut stream(7, Stream::Blockages))?;
    let params = MobilityParams::default();
    let mut vehicles = rwp_init(&terrain, &buildings, 5, &params, &mut stream(7, Stream::Vehicles))?;

    let mut rng = stream(7, Stream::Mobility);
    for second in 0..=10 {
        let row: Vec<String> = vehicles
            .iter()
            .map(|v| format!("({:6.1},{:6.1})", v.position.x, v.position.y))
            .collect();
        println!("t={second:>2}s {}", row.join(" "));
        for _ in 0..10 {
            vehicles = vehicles
                .iter()
                .map(|v| rwp_step(v, &terrain, &buildings, 0.1, &params, &mut rng))
                .collect();
        }
    }
    Ok(())
}
