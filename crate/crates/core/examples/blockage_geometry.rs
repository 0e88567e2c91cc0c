//! Line of sight through a building and the critical blocking distance.

use rml_v2x::geometry::{critical_blocking_distance, los_test, Antenna, Blockage, BlockageGeometry, Position};

fn main() -> rml_v2x::Result<()> {
    let buildings = [Blockage::building(0, Position::new(150.0, 80.0), 25.0, 25.0, 10.0)];
    let bs = Antenna::new(Position::new(150.0, 150.0), 25.0);

    for y in [60.0, 40.0, 20.0, 0.0] {
        let car = Antenna::new(Position::new(150.0, y), 1.5);
        println!("car at (150, {y:>4}): {:?}", los_test(&buildings, bs, car));
    }

    let g = BlockageGeometry {
        omega_m: 70.0,
        w_v: 50.0,
        h_bs: 25.0,
        h_l: 10.0,
        h_s: 1.5,
    };
    println!(
        "shadow ends {:.2} m from the base station",
        critical_blocking_distance(&g)?
    );
    Ok(())
}
