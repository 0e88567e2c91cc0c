//! Path loss, success probability and latency over distance.

use rml_v2x::channel::{link_latency, link_success_prob, path_loss, ChannelParams, HopOutcome, LinkState};

fn main() {
    let params = ChannelParams::default();
    println!(
        "{:>6} {:>9} {:>7} {:>9} {:>7}",
        "d (m)", "PL los", "P los", "PL nlos", "P nlos"
    );
    for d in [10.0, 25.0, 50.0, 100.0, 150.0, 200.0] {
        println!(
            "{d:>6} {:>9.2} {:>7.4} {:>9.2} {:>7.4}",
            path_loss(d, LinkState::Los, &params),
            link_success_prob(d, LinkState::Los, &params),
            path_loss(d, LinkState::Nlos, &params),
            link_success_prob(d, LinkState::Nlos, &params),
        );
    }
    let direct = [HopOutcome {
        distance: 100.0,
        retries: 0,
    }];
    let relayed = [
        HopOutcome {
            distance: 100.0,
            retries: 0,
        },
        HopOutcome {
            distance: 100.0,
            retries: 1,
        },
    ];
    println!("direct latency  {:.6} ms", link_latency(&direct, &params));
    println!("relayed latency {:.6} ms", link_latency(&relayed, &params));
}
