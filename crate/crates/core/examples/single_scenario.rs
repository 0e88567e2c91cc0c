//! One seeded scenario in both modes, with the NLOS share of the traffic.

use rml_v2x::engine::{run_scenario, Mode, ScenarioConfig};

fn main() -> rml_v2x::Result<()> {
    for mode in [Mode::Baseline, Mode::Rml] {
        let mut cfg = ScenarioConfig::default();
        cfg.scenario.mode = mode;
        cfg.scenario.seed = 11;
        let out = run_scenario(&cfg)?;
        let m = &out.metrics;
        println!(
            "{mode:<8} pdr {:.4} (nlos {:.4} over {} sends)  latency {:.4} ms  throughput {:.4} Mb/s  relays used {}",
            m.pdr,
            m.pdr_nlos.unwrap_or(f64::NAN),
            m.nlos_sent,
            m.mean_latency_ms,
            m.throughput_mbps,
            out.relay_decisions
        );
        if let Some(f) = out.flow.last() {
            println!(
                "         forecast NLOS population {:.2} (now {})",
                f.n_next, f.n_current
            );
        }
    }
    Ok(())
}
