//! Load a config document, apply environment-style overrides and run it.

use rml_v2x::engine::run_scenario;
use rml_v2x::experiment::config::to_toml;
use rml_v2x::experiment::parse_config_with;

const DOC: &str = include_str!("scenario.toml");

fn main() -> rml_v2x::Result<()> {
    let cfg = parse_config_with(DOC, [("RML_SCENARIO_SEED", "5"), ("RML_SCENARIO_SIM_TIME_S", "20")])?;
    print!("{}", to_toml(&cfg));
    let m = run_scenario(&cfg)?.metrics;
    println!(
        "# pdr {:.4}, {} of {} delivered",
        m.pdr, m.messages_delivered, m.messages_sent
    );
    Ok(())
}
