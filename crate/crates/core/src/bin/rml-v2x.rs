use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use rml_v2x::engine::{run_scenario, trace, Mode};
use rml_v2x::experiment::{
    env_overrides, parse_config, parse_config_with, run_sweep, write_results, Preset, ResultFormat, RunSummary,
    SweepSpec,
};
use rml_v2x::{Error, Result};

#[derive(Parser)]
#[command(
    name = "rml-v2x",
    about = "mmWave V2X broadcast simulator with learned NLOS relaying"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write trace.csv and metrics.json.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        mode: Option<Mode>,
        #[arg(long)]
        blockages: Option<usize>,
        #[arg(long)]
        vehicles: Option<usize>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Run a preset sweep and write results.csv and results.json.
    Sweep {
        #[arg(long)]
        preset: Preset,
        #[arg(long, default_value_t = 10)]
        seeds: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Parse and validate a config file, then print it fully resolved.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.to_path_buf(),
        source: e,
    })
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate {
            config,
            seed,
            mode,
            blockages,
            vehicles,
            out,
        } => {
            let mut cfg = parse_config(&config)?;
            if let Some(s) = seed {
                cfg.scenario.seed = s;
            }
            if let Some(m) = mode {
                cfg.scenario.mode = m;
            }
            if let Some(b) = blockages {
                cfg.scenario.n_blockages = b;
            }
            if let Some(v) = vehicles {
                cfg.scenario.n_vehicles = v;
            }
            let outcome = run_scenario(&cfg)?;
            create_dir(&out)?;
            trace::write_trace_file(&outcome.records, &out.join("trace.csv"))?;
            let summary = RunSummary {
                metrics: outcome.metrics.clone(),
                relay_decisions: outcome.relay_decisions,
                config: cfg,
            };
            let path = out.join("metrics.json");
            let text = serde_json::to_string_pretty(&summary)? + "\n";
            std::fs::write(&path, text).map_err(|e| Error::Io { path, source: e })?;
            let m = &outcome.metrics;
            println!(
                "pdr {:.4}  latency {:.4} ms  throughput {:.4} Mb/s  ({} of {} delivered)",
                m.pdr, m.mean_latency_ms, m.throughput_mbps, m.messages_delivered, m.messages_sent
            );
        }
        Command::Sweep {
            preset,
            seeds,
            jobs,
            out,
        } => {
            let mut spec = SweepSpec::preset(preset, seeds);
            spec.base = parse_config_with("", env_overrides())?;
            spec.output_dir = Some(out.clone());
            let table = run_sweep(&spec, jobs)?;
            create_dir(&out)?;
            write_results(&table, &out.join("results.csv"), ResultFormat::Delimited)?;
            write_results(&table, &out.join("results.json"), ResultFormat::Structured)?;
            for r in &table.rows {
                println!(
                    "{}={:<3} {:<8} pdr {:.4}±{:.4}  latency {:.4} ms  throughput {:.4} Mb/s",
                    r.axis.as_str(),
                    r.value,
                    r.mode,
                    r.pdr_mean,
                    r.pdr_sd,
                    r.latency_ms_mean,
                    r.throughput_mbps_mean
                );
            }
        }
        Command::Validate { config } => {
            let cfg = parse_config(&config)?;
            print!("{}", rml_v2x::experiment::config::to_toml(&cfg));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
