//! Parameter sweeps over blockage or vehicle count, both modes, many seeds.

use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{run_scenario, MetricsRecord, Mode, ScenarioConfig};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    Blockages,
    Vehicles,
}

impl SweepAxis {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepAxis::Blockages => "blockages",
            SweepAxis::Vehicles => "vehicles",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Preset {
    /// 20 vehicles, 2 to 10 buildings.
    #[serde(rename = "fig4-6")]
    Fig4To6,
    /// 10 buildings, 10 to 50 vehicles.
    #[serde(rename = "fig7-9")]
    Fig7To9,
}

impl std::str::FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig4-6" => Ok(Preset::Fig4To6),
            "fig7-9" => Ok(Preset::Fig7To9),
            other => Err(Error::Config(format!(
                "unknown preset `{other}` (expected fig4-6 or fig7-9)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub values: Vec<u32>,
    /// Count held constant on the other axis.
    pub fixed_value: u32,
    pub modes: Vec<Mode>,
    pub seeds: Vec<u64>,
    /// Where the CLI writes results; not part of the serialized table, so
    /// identical sweeps produce identical files wherever they land.
    #[serde(skip)]
    pub output_dir: Option<PathBuf>,
    pub base: ScenarioConfig,
}

impl SweepSpec {
    pub fn preset(preset: Preset, seed_count: u64) -> Self {
        let (axis, fixed_value) = match preset {
            Preset::Fig4To6 => (SweepAxis::Blockages, 20),
            Preset::Fig7To9 => (SweepAxis::Vehicles, 10),
        };
        let values = match axis {
            SweepAxis::Blockages => vec![2, 4, 6, 8, 10],
            SweepAxis::Vehicles => vec![10, 20, 30, 40, 50],
        };
        Self {
            axis,
            values,
            fixed_value,
            modes: vec![Mode::Rml, Mode::Baseline],
            seeds: (1..=seed_count).collect(),
            output_dir: None,
            base: ScenarioConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() || self.values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Validation(
                "sweep values must be nonempty and strictly increasing".into(),
            ));
        }
        if self.seeds.is_empty() {
            return Err(Error::Validation("sweep needs at least one seed".into()));
        }
        if self.modes.is_empty() {
            return Err(Error::Validation("sweep needs at least one mode".into()));
        }
        Ok(())
    }

    /// Config of one sweep point.
    pub fn point_config(&self, value: u32, mode: Mode, seed: u64) -> ScenarioConfig {
        let mut cfg = self.base.clone();
        let (blockages, vehicles) = match self.axis {
            SweepAxis::Blockages => (value, self.fixed_value),
            SweepAxis::Vehicles => (self.fixed_value, value),
        };
        cfg.scenario.n_blockages = blockages as usize;
        cfg.scenario.n_vehicles = vehicles as usize;
        cfg.scenario.mode = mode;
        cfg.scenario.seed = seed;
        cfg
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis: SweepAxis,
    pub value: u32,
    pub mode: Mode,
    pub seed_count: usize,
    pub pdr_mean: f64,
    pub pdr_sd: f64,
    pub latency_ms_mean: f64,
    pub latency_ms_sd: f64,
    pub throughput_mbps_mean: f64,
    pub throughput_mbps_sd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub spec: SweepSpec,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn row(&self, value: u32, mode: Mode) -> Option<&SweepRow> {
        self.rows.iter().find(|r| r.value == value && r.mode == mode)
    }
}

/// Sample mean and standard deviation (n - 1 denominator; 0 for one sample).
pub fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Run every (value, mode, seed) point on at most `jobs` threads.
pub fn run_sweep(spec: &SweepSpec, jobs: usize) -> Result<SweepTable> {
    spec.validate()?;
    let points: Vec<(u32, Mode, u64)> = spec
        .values
        .iter()
        .flat_map(|&v| {
            spec.modes
                .iter()
                .flat_map(move |&m| spec.seeds.iter().map(move |&s| (v, m, s)))
        })
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let results: Vec<Result<MetricsRecord>> = pool.install(|| {
        points
            .par_iter()
            .map(|&(value, mode, seed)| {
                run_scenario(&spec.point_config(value, mode, seed))
                    .map(|o| o.metrics)
                    .map_err(|e| Error::SweepPoint {
                        axis: spec.axis.as_str().to_string(),
                        value,
                        mode: mode.to_string(),
                        seed,
                        source: Box::new(e),
                    })
            })
            .collect()
    });
    let metrics: Vec<MetricsRecord> = results.into_iter().collect::<Result<_>>()?;

    let mut rows = Vec::new();
    for &value in &spec.values {
        let mut modes = spec.modes.clone();
        modes.sort();
        modes.dedup();
        for mode in modes {
            let runs: Vec<&MetricsRecord> = points
                .iter()
                .zip(&metrics)
                .filter(|((v, m, _), _)| *v == value && *m == mode)
                .map(|(_, r)| r)
                .collect();
            let col = |f: fn(&MetricsRecord) -> f64| mean_sd(&runs.iter().map(|r| f(r)).collect::<Vec<_>>());
            let (pdr_mean, pdr_sd) = col(|r| r.pdr);
            let (latency_ms_mean, latency_ms_sd) = col(|r| r.mean_latency_ms);
            let (throughput_mbps_mean, throughput_mbps_sd) = col(|r| r.throughput_mbps);
            rows.push(SweepRow {
                axis: spec.axis,
                value,
                mode,
                seed_count: runs.len(),
                pdr_mean,
                pdr_sd,
                latency_ms_mean,
                latency_ms_sd,
                throughput_mbps_mean,
                throughput_mbps_sd,
            });
        }
    }
    Ok(SweepTable {
        spec: spec.clone(),
        rows,
    })
}
