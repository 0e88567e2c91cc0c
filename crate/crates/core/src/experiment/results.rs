//! Result files: a delimited table for plotting and a structured summary
//! carrying the resolved config.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiment::sweep::{SweepRow, SweepTable};

pub const RESULTS_HEADER: &str =
    "axis,value,mode,seed_count,pdr_mean,pdr_sd,latency_ms_mean,latency_ms_sd,throughput_mbps_mean,throughput_mbps_sd";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResultFormat {
    Delimited,
    Structured,
}

pub fn write_rows<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| Error::io("<results>", e))?;
    Ok(())
}

pub fn write_results(table: &SweepTable, path: &Path, format: ResultFormat) -> Result<()> {
    if table.rows.is_empty() {
        return Err(Error::Validation("refusing to write an empty results table".into()));
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    match format {
        ResultFormat::Delimited => write_rows(&table.rows, &mut out)?,
        ResultFormat::Structured => {
            serde_json::to_writer_pretty(&mut out, table)?;
            out.write_all(b"\n").map_err(|e| Error::io(path, e))?;
        }
    }
    out.flush().map_err(|e| Error::io(path, e))
}

pub fn read_rows(path: &Path) -> Result<Vec<SweepRow>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = csv::Reader::from_reader(BufReader::new(file));
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

pub fn read_structured(path: &Path) -> Result<SweepTable> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_reader(BufReader::new(file))?)
}

/// Single-run summary written next to a trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub metrics: crate::engine::MetricsRecord,
    pub relay_decisions: u64,
    pub config: crate::engine::ScenarioConfig,
}
