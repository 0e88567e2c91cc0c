//! Delivery trace files: CSV with the header
//! `message_id,vehicle_id,sent_at,outcome,latency_ms,hops,retries,was_nlos`.
//! `latency_ms` is empty for failed pairs.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::engine::metrics::DeliveryRecord;
use crate::error::{Error, Result};

pub const TRACE_HEADER: &str = "message_id,vehicle_id,sent_at,outcome,latency_ms,hops,retries,was_nlos";

pub fn write_trace<W: Write>(records: &[DeliveryRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    if records.is_empty() {
        w.write_record(TRACE_HEADER.split(','))?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_trace<R: Read>(input: R) -> Result<Vec<DeliveryRecord>> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

pub fn write_trace_file(records: &[DeliveryRecord], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_trace(records, std::io::BufWriter::new(file))
}

pub fn read_trace_file(path: &Path) -> Result<Vec<DeliveryRecord>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_trace(std::io::BufReader::new(file))
}
