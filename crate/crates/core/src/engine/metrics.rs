use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mobility::VehicleId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    Delivered,
    Failed,
}

/// Fate of one (message, vehicle) pair. Field order is the trace column
/// order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeliveryRecord {
    pub message_id: u64,
    pub vehicle_id: VehicleId,
    pub sent_at: f64,
    pub outcome: Outcome,
    /// Present only for delivered pairs.
    pub latency_ms: Option<f64>,
    pub hops: u32,
    pub retries: u32,
    pub was_nlos: bool,
}

impl DeliveryRecord {
    pub fn delivered(&self) -> bool {
        self.outcome == Outcome::Delivered
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub pdr: f64,
    /// PDR restricted to pairs whose target was NLOS; `None` if there were
    /// none.
    pub pdr_nlos: Option<f64>,
    /// Mean over delivered pairs; 0 when nothing was delivered.
    pub mean_latency_ms: f64,
    pub throughput_mbps: f64,
    pub messages_sent: u64,
    pub messages_delivered: u64,
    pub nlos_sent: u64,
}

pub fn compute_metrics(records: &[DeliveryRecord], sim_time_s: f64, packet_bytes: u32) -> Result<MetricsRecord> {
    if records.is_empty() {
        return Err(Error::EmptyTrace);
    }
    let sent = records.len() as u64;
    let delivered: Vec<&DeliveryRecord> = records.iter().filter(|r| r.delivered()).collect();
    let n_delivered = delivered.len() as u64;
    let nlos_sent = records.iter().filter(|r| r.was_nlos).count() as u64;
    let nlos_delivered = delivered.iter().filter(|r| r.was_nlos).count() as u64;

    let mean_latency_ms = if delivered.is_empty() {
        0.0
    } else {
        delivered.iter().filter_map(|r| r.latency_ms).sum::<f64>() / n_delivered as f64
    };

    Ok(MetricsRecord {
        pdr: n_delivered as f64 / sent as f64,
        pdr_nlos: (nlos_sent > 0).then(|| nlos_delivered as f64 / nlos_sent as f64),
        mean_latency_ms,
        throughput_mbps: n_delivered as f64 * packet_bytes as f64 * 8.0 / sim_time_s / 1e6,
        messages_sent: sent,
        messages_delivered: n_delivered,
        nlos_sent,
    })
}
