//! The relay-using-machine-learning decision kernel: blockage
//! identification, flow estimation, path metrics and the relay policy.

pub mod blockage;
pub mod flow;
pub mod metric;
pub mod policy;
pub mod relay;

pub use blockage::{classify_blockage, estimate_blockage_location, BlockageMap, BlockageThreshold, SIXTEEN_FEET_M};
pub use flow::{flow_estimate, FlowEstimate};
pub use metric::{best_path, link_metric, path_metric, PathScore, RelayPath};
pub use policy::{state_index, PolicyParams, QPolicy, Transition};
pub use relay::{candidate_relays, metric_order, Candidate, RelayDecision, RelaySelector, SelectionMode, Snapshot};

use serde::{Deserialize, Serialize};

/// Payload broadcast by the base station to every vehicle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BroadcastMessage {
    pub id: u64,
    pub payload_bytes: u32,
    pub created_at: f64,
}

/// Reward for one delivery attempt: +1 delivered, -1 lost, minus a
/// latency penalty.
pub fn delivery_reward(delivered: bool, latency_ms: f64) -> f64 {
    let base = if delivered { 1.0 } else { -1.0 };
    base - 0.1 * latency_ms
}
