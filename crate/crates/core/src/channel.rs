//! mmWave link abstraction.
//!
//! Log-distance path loss with lognormal shadowing reduces every link to a
//! per-attempt success probability. Latency is accounted per hop from the
//! serialization time, propagation delay and retry timeouts.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinkState {
    Los,
    Nlos,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelParams {
    pub tx_power_dbm: f64,
    pub bandwidth_hz: f64,
    pub carrier_note: String,
    /// Path loss at the 1 m reference distance.
    pub pl0_db: f64,
    pub exponent_los: f64,
    pub exponent_nlos: f64,
    pub shadow_sigma_los_db: f64,
    pub shadow_sigma_nlos_db: f64,
    pub rx_threshold_dbm: f64,
    pub data_rate_bps: f64,
    pub packet_bytes: u32,
    /// Wait before a failed attempt is retried. Tuned so retry-heavy
    /// deliveries land in the sub-2 ms range; not a physical constant.
    pub retry_timeout_ms: f64,
    pub relay_proc_ms: f64,
    pub max_retries: u32,
    pub queue_capacity: usize,
}

impl Default for ChannelParams {
    fn default() -> Self {
        Self {
            tx_power_dbm: 30.0,
            bandwidth_hz: 2.0e8,
            carrier_note: "28 GHz class".into(),
            pl0_db: 61.4,
            exponent_los: 2.0,
            exponent_nlos: 3.3,
            shadow_sigma_los_db: 4.0,
            shadow_sigma_nlos_db: 8.0,
            // -174 dBm/Hz + 10 log10(200 MHz) + 7 dB NF + 5 dB SNR
            rx_threshold_dbm: -79.0,
            data_rate_bps: 1.0e11,
            packet_bytes: 1024,
            retry_timeout_ms: 0.2,
            relay_proc_ms: 0.02,
            max_retries: 3,
            queue_capacity: 100,
        }
    }
}

impl ChannelParams {
    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::Validation(what.to_string()))
            }
        };
        check(
            self.exponent_los >= 1.0 && self.exponent_nlos >= 1.0,
            "path loss exponents must be >= 1",
        )?;
        check(
            self.shadow_sigma_los_db >= 0.0 && self.shadow_sigma_nlos_db >= 0.0,
            "shadowing sigma must be >= 0",
        )?;
        check(
            self.bandwidth_hz > 0.0 && self.data_rate_bps > 0.0 && self.packet_bytes > 0 && self.queue_capacity > 0,
            "rates, packet size and queue capacity must be positive",
        )?;
        check(
            self.retry_timeout_ms >= 0.0 && self.relay_proc_ms >= 0.0,
            "timeouts must be non-negative",
        )?;
        let finite = [self.tx_power_dbm, self.pl0_db, self.rx_threshold_dbm]
            .iter()
            .all(|v| v.is_finite());
        check(finite, "power levels must be finite")
    }

    fn exponent(&self, state: LinkState) -> f64 {
        match state {
            LinkState::Los => self.exponent_los,
            LinkState::Nlos => self.exponent_nlos,
        }
    }

    pub fn shadow_sigma(&self, state: LinkState) -> f64 {
        match state {
            LinkState::Los => self.shadow_sigma_los_db,
            LinkState::Nlos => self.shadow_sigma_nlos_db,
        }
    }

    /// Link margin before shadowing: received power minus threshold.
    pub fn margin_db(&self, d: f64, state: LinkState) -> f64 {
        self.tx_power_dbm - path_loss(d, state, self) - self.rx_threshold_dbm
    }

    pub fn tx_time_ms(&self) -> f64 {
        8.0 * self.packet_bytes as f64 / self.data_rate_bps * 1e3
    }
}

/// `pl0 + 10 n log10(d / 1 m)`, clamped at the reference distance.
pub fn path_loss(d: f64, state: LinkState, params: &ChannelParams) -> f64 {
    params.pl0_db + 10.0 * params.exponent(state) * d.max(1.0).log10()
}

/// Standard normal CDF.
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Probability that one attempt is received: the shadowed received power
/// clears the threshold.
pub fn link_success_prob(d: f64, state: LinkState, params: &ChannelParams) -> f64 {
    let margin = params.margin_db(d, state);
    let sigma = params.shadow_sigma(state);
    if sigma == 0.0 {
        return if margin >= 0.0 { 1.0 } else { 0.0 };
    }
    std_normal_cdf(margin / sigma).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkSample {
    pub distance: f64,
    pub state: LinkState,
    pub success_prob: f64,
}

impl LinkSample {
    pub fn new(distance: f64, state: LinkState, params: &ChannelParams) -> Self {
        Self {
            distance,
            state,
            success_prob: link_success_prob(distance, state, params),
        }
    }
}

/// One hop of a delivery as it happened.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HopOutcome {
    pub distance: f64,
    pub retries: u32,
}

/// End-to-end latency of a chain of hops, in milliseconds.
///
/// Panics on an empty chain.
pub fn link_latency(hops: &[HopOutcome], params: &ChannelParams) -> f64 {
    assert!(!hops.is_empty(), "latency of a zero-hop chain");
    let per_hop: f64 = hops
        .iter()
        .map(|h| params.tx_time_ms() + h.distance / SPEED_OF_LIGHT * 1e3 + h.retries as f64 * params.retry_timeout_ms)
        .sum();
    per_hop + (hops.len() - 1) as f64 * params.relay_proc_ms
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LegOutcome {
    pub delivered: bool,
    /// Failed attempts before the successful one, or `max_retries` when
    /// every attempt failed.
    pub retries: u32,
}

/// Bernoulli attempts with up to `max_retries` retransmissions.
pub fn attempt_leg<R: Rng + ?Sized>(success_prob: f64, max_retries: u32, rng: &mut R) -> LegOutcome {
    for attempt in 0..=max_retries {
        if rng.random::<f64>() < success_prob {
            return LegOutcome {
                delivered: true,
                retries: attempt,
            };
        }
    }
    LegOutcome {
        delivered: false,
        retries: max_retries,
    }
}
