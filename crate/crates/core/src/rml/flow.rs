//! Handoff flow estimation: how many NLOS vehicles to expect at the next
//! sampling instant given observed arrival and departure rates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FlowEstimate {
    /// Vehicles currently in the flow (`N`).
    pub n_current: u32,
    /// Constant correction subtracted from the estimate (`m`).
    pub m_constant: u32,
    /// Time until the next sample (`t_s`).
    pub t_s: f64,
    /// Estimation window (`T_e`).
    pub t_e: f64,
    pub arrivals: u32,
    pub departures: u32,
    /// Filled in by [`flow_estimate`].
    pub n_arriving: f64,
    pub n_departing: f64,
    pub n_next: f64,
}

/// `N_n = N + N_r - N_t - m` with `N_r = t_s * arrivals / T_e` and
/// `N_t = t_s * departures / T_e`, floored at zero. Returns `N_n` and
/// records the intermediate rates in `f`.
pub fn flow_estimate(f: &mut FlowEstimate) -> Result<f64> {
    if !(f.t_e > 0.0) {
        return Err(Error::InvalidEstimate(format!(
            "estimation time must be positive, got {}",
            f.t_e
        )));
    }
    if !(f.t_s >= 0.0) {
        return Err(Error::InvalidEstimate(format!(
            "sampling time must be non-negative, got {}",
            f.t_s
        )));
    }
    f.n_arriving = f.t_s * f.arrivals as f64 / f.t_e;
    f.n_departing = f.t_s * f.departures as f64 / f.t_e;
    let net = f.t_s * (f.arrivals as f64 - f.departures as f64) / f.t_e;
    let n = f.n_current as f64 + net - f.m_constant as f64;
    f.n_next = n.max(0.0);
    Ok(f.n_next)
}
