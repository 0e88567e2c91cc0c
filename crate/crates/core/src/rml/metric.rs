//! Additive link metrics over serial relay chains.
//!
//! A link that succeeds with probability `p` scores `ln p`; the score of a
//! chain is the sum over its links, so ranking chains by metric ranks them
//! by end-to-end success probability.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mobility::VehicleId;

pub fn link_metric(p: f64) -> Result<f64> {
    if p == 0.0 {
        return Err(Error::ZeroProbability);
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidProbability(p));
    }
    Ok(p.ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathScore {
    pub metric: f64,
    pub success: f64,
}

/// Sum of link metrics alongside the directly multiplied success
/// probability.
pub fn path_metric(probs: &[f64]) -> Result<PathScore> {
    if probs.is_empty() {
        return Err(Error::EmptyPath);
    }
    let mut metric = 0.0;
    let mut success = 1.0;
    for &p in probs {
        metric += link_metric(p)?;
        success *= p;
    }
    Ok(PathScore { metric, success })
}

/// Ordered chain of LOS relays with its per-link success probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelayPath {
    pub nodes: Vec<VehicleId>,
    pub link_probs: Vec<f64>,
    pub metric: f64,
    pub success: f64,
}

impl RelayPath {
    pub fn new(nodes: Vec<VehicleId>, link_probs: Vec<f64>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::EmptyPath);
        }
        if nodes.len() != link_probs.len() {
            return Err(Error::Validation(format!(
                "{} relay nodes but {} link probabilities",
                nodes.len(),
                link_probs.len()
            )));
        }
        let PathScore { metric, success } = path_metric(&link_probs)?;
        Ok(Self {
            nodes,
            link_probs,
            metric,
            success,
        })
    }
}

/// Index of the best-scoring path, lowest index on ties.
pub fn best_path(paths: &[RelayPath]) -> Option<usize> {
    paths
        .iter()
        .enumerate()
        .fold(None, |best: Option<(usize, f64)>, (i, p)| match best {
            Some((_, m)) if m >= p.metric => best,
            _ => Some((i, p.metric)),
        })
        .map(|(i, _)| i)
}
