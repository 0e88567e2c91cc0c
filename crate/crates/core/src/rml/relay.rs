//! Relay candidate search and the per-target relay decision.

use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{ChannelParams, LinkSample, LinkState};
use crate::geometry::{is_clear_filtered, Blockage, Terrain};
use crate::mobility::{Vehicle, VehicleId};
use crate::rml::blockage::BlockageMap;
use crate::rml::metric::path_metric;
use crate::rml::policy::{state_index, QPolicy};

/// Everything a relay decision may look at, frozen at one instant.
#[derive(Debug, Clone, Copy)]
pub struct Snapshot<'a> {
    pub terrain: &'a Terrain,
    /// Buildings plus the footprints of large vehicles.
    pub blockages: &'a [Blockage],
    pub vehicles: &'a [Vehicle],
    /// `bs_los[i]` tells whether `vehicles[i]` sees the base station.
    pub bs_los: &'a [bool],
    pub map: &'a BlockageMap,
}

impl Snapshot<'_> {
    fn index_of(&self, id: VehicleId) -> Option<usize> {
        self.vehicles.iter().position(|v| v.id == id)
    }

    /// Vehicle-to-vehicle line of sight, ignoring the bodies of the two
    /// endpoints.
    pub fn v2v_los(&self, a: &Vehicle, b: &Vehicle) -> bool {
        is_clear_filtered(self.blockages, a.antenna(), b.antenna(), |blk| {
            blk.owner == Some(a.id) || blk.owner == Some(b.id)
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub relay: VehicleId,
    /// Ground distance from relay to target.
    pub distance_to_target: f64,
    pub bs_link: LinkSample,
    pub target_link: LinkSample,
}

/// LOS-to-BS vehicles that also see `target`, nearest to the target first
/// (ties by id), at most `max_k` of them.
pub fn candidate_relays(
    snapshot: &Snapshot<'_>,
    target: VehicleId,
    channel: &ChannelParams,
    max_k: usize,
) -> Vec<Candidate> {
    let Some(ti) = snapshot.index_of(target) else {
        return Vec::new();
    };
    let tv = &snapshot.vehicles[ti];
    let bs = snapshot.terrain.bs_position;

    let mut visible: Vec<(f64, VehicleId, usize)> = snapshot
        .vehicles
        .iter()
        .enumerate()
        .filter(|&(i, v)| i != ti && snapshot.bs_los[i] && v.id != target && snapshot.v2v_los(v, tv))
        .map(|(i, v)| (v.position.distance(&tv.position), v.id, i))
        .collect();
    visible.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    visible.truncate(max_k);

    visible
        .into_iter()
        .map(|(d, id, i)| Candidate {
            relay: id,
            distance_to_target: d,
            bs_link: LinkSample::new(bs.distance(&snapshot.vehicles[i].position), LinkState::Los, channel),
            target_link: LinkSample::new(d, LinkState::Los, channel),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionMode {
    /// Rank chosen by the Q-policy.
    Learned,
    /// Always the nearest candidate.
    GreedyNearest,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelayDecision {
    pub target_nlos_id: VehicleId,
    pub chosen_relay_id: Option<VehicleId>,
    pub chosen: Option<Candidate>,
    /// Relay-to-target distance of the chosen candidate.
    pub d_v: f64,
    /// Reference distance for this target after the decision.
    pub d_r: f64,
    /// Previous reference distance minus `d_v`.
    pub v_d: f64,
    pub action_index: usize,
    pub state_index: u64,
    pub n_candidates: usize,
}

/// Candidate indices by two-hop path metric, best first; ties keep the
/// distance order.
pub fn metric_order(candidates: &[Candidate]) -> Vec<usize> {
    let scores: Vec<f64> = candidates
        .iter()
        .map(|c| {
            path_metric(&[c.bs_link.success_prob, c.target_link.success_prob]).map_or(f64::NEG_INFINITY, |s| s.metric)
        })
        .collect();
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.sort_unstable_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    order
}

/// Remembers, per NLOS target, the relay distance used last time.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RelaySelector {
    reference: HashMap<VehicleId, f64>,
}

impl RelaySelector {
    pub fn reference_distance(&self, target: VehicleId) -> Option<f64> {
        self.reference.get(&target).copied()
    }

    /// Pick a relay for an NLOS `target`.
    ///
    /// Learned mode asks the policy for a rank (epsilon-greedy when
    /// `explore`, greedy otherwise) into the candidates ordered by path
    /// metric. GreedyNearest takes the nearest candidate.
    #[allow(clippy::too_many_arguments)]
    pub fn select<R: Rng + ?Sized>(
        &mut self,
        snapshot: &Snapshot<'_>,
        target: VehicleId,
        policy: &QPolicy,
        channel: &ChannelParams,
        mode: SelectionMode,
        explore: bool,
        rng: &mut R,
    ) -> RelayDecision {
        let target_pos = snapshot
            .index_of(target)
            .map(|i| snapshot.vehicles[i].position)
            .unwrap_or(snapshot.terrain.bs_position);
        let state = state_index(target_pos, snapshot.map, snapshot.terrain, &policy.params);
        let candidates = candidate_relays(snapshot, target, channel, policy.params.max_actions);
        let previous = self.reference_distance(target);

        if candidates.is_empty() {
            let d_r = previous.unwrap_or(f64::INFINITY);
            return RelayDecision {
                target_nlos_id: target,
                chosen_relay_id: None,
                chosen: None,
                d_v: f64::INFINITY,
                d_r,
                v_d: 0.0,
                action_index: 0,
                state_index: state,
                n_candidates: 0,
            };
        }

        let (action, chosen) = match mode {
            SelectionMode::GreedyNearest => (0, candidates[0]),
            SelectionMode::Learned => {
                let order = metric_order(&candidates);
                let picked = if explore {
                    policy.select_action(state, candidates.len(), rng)
                } else {
                    policy.greedy_action(state, candidates.len())
                };
                let action = picked.unwrap_or(0).min(order.len() - 1);
                (action, candidates[order[action]])
            }
        };
        let d_v = chosen.distance_to_target;
        let v_d = previous.map_or(0.0, |d_r| d_r - d_v);
        self.reference.insert(target, d_v);

        RelayDecision {
            target_nlos_id: target,
            chosen_relay_id: Some(chosen.relay),
            chosen: Some(chosen),
            d_v,
            d_r: d_v,
            v_d,
            action_index: action,
            state_index: state,
            n_candidates: candidates.len(),
        }
    }
}
