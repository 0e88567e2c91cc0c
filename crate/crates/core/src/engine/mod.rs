//! Time-stepped scenario loop.
//!
//! Each step the base station refreshes its blockage map when due, emits any
//! broadcast that has come due, trains the relay policy and moves the
//! vehicles. Every broadcast yields one [`DeliveryRecord`] per vehicle.

pub mod config;
pub mod metrics;
pub mod trace;

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

pub use config::{BsPlacement, Mode, ScenarioConfig};
pub use metrics::{compute_metrics, DeliveryRecord, MetricsRecord, Outcome};

use rand::Rng;

use crate::channel::{attempt_leg, link_latency, link_success_prob, ChannelParams, HopOutcome, LinkState};
use crate::error::{Error, Result};
use crate::geometry::{is_clear_filtered, place_blockages, Blockage, Terrain};
use crate::mobility::{rwp_init, rwp_step, MobilityParams, Vehicle, VehicleId};
use crate::rml::{
    delivery_reward, flow_estimate, BlockageMap, BroadcastMessage, FlowEstimate, QPolicy, RelayDecision, RelaySelector,
    SelectionMode, Snapshot, Transition,
};
use crate::rng::{pair_stream, stream, SimRng, Stream};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioOutcome {
    pub metrics: MetricsRecord,
    pub records: Vec<DeliveryRecord>,
    /// NLOS population forecasts taken at every map refresh.
    pub flow: Vec<FlowEstimate>,
    pub relay_decisions: u64,
    pub policy: QPolicy,
}

#[derive(Debug, Clone, Default)]
struct FlowTracker {
    previous: Option<Vec<bool>>,
    arrivals: u32,
    departures: u32,
}

pub struct Scenario {
    cfg: ScenarioConfig,
    terrain: Terrain,
    mobility: MobilityParams,
    buildings: Vec<Blockage>,
    vehicles: Vec<Vehicle>,
    map: BlockageMap,
    policy: QPolicy,
    selector: RelaySelector,
    mobility_rng: SimRng,
    policy_rng: SimRng,
    step_index: u64,
    next_message: u64,
    pending: Vec<VecDeque<f64>>,
    records: Vec<DeliveryRecord>,
    flow_tracker: FlowTracker,
    flow: Vec<FlowEstimate>,
    relay_decisions: u64,
}

impl Scenario {
    /// Build the world for `cfg`: seeded building layout and vehicles.
    pub fn new(cfg: ScenarioConfig) -> Result<Self> {
        cfg.validate()?;
        let terrain = cfg.terrain();
        let buildings = place_blockages(
            &terrain,
            &cfg.placement(),
            &mut stream(cfg.scenario.seed, Stream::Blockages),
        )?;
        let vehicles = rwp_init(
            &terrain,
            &buildings,
            cfg.scenario.n_vehicles,
            &cfg.mobility_params(),
            &mut stream(cfg.scenario.seed, Stream::Vehicles),
        )?;
        Self::from_parts(cfg, buildings, vehicles)
    }

    /// Use a hand-built world instead of the seeded layout.
    pub fn from_parts(cfg: ScenarioConfig, buildings: Vec<Blockage>, vehicles: Vec<Vehicle>) -> Result<Self> {
        cfg.validate()?;
        let terrain = cfg.terrain();
        let seed = cfg.scenario.seed;
        Ok(Self {
            terrain,
            mobility: cfg.mobility_params(),
            policy: QPolicy::new(cfg.policy.clone()),
            pending: vec![VecDeque::new(); vehicles.len()],
            buildings,
            vehicles,
            map: BlockageMap::default(),
            selector: RelaySelector::default(),
            mobility_rng: stream(seed, Stream::Mobility),
            policy_rng: stream(seed, Stream::Policy),
            step_index: 0,
            next_message: 0,
            records: Vec::new(),
            flow_tracker: FlowTracker::default(),
            flow: Vec::new(),
            relay_decisions: 0,
            cfg,
        })
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.cfg
    }

    pub fn terrain(&self) -> &Terrain {
        &self.terrain
    }

    pub fn buildings(&self) -> &[Blockage] {
        &self.buildings
    }

    pub fn vehicles(&self) -> &[Vehicle] {
        &self.vehicles
    }

    pub fn vehicles_mut(&mut self) -> &mut [Vehicle] {
        &mut self.vehicles
    }

    pub fn policy(&self) -> &QPolicy {
        &self.policy
    }

    pub fn map(&self) -> &BlockageMap {
        &self.map
    }

    pub fn records(&self) -> &[DeliveryRecord] {
        &self.records
    }

    pub fn time_s(&self) -> f64 {
        self.step_index as f64 * self.cfg.scenario.dt_s
    }

    fn learning(&self) -> bool {
        self.cfg.scenario.mode == Mode::Rml && self.cfg.scenario.selection == SelectionMode::Learned
    }

    fn exploring(&self) -> bool {
        self.time_s() < self.cfg.scenario.warmup_fraction * self.cfg.scenario.sim_time_s - 1e-9
    }

    /// Buildings plus the current footprints of large vehicles.
    pub fn all_blockages(&self) -> Vec<Blockage> {
        let mut all = self.buildings.clone();
        all.extend(self.vehicles.iter().filter_map(Vehicle::footprint));
        all
    }

    /// Line of sight from the base station to every vehicle.
    pub fn bs_visibility(&self, blockages: &[Blockage]) -> Vec<bool> {
        let bs = self.terrain.bs_antenna();
        self.vehicles
            .iter()
            .map(|v| is_clear_filtered(blockages, bs, v.antenna(), |b| b.owner == Some(v.id)))
            .collect()
    }

    fn refresh_map(&mut self) {
        let now = self.time_s();
        let blockages = self.all_blockages();
        self.map
            .survey(self.terrain.bs_position, &blockages, self.cfg.threshold(), now);

        let nlos: Vec<bool> = self.bs_visibility(&blockages).into_iter().map(|los| !los).collect();
        if let Some(prev) = &self.flow_tracker.previous {
            for (was, is) in prev.iter().zip(&nlos) {
                match (was, is) {
                    (false, true) => self.flow_tracker.arrivals += 1,
                    (true, false) => self.flow_tracker.departures += 1,
                    _ => {}
                }
            }
        }
        if now > 0.0 {
            let mut est = FlowEstimate {
                n_current: nlos.iter().filter(|&&n| n).count() as u32,
                m_constant: self.cfg.scenario.flow_m_constant,
                t_s: self.cfg.scenario.map_refresh_s,
                t_e: now,
                arrivals: self.flow_tracker.arrivals,
                departures: self.flow_tracker.departures,
                ..Default::default()
            };
            if flow_estimate(&mut est).is_ok() {
                self.flow.push(est);
            }
        }
        self.flow_tracker.previous = Some(nlos);
    }

    /// Deliver `message` to every vehicle from the current geometry.
    pub fn broadcast_step(&mut self, message: BroadcastMessage) -> Vec<DeliveryRecord> {
        let blockages = self.all_blockages();
        let bs_los = self.bs_visibility(&blockages);
        let now = self.time_s();
        let seed = self.cfg.scenario.seed;
        let channel = self.cfg.channel.clone();
        let mode = self.cfg.scenario.mode;
        let selection = self.cfg.scenario.selection;
        let learning = self.learning();
        let explore = learning && self.exploring();
        let bs = self.terrain.bs_position;

        let mut out = Vec::with_capacity(self.vehicles.len());
        for i in 0..self.vehicles.len() {
            let vehicle = &self.vehicles[i];
            let vid = vehicle.id;
            let was_nlos = !bs_los[i];

            let queue = &mut self.pending[i];
            while queue.front().is_some_and(|&done| done <= now) {
                queue.pop_front();
            }
            if queue.len() >= channel.queue_capacity {
                out.push(DeliveryRecord {
                    message_id: message.id,
                    vehicle_id: vid,
                    sent_at: message.created_at,
                    outcome: Outcome::Failed,
                    latency_ms: None,
                    hops: 0,
                    retries: 0,
                    was_nlos,
                });
                continue;
            }

            let direct = |state: LinkState| {
                let d = bs.distance(&vehicle.position);
                let p = link_success_prob(d, state, &channel);
                let mut rng = pair_stream(seed, Stream::Direct, message.id, vid.0);
                let leg = attempt_leg(p, channel.max_retries, &mut rng);
                (
                    leg.delivered,
                    vec![HopOutcome {
                        distance: d,
                        retries: leg.retries,
                    }],
                )
            };

            let (delivered, hops) = if !was_nlos {
                direct(LinkState::Los)
            } else if mode == Mode::Baseline {
                direct(LinkState::Nlos)
            } else {
                let snapshot = Snapshot {
                    terrain: &self.terrain,
                    blockages: &blockages,
                    vehicles: &self.vehicles,
                    bs_los: &bs_los,
                    map: &self.map,
                };
                let mut leg_rng = pair_stream(seed, Stream::Relay, message.id, vid.0);
                let attempt = relay_attempt(
                    &snapshot,
                    vid,
                    &mut self.selector,
                    &mut self.policy,
                    &channel,
                    RelayOptions {
                        selection,
                        explore,
                        learn: learning,
                    },
                    &mut self.policy_rng,
                    &mut leg_rng,
                );
                if attempt.decision.chosen.is_none() {
                    // Nobody can relay: fall back to the plain NLOS broadcast.
                    direct(LinkState::Nlos)
                } else {
                    self.relay_decisions += 1;
                    (attempt.delivered, attempt.hops)
                }
            };

            let latency = link_latency(&hops, &channel);
            self.pending[i].push_back(now + latency / 1e3);
            out.push(DeliveryRecord {
                message_id: message.id,
                vehicle_id: vid,
                sent_at: message.created_at,
                outcome: if delivered { Outcome::Delivered } else { Outcome::Failed },
                latency_ms: delivered.then_some(latency),
                hops: hops.len() as u32,
                retries: hops.iter().map(|h| h.retries).sum(),
                was_nlos,
            });
        }
        if explore {
            self.policy.end_episode();
        }
        out
    }

    fn emit_due(&mut self, until_s: f64) {
        let total = self.cfg.message_count();
        let interval_s = self.cfg.scenario.interpacket_ms / 1e3;
        while self.next_message < total && self.next_message as f64 * interval_s <= until_s + 1e-9 {
            let message = BroadcastMessage {
                id: self.next_message,
                payload_bytes: self.cfg.channel.packet_bytes,
                created_at: self.next_message as f64 * interval_s,
            };
            self.next_message += 1;
            let recs = self.broadcast_step(message);
            self.records.extend(recs);
        }
    }

    /// Advance the world by one `dt`.
    pub fn step(&mut self) {
        let now = self.time_s();
        if self.map.is_due(now, self.cfg.scenario.map_refresh_s) {
            self.refresh_map();
        }
        self.emit_due(now);
        if self.learning() {
            self.policy.replay_train(&mut self.policy_rng);
        }
        let dt = self.cfg.scenario.dt_s;
        for i in 0..self.vehicles.len() {
            let next = rwp_step(
                &self.vehicles[i],
                &self.terrain,
                &self.buildings,
                dt,
                &self.mobility,
                &mut self.mobility_rng,
            );
            self.vehicles[i] = next;
        }
        self.step_index += 1;
    }

    pub fn run(mut self) -> Result<ScenarioOutcome> {
        for _ in 0..self.cfg.step_count() {
            self.step();
        }
        // Broadcasts scheduled after the last whole step.
        self.emit_due(f64::INFINITY);
        let metrics = compute_metrics(
            &self.records,
            self.cfg.scenario.sim_time_s,
            self.cfg.channel.packet_bytes,
        )?;
        Ok(ScenarioOutcome {
            metrics,
            records: self.records,
            flow: self.flow,
            relay_decisions: self.relay_decisions,
            policy: self.policy,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RelayOptions {
    pub selection: SelectionMode,
    /// Let the policy pick epsilon-greedy instead of greedily.
    pub explore: bool,
    /// Feed the outcome back into the policy.
    pub learn: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelayAttempt {
    pub decision: RelayDecision,
    pub delivered: bool,
    /// Empty when no relay was available.
    pub hops: Vec<HopOutcome>,
    pub reward: Option<f64>,
}

/// One relayed delivery to an NLOS `target`: choose a relay, run the
/// BS -> relay and relay -> target legs and, when `learn` is set, record the
/// transition as a one-step episode.
#[allow(clippy::too_many_arguments)]
pub fn relay_attempt<R1: Rng + ?Sized, R2: Rng + ?Sized>(
    snapshot: &Snapshot<'_>,
    target: VehicleId,
    selector: &mut RelaySelector,
    policy: &mut QPolicy,
    channel: &ChannelParams,
    opts: RelayOptions,
    policy_rng: &mut R1,
    leg_rng: &mut R2,
) -> RelayAttempt {
    let decision = selector.select(
        snapshot,
        target,
        policy,
        channel,
        opts.selection,
        opts.explore,
        policy_rng,
    );
    let Some(c) = decision.chosen else {
        return RelayAttempt {
            decision,
            delivered: false,
            hops: Vec::new(),
            reward: None,
        };
    };
    let first = attempt_leg(c.bs_link.success_prob, channel.max_retries, leg_rng);
    let mut hops = vec![HopOutcome {
        distance: c.bs_link.distance,
        retries: first.retries,
    }];
    let mut delivered = first.delivered;
    if delivered {
        let second = attempt_leg(c.target_link.success_prob, channel.max_retries, leg_rng);
        hops.push(HopOutcome {
            distance: c.target_link.distance,
            retries: second.retries,
        });
        delivered = second.delivered;
    }
    let mut reward = None;
    if opts.learn {
        let r = delivery_reward(delivered, link_latency(&hops, channel));
        policy.update(Transition {
            state: decision.state_index,
            action: decision.action_index,
            reward: r,
            next_state: decision.state_index,
            done: true,
        });
        reward = Some(r);
    }
    RelayAttempt {
        decision,
        delivered,
        hops,
        reward,
    }
}

/// Build and run one scenario end to end.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioOutcome> {
    let scenario = Scenario::new(cfg.clone()).map_err(|e| match e {
        Error::Validation(m) => Error::Config(m),
        other => other,
    })?;
    scenario.run()
}
