//! Tabular Q-learning over relay ranks.
//!
//! The state is the grid cell holding the NLOS target combined with a bitmap
//! of BS-centred sectors that contain a known permanent blockage. An action
//! is a rank into the distance-ordered relay candidate list.

use std::collections::{HashMap, VecDeque};
use std::f64::consts::TAU;
use std::io::{BufRead, Write};

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Position, Terrain};
use crate::rml::blockage::BlockageMap;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PolicyParams {
    pub grid_cells_per_side: u32,
    pub sector_count: u32,
    /// Size of the action space, i.e. how many nearest candidates the
    /// policy may choose between.
    pub max_actions: usize,
    pub alpha: f64,
    pub gamma: f64,
    pub epsilon: f64,
    pub epsilon_decay: f64,
    pub epsilon_floor: f64,
    pub replay_capacity: usize,
    pub batch: usize,
    /// Direct updates between exploration resets.
    pub reset_interval: u64,
}

impl Default for PolicyParams {
    fn default() -> Self {
        Self {
            grid_cells_per_side: 10,
            sector_count: 8,
            max_actions: 4,
            alpha: 0.1,
            gamma: 0.9,
            epsilon: 0.1,
            epsilon_decay: 0.995,
            epsilon_floor: 0.01,
            replay_capacity: 1000,
            batch: 32,
            reset_interval: 10_000,
        }
    }
}

impl PolicyParams {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::Validation(format!("policy: {m}")));
        if self.grid_cells_per_side == 0 || self.sector_count == 0 || self.sector_count > 24 {
            return fail("grid_cells_per_side must be >= 1 and sector_count in [1, 24]");
        }
        if self.max_actions == 0 {
            return fail("max_actions must be >= 1");
        }
        if !(0.0..=1.0).contains(&self.alpha) || !(0.0..1.0).contains(&self.gamma) {
            return fail("alpha must lie in [0, 1] and gamma in [0, 1)");
        }
        let unit = 0.0..=1.0;
        if !unit.contains(&self.epsilon) || !unit.contains(&self.epsilon_decay) || !unit.contains(&self.epsilon_floor) {
            return fail("epsilon, epsilon_decay and epsilon_floor must lie in [0, 1]");
        }
        if self.replay_capacity == 0 || self.reset_interval == 0 {
            return fail("replay_capacity and reset_interval must be >= 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub state: u64,
    pub action: usize,
    pub reward: f64,
    pub next_state: u64,
    pub done: bool,
}

/// Discretize the target position and the permanent blockage layout.
pub fn state_index(target: Position, map: &BlockageMap, terrain: &Terrain, params: &PolicyParams) -> u64 {
    let cells = params.grid_cells_per_side as u64;
    let cell_of = |v: f64, extent: f64| -> u64 {
        let c = (v / extent * cells as f64).floor();
        (c.max(0.0) as u64).min(cells - 1)
    };
    let cell = cell_of(target.y, terrain.depth) * cells + cell_of(target.x, terrain.width);

    let sectors = params.sector_count as u64;
    let width = TAU / sectors as f64;
    let mut bitmap = 0u64;
    for entry in map.permanent() {
        let theta = entry.theta.rem_euclid(TAU);
        let sector = ((theta / width).floor() as u64).min(sectors - 1);
        bitmap |= 1 << sector;
    }
    (cell << sectors) | bitmap
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QPolicy {
    pub params: PolicyParams,
    q_table: HashMap<u64, Vec<f64>>,
    pub epsilon: f64,
    replay: VecDeque<Transition>,
    pub update_counter: u64,
    pub resets: u64,
}

impl QPolicy {
    pub fn new(params: PolicyParams) -> Self {
        Self {
            epsilon: params.epsilon,
            replay: VecDeque::with_capacity(params.replay_capacity),
            params,
            q_table: HashMap::new(),
            update_counter: 0,
            resets: 0,
        }
    }

    pub fn q(&self, state: u64, action: usize) -> f64 {
        self.q_table
            .get(&state)
            .and_then(|row| row.get(action))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn set_q(&mut self, state: u64, action: usize, value: f64) {
        let n = self.params.max_actions.max(action + 1);
        let row = self.q_table.entry(state).or_insert_with(|| vec![0.0; n]);
        if row.len() <= action {
            row.resize(action + 1, 0.0);
        }
        row[action] = value;
    }

    fn max_q(&self, state: u64) -> f64 {
        match self.q_table.get(&state) {
            Some(row) => row.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            None => 0.0,
        }
    }

    pub fn replay_len(&self) -> usize {
        self.replay.len()
    }

    pub fn replay(&self) -> impl Iterator<Item = &Transition> {
        self.replay.iter()
    }

    pub fn table_len(&self) -> usize {
        self.q_table.len()
    }

    /// Argmax over the first `n_candidates` actions, lowest index on ties.
    pub fn greedy_action(&self, state: u64, n_candidates: usize) -> Result<usize> {
        if n_candidates == 0 {
            return Err(Error::NoCandidates);
        }
        let mut best = 0;
        let mut best_q = self.q(state, 0);
        for a in 1..n_candidates {
            let q = self.q(state, a);
            if q > best_q {
                best = a;
                best_q = q;
            }
        }
        Ok(best)
    }

    /// Epsilon-greedy choice among `n_candidates` actions.
    pub fn select_action<R: Rng + ?Sized>(&self, state: u64, n_candidates: usize, rng: &mut R) -> Result<usize> {
        if n_candidates == 0 {
            return Err(Error::NoCandidates);
        }
        if rng.random::<f64>() < self.epsilon {
            Ok(rng.random_range(0..n_candidates))
        } else {
            self.greedy_action(state, n_candidates)
        }
    }

    fn apply(&mut self, t: &Transition) {
        let bootstrap = if t.done {
            0.0
        } else {
            self.params.gamma * self.max_q(t.next_state)
        };
        let q = self.q(t.state, t.action);
        let updated = q + self.params.alpha * (t.reward + bootstrap - q);
        self.set_q(t.state, t.action, updated);
    }

    /// One-step Q-learning update; the transition is also stored for replay.
    /// Every `reset_interval` updates exploration restarts from its initial
    /// rate while the learned values are kept.
    pub fn update(&mut self, t: Transition) {
        self.apply(&t);
        if self.replay.len() == self.params.replay_capacity {
            self.replay.pop_front();
        }
        self.replay.push_back(t);
        self.update_counter += 1;
        if self.update_counter.is_multiple_of(self.params.reset_interval) {
            self.epsilon = self.params.epsilon;
            self.resets += 1;
        }
    }

    /// Re-apply the update rule to a uniform sample (without replacement)
    /// of stored transitions.
    pub fn replay_train<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let len = self.replay.len();
        if len == 0 {
            return;
        }
        let picks = index::sample(rng, len, self.params.batch.min(len));
        for i in picks.iter() {
            let t = self.replay[i];
            self.apply(&t);
        }
    }

    /// Multiplicative exploration decay, floored.
    pub fn end_episode(&mut self) {
        self.epsilon = (self.epsilon * self.params.epsilon_decay).max(self.params.epsilon_floor);
    }

    /// Write `state_index action q_value` triples, sorted, one per line.
    pub fn export<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "# state_index action q_value")?;
        let mut states: Vec<_> = self.q_table.keys().copied().collect();
        states.sort_unstable();
        for s in states {
            for (a, q) in self.q_table[&s].iter().enumerate() {
                writeln!(out, "{s} {a} {q:?}")?;
            }
        }
        Ok(())
    }

    /// Replace the Q-table with one read from [`QPolicy::export`] output.
    pub fn import<R: BufRead>(&mut self, input: R) -> Result<()> {
        let mut table = HashMap::new();
        for (i, line) in input.lines().enumerate() {
            let line_no = i + 1;
            let line = line.map_err(|e| Error::Snapshot {
                line: line_no,
                message: e.to_string(),
            })?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |m: String| Error::Snapshot {
                line: line_no,
                message: m,
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [s, a, q] = fields[..] else {
                return Err(bad(format!("expected 3 fields, got {}", fields.len())));
            };
            let s: u64 = s.parse().map_err(|e| bad(format!("state `{s}`: {e}")))?;
            let a: usize = a.parse().map_err(|e| bad(format!("action `{a}`: {e}")))?;
            let q: f64 = q.parse().map_err(|e| bad(format!("q value `{q}`: {e}")))?;
            let row: &mut Vec<f64> = table.entry(s).or_insert_with(|| vec![0.0; self.params.max_actions]);
            if row.len() <= a {
                row.resize(a + 1, 0.0);
            }
            row[a] = q;
        }
        self.q_table = table;
        Ok(())
    }
}
