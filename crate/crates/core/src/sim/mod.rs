//! Discrete-time engine: agents walking a torus, meeting within the
//! overhearing radius and relaying group knowledge.
//!
//! One [`SimState::step`] runs, in order: movement, meeting detection,
//! knowledge exchange, forgetting, group change, then advances the tick.
//! Events produced during the step carry the new tick value.
//!
//! All randomness comes from the config seed. A master generator places
//! the agents and seeds one generator per agent; every per-agent draw
//! (movement, forgetting, group change) comes from that agent's own
//! stream, so results do not depend on how the work is split across
//! threads.

mod agent;
mod counters;
mod spatial;

use rand::{Rng, SeedableRng};
use rand_pcg::{Pcg64, Pcg64Mcg};
use serde::{Deserialize, Serialize};

use crate::config::SimConfig;
use crate::error::{Error, Result};
use crate::exec::{self, Execution};

pub use agent::{Agent, AgentId, GroupId, KnownEntry, MetEntry};
pub(crate) use agent::{merge_known, BeliefChange};
pub use counters::Counters;
use spatial::BucketGrid;

/// Entry of the optional event log.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Event {
    Meeting {
        tick: u64,
        a: AgentId,
        b: AgentId,
    },
    /// `receiver` merged what `source` knew; `learned` entries were added
    /// or replaced.
    Exchange {
        tick: u64,
        receiver: AgentId,
        source: AgentId,
        learned: u32,
    },
}

#[derive(Debug, Clone)]
pub struct SimState {
    config: SimConfig,
    tick: u64,
    agents: Vec<Agent>,
    rngs: Vec<Pcg64Mcg>,
    exec: Execution,
    grid: BucketGrid,
    counters: Counters,
    event_log: Option<Vec<Event>>,
}

impl SimState {
    /// Places `N` agents uniformly at random, assigns groups uniformly and
    /// gives every agent knowledge of itself only.
    pub fn init(config: &SimConfig) -> Result<Self> {
        config.validate()?;
        let mut master = Pcg64::seed_from_u64(config.seed);
        let agents: Vec<Agent> = (0..config.n)
            .map(|i| {
                let pos = (
                    master.random_range(0..config.d_side),
                    master.random_range(0..config.d_side),
                );
                let group = GroupId(master.random_range(0..config.ng));
                Agent::new(AgentId(i), group, pos)
            })
            .collect();
        let rngs = (0..config.n)
            .map(|_| Pcg64Mcg::seed_from_u64(master.random()))
            .collect();
        Ok(Self::assemble(config.clone(), agents, rngs))
    }

    /// Builds a state from explicit agents (ids must be `0..N` in order).
    /// Per-agent generators are derived from the config seed.
    pub fn with_agents(config: &SimConfig, agents: Vec<Agent>) -> Result<Self> {
        let mut config = config.clone();
        config.n = u32::try_from(agents.len())
            .map_err(|_| Error::Config("too many agents".into()))?;
        config.validate()?;
        for (i, a) in agents.iter().enumerate() {
            if a.id.index() != i {
                return Err(Error::Config(format!("agent at index {i} has id {}", a.id)));
            }
            if a.pos.0 >= config.d_side || a.pos.1 >= config.d_side {
                return Err(Error::Config(format!("agent {i} placed off the grid")));
            }
            a.check_invariants(agents.len(), config.ng).map_err(Error::Config)?;
        }
        let mut master = Pcg64::seed_from_u64(config.seed);
        let rngs = (0..agents.len())
            .map(|_| Pcg64Mcg::seed_from_u64(master.random()))
            .collect();
        let mut state = Self::assemble(config, Vec::new(), rngs);
        // replay the supplied lists through the counters
        let groups: Vec<GroupId> = agents.iter().map(|a| a.group).collect();
        for a in &agents {
            let changes: Vec<BeliefChange> = a
                .known
                .iter()
                .filter(|e| e.other != a.id)
                .map(|e| BeliefChange {
                    other: e.other,
                    old: None,
                    new: Some(e.believed_group),
                })
                .collect();
            state.counters.apply_beliefs(a.id, &changes, &groups);
            for e in a.met.iter().filter(|e| e.other > a.id) {
                state.counters.add_edge(a.id, e.other);
            }
        }
        state.agents = agents;
        Ok(state)
    }

    fn assemble(config: SimConfig, agents: Vec<Agent>, rngs: Vec<Pcg64Mcg>) -> Self {
        let n = config.n as usize;
        Self {
            grid: BucketGrid::new(config.d_side, config.oh, n),
            counters: Counters::new(n, config.ng, config.pforg == 0.0),
            config,
            tick: 0,
            agents,
            rngs,
            exec: Execution::default(),
            event_log: None,
        }
    }

    pub fn set_execution(&mut self, exec: Execution) {
        self.exec = exec;
    }

    /// Starts recording meeting and exchange events.
    pub fn enable_event_log(&mut self) {
        self.event_log.get_or_insert_with(Vec::new);
    }

    pub fn event_log(&self) -> Option<&[Event]> {
        self.event_log.as_deref()
    }

    pub fn take_event_log(&mut self) -> Option<Vec<Event>> {
        self.event_log.as_mut().map(std::mem::take)
    }

    pub fn tick(&self) -> u64 {
        self.tick
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn counters(&self) -> &Counters {
        &self.counters
    }

    /// Metrics row for the current tick.
    pub fn metrics_row(&mut self) -> crate::percolation::MetricsRow {
        self.counters.row(self.tick, &self.agents)
    }

    /// Checks every per-agent invariant plus meeting symmetry.
    pub fn check_invariants(&self) -> Result<()> {
        let n = self.agents.len();
        for a in &self.agents {
            a.check_invariants(n, self.config.ng).map_err(Error::Invariant)?;
            if a.known.len() > n || a.met.len() > n {
                return Err(Error::Invariant(format!("agent {} lists exceed N", a.id)));
            }
        }
        crate::netcap::capture(self).map(|_| ())
    }

    /// Displaces every agent by an independent step in `[-m, m]^2`,
    /// wrapping around the torus.
    pub fn move_all(&mut self) {
        let m = i64::from(self.config.m);
        if m == 0 {
            return;
        }
        let d = i64::from(self.config.d_side);
        exec::zip_for_each_mut(self.exec, &mut self.agents, &mut self.rngs, |agent, rng| {
            let dx = rng.random_range(-m..=m);
            let dy = rng.random_range(-m..=m);
            agent.pos = (
                (i64::from(agent.pos.0) + dx).rem_euclid(d) as u32,
                (i64::from(agent.pos.1) + dy).rem_euclid(d) as u32,
            );
        });
    }

    /// Every unordered pair within the overhearing radius, as `(low, high)`
    /// sorted ascending.
    pub fn detect_meetings(&mut self) -> Vec<(AgentId, AgentId)> {
        let positions: Vec<(u32, u32)> = self.agents.iter().map(|a| a.pos).collect();
        self.grid.rebuild(&positions);
        self.grid
            .pairs(&positions, self.config.oh, self.config.metric, self.exec)
    }

    /// Records the meetings and exchanges knowledge for every pair.
    ///
    /// All merges read the known lists as they were before this call. Each
    /// agent folds in its partners by ascending id: first the first-hand
    /// observation of the partner, stamped with the new tick, then the
    /// partner's list with its original timestamps.
    pub fn exchange_knowledge(&mut self, pairs: &[(AgentId, AgentId)]) {
        if pairs.is_empty() {
            return;
        }
        let stamp = self.tick + 1;
        let n = self.agents.len();

        // partners per agent in CSR form; sorted input keeps each row ascending
        let mut starts = vec![0u32; n + 1];
        for &(a, b) in pairs {
            starts[a.index() + 1] += 1;
            starts[b.index() + 1] += 1;
        }
        for i in 1..=n {
            starts[i] += starts[i - 1];
        }
        let mut fill = starts.clone();
        let mut partners = vec![AgentId(0); pairs.len() * 2];
        for &(a, b) in pairs {
            for (x, y) in [(a, b), (b, a)] {
                partners[fill[x.index()] as usize] = y;
                fill[x.index()] += 1;
            }
        }
        let mut involved: Vec<AgentId> = (0..n)
            .filter(|&i| starts[i + 1] > starts[i])
            .map(|i| AgentId(i as u32))
            .collect();
        involved.sort_unstable();

        let agents = &self.agents;
        let merged = exec::map_indexed(self.exec, &involved, |_, &owner| {
            let me = &agents[owner.index()];
            let mut known = me.known.clone();
            let mut changes = Vec::new();
            let mut learned = Vec::new();
            let row = &partners[starts[owner.index()] as usize..starts[owner.index() + 1] as usize];
            for &p in row {
                let before = changes.len();
                let partner = &agents[p.index()];
                let first_hand = [KnownEntry {
                    other: p,
                    believed_group: partner.group,
                    timestamp: stamp,
                }];
                known = merge_known(&known, &first_hand, owner, &mut changes);
                known = merge_known(&known, &partner.known, owner, &mut changes);
                learned.push((p, (changes.len() - before) as u32));
            }
            (known, changes, learned)
        });

        let groups: Vec<GroupId> = self.agents.iter().map(|a| a.group).collect();
        for (&owner, (known, changes, learned)) in involved.iter().zip(merged) {
            self.counters.apply_beliefs(owner, &changes, &groups);
            self.agents[owner.index()].known = known;
            if let Some(log) = &mut self.event_log {
                log.extend(learned.into_iter().map(|(source, learned)| Event::Exchange {
                    tick: stamp,
                    receiver: owner,
                    source,
                    learned,
                }));
            }
        }

        for &(a, b) in pairs {
            let (ga, gb) = (groups[a.index()], groups[b.index()]);
            let first = self.agents[a.index()].record_meeting(b, gb);
            self.agents[b.index()].record_meeting(a, ga);
            if first {
                self.counters.add_edge(a, b);
            }
            if let Some(log) = &mut self.event_log {
                log.push(Event::Meeting { tick: stamp, a, b });
            }
        }
    }

    /// With probability `pforg` per agent, deletes one uniformly chosen
    /// entry other than the self-entry.
    pub fn apply_forgetting(&mut self) {
        let p = self.config.pforg;
        if p == 0.0 {
            return;
        }
        let deleted = exec::zip_map_mut(self.exec, &mut self.agents, &mut self.rngs, |agent, rng| {
            if !rng.random_bool(p) || agent.known.len() < 2 {
                return None;
            }
            let own = agent.self_index();
            let mut idx = rng.random_range(0..agent.known.len() - 1);
            if idx >= own {
                idx += 1;
            }
            let e = agent.known.remove(idx);
            Some((e.other, e.believed_group))
        });
        let groups: Vec<GroupId> = self.agents.iter().map(|a| a.group).collect();
        for (i, d) in deleted.into_iter().enumerate() {
            if let Some((other, g)) = d {
                let change = BeliefChange {
                    other,
                    old: Some(g),
                    new: None,
                };
                self.counters.apply_beliefs(AgentId(i as u32), &[change], &groups);
            }
        }
    }

    /// With probability `p_change` per agent (only when `chgr` is set),
    /// switches to a uniformly chosen other group and restamps the
    /// self-entry.
    pub fn apply_group_changes(&mut self) {
        if !self.config.chgr || self.config.p_change == 0.0 || self.config.ng < 2 {
            return;
        }
        let (p, ng, stamp) = (self.config.p_change, self.config.ng, self.tick + 1);
        let switched = exec::zip_map_mut(self.exec, &mut self.agents, &mut self.rngs, |agent, rng| {
            if !rng.random_bool(p) {
                return None;
            }
            let old = agent.group;
            let mut g = rng.random_range(0..ng - 1);
            if g >= old.0 {
                g += 1;
            }
            agent.group = GroupId(g);
            let own = agent.self_index();
            agent.known[own].believed_group = agent.group;
            agent.known[own].timestamp = stamp;
            Some((old, agent.group))
        });
        for (i, s) in switched.into_iter().enumerate() {
            if let Some((old, new)) = s {
                self.counters.group_changed(AgentId(i as u32), old, new);
            }
        }
    }

    /// One full tick.
    pub fn step(&mut self) {
        self.move_all();
        let pairs = self.detect_meetings();
        self.exchange_knowledge(&pairs);
        self.apply_forgetting();
        self.apply_group_changes();
        self.tick += 1;
    }
}
