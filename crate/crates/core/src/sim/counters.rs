//! Incremental observables, updated from per-tick deltas so that scalar
//! metrics never require materializing the networks.
//!
//! The knowledge giant cluster is tracked with a growing union-find only
//! while arcs can never disappear (no forgetting). Otherwise it is rebuilt
//! from the known lists whenever a row is requested.

use super::agent::{Agent, AgentId, BeliefChange, GroupId};
use crate::percolation::{
    heterogeneity_from_sums, ratio, DegreeSums, GrowingComponents, MetricsRow, PercolationPoint,
    UnionFind,
};

/// Above this many `(target, group)` cells the belief table is skipped and
/// wrong beliefs are counted by scanning the agents.
const BELIEF_TABLE_LIMIT: usize = 1 << 24;

#[derive(Debug, Clone)]
pub struct Counters {
    n: usize,
    ng: usize,
    kin: Vec<u32>,
    kout: Vec<u32>,
    arcs: u64,
    sum_kin_kout: u64,
    knowledge_active: u32,
    knowledge_uf: Option<GrowingComponents>,
    /// `believers[j * ng + g]`: agents believing `j` is in group `g`.
    believers: Option<Vec<u32>>,
    wrong: u64,
    deg: Vec<u32>,
    edges: u64,
    sum_k2: u64,
    meeting_active: u32,
    meeting_uf: GrowingComponents,
}

impl Counters {
    pub(crate) fn new(n: usize, ng: u32, monotone_knowledge: bool) -> Self {
        let ng = ng as usize;
        Self {
            n,
            ng,
            kin: vec![0; n],
            kout: vec![0; n],
            arcs: 0,
            sum_kin_kout: 0,
            knowledge_active: 0,
            knowledge_uf: monotone_knowledge.then(|| GrowingComponents::new(n)),
            believers: (n.saturating_mul(ng) <= BELIEF_TABLE_LIMIT).then(|| vec![0; n * ng]),
            wrong: 0,
            deg: vec![0; n],
            edges: 0,
            sum_k2: 0,
            meeting_active: 0,
            meeting_uf: GrowingComponents::new(n),
        }
    }

    pub fn arcs(&self) -> u64 {
        self.arcs
    }

    pub fn edges(&self) -> u64 {
        self.edges
    }

    fn possible_arcs(&self) -> u64 {
        let n = self.n as u64;
        n * n.saturating_sub(1)
    }

    pub fn mk(&self) -> f64 {
        if self.n < 2 {
            1.0
        } else {
            ratio(self.arcs, self.possible_arcs())
        }
    }

    pub fn meeting_rate(&self) -> f64 {
        if self.n < 2 {
            1.0
        } else {
            ratio(self.edges, self.possible_arcs() / 2)
        }
    }

    fn knowledge_sums(&self) -> DegreeSums {
        DegreeSums {
            first: self.arcs,
            second: self.sum_kin_kout,
        }
    }

    fn meeting_sums(&self) -> DegreeSums {
        DegreeSums {
            first: 2 * self.edges,
            second: self.sum_k2,
        }
    }

    /// `(knowledge, meeting)` percolating flags, from the exact sums.
    pub fn percolating(&self) -> (bool, bool) {
        let f = |directed, sums| heterogeneity_from_sums(directed, sums).is_some_and(|h| h.percolating);
        (f(true, self.knowledge_sums()), f(false, self.meeting_sums()))
    }

    /// Knowledge arcs over possible arcs and meeting edges over possible edges.
    pub fn link_fractions(&self) -> (f64, f64) {
        (
            ratio(self.arcs, self.possible_arcs()),
            ratio(self.edges, self.possible_arcs() / 2),
        )
    }

    fn touch_knowledge(&mut self, i: usize) {
        if self.kin[i] + self.kout[i] == 1 {
            self.knowledge_active += 1;
        }
    }

    fn add_arc(&mut self, i: usize, j: usize) {
        self.sum_kin_kout += u64::from(self.kin[i]);
        self.kout[i] += 1;
        self.touch_knowledge(i);
        self.sum_kin_kout += u64::from(self.kout[j]);
        self.kin[j] += 1;
        self.touch_knowledge(j);
        self.arcs += 1;
        if let Some(uf) = &mut self.knowledge_uf {
            uf.add_link(i as u32, j as u32);
        }
    }

    fn remove_arc(&mut self, i: usize, j: usize) {
        debug_assert!(self.knowledge_uf.is_none(), "arc removed from monotone counters");
        self.sum_kin_kout -= u64::from(self.kin[i]);
        self.kout[i] -= 1;
        if self.kin[i] + self.kout[i] == 0 {
            self.knowledge_active -= 1;
        }
        self.sum_kin_kout -= u64::from(self.kout[j]);
        self.kin[j] -= 1;
        if self.kin[j] + self.kout[j] == 0 {
            self.knowledge_active -= 1;
        }
        self.arcs -= 1;
    }

    fn believe(&mut self, j: usize, g: GroupId, delta: i64, true_group: GroupId) {
        if let Some(table) = &mut self.believers {
            let cell = &mut table[j * self.ng + g.0 as usize];
            *cell = (i64::from(*cell) + delta) as u32;
        }
        if g != true_group {
            self.wrong = (self.wrong as i64 + delta) as u64;
        }
    }

    /// Applies the known-list edits of agent `owner`. `groups` are the true
    /// groups at the time of the edit.
    pub(crate) fn apply_beliefs(&mut self, owner: AgentId, changes: &[BeliefChange], groups: &[GroupId]) {
        let i = owner.index();
        for c in changes {
            let j = c.other.index();
            match (c.old, c.new) {
                (None, Some(_)) => self.add_arc(i, j),
                (Some(_), None) => self.remove_arc(i, j),
                _ => {}
            }
            if let Some(g) = c.old {
                self.believe(j, g, -1, groups[j]);
            }
            if let Some(g) = c.new {
                self.believe(j, g, 1, groups[j]);
            }
        }
    }

    /// Agent `j` moved from group `old` to `new`; beliefs held about it are
    /// re-scored against the new truth.
    pub(crate) fn group_changed(&mut self, j: AgentId, old: GroupId, new: GroupId) {
        if let Some(table) = &self.believers {
            let row = j.index() * self.ng;
            let (held_old, held_new) = (table[row + old.0 as usize], table[row + new.0 as usize]);
            self.wrong = self.wrong + u64::from(held_old) - u64::from(held_new);
        }
    }

    pub(crate) fn add_edge(&mut self, a: AgentId, b: AgentId) {
        for x in [a.index(), b.index()] {
            self.sum_k2 += 2 * u64::from(self.deg[x]) + 1;
            self.deg[x] += 1;
            if self.deg[x] == 1 {
                self.meeting_active += 1;
            }
        }
        self.edges += 1;
        self.meeting_uf.add_link(a.0, b.0);
    }

    fn wrong_beliefs(&self, agents: &[Agent]) -> u64 {
        if self.believers.is_some() {
            return self.wrong;
        }
        agents
            .iter()
            .map(|a| {
                a.known
                    .iter()
                    .filter(|e| e.other != a.id && e.believed_group != agents[e.other.index()].group)
                    .count() as u64
            })
            .sum()
    }

    fn knowledge_giant(&mut self, agents: &[Agent]) -> (u32, u64) {
        if let Some(uf) = &mut self.knowledge_uf {
            return uf.giant();
        }
        let mut uf = UnionFind::new(self.n);
        for a in agents {
            for e in &a.known {
                if e.other != a.id {
                    uf.add_link(a.id.0, e.other.0);
                }
            }
        }
        match uf.giant_root() {
            Some(r) => (uf.size(r), uf.links(r)),
            None => (0, 0),
        }
    }

    /// Full metrics row for the current state.
    pub(crate) fn row(&mut self, tick: u64, agents: &[Agent]) -> MetricsRow {
        let n = self.n as u64;
        let possible_arcs = self.possible_arcs();
        let possible_edges = possible_arcs / 2;

        let (kg_nodes, kg_links) = self.knowledge_giant(agents);
        let het = heterogeneity_from_sums(true, self.knowledge_sums());
        let knowledge = PercolationPoint {
            tick,
            k: het.map(|h| h.k),
            percolating: het.is_some_and(|h| h.percolating),
            ps: ratio(u64::from(self.knowledge_active), n),
            pb: ratio(self.arcs, possible_arcs),
            psg: ratio(u64::from(kg_nodes), n),
            pbg: ratio(kg_links, possible_arcs),
            links: self.arcs,
        };

        let (mg_nodes, mg_links) = self.meeting_uf.giant();
        let het = heterogeneity_from_sums(false, self.meeting_sums());
        let meeting = PercolationPoint {
            tick,
            k: het.map(|h| h.k),
            percolating: het.is_some_and(|h| h.percolating),
            ps: ratio(u64::from(self.meeting_active), n),
            pb: ratio(self.edges, possible_edges),
            psg: ratio(u64::from(mg_nodes), n),
            pbg: ratio(mg_links, possible_edges),
            links: self.edges,
        };

        MetricsRow {
            tick,
            mk: self.mk(),
            meeting_rate: self.meeting_rate(),
            delta_mk: ratio(self.wrong_beliefs(agents), possible_arcs),
            knowledge,
            meeting,
        }
    }
}
