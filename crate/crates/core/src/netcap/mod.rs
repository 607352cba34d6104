//! Meeting and knowledge networks captured from simulation state.

mod csv_io;
mod pajek;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::config::SimConfig;
use crate::error::{Error, Result};
use crate::sim::{GroupId, SimState};

pub use csv_io::{
    export_csv, export_snapshot_csv, knowledge_file_name, meeting_file_name, read_knowledge_csv,
    read_meeting_csv, read_metrics_csv, write_knowledge_csv, write_meeting_csv, write_metrics_csv,
    METRICS_HEADER,
};
pub use pajek::{export_pajek, parse_pajek, read_pajek, write_pajek, PajekGraph, PajekLinks};

/// Read access shared by both network kinds.
pub trait LinkGraph {
    fn node_count(&self) -> usize;
    fn link_count(&self) -> usize;
    fn is_directed(&self) -> bool;
    /// Visits every link once; undirected links as `(low, high)`.
    fn for_each_link(&self, f: &mut dyn FnMut(u32, u32));

    /// `N(N-1)` for directed graphs, `N(N-1)/2` for undirected ones.
    fn possible_links(&self) -> u64 {
        let n = self.node_count() as u64;
        let ordered = n * n.saturating_sub(1);
        if self.is_directed() {
            ordered
        } else {
            ordered / 2
        }
    }
}

/// Weighted undirected graph of who met whom; weight = meeting count.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MeetingNetwork {
    n: usize,
    edges: BTreeMap<(u32, u32), u64>,
}

impl MeetingNetwork {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            edges: BTreeMap::new(),
        }
    }

    /// Adds `count` meetings between `a` and `b` (in either order).
    pub fn add_meetings(&mut self, a: u32, b: u32, count: u64) -> Result<()> {
        if a == b {
            return Err(Error::Invariant(format!("self-edge on node {a}")));
        }
        if a as usize >= self.n || b as usize >= self.n || count == 0 {
            return Err(Error::Invariant(format!(
                "edge ({a}, {b}) x{count} invalid for {} nodes",
                self.n
            )));
        }
        *self.edges.entry((a.min(b), a.max(b))).or_insert(0) += count;
        Ok(())
    }

    pub fn weight(&self, a: u32, b: u32) -> Option<u64> {
        self.edges.get(&(a.min(b), a.max(b))).copied()
    }

    /// Edges as `((low, high), weight)`, ascending.
    pub fn edges(&self) -> impl Iterator<Item = ((u32, u32), u64)> + '_ {
        self.edges.iter().map(|(&k, &w)| (k, w))
    }
}

impl LinkGraph for MeetingNetwork {
    fn node_count(&self) -> usize {
        self.n
    }
    fn link_count(&self) -> usize {
        self.edges.len()
    }
    fn is_directed(&self) -> bool {
        false
    }
    fn for_each_link(&self, f: &mut dyn FnMut(u32, u32)) {
        for &(a, b) in self.edges.keys() {
            f(a, b);
        }
    }
}

/// Payload of a knowledge arc `i -> j`: what `i` believes about `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ArcInfo {
    pub group: GroupId,
    pub timestamp: u64,
}

/// Directed graph; arc `(i, j)` means agent `i` holds a belief about `j`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct KnowledgeNetwork {
    n: usize,
    arcs: BTreeMap<(u32, u32), ArcInfo>,
}

impl KnowledgeNetwork {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            arcs: BTreeMap::new(),
        }
    }

    pub fn insert_arc(&mut self, i: u32, j: u32, info: ArcInfo) -> Result<()> {
        if i == j {
            return Err(Error::Invariant(format!("self-arc on node {i}")));
        }
        if i as usize >= self.n || j as usize >= self.n {
            return Err(Error::Invariant(format!(
                "arc ({i}, {j}) out of range for {} nodes",
                self.n
            )));
        }
        self.arcs.insert((i, j), info);
        Ok(())
    }

    pub fn arc(&self, i: u32, j: u32) -> Option<ArcInfo> {
        self.arcs.get(&(i, j)).copied()
    }

    pub fn arcs(&self) -> impl Iterator<Item = ((u32, u32), ArcInfo)> + '_ {
        self.arcs.iter().map(|(&k, &v)| (k, v))
    }
}

impl LinkGraph for KnowledgeNetwork {
    fn node_count(&self) -> usize {
        self.n
    }
    fn link_count(&self) -> usize {
        self.arcs.len()
    }
    fn is_directed(&self) -> bool {
        true
    }
    fn for_each_link(&self, f: &mut dyn FnMut(u32, u32)) {
        for &(i, j) in self.arcs.keys() {
            f(i, j);
        }
    }
}

/// Builds both networks from the current state. Self-entries are left out
/// of both graphs.
///
/// Fails if two agents disagree on how often they have met.
pub fn capture(state: &SimState) -> Result<(MeetingNetwork, KnowledgeNetwork)> {
    let agents = state.agents();
    let n = agents.len();
    let mut meeting = MeetingNetwork::new(n);
    let mut knowledge = KnowledgeNetwork::new(n);
    for agent in agents {
        let a = agent.id.0;
        for e in &agent.met {
            let b = e.other.0;
            if b <= a {
                continue;
            }
            let back = agents[b as usize].met_entry(agent.id).map(|e| e.count);
            if back != Some(e.count) {
                return Err(Error::Invariant(format!(
                    "meeting count mismatch: {a} -> {b} is {}, {b} -> {a} is {back:?}",
                    e.count
                )));
            }
            meeting.add_meetings(a, b, e.count)?;
        }
        // every entry of b's met list with a lower id must be matched from a's side
        for e in &agent.met {
            if e.other.0 < a && agents[e.other.index()].met_entry(agent.id).is_none() {
                return Err(Error::Invariant(format!(
                    "agent {a} met {} but not the other way round",
                    e.other
                )));
            }
        }
        for e in &agent.known {
            if e.other != agent.id {
                knowledge.insert_arc(
                    a,
                    e.other.0,
                    ArcInfo {
                        group: e.believed_group,
                        timestamp: e.timestamp,
                    },
                )?;
            }
        }
    }
    Ok((meeting, knowledge))
}

/// One captured pair of networks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snapshot {
    pub tick: u64,
    pub meeting: MeetingNetwork,
    pub knowledge: KnowledgeNetwork,
}

/// Networks captured over one run, ticks strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotSeries {
    pub config: SimConfig,
    pub snapshots: Vec<Snapshot>,
}

impl SnapshotSeries {
    pub fn new(config: SimConfig) -> Self {
        Self {
            config,
            snapshots: Vec::new(),
        }
    }

    pub fn push(&mut self, snapshot: Snapshot) -> Result<()> {
        if let Some(last) = self.snapshots.last() {
            if snapshot.tick <= last.tick {
                return Err(Error::Invariant(format!(
                    "snapshot tick {} not after {}",
                    snapshot.tick, last.tick
                )));
            }
        }
        self.snapshots.push(snapshot);
        Ok(())
    }
}

/// Receives snapshots while a run is in progress.
pub trait SnapshotSink {
    fn accept(&mut self, snapshot: Snapshot) -> Result<()>;
}

/// Drops every snapshot.
pub struct DiscardSnapshots;

impl SnapshotSink for DiscardSnapshots {
    fn accept(&mut self, _snapshot: Snapshot) -> Result<()> {
        Ok(())
    }
}

impl SnapshotSink for SnapshotSeries {
    fn accept(&mut self, snapshot: Snapshot) -> Result<()> {
        self.push(snapshot)
    }
}
