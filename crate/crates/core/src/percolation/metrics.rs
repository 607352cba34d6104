use serde::{Deserialize, Serialize};

use super::components::giant_cluster;
use super::degree::{degree_stats, heterogeneity_from_sums};
use crate::netcap::{KnowledgeNetwork, LinkGraph, MeetingNetwork};
use crate::sim::SimState;

/// Percolation observables of one network at one tick.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PercolationPoint {
    pub tick: u64,
    /// Heterogeneity parameter; `None` while the network has no links.
    pub k: Option<f64>,
    pub percolating: bool,
    /// Fraction of nodes with at least one link.
    pub ps: f64,
    /// Fraction of possible links present.
    pub pb: f64,
    /// Giant-cluster nodes over `N`.
    pub psg: f64,
    /// Giant-cluster links over possible links.
    pub pbg: f64,
    /// Number of links present.
    pub links: u64,
}

/// Scalar observables of both networks at one tick.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub tick: u64,
    pub mk: f64,
    pub meeting_rate: f64,
    pub delta_mk: f64,
    pub knowledge: PercolationPoint,
    pub meeting: PercolationPoint,
}

pub(crate) fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn percolation_point<G: LinkGraph + ?Sized>(graph: &G, tick: u64) -> PercolationPoint {
    let n = graph.node_count() as u64;
    let possible = graph.possible_links();
    let stats = degree_stats(graph);
    let het = heterogeneity_from_sums(graph.is_directed(), stats.sums);
    let isolated = stats.histogram.get(&0).copied().unwrap_or(0);
    let giant = giant_cluster(graph);
    PercolationPoint {
        tick,
        k: het.map(|h| h.k),
        percolating: het.is_some_and(|h| h.percolating),
        ps: ratio(n - isolated, n),
        pb: ratio(graph.link_count() as u64, possible),
        psg: ratio(giant.node_count() as u64, n),
        pbg: ratio(giant.link_count() as u64, possible),
        links: graph.link_count() as u64,
    }
}

/// Points for `(meeting, knowledge)` over the same population.
pub fn percolation_points(
    meeting: &MeetingNetwork,
    knowledge: &KnowledgeNetwork,
    tick: u64,
) -> (PercolationPoint, PercolationPoint) {
    debug_assert_eq!(meeting.node_count(), knowledge.node_count());
    (
        percolation_point(meeting, tick),
        percolation_point(knowledge, tick),
    )
}

/// Knowledge arcs over `N(N-1)`. A lone agent trivially knows everyone.
pub fn mk_level(knowledge: &KnowledgeNetwork) -> f64 {
    if knowledge.node_count() < 2 {
        return 1.0;
    }
    ratio(knowledge.link_count() as u64, knowledge.possible_links())
}

/// Distinct pairs that have met over `N(N-1)/2`.
pub fn meeting_rate(meeting: &MeetingNetwork) -> f64 {
    if meeting.node_count() < 2 {
        return 1.0;
    }
    ratio(meeting.link_count() as u64, meeting.possible_links())
}

/// Share of possible beliefs that are currently held and wrong.
pub fn delta_mk(state: &SimState) -> f64 {
    let agents = state.agents();
    let n = agents.len() as u64;
    let wrong: u64 = agents
        .iter()
        .map(|a| {
            a.known
                .iter()
                .filter(|e| e.other != a.id && e.believed_group != agents[e.other.index()].group)
                .count() as u64
        })
        .sum();
    ratio(wrong, n * n.saturating_sub(1))
}
