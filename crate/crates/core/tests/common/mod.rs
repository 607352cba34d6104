//! Brute-force reference implementations shared by the test targets.
#![allow(dead_code)]

use std::collections::BTreeSet;

use mkperc_core::netcap::{ArcInfo, KnowledgeNetwork, LinkGraph, MeetingNetwork};
use mkperc_core::percolation::{degree_stats, giant_cluster, DegreeMoments};
use mkperc_core::sim::{Agent, AgentId, GroupId, SimState};
use mkperc_core::{DistanceMetric, SimConfig};

/// All pairs within `oh` on the `d` x `d` torus, by direct comparison.
pub fn brute_pairs(positions: &[(u32, u32)], d: u32, oh: u32, metric: DistanceMetric) -> Vec<(u32, u32)> {
    let axis = |a: u32, b: u32| {
        let diff = a.abs_diff(b);
        u64::from(diff.min(d - diff))
    };
    let oh = u64::from(oh);
    let mut out = Vec::new();
    for a in 0..positions.len() {
        for b in a + 1..positions.len() {
            let (p, q) = (positions[a], positions[b]);
            let (dx, dy) = (axis(p.0, q.0), axis(p.1, q.1));
            let near = match metric {
                DistanceMetric::Chebyshev => dx.max(dy) <= oh,
                DistanceMetric::Euclidean => dx * dx + dy * dy <= oh * oh,
            };
            if near {
                out.push((a as u32, b as u32));
            }
        }
    }
    out
}

/// Pairs reported by the engine for explicit positions.
pub fn engine_pairs(positions: &[(u32, u32)], d: u32, oh: u32, metric: DistanceMetric) -> Vec<(u32, u32)> {
    let cfg = SimConfig {
        d_side: d,
        oh,
        metric,
        n: positions.len() as u32,
        ..SimConfig::default()
    };
    let agents = positions
        .iter()
        .enumerate()
        .map(|(i, &p)| Agent::new(AgentId(i as u32), GroupId(0), p))
        .collect();
    let mut state = SimState::with_agents(&cfg, agents).unwrap();
    state
        .detect_meetings()
        .iter()
        .map(|(a, b)| (a.0, b.0))
        .collect()
}

/// Components by transitive closure of the symmetric adjacency relation.
fn brute_components(n: usize, links: &[(u32, u32)]) -> Vec<Vec<u32>> {
    let mut reach = vec![vec![false; n]; n];
    for (i, row) in reach.iter_mut().enumerate() {
        row[i] = true;
    }
    for &(a, b) in links {
        reach[a as usize][b as usize] = true;
        reach[b as usize][a as usize] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if reach[i][k] {
                for j in 0..n {
                    if reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }
    let mut seen = vec![false; n];
    let mut comps = Vec::new();
    for i in 0..n {
        if !seen[i] {
            let comp: Vec<u32> = (0..n).filter(|&j| reach[i][j]).map(|j| j as u32).collect();
            for &j in &comp {
                seen[j as usize] = true;
            }
            comps.push(comp);
        }
    }
    comps
}

/// Largest component with a link, ties to the lowest member id, and the
/// number of links inside it.
pub fn brute_giant(n: usize, links: &[(u32, u32)]) -> (Vec<u32>, usize) {
    let mut best: Option<(Vec<u32>, usize)> = None;
    for comp in brute_components(n, links) {
        let set: BTreeSet<u32> = comp.iter().copied().collect();
        let internal = links.iter().filter(|(a, _)| set.contains(a)).count();
        if internal == 0 {
            continue;
        }
        let better = match &best {
            None => true,
            Some((b, _)) => comp.len() > b.len() || (comp.len() == b.len() && comp[0] < b[0]),
        };
        if better {
            best = Some((comp, internal));
        }
    }
    best.unwrap_or_default()
}

pub fn undirected(n: usize, links: &[(u32, u32)]) -> MeetingNetwork {
    let mut g = MeetingNetwork::new(n);
    for &(a, b) in links {
        g.add_meetings(a, b, 1).unwrap();
    }
    g
}

pub fn directed(n: usize, links: &[(u32, u32)]) -> KnowledgeNetwork {
    let mut g = KnowledgeNetwork::new(n);
    for &(a, b) in links {
        g.insert_arc(a, b, ArcInfo::default()).unwrap();
    }
    g
}

pub fn distinct_links<G: LinkGraph>(g: &G) -> Vec<(u32, u32)> {
    let mut v = Vec::new();
    g.for_each_link(&mut |a, b| v.push((a, b)));
    v
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() < 1e-12
}

/// Checks giant cluster and degree moments of `g` against direct counts.
pub fn check_graph<G: LinkGraph>(g: &G) -> Result<(), String> {
    let n = g.node_count();
    let links = distinct_links(g);
    let giant = giant_cluster(g);
    let (nodes, internal) = brute_giant(n, &links);
    if giant.nodes != nodes || giant.links.len() != internal {
        return Err(format!("giant cluster {:?} vs {:?}", giant.nodes, nodes));
    }
    let count = |f: &dyn Fn(&(u32, u32), u32) -> bool| -> Vec<f64> {
        (0..n as u32)
            .map(|v| links.iter().filter(|l| f(l, v)).count() as f64)
            .collect()
    };
    let mean = |xs: &[f64]| xs.iter().sum::<f64>() / n as f64;
    match degree_stats(g).moments {
        DegreeMoments::Undirected { mean_k, mean_k2 } => {
            let deg = count(&|l, v| l.0 == v || l.1 == v);
            let sq: Vec<f64> = deg.iter().map(|k| k * k).collect();
            if !close(mean_k, mean(&deg)) || !close(mean_k2, mean(&sq)) {
                return Err("undirected moments differ".into());
            }
        }
        DegreeMoments::Directed {
            mean_kin,
            mean_kout,
            mean_kin_kout,
        } => {
            let kin = count(&|l, v| l.1 == v);
            let kout = count(&|l, v| l.0 == v);
            let prod: Vec<f64> = kin.iter().zip(&kout).map(|(a, b)| a * b).collect();
            if !close(mean_kin, mean(&kin)) || !close(mean_kout, mean(&kout)) || !close(mean_kin_kout, mean(&prod)) {
                return Err("directed moments differ".into());
            }
        }
    }
    Ok(())
}
