//! Degree moments and the heterogeneity condition.
//!
//! For an undirected graph the condition is `<k^2> / <k> > 2`, reported as
//! `K = <k^2> / (2<k>)` against 1. For a directed graph it is
//! `K = <k_in * k_out> / <k_in>` against 1. Averages run over all nodes,
//! isolated ones included; since both moments share the same `1/N` factor
//! the ratios are computed from integer sums, and the boolean is decided
//! on those sums exactly.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netcap::LinkGraph;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DegreeMoments {
    Undirected {
        mean_k: f64,
        mean_k2: f64,
    },
    Directed {
        mean_kin: f64,
        mean_kout: f64,
        mean_kin_kout: f64,
    },
}

/// Exact integer sums behind [`DegreeMoments`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DegreeSums {
    /// Sum of degrees (undirected) or in-degrees (directed).
    pub first: u64,
    /// Sum of squared degrees (undirected) or of `k_in * k_out` (directed).
    pub second: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeStats {
    pub n: usize,
    pub moments: DegreeMoments,
    pub sums: DegreeSums,
    pub directed: bool,
    /// Degree (total degree for directed graphs) -> node count, zero included.
    pub histogram: BTreeMap<u64, u64>,
}

/// Value of the heterogeneity parameter and whether it exceeds its bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Heterogeneity {
    pub k: f64,
    pub percolating: bool,
}

pub fn degree_stats<G: LinkGraph + ?Sized>(graph: &G) -> DegreeStats {
    let n = graph.node_count();
    let directed = graph.is_directed();
    let mut kin = vec![0u64; n];
    let mut kout = vec![0u64; n];
    graph.for_each_link(&mut |a, b| {
        kout[a as usize] += 1;
        kin[b as usize] += 1;
    });
    let mut histogram = BTreeMap::new();
    let (moments, sums) = if directed {
        let sum_in: u64 = kin.iter().sum();
        let sum_out: u64 = kout.iter().sum();
        let sum_prod: u64 = kin.iter().zip(&kout).map(|(i, o)| i * o).sum();
        for (i, o) in kin.iter().zip(&kout) {
            *histogram.entry(i + o).or_insert(0) += 1;
        }
        (
            DegreeMoments::Directed {
                mean_kin: mean(sum_in, n),
                mean_kout: mean(sum_out, n),
                mean_kin_kout: mean(sum_prod, n),
            },
            DegreeSums {
                first: sum_in,
                second: sum_prod,
            },
        )
    } else {
        // an undirected link counts once on each endpoint
        let deg: Vec<u64> = kin.iter().zip(&kout).map(|(i, o)| i + o).collect();
        let sum_k: u64 = deg.iter().sum();
        let sum_k2: u64 = deg.iter().map(|k| k * k).sum();
        for &k in &deg {
            *histogram.entry(k).or_insert(0) += 1;
        }
        (
            DegreeMoments::Undirected {
                mean_k: mean(sum_k, n),
                mean_k2: mean(sum_k2, n),
            },
            DegreeSums {
                first: sum_k,
                second: sum_k2,
            },
        )
    };
    DegreeStats {
        n,
        moments,
        sums,
        directed,
        histogram,
    }
}

fn mean(sum: u64, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        sum as f64 / n as f64
    }
}

/// `None` when the graph has no links.
pub(crate) fn heterogeneity_from_sums(directed: bool, sums: DegreeSums) -> Option<Heterogeneity> {
    if sums.first == 0 {
        return None;
    }
    Some(if directed {
        Heterogeneity {
            k: sums.second as f64 / sums.first as f64,
            percolating: sums.second > sums.first,
        }
    } else {
        Heterogeneity {
            k: sums.second as f64 / (2.0 * sums.first as f64),
            percolating: sums.second > 2 * sums.first,
        }
    })
}

impl DegreeStats {
    pub fn heterogeneity(&self) -> Result<Heterogeneity> {
        heterogeneity_from_sums(self.directed, self.sums).ok_or(Error::UndefinedK)
    }
}

pub fn heterogeneity_condition<G: LinkGraph + ?Sized>(graph: &G) -> Result<Heterogeneity> {
    degree_stats(graph).heterogeneity()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netcap::{ArcInfo, KnowledgeNetwork, MeetingNetwork};

    #[test]
    fn empty_graph_has_zero_means_and_undefined_k() {
        let g = MeetingNetwork::new(5);
        let s = degree_stats(&g);
        assert_eq!(
            s.moments,
            DegreeMoments::Undirected {
                mean_k: 0.0,
                mean_k2: 0.0
            }
        );
        assert!(matches!(s.heterogeneity(), Err(Error::UndefinedK)));
    }

    #[test]
    fn star_graph() {
        let mut g = MeetingNetwork::new(5);
        for leaf in 1..5 {
            g.add_meetings(0, leaf, 1).unwrap();
        }
        let s = degree_stats(&g);
        let DegreeMoments::Undirected { mean_k, mean_k2 } = s.moments else {
            panic!()
        };
        assert!((mean_k - 1.6).abs() < 1e-12);
        assert!((mean_k2 - 4.0).abs() < 1e-12);
        let h = s.heterogeneity().unwrap();
        assert!((h.k - 1.25).abs() < 1e-12);
        assert!(h.percolating);
        assert_eq!(s.histogram.get(&1), Some(&4));
        assert_eq!(s.histogram.get(&4), Some(&1));
    }

    #[test]
    fn perfect_matching_does_not_percolate() {
        let mut g = MeetingNetwork::new(6);
        for i in 0..3 {
            g.add_meetings(2 * i, 2 * i + 1, 1).unwrap();
        }
        let h = heterogeneity_condition(&g).unwrap();
        assert!((h.k - 0.5).abs() < 1e-12);
        assert!(!h.percolating);
    }

    #[test]
    fn directed_three_cycle() {
        let mut g = KnowledgeNetwork::new(3);
        for (i, j) in [(0, 1), (1, 2), (2, 0)] {
            g.insert_arc(i, j, ArcInfo::default()).unwrap();
        }
        let s = degree_stats(&g);
        assert_eq!(
            s.moments,
            DegreeMoments::Directed {
                mean_kin: 1.0,
                mean_kout: 1.0,
                mean_kin_kout: 1.0
            }
        );
        let h = s.heterogeneity().unwrap();
        assert_eq!(h.k, 1.0);
        assert!(!h.percolating);
    }
}
