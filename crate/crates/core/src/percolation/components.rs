//! Connected components: union-find, the giant cluster, and strongly
//! connected components for diagnostics.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::netcap::LinkGraph;

/// Disjoint-set forest with union by size and path halving. Each root also
/// carries the link count and the smallest member id of its set.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
    links: Vec<u64>,
    min_id: Vec<u32>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
            links: vec![0; n],
            min_id: (0..n as u32).collect(),
        }
    }

    pub fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    /// Adds one link between `a` and `b` and returns the root of their set.
    pub fn add_link(&mut self, a: u32, b: u32) -> u32 {
        let (ra, rb) = (self.find(a), self.find(b));
        let root = if ra == rb {
            ra
        } else {
            let (big, small) = if self.size[ra as usize] >= self.size[rb as usize] {
                (ra, rb)
            } else {
                (rb, ra)
            };
            self.parent[small as usize] = big;
            self.size[big as usize] += self.size[small as usize];
            self.links[big as usize] += self.links[small as usize];
            self.min_id[big as usize] = self.min_id[big as usize].min(self.min_id[small as usize]);
            big
        };
        self.links[root as usize] += 1;
        root
    }

    pub fn size(&self, root: u32) -> u32 {
        self.size[root as usize]
    }

    pub fn links(&self, root: u32) -> u64 {
        self.links[root as usize]
    }

    pub fn min_id(&self, root: u32) -> u32 {
        self.min_id[root as usize]
    }

    /// Largest set with at least one link; ties go to the set containing
    /// the lowest id.
    pub fn giant_root(&mut self) -> Option<u32> {
        let mut best: Option<u32> = None;
        for x in 0..self.parent.len() as u32 {
            if self.parent[x as usize] != x || self.links[x as usize] == 0 {
                continue;
            }
            best = match best {
                Some(b) if !self.beats(x, b) => Some(b),
                _ => Some(x),
            };
        }
        best
    }

    fn beats(&self, a: u32, b: u32) -> bool {
        match self.size[a as usize].cmp(&self.size[b as usize]) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => self.min_id[a as usize] < self.min_id[b as usize],
        }
    }
}

/// Union-find that keeps track of the giant component as links arrive.
/// Only valid for networks that never lose links.
#[derive(Debug, Clone)]
pub struct GrowingComponents {
    uf: UnionFind,
    /// Any member of the current giant component.
    giant: Option<u32>,
}

impl GrowingComponents {
    pub fn new(n: usize) -> Self {
        Self {
            uf: UnionFind::new(n),
            giant: None,
        }
    }

    pub fn add_link(&mut self, a: u32, b: u32) {
        let root = self.uf.add_link(a, b);
        self.giant = match self.giant {
            None => Some(root),
            Some(member) => {
                let g = self.uf.find(member);
                if g != root && self.uf.beats(root, g) {
                    Some(root)
                } else {
                    Some(g)
                }
            }
        };
    }

    /// `(nodes, links)` of the giant component, `(0, 0)` when linkless.
    pub fn giant(&mut self) -> (u32, u64) {
        match self.giant {
            None => (0, 0),
            Some(member) => {
                let r = self.uf.find(member);
                (self.uf.size(r), self.uf.links(r))
            }
        }
    }
}

/// The largest weakly connected component that has at least one link.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GiantCluster {
    /// Member nodes, ascending.
    pub nodes: Vec<u32>,
    /// Links with both endpoints in the cluster, in the graph's link order.
    pub links: Vec<(u32, u32)>,
}

impl GiantCluster {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }
}

/// Largest connected component, orientation ignored for directed graphs.
/// Ties are broken by the lowest contained node id. A graph without links
/// has an empty giant cluster.
pub fn giant_cluster<G: LinkGraph + ?Sized>(graph: &G) -> GiantCluster {
    let mut uf = UnionFind::new(graph.node_count());
    graph.for_each_link(&mut |a, b| {
        uf.add_link(a, b);
    });
    let Some(root) = uf.giant_root() else {
        return GiantCluster::default();
    };
    let nodes: Vec<u32> = (0..graph.node_count() as u32)
        .filter(|&x| uf.find(x) == root)
        .collect();
    let mut links = Vec::with_capacity(uf.links(root) as usize);
    graph.for_each_link(&mut |a, b| {
        if uf.find(a) == root {
            links.push((a, b));
        }
    });
    GiantCluster { nodes, links }
}

/// Size of the largest strongly connected component (iterative Kosaraju).
pub fn largest_strong_component<G: LinkGraph + ?Sized>(graph: &G) -> usize {
    let n = graph.node_count();
    if n == 0 {
        return 0;
    }
    let (fwd_start, fwd) = adjacency(graph, false);
    let (rev_start, rev) = adjacency(graph, true);

    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    let mut stack: Vec<(u32, usize)> = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        stack.push((s as u32, fwd_start[s]));
        while let Some(&mut (v, ref mut next)) = stack.last_mut() {
            let end = fwd_start[v as usize + 1];
            if *next < end {
                let w = fwd[*next] as usize;
                *next += 1;
                if !seen[w] {
                    seen[w] = true;
                    stack.push((w as u32, fwd_start[w]));
                }
            } else {
                order.push(v);
                stack.pop();
            }
        }
    }

    let mut comp = vec![false; n];
    let mut best = 0;
    let mut todo = Vec::new();
    for &s in order.iter().rev() {
        if comp[s as usize] {
            continue;
        }
        comp[s as usize] = true;
        todo.push(s);
        let mut size = 0;
        while let Some(v) = todo.pop() {
            size += 1;
            for &w in &rev[rev_start[v as usize]..rev_start[v as usize + 1]] {
                if !comp[w as usize] {
                    comp[w as usize] = true;
                    todo.push(w);
                }
            }
        }
        best = best.max(size);
    }
    best
}

fn adjacency<G: LinkGraph + ?Sized>(graph: &G, reverse: bool) -> (Vec<usize>, Vec<u32>) {
    let n = graph.node_count();
    let directed = graph.is_directed();
    let mut start = vec![0usize; n + 1];
    graph.for_each_link(&mut |a, b| {
        let (from, to) = if reverse { (b, a) } else { (a, b) };
        start[from as usize + 1] += 1;
        if !directed {
            start[to as usize + 1] += 1;
        }
    });
    for i in 1..=n {
        start[i] += start[i - 1];
    }
    let mut fill = start.clone();
    let mut adj = vec![0u32; start[n]];
    graph.for_each_link(&mut |a, b| {
        let (from, to) = if reverse { (b, a) } else { (a, b) };
        adj[fill[from as usize]] = to;
        fill[from as usize] += 1;
        if !directed {
            adj[fill[to as usize]] = from;
            fill[to as usize] += 1;
        }
    });
    (start, adj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netcap::{KnowledgeNetwork, MeetingNetwork};

    fn undirected(n: usize, edges: &[(u32, u32)]) -> MeetingNetwork {
        let mut g = MeetingNetwork::new(n);
        for &(a, b) in edges {
            g.add_meetings(a, b, 1).unwrap();
        }
        g
    }

    #[test]
    fn path_is_one_component() {
        let g = undirected(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]);
        let giant = giant_cluster(&g);
        assert_eq!(giant.nodes, vec![0, 1, 2, 3, 4]);
        assert_eq!(giant.link_count(), 4);
    }

    #[test]
    fn tie_goes_to_lowest_id() {
        let g = undirected(7, &[(4, 5), (5, 6), (4, 6), (1, 2), (2, 3), (1, 3)]);
        let giant = giant_cluster(&g);
        assert_eq!(giant.nodes, vec![1, 2, 3]);
        assert_eq!(giant.link_count(), 3);
    }

    #[test]
    fn linkless_graph_has_empty_giant() {
        let g = undirected(4, &[]);
        assert_eq!(giant_cluster(&g), GiantCluster::default());
        let mut c = GrowingComponents::new(4);
        assert_eq!(c.giant(), (0, 0));
    }

    #[test]
    fn growing_components_follow_merges_and_ties() {
        let mut c = GrowingComponents::new(8);
        c.add_link(6, 7);
        assert_eq!(c.giant(), (2, 1));
        c.add_link(2, 3);
        // equal size, lower id wins
        assert_eq!(c.giant(), (2, 1));
        c.add_link(6, 5);
        assert_eq!(c.giant(), (3, 2));
        c.add_link(3, 6);
        assert_eq!(c.giant(), (5, 4));
        c.add_link(2, 7);
        assert_eq!(c.giant(), (5, 5));
    }

    #[test]
    fn weak_versus_strong_on_a_directed_path() {
        let mut k = KnowledgeNetwork::new(3);
        k.insert_arc(0, 1, Default::default()).unwrap();
        k.insert_arc(1, 2, Default::default()).unwrap();
        assert_eq!(giant_cluster(&k).node_count(), 3);
        assert_eq!(largest_strong_component(&k), 1);
        k.insert_arc(2, 0, Default::default()).unwrap();
        assert_eq!(largest_strong_component(&k), 3);
    }
}
