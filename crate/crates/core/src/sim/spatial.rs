//! Bucket grid for overhearing-range queries on the torus.
//!
//! Buckets are at least `oh + 1` cells wide, so any two agents within range
//! sit in the same or cyclically adjacent buckets. The bucket count is
//! chosen near `sqrt(N)` per axis, which keeps both the table and the
//! per-bucket occupancy small on sparse grids.

use crate::config::DistanceMetric;
use crate::exec::Execution;

use super::agent::AgentId;

#[inline]
pub(crate) fn torus_delta(a: u32, b: u32, d: u32) -> u32 {
    let diff = a.abs_diff(b);
    diff.min(d - diff)
}

#[inline]
pub(crate) fn within_range(
    p: (u32, u32),
    q: (u32, u32),
    d: u32,
    oh: u32,
    metric: DistanceMetric,
) -> bool {
    let dx = torus_delta(p.0, q.0, d);
    let dy = torus_delta(p.1, q.1, d);
    match metric {
        DistanceMetric::Chebyshev => dx.max(dy) <= oh,
        DistanceMetric::Euclidean => {
            let (dx, dy, r) = (u64::from(dx), u64::from(dy), u64::from(oh));
            dx * dx + dy * dy <= r * r
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct BucketGrid {
    d: u32,
    width: u32,
    per_axis: u32,
    starts: Vec<u32>,
    members: Vec<u32>,
    bucket_of: Vec<u32>,
    fill: Vec<u32>,
}

impl BucketGrid {
    pub fn new(d: u32, oh: u32, n: usize) -> Self {
        let target = ((n as f64).sqrt().ceil() as u32).max(1);
        let width = (oh.saturating_add(1)).max(d / target).max(1);
        let per_axis = (d / width).max(1);
        let buckets = per_axis as usize * per_axis as usize;
        Self {
            d,
            width,
            per_axis,
            starts: vec![0; buckets + 1],
            members: vec![0; n],
            bucket_of: vec![0; n],
            fill: vec![0; buckets + 1],
        }
    }

    #[inline]
    fn axis_bucket(&self, c: u32) -> u32 {
        (c / self.width).min(self.per_axis - 1)
    }

    #[inline]
    fn bucket(&self, p: (u32, u32)) -> u32 {
        self.axis_bucket(p.0) * self.per_axis + self.axis_bucket(p.1)
    }

    /// Counting sort of agents into buckets.
    pub fn rebuild(&mut self, positions: &[(u32, u32)]) {
        debug_assert_eq!(positions.len(), self.members.len());
        self.starts.iter_mut().for_each(|s| *s = 0);
        for (i, &p) in positions.iter().enumerate() {
            let b = self.bucket(p);
            self.bucket_of[i] = b;
            self.starts[b as usize + 1] += 1;
        }
        for i in 1..self.starts.len() {
            self.starts[i] += self.starts[i - 1];
        }
        self.fill.copy_from_slice(&self.starts);
        for (i, &b) in self.bucket_of.iter().enumerate() {
            let slot = &mut self.fill[b as usize];
            self.members[*slot as usize] = i as u32;
            *slot += 1;
        }
    }

    fn axis_neighbours(&self, i: u32) -> ([u32; 3], usize) {
        match self.per_axis {
            1 => ([0, 0, 0], 1),
            2 => ([0, 1, 0], 2),
            k => ([(i + k - 1) % k, i, (i + 1) % k], 3),
        }
    }

    fn members(&self, bucket: u32) -> &[u32] {
        let b = bucket as usize;
        &self.members[self.starts[b] as usize..self.starts[b + 1] as usize]
    }

    /// Pairs with at least one endpoint in `bucket`, visiting each unordered
    /// bucket pair once: the bucket itself and neighbours with a higher
    /// index. Agents in different buckets are at least `width > oh` apart
    /// along one axis unless the buckets are adjacent, and with `oh = 0`
    /// only a shared bucket can hold a shared cell.
    fn pairs_from(
        &self,
        bucket: u32,
        positions: &[(u32, u32)],
        oh: u32,
        metric: DistanceMetric,
        out: &mut Vec<(AgentId, AgentId)>,
    ) {
        let here = self.members(bucket);
        if here.is_empty() {
            return;
        }
        let mut push = |a: u32, b: u32| {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            if within_range(positions[lo as usize], positions[hi as usize], self.d, oh, metric) {
                out.push((AgentId(lo), AgentId(hi)));
            }
        };
        for (i, &a) in here.iter().enumerate() {
            for &b in &here[i + 1..] {
                push(a, b);
            }
        }
        if oh == 0 {
            return;
        }
        let (rows, nr) = self.axis_neighbours(bucket / self.per_axis);
        let (cols, nc) = self.axis_neighbours(bucket % self.per_axis);
        let mut seen = [u32::MAX; 9];
        let mut k = 0;
        for &r in &rows[..nr] {
            for &c in &cols[..nc] {
                let other = r * self.per_axis + c;
                if other <= bucket || seen[..k].contains(&other) {
                    continue;
                }
                seen[k] = other;
                k += 1;
                for &a in here {
                    for &b in self.members(other) {
                        push(a, b);
                    }
                }
            }
        }
    }

    /// All unordered pairs within range, each once as `(low, high)`,
    /// sorted ascending. Call [`rebuild`](Self::rebuild) first.
    pub fn pairs(
        &self,
        positions: &[(u32, u32)],
        oh: u32,
        metric: DistanceMetric,
        exec: Execution,
    ) -> Vec<(AgentId, AgentId)> {
        let buckets = self.per_axis * self.per_axis;
        let mut out = if exec.is_parallel() && positions.len() >= 8192 {
            let chunk = 256;
            let chunks: Vec<u32> = (0..buckets).step_by(chunk as usize).collect();
            crate::exec::map_jobs(exec, chunks, |start| {
                let mut local = Vec::new();
                for b in start..(start + chunk).min(buckets) {
                    self.pairs_from(b, positions, oh, metric, &mut local);
                }
                local
            })
            .concat()
        } else {
            let mut out = Vec::new();
            for b in 0..buckets {
                self.pairs_from(b, positions, oh, metric, &mut out);
            }
            out
        };
        out.sort_unstable();
        out
    }
}
