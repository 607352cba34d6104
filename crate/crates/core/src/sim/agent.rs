use serde::{Deserialize, Serialize};

/// Index of an agent in `[0, N)`, stable for the whole run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AgentId(pub u32);

impl AgentId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl std::fmt::Display for AgentId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(
    Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct GroupId(pub u32);

/// One row of an agent's list of agents met.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MetEntry {
    pub other: AgentId,
    /// Group of `other` as seen at the latest meeting.
    pub group_seen: GroupId,
    pub count: u64,
}

/// One row of an agent's list of known agents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KnownEntry {
    pub other: AgentId,
    pub believed_group: GroupId,
    /// Tick at which the belief was observed first-hand by whoever
    /// originated it. Relaying does not restamp.
    pub timestamp: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Agent {
    pub id: AgentId,
    pub group: GroupId,
    pub pos: (u32, u32),
    /// Sorted by `other`, one entry per agent met, including the agent itself.
    pub met: Vec<MetEntry>,
    /// Sorted by `other`, one entry per agent known, including the agent itself.
    pub known: Vec<KnownEntry>,
}

impl Agent {
    /// A fresh agent that has met itself once and knows only itself.
    pub fn new(id: AgentId, group: GroupId, pos: (u32, u32)) -> Self {
        Self {
            id,
            group,
            pos,
            met: vec![MetEntry {
                other: id,
                group_seen: group,
                count: 1,
            }],
            known: vec![KnownEntry {
                other: id,
                believed_group: group,
                timestamp: 0,
            }],
        }
    }

    pub fn knows(&self, other: AgentId) -> Option<&KnownEntry> {
        self.known
            .binary_search_by_key(&other, |e| e.other)
            .ok()
            .map(|i| &self.known[i])
    }

    pub fn met_entry(&self, other: AgentId) -> Option<&MetEntry> {
        self.met
            .binary_search_by_key(&other, |e| e.other)
            .ok()
            .map(|i| &self.met[i])
    }

    /// Records a meeting with `other`; returns true if it was the first one.
    pub(crate) fn record_meeting(&mut self, other: AgentId, group_seen: GroupId) -> bool {
        match self.met.binary_search_by_key(&other, |e| e.other) {
            Ok(i) => {
                let e = &mut self.met[i];
                e.count += 1;
                e.group_seen = group_seen;
                false
            }
            Err(i) => {
                self.met.insert(
                    i,
                    MetEntry {
                        other,
                        group_seen,
                        count: 1,
                    },
                );
                true
            }
        }
    }

    pub(crate) fn self_index(&self) -> usize {
        self.known
            .binary_search_by_key(&self.id, |e| e.other)
            .expect("agent lost its self-entry")
    }

    pub(crate) fn check_invariants(&self, n: usize, ng: u32) -> Result<(), String> {
        if self.group.0 >= ng {
            return Err(format!("agent {} has group {} >= ng", self.id, self.group.0));
        }
        let sorted_unique = |ids: &mut dyn Iterator<Item = AgentId>| {
            let v: Vec<_> = ids.collect();
            v.windows(2).all(|w| w[0] < w[1]) && v.iter().all(|a| a.index() < n)
        };
        if !sorted_unique(&mut self.known.iter().map(|e| e.other)) {
            return Err(format!("agent {} known list not sorted/unique", self.id));
        }
        if !sorted_unique(&mut self.met.iter().map(|e| e.other)) {
            return Err(format!("agent {} met list not sorted/unique", self.id));
        }
        match self.knows(self.id) {
            Some(e) if e.believed_group == self.group => {}
            _ => return Err(format!("agent {} self-entry missing or stale", self.id)),
        }
        if self.met.iter().any(|e| e.count == 0) {
            return Err(format!("agent {} has a zero meeting count", self.id));
        }
        if self.known.iter().any(|e| e.believed_group.0 >= ng) {
            return Err(format!("agent {} believes in an invalid group", self.id));
        }
        Ok(())
    }
}

/// One edit to an agent's known list, as seen by the incremental counters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct BeliefChange {
    pub other: AgentId,
    /// `None` if the entry was absent before.
    pub old: Option<GroupId>,
    /// `None` if the entry was deleted.
    pub new: Option<GroupId>,
}

/// Merges `incoming` into `existing` on behalf of `owner`, appending one
/// [`BeliefChange`] per inserted or replaced entry to `changes`.
///
/// Absent entries are inserted unchanged. For entries present on both
/// sides the more recent timestamp wins; on a timestamp tie the existing
/// entry is kept. The owner's self-entry is never overwritten.
pub(crate) fn merge_known(
    existing: &[KnownEntry],
    incoming: &[KnownEntry],
    owner: AgentId,
    changes: &mut Vec<BeliefChange>,
) -> Vec<KnownEntry> {
    let mut merged = Vec::with_capacity(existing.len() + incoming.len());
    let mut take = |merged: &mut Vec<KnownEntry>, old: Option<GroupId>, b: KnownEntry| {
        merged.push(b);
        changes.push(BeliefChange {
            other: b.other,
            old,
            new: Some(b.believed_group),
        });
    };
    let (mut i, mut j) = (0, 0);
    while i < existing.len() && j < incoming.len() {
        let (a, b) = (existing[i], incoming[j]);
        match a.other.cmp(&b.other) {
            std::cmp::Ordering::Less => {
                merged.push(a);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                if b.other != owner {
                    take(&mut merged, None, b);
                }
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                if a.other != owner && b.timestamp > a.timestamp {
                    take(&mut merged, Some(a.believed_group), b);
                } else {
                    merged.push(a);
                }
                i += 1;
                j += 1;
            }
        }
    }
    merged.extend_from_slice(&existing[i..]);
    for &b in &incoming[j..] {
        if b.other != owner {
            take(&mut merged, None, b);
        }
    }
    merged
}

#[cfg(test)]
mod tests {
    use super::*;

    fn merge(existing: &[KnownEntry], incoming: &[KnownEntry], owner: u32) -> (Vec<KnownEntry>, usize) {
        let mut changes = Vec::new();
        let merged = merge_known(existing, incoming, AgentId(owner), &mut changes);
        (merged, changes.len())
    }

    fn k(other: u32, g: u32, t: u64) -> KnownEntry {
        KnownEntry {
            other: AgentId(other),
            believed_group: GroupId(g),
            timestamp: t,
        }
    }

    #[test]
    fn disjoint_union() {
        let out = merge(&[k(0, 0, 0), k(2, 1, 3)], &[k(1, 1, 0)], 0);
        assert_eq!(out.0, vec![k(0, 0, 0), k(1, 1, 0), k(2, 1, 3)]);
        assert_eq!(out.1, 1);
    }

    #[test]
    fn most_recent_wins_on_conflict() {
        let out = merge(&[k(0, 0, 0), k(2, 1, 5)], &[k(2, 0, 9)], 0);
        assert_eq!(out.0[1], k(2, 0, 9));
        let out = merge(&[k(0, 0, 0), k(2, 1, 9)], &[k(2, 0, 5)], 0);
        assert_eq!(out.0[1], k(2, 1, 9));
        assert_eq!(out.1, 0);
    }

    #[test]
    fn same_group_keeps_later_timestamp() {
        let out = merge(&[k(0, 0, 0), k(2, 1, 4)], &[k(2, 1, 7)], 0);
        assert_eq!(out.0[1], k(2, 1, 7));
    }

    #[test]
    fn tie_keeps_existing() {
        let out = merge(&[k(0, 0, 0), k(2, 1, 4)], &[k(2, 0, 4)], 0);
        assert_eq!(out.0[1], k(2, 1, 4));
    }

    #[test]
    fn self_entry_is_protected() {
        let out = merge(&[k(0, 0, 2)], &[k(0, 1, 50)], 0);
        assert_eq!(out.0, vec![k(0, 0, 2)]);
        assert_eq!(out.1, 0);
    }

    #[test]
    fn record_meeting_counts() {
        let mut a = Agent::new(AgentId(3), GroupId(0), (0, 0));
        assert!(a.record_meeting(AgentId(1), GroupId(1)));
        assert!(!a.record_meeting(AgentId(1), GroupId(0)));
        let e = a.met_entry(AgentId(1)).unwrap();
        assert_eq!(e.count, 2);
        assert_eq!(e.group_seen, GroupId(0));
        assert_eq!(a.met_entry(AgentId(3)).unwrap().count, 1);
    }
}
