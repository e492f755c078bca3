//! Exact splitting of a partition of `r*k` into `r` partitions of `k`.
//!
//! Existence queries use depth-first placement of parts (largest first) into
//! groups with spare capacity. Groups with equal spare capacity are
//! interchangeable for the rest of the search, so only the first of them is
//! tried, and failed `(position, capacities)` states are memoized.
//!
//! Enumeration builds the groups one at a time as sub-multisets in
//! non-increasing order, so each unordered solution is produced exactly once.

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use crate::partition::Partition;

/// Default cap on the number of solutions returned by [`all_splits`].
pub const DEFAULT_SPLIT_LIMIT: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SplitError {
    #[error("partition of {found} cannot be split into {r} groups of {k} (needs degree {})", r * k)]
    DegreeMismatch { found: u32, r: u32, k: u32 },
    #[error("need r >= 2 and k >= 1, got r = {r}, k = {k}")]
    InvalidParameters { r: u32, k: u32 },
}

/// `r` groups of parts, each summing to `k`, whose union is the split partition.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SplitSolution {
    groups: Vec<Partition>,
}

impl SplitSolution {
    /// Canonicalizes: groups sorted largest first.
    pub fn new(mut groups: Vec<Partition>) -> Self {
        groups.sort_unstable_by(|a, b| b.cmp(a));
        Self { groups }
    }

    pub fn groups(&self) -> &[Partition] {
        &self.groups
    }

    /// Groups that carry branching.
    pub fn nontrivial_groups(&self) -> impl Iterator<Item = &Partition> {
        self.groups.iter().filter(|g| g.nontrivial())
    }

    /// Checks group count, group sums and the multiset union against `mu`.
    pub fn is_split_of(&self, mu: &Partition, r: u32, k: u32) -> bool {
        self.groups.len() == r as usize
            && self.groups.iter().all(|g| g.degree() == k)
            && Partition::union(&self.groups).as_ref() == Some(mu)
    }
}

/// Output of [`all_splits`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Splits {
    pub solutions: Vec<SplitSolution>,
    /// The enumeration stopped at the configured limit.
    pub truncated: bool,
}

fn check(mu: &Partition, r: u32, k: u32) -> Result<(), SplitError> {
    if r < 2 || k < 1 {
        return Err(SplitError::InvalidParameters { r, k });
    }
    if mu.degree() != r * k {
        return Err(SplitError::DegreeMismatch {
            found: mu.degree(),
            r,
            k,
        });
    }
    Ok(())
}

/// Necessary conditions that reject most impossible queries immediately.
fn quick_reject(mu: &Partition, r: u32, k: u32) -> bool {
    if mu.largest() > k || mu.len() < r as usize {
        return true;
    }
    // With k odd every group needs an odd number of odd parts.
    if k % 2 == 1 {
        let odd = mu.parts().iter().filter(|p| *p % 2 == 1).count();
        if odd < r as usize {
            return true;
        }
    }
    false
}

/// One canonical split, or `None` when none exists. Deterministic.
pub fn find_split(mu: &Partition, r: u32, k: u32) -> Result<Option<SplitSolution>, SplitError> {
    check(mu, r, k)?;
    if quick_reject(mu, r, k) {
        return Ok(None);
    }
    let mut search = PlacementSearch {
        parts: mu.parts(),
        caps: vec![k; r as usize],
        groups: vec![Vec::new(); r as usize],
        failed: HashSet::new(),
    };
    if search.place(0) {
        let groups = search
            .groups
            .into_iter()
            .map(|g| Partition::new(g).expect("groups are nonempty"))
            .collect();
        Ok(Some(SplitSolution::new(groups)))
    } else {
        Ok(None)
    }
}

/// True iff `mu` splits into `r` partitions of `k`.
pub fn can_split(mu: &Partition, r: u32, k: u32) -> Result<bool, SplitError> {
    Ok(find_split(mu, r, k)?.is_some())
}

struct PlacementSearch<'a> {
    parts: &'a [u32],
    caps: Vec<u32>,
    groups: Vec<Vec<u32>>,
    failed: HashSet<(usize, Vec<u32>)>,
}

impl PlacementSearch<'_> {
    fn place(&mut self, i: usize) -> bool {
        if i == self.parts.len() {
            return true;
        }
        let mut key_caps = self.caps.clone();
        key_caps.sort_unstable();
        let key = (i, key_caps);
        if self.failed.contains(&key) {
            return false;
        }
        let part = self.parts[i];
        let smallest = *self.parts.last().expect("nonempty");
        let mut tried: Vec<u32> = Vec::with_capacity(self.caps.len());
        for g in 0..self.caps.len() {
            let cap = self.caps[g];
            if cap < part || tried.contains(&cap) {
                continue;
            }
            tried.push(cap);
            let left = cap - part;
            // a group left with less room than any remaining part is dead
            if left != 0 && (i + 1 == self.parts.len() || left < smallest) {
                continue;
            }
            self.caps[g] = left;
            self.groups[g].push(part);
            if self.place(i + 1) {
                return true;
            }
            self.groups[g].pop();
            self.caps[g] = cap;
        }
        self.failed.insert(key);
        false
    }
}

/// All splits up to reordering of groups, with the default limit.
pub fn all_splits(mu: &Partition, r: u32, k: u32) -> Result<Splits, SplitError> {
    all_splits_limited(mu, r, k, DEFAULT_SPLIT_LIMIT)
}

/// All splits, stopping after `limit` solutions.
pub fn all_splits_limited(
    mu: &Partition,
    r: u32,
    k: u32,
    limit: usize,
) -> Result<Splits, SplitError> {
    check(mu, r, k)?;
    let mut out = Splits {
        solutions: Vec::new(),
        truncated: false,
    };
    if quick_reject(mu, r, k) || limit == 0 {
        out.truncated = limit == 0 && !quick_reject(mu, r, k) && can_split(mu, r, k)?;
        return Ok(out);
    }
    let mult = mu.multiplicities();
    let mut en = GroupEnumeration {
        values: mult.iter().map(|(v, _)| *v).collect(),
        k,
        limit,
        feasible: HashMap::new(),
        current: Vec::new(),
        out: &mut out,
    };
    let counts: Vec<u32> = mult.iter().map(|(_, c)| *c as u32).collect();
    en.rec(&counts, r, None);
    Ok(out)
}

struct GroupEnumeration<'a> {
    /// Distinct part values, descending.
    values: Vec<u32>,
    k: u32,
    limit: usize,
    feasible: HashMap<(Vec<u32>, u32), bool>,
    current: Vec<Vec<u32>>,
    out: &'a mut Splits,
}

impl GroupEnumeration<'_> {
    fn rec(&mut self, counts: &[u32], groups_left: u32, prev: Option<&[u32]>) {
        if self.out.truncated {
            return;
        }
        if groups_left == 0 {
            if self.out.solutions.len() >= self.limit {
                self.out.truncated = true;
                return;
            }
            let groups = self
                .current
                .iter()
                .map(|g| Partition::new(g.clone()).expect("nonempty"))
                .collect();
            self.out.solutions.push(SplitSolution { groups });
            return;
        }
        for (group, rest) in self.sub_multisets(counts) {
            if prev.is_some_and(|p| group.as_slice() > p) {
                continue;
            }
            if !self.is_feasible(&rest, groups_left - 1) {
                continue;
            }
            self.current.push(group.clone());
            self.rec(&rest, groups_left - 1, Some(&group));
            self.current.pop();
            if self.out.truncated {
                return;
            }
        }
    }

    /// Sub-multisets of `counts` summing to `k`, as descending part lists in
    /// descending lexicographic order, paired with the remaining counts.
    fn sub_multisets(&self, counts: &[u32]) -> Vec<(Vec<u32>, Vec<u32>)> {
        fn go(
            values: &[u32],
            counts: &[u32],
            j: usize,
            rem: u32,
            chosen: &mut Vec<u32>,
            rest: &mut Vec<u32>,
            out: &mut Vec<(Vec<u32>, Vec<u32>)>,
        ) {
            if rem == 0 {
                let mut r = rest.clone();
                r[j..].copy_from_slice(&counts[j..]);
                out.push((chosen.clone(), r));
                return;
            }
            if j == values.len() {
                return;
            }
            let v = values[j];
            let max = counts[j].min(rem / v);
            for c in (0..=max).rev() {
                for _ in 0..c {
                    chosen.push(v);
                }
                rest[j] = counts[j] - c;
                go(values, counts, j + 1, rem - c * v, chosen, rest, out);
                chosen.truncate(chosen.len() - c as usize);
            }
            rest[j] = counts[j];
        }
        let mut out = Vec::new();
        let mut rest = counts.to_vec();
        go(
            &self.values,
            counts,
            0,
            self.k,
            &mut Vec::new(),
            &mut rest,
            &mut out,
        );
        out
    }

    fn is_feasible(&mut self, counts: &[u32], groups_left: u32) -> bool {
        if groups_left == 0 {
            return counts.iter().all(|&c| c == 0);
        }
        let key = (counts.to_vec(), groups_left);
        if let Some(&v) = self.feasible.get(&key) {
            return v;
        }
        let result = self
            .sub_multisets(counts)
            .into_iter()
            .any(|(_, rest)| self.is_feasible(&rest, groups_left - 1));
        self.feasible.insert(key, result);
        result
    }
}
