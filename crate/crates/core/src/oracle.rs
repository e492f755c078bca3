//! Exhaustive monodromy search.
//!
//! A candidate over the sphere is realizable iff there are permutations with
//! the prescribed cycle types whose product is the identity and which
//! generate a transitive group. Realizability is invariant under conjugation
//! and under reordering of the cycle types, so the search fixes the first
//! permutation to the canonical representative of the largest class, walks
//! the remaining free classes, and forces the last permutation to be the
//! inverse of the partial product.
//!
//! The budget counts complete tuples tested (for three branch values, the
//! number of second permutations examined). Parallel and sequential runs
//! visit candidates in the same global order and stop at the same point, so
//! every outcome, certificate included, is reproducible.

use std::sync::atomic::{AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};

use crate::datum::{CandidateDatum, SPHERE_EULER};
use crate::partition::Partition;
use crate::perm::{class_chunks, class_size, ClassChunk, ClassWalker, PermError, Permutation};

/// Default number of candidate tuples examined before giving up.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// Permutations `s1, ..., sn` with `s1` applied first; their product is
/// expected to be the identity.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MonodromyTuple {
    pub perms: Vec<Permutation>,
}

impl MonodromyTuple {
    pub fn new(perms: Vec<Permutation>) -> Self {
        Self { perms }
    }

    pub fn degree(&self) -> usize {
        self.perms.first().map_or(0, Permutation::degree)
    }

    /// `s1` then `s2` then ... .
    pub fn product(&self) -> Option<Permutation> {
        let d = self.degree();
        if self.perms.iter().any(|p| p.degree() != d) {
            return None;
        }
        Some(
            self.perms
                .iter()
                .fold(Permutation::identity(d), |acc, p| acc.then(p)),
        )
    }

    pub fn is_transitive(&self) -> bool {
        let d = self.degree();
        if d == 0 {
            return false;
        }
        let images: Vec<&[u32]> = self.perms.iter().map(|p| p.images()).collect();
        orbit_size(&images, d) == d
    }

    pub fn to_cycle_strings(&self) -> Vec<String> {
        self.perms
            .iter()
            .map(Permutation::to_cycle_notation)
            .collect()
    }

    pub fn from_cycle_strings<S: AsRef<str>>(
        items: &[S],
        degree: usize,
    ) -> Result<Self, PermError> {
        let perms = items
            .iter()
            .map(|s| Permutation::from_cycle_notation(s.as_ref(), degree))
            .collect::<Result<_, _>>()?;
        Ok(Self { perms })
    }
}

impl Serialize for MonodromyTuple {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_cycle_strings().serialize(s)
    }
}

/// Deserializes with the degree inferred from the largest point; pair with
/// [`MonodromyTuple::from_cycle_strings`] when fixed points at the end matter.
impl<'de> Deserialize<'de> for MonodromyTuple {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let items = Vec::<String>::deserialize(d)?;
        let degree = items
            .iter()
            .flat_map(|s| s.split(|c: char| !c.is_ascii_digit()))
            .filter_map(|t| t.parse::<usize>().ok())
            .max()
            .unwrap_or(0);
        Self::from_cycle_strings(&items, degree).map_err(serde::de::Error::custom)
    }
}

/// True iff the nontrivial cycle types match the datum's partitions as a
/// multiset, the product is the identity, and the action is transitive.
pub fn verify_tuple(tuple: &MonodromyTuple, datum: &CandidateDatum) -> bool {
    let d = datum.degree() as usize;
    if tuple.perms.is_empty() || tuple.perms.iter().any(|p| p.degree() != d) {
        return false;
    }
    let mut types: Vec<Partition> = tuple
        .perms
        .iter()
        .map(Permutation::cycle_type)
        .filter(Partition::nontrivial)
        .collect();
    types.sort_unstable_by(|a, b| b.cmp(a));
    if types != datum.partitions() {
        return false;
    }
    tuple.product().is_some_and(|p| p.is_identity()) && tuple.is_transitive()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub budget: u64,
    /// Use worker threads when the `parallel` feature is enabled.
    pub parallel: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            budget: DEFAULT_BUDGET,
            parallel: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchVerdict {
    /// A verified tuple, ordered like the datum's partitions.
    Realizable {
        tuple: MonodromyTuple,
        examined: u64,
    },
    /// The whole search space was examined without a solution.
    Exceptional { examined: u64 },
    /// The budget ran out first.
    Unknown { examined: u64, budget: u64 },
}

impl SearchVerdict {
    pub fn examined(&self) -> u64 {
        match self {
            Self::Realizable { examined, .. }
            | Self::Exceptional { examined }
            | Self::Unknown { examined, .. } => *examined,
        }
    }
}

/// Decides a candidate over the sphere by exhaustive search within `config.budget`.
pub fn decide_by_search(datum: &CandidateDatum, config: &SearchConfig) -> SearchVerdict {
    if datum.target_euler() != SPHERE_EULER {
        return SearchVerdict::Unknown {
            examined: 0,
            budget: config.budget,
        };
    }
    let d = datum.degree() as usize;
    let parts = datum.partitions();
    let n = parts.len();
    if n < 2 {
        // a single nontrivial permutation is never the identity
        return SearchVerdict::Exceptional { examined: 0 };
    }

    // Largest class fixed, second largest forced, the rest walked.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        class_size(&parts[b])
            .cmp(&class_size(&parts[a]))
            .then(a.cmp(&b))
    });
    let fixed = Permutation::canonical(&parts[order[0]]);
    let forced_type = &parts[order[1]];
    let mut walked: Vec<usize> = order[2..].to_vec();
    walked.sort_by(|&a, &b| {
        class_size(&parts[a])
            .cmp(&class_size(&parts[b]))
            .then(a.cmp(&b))
    });
    let labels: Vec<usize> = std::iter::once(order[0])
        .chain(walked.iter().copied())
        .chain([order[1]])
        .collect();

    let target = TypeCounts::of(forced_type, d);
    let found = match walked.len() {
        0 => {
            if config.budget == 0 {
                return SearchVerdict::Unknown {
                    examined: 0,
                    budget: 0,
                };
            }
            let forced = fixed.inverse();
            let ok = TypeCounts::of(&forced.cycle_type(), d) == target
                && orbit_size(&[fixed.images()], d) == d;
            Scan {
                found: ok.then(|| vec![fixed.clone(), forced]),
                examined: 1,
                complete: true,
            }
        }
        1 => scan_three(&fixed, &parts[walked[0]], &target, config),
        _ => {
            let types: Vec<&Partition> = walked.iter().map(|&i| &parts[i]).collect();
            scan_general(&fixed, &types, forced_type, &target, config.budget)
        }
    };

    match found {
        Scan {
            found: Some(perms),
            examined,
            ..
        } => {
            let tuple = reorder(perms, labels);
            debug_assert!(verify_tuple(&tuple, datum));
            SearchVerdict::Realizable { tuple, examined }
        }
        Scan {
            examined,
            complete: true,
            ..
        } => SearchVerdict::Exceptional { examined },
        Scan { examined, .. } => SearchVerdict::Unknown {
            examined,
            budget: config.budget,
        },
    }
}

struct Scan {
    /// Permutations in search order: fixed, walked..., forced.
    found: Option<Vec<Permutation>>,
    examined: u64,
    /// The search space was fully covered.
    complete: bool,
}

/// Cycle-length histogram, index = length.
#[derive(Clone, PartialEq, Eq, Debug)]
struct TypeCounts(Vec<u32>);

impl TypeCounts {
    fn of(p: &Partition, d: usize) -> Self {
        let mut v = vec![0; d + 1];
        for &x in p.parts() {
            v[x as usize] += 1;
        }
        Self(v)
    }
}

/// Cycle histogram of `images` into `counts`; `seen` is scratch.
fn histogram(images: &[u32], counts: &mut [u32], seen: &mut [bool]) {
    counts.fill(0);
    seen.fill(false);
    for s in 0..images.len() {
        if seen[s] {
            continue;
        }
        let mut len = 0;
        let mut i = s;
        while !seen[i] {
            seen[i] = true;
            len += 1;
            i = images[i] as usize;
        }
        counts[len] += 1;
    }
}

fn orbit_size(gens: &[&[u32]], d: usize) -> usize {
    let mut seen = vec![false; d];
    let mut queue = Vec::with_capacity(d);
    seen[0] = true;
    queue.push(0u32);
    let mut head = 0;
    while head < queue.len() {
        let x = queue[head] as usize;
        head += 1;
        for g in gens {
            let y = g[x];
            if !seen[y as usize] {
                seen[y as usize] = true;
                queue.push(y);
            }
        }
    }
    queue.len()
}

struct ChunkScan {
    /// Position within the chunk and the walked permutation.
    hit: Option<(u64, Vec<u32>)>,
}

const CANCEL_CHECK_INTERVAL: u64 = 1024;

fn scan_chunk(
    fixed: &[u32],
    walked_type: &Partition,
    chunk: ClassChunk,
    limit: u64,
    target: &TypeCounts,
    index: usize,
    best: &AtomicUsize,
) -> ChunkScan {
    let d = fixed.len();
    let mut walker = ClassWalker::new(walked_type, Some(chunk));
    let mut product = vec![0u32; d];
    let mut counts = vec![0u32; d + 1];
    let mut seen = vec![false; d];
    let mut examined = 0u64;
    while examined < limit {
        if examined.is_multiple_of(CANCEL_CHECK_INTERVAL) && best.load(Ordering::Relaxed) < index {
            break;
        }
        let Some(second) = walker.advance() else {
            break;
        };
        examined += 1;
        for i in 0..d {
            product[i] = second[fixed[i] as usize];
        }
        histogram(&product, &mut counts, &mut seen);
        if counts == target.0 && orbit_size(&[fixed, second], d) == d {
            best.fetch_min(index, Ordering::Relaxed);
            return ChunkScan {
                hit: Some((examined - 1, second.to_vec())),
            };
        }
    }
    ChunkScan { hit: None }
}

fn scan_three(
    fixed: &Permutation,
    walked_type: &Partition,
    target: &TypeCounts,
    config: &SearchConfig,
) -> Scan {
    let chunks = class_chunks(walked_type);
    let mut offsets = Vec::with_capacity(chunks.len());
    let mut acc = 0u128;
    for c in &chunks {
        offsets.push(acc);
        acc += c.size;
    }
    let total = acc;
    let budget = config.budget as u128;
    let best = AtomicUsize::new(usize::MAX);
    let run = |(i, c): (usize, &ClassChunk)| -> ChunkScan {
        let limit = budget.saturating_sub(offsets[i]).min(c.size) as u64;
        if limit == 0 {
            return ChunkScan { hit: None };
        }
        scan_chunk(fixed.images(), walked_type, *c, limit, target, i, &best)
    };

    let results: Vec<ChunkScan> = {
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            if config.parallel && chunks.len() > 1 {
                chunks.par_iter().enumerate().map(run).collect()
            } else {
                sequential(&chunks, run)
            }
        }
        #[cfg(not(feature = "parallel"))]
        {
            sequential(&chunks, run)
        }
    };

    for (i, r) in results.iter().enumerate() {
        if let Some((pos, images)) = &r.hit {
            let second = Permutation::from_images_unchecked(images.clone());
            let forced = fixed.then(&second).inverse();
            return Scan {
                found: Some(vec![fixed.clone(), second, forced]),
                examined: (offsets[i] + *pos as u128 + 1) as u64,
                complete: true,
            };
        }
    }
    let complete = total <= budget;
    Scan {
        found: None,
        examined: total.min(budget) as u64,
        complete,
    }
}

/// Runs chunks in order, stopping after the first hit.
fn sequential<F>(chunks: &[ClassChunk], mut run: F) -> Vec<ChunkScan>
where
    F: FnMut((usize, &ClassChunk)) -> ChunkScan,
{
    let mut out = Vec::with_capacity(chunks.len());
    for item in chunks.iter().enumerate() {
        let r = run(item);
        let hit = r.hit.is_some();
        out.push(r);
        if hit {
            break;
        }
    }
    out
}

/// Depth-first search for four or more branch values, sequential.
fn scan_general(
    fixed: &Permutation,
    walked: &[&Partition],
    forced_type: &Partition,
    target: &TypeCounts,
    budget: u64,
) -> Scan {
    let d = fixed.degree();
    // Remaining length budget after position j: sum of d - cycles over the
    // walked types after j plus the forced type.
    let lens: Vec<usize> = walked.iter().map(|p| p.branching() as usize).collect();
    let mut tail = vec![forced_type.branching() as usize; walked.len() + 1];
    for j in (0..walked.len()).rev() {
        tail[j] = tail[j + 1] + lens[j];
    }
    let mut state = GeneralSearch {
        d,
        walked,
        tail,
        target,
        budget,
        examined: 0,
        out_of_budget: false,
        chosen: Vec::new(),
        counts: vec![0; d + 1],
        seen: vec![false; d],
    };
    let fixed_images = fixed.images().to_vec();
    let found = state.rec(0, &fixed_images);
    match found {
        Some(chosen) => {
            let mut perms = vec![fixed.clone()];
            let mut product = fixed.clone();
            for images in chosen {
                let p = Permutation::from_images_unchecked(images);
                product = product.then(&p);
                perms.push(p);
            }
            perms.push(product.inverse());
            Scan {
                found: Some(perms),
                examined: state.examined,
                complete: true,
            }
        }
        None => Scan {
            found: None,
            examined: state.examined,
            complete: !state.out_of_budget,
        },
    }
}

struct GeneralSearch<'a> {
    d: usize,
    walked: &'a [&'a Partition],
    tail: Vec<usize>,
    target: &'a TypeCounts,
    budget: u64,
    examined: u64,
    out_of_budget: bool,
    chosen: Vec<Vec<u32>>,
    counts: Vec<u32>,
    seen: Vec<bool>,
}

impl GeneralSearch<'_> {
    /// `product` is the product of the fixed permutation and `chosen`.
    fn rec(&mut self, j: usize, product: &[u32]) -> Option<Vec<Vec<u32>>> {
        if j == self.walked.len() {
            if self.examined >= self.budget {
                self.out_of_budget = true;
                return None;
            }
            self.examined += 1;
            histogram(product, &mut self.counts, &mut self.seen);
            if self.counts != self.target.0 {
                return None;
            }
            let mut gens: Vec<&[u32]> = self.chosen.iter().map(Vec::as_slice).collect();
            gens.push(product);
            // product and the walked permutations generate the same group as
            // the whole tuple, since the fixed one is their combination
            if orbit_size(&gens, self.d) == self.d {
                return Some(self.chosen.clone());
            }
            return None;
        }
        // the remaining permutations must be able to undo `product`
        histogram(product, &mut self.counts, &mut self.seen);
        let cycles: u32 = self.counts.iter().sum();
        if self.d - cycles as usize > self.tail[j] {
            return None;
        }
        let mut walker = ClassWalker::new(self.walked[j], None);
        let mut next = vec![0u32; self.d];
        while let Some(p) = walker.advance() {
            for i in 0..self.d {
                next[i] = p[product[i] as usize];
            }
            self.chosen.push(p.to_vec());
            let r = self.rec(j + 1, &next.clone());
            self.chosen.pop();
            if r.is_some() {
                return r;
            }
            if self.out_of_budget {
                return None;
            }
        }
        None
    }
}

/// Reorders a tuple so that position `p` carries the cycle type of datum
/// partition `p`, using braid moves that preserve the product and the group.
fn reorder(mut perms: Vec<Permutation>, mut labels: Vec<usize>) -> MonodromyTuple {
    let n = perms.len();
    for pass in 0..n {
        for i in 0..n - 1 - pass {
            if labels[i] > labels[i + 1] {
                // (a, b) -> (a b a^-1, a), product a;b preserved
                let a = perms[i].clone();
                let moved = a.then(&perms[i + 1]).then(&a.inverse());
                perms[i] = moved;
                perms[i + 1] = a;
                labels.swap(i, i + 1);
            }
        }
    }
    MonodromyTuple { perms }
}
