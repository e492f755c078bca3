//! Invariants of the combinatorial layer, checked on generated inputs.

use std::collections::BTreeSet;

use hurwitz::criteria::lift_roots_of_unity;
use hurwitz::datum::{enumerate_candidates, parse_partition, BranchingDatum, CandidateDatum};
use hurwitz::oracle::{decide_by_search, verify_tuple, SearchConfig, SearchVerdict};
use hurwitz::partition::Partition;
use hurwitz::perm::Permutation;
use hurwitz::sample::random_lift_input;
use hurwitz::shape::detect_power_shapes;
use hurwitz::split::{all_splits, can_split, find_split, SplitSolution};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A partition of `n` from a list of cut points.
fn partition_of(n: u32) -> impl Strategy<Value = Partition> {
    prop::collection::vec(1..=n, 0..n as usize).prop_map(move |mut cuts| {
        cuts.push(n);
        cuts.sort_unstable();
        cuts.dedup();
        let mut last = 0;
        let parts = cuts
            .into_iter()
            .map(|c| {
                let p = c - last;
                last = c;
                p
            })
            .collect();
        Partition::new(parts).unwrap()
    })
}

fn datum_parts(max_degree: u32) -> impl Strategy<Value = (u32, Vec<Partition>)> {
    (2..=max_degree).prop_flat_map(|d| (Just(d), prop::collection::vec(partition_of(d), 1..5)))
}

/// Every assignment of parts to `r` labelled groups, kept when all groups sum to `k`.
fn brute_force_splits(mu: &Partition, r: u32, k: u32) -> BTreeSet<SplitSolution> {
    let parts = mu.parts();
    let mut out = BTreeSet::new();
    let mut labels = vec![0u32; parts.len()];
    loop {
        let mut sums = vec![0u32; r as usize];
        for (p, &g) in parts.iter().zip(&labels) {
            sums[g as usize] += p;
        }
        if sums.iter().all(|&s| s == k) {
            let groups = (0..r)
                .map(|g| {
                    let members = parts
                        .iter()
                        .zip(&labels)
                        .filter(|(_, &l)| l == g)
                        .map(|(p, _)| *p)
                        .collect();
                    Partition::new(members).unwrap()
                })
                .collect();
            out.insert(SplitSolution::new(groups));
        }
        let mut i = 0;
        loop {
            if i == labels.len() {
                return out;
            }
            labels[i] += 1;
            if labels[i] < r {
                break;
            }
            labels[i] = 0;
            i += 1;
        }
    }
}

proptest! {
    #[test]
    fn canonical_form_ignores_order((d, parts) in datum_parts(8), seed in any::<u64>()) {
        let mut shuffled = parts.clone();
        let n = shuffled.len();
        shuffled.rotate_left(seed as usize % n);
        if seed % 2 == 1 {
            shuffled.reverse();
        }
        let a = BranchingDatum::new(d, parts);
        let b = BranchingDatum::new(d, shuffled);
        prop_assert_eq!(a.is_ok(), b.is_ok());
        prop_assert_eq!(a.clone().ok(), b.ok());
        if let Ok(a) = a {
            let text = a.to_string();
            prop_assert_eq!(text.parse::<BranchingDatum>().unwrap(), a);
        }
    }

    #[test]
    fn partition_text_round_trips(p in (1u32..12).prop_flat_map(partition_of)) {
        let back = parse_partition(&p.to_string()).unwrap();
        prop_assert_eq!(back.degree(), p.degree());
        prop_assert_eq!(&back, &p);
        prop_assert!(p.parts().windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn candidates_respect_riemann_hurwitz((d, parts) in datum_parts(7)) {
        let Ok(datum) = BranchingDatum::new(d, parts) else { return Ok(()) };
        let nu = datum.total_branching();
        let source = 2 * i64::from(d) - nu as i64;
        let fibers: i64 = datum.partitions().iter().map(|p| p.len() as i64).sum();
        prop_assert_eq!(source, fibers - (datum.len() as i64 - 2) * i64::from(d));
        match datum.into_candidate() {
            Ok(c) => prop_assert_eq!(c.source_euler(), source),
            Err(_) => prop_assert!(source > 2 || source % 2 != 0),
        }
    }

    #[test]
    fn splits_agree_with_brute_force(
        (r, k, mu) in (2u32..=3, 1u32..=5).prop_flat_map(|(r, k)| (Just(r), Just(k), partition_of(r * k)))
    ) {
        prop_assume!(mu.len() <= 9);
        let expected = brute_force_splits(&mu, r, k);
        let found = all_splits(&mu, r, k).unwrap();
        prop_assert!(!found.truncated);
        let listed: BTreeSet<SplitSolution> = found.solutions.iter().cloned().collect();
        prop_assert_eq!(listed.len(), found.solutions.len(), "duplicates");
        prop_assert_eq!(&listed, &expected);
        prop_assert_eq!(can_split(&mu, r, k).unwrap(), !expected.is_empty());
        match find_split(&mu, r, k).unwrap() {
            Some(s) => prop_assert!(s.is_split_of(&mu, r, k)),
            None => prop_assert!(expected.is_empty()),
        }
    }

    #[test]
    fn permutation_algebra(images in Just((0u32..7).collect::<Vec<_>>()).prop_shuffle()) {
        let p = Permutation::new(images).unwrap();
        prop_assert!(p.then(&p.inverse()).is_identity());
        prop_assert!(p.inverse().then(&p).is_identity());
        prop_assert_eq!(p.cycle_type().degree(), 7);
        prop_assert_eq!(p.inverse().cycle_type(), p.cycle_type());
        let back = Permutation::from_cycle_notation(&p.to_cycle_notation(), 7).unwrap();
        prop_assert_eq!(back, p);
    }
}

#[test]
fn lifts_are_recovered_by_shape_detection() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..50 {
        let sample = random_lift_input(&mut rng, 6, 4);
        let (r, k) = (sample.r, sample.x.degree());
        let candidate: CandidateDatum = sample.lifted.clone().into_candidate().unwrap();
        let shapes = detect_power_shapes(&candidate).unwrap();
        let mut padded = sample.splits.clone();
        padded.resize(r as usize, Partition::trivial(k));
        let expected = SplitSolution::new(padded);
        let matching = shapes.iter().find(|s| {
            s.r == r
                && s.k == k
                && ((s.x == sample.x && s.y == sample.y) || (s.x == sample.y && s.y == sample.x))
        });
        let shape = matching.unwrap_or_else(|| panic!("{} not detected as r={r}", sample.lifted));
        let splits = all_splits(&shape.mu1, r, k).unwrap();
        assert!(splits.solutions.contains(&expected), "{}", sample.lifted);
        assert!(expected.is_split_of(&shape.mu1, r, k));
    }
}

#[test]
fn lifts_commute_with_reordering_the_splits() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..30 {
        let sample = random_lift_input(&mut rng, 5, 3);
        let mut reversed = sample.splits.clone();
        reversed.reverse();
        let again = lift_roots_of_unity(&reversed, &sample.y, &sample.x, sample.r).unwrap();
        assert_eq!(again, sample.lifted);
    }
}

#[test]
fn search_certificates_verify() {
    let config = SearchConfig {
        budget: 1_000_000,
        parallel: false,
    };
    for d in 2..=6 {
        for n in 3..=4 {
            for c in enumerate_candidates(d, n, 2) {
                match decide_by_search(&c, &config) {
                    SearchVerdict::Realizable { tuple, .. } => {
                        assert!(verify_tuple(&tuple, &c), "{c}")
                    }
                    SearchVerdict::Exceptional { .. } => {}
                    SearchVerdict::Unknown { .. } => panic!("{c} exceeded the budget"),
                }
            }
        }
    }
}
