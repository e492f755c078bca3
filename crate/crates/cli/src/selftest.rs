//! Seeded checks runnable from the command line.

use hurwitz::datum::CandidateDatum;
use hurwitz::partition::Partition;
use hurwitz::ratmap::branching_report;
use hurwitz::sample::{lemma_pair, random_lift_input, random_map, random_point_with_value};
use hurwitz::shape::detect_power_shapes;
use hurwitz::split::{all_splits, SplitSolution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::Format;

#[derive(Default)]
struct Tally {
    checked: usize,
    failures: Vec<String>,
}

impl Tally {
    fn record(&mut self, ok: Result<(), String>) {
        self.checked += 1;
        if let Err(e) = ok {
            self.failures.push(e);
        }
    }
}

fn lemma(seed: u64, maps: usize) -> Tally {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Tally::default();
    for _ in 0..maps {
        let g = random_map(&mut rng, 6, 3);
        let z0 = random_point_with_value(&mut rng, &g, 1e-3);
        t.record(
            [2, 3]
                .iter()
                .try_for_each(|&r| match lemma_pair(&g, z0, r) {
                    Ok((a, b)) if a == b => Ok(()),
                    Ok((a, b)) => Err(format!("z0={z0} r={r}: {a} vs {b}")),
                    Err(e) => Err(format!("z0={z0} r={r}: {e}")),
                }),
        );
    }
    t
}

fn reports(seed: u64, maps: usize) -> Tally {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut t = Tally::default();
    for _ in 0..maps {
        let f = random_map(&mut rng, 6, 3);
        t.record(match branching_report(&f) {
            Ok(r) if r.total_branching == 2 * u64::from(f.degree()) - 2 => Ok(()),
            Ok(r) => Err(format!(
                "total branching {} at degree {}",
                r.total_branching,
                f.degree()
            )),
            Err(e) => Err(e.to_string()),
        });
    }
    t
}

fn lifts(seed: u64, count: usize) -> Tally {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Tally::default();
    for _ in 0..count {
        let s = random_lift_input(&mut rng, 6, 4);
        let (r, k) = (s.r, s.x.degree());
        let mut padded = s.splits.clone();
        padded.resize(r as usize, Partition::trivial(k));
        let expected = SplitSolution::new(padded);
        let found = s
            .lifted
            .clone()
            .into_candidate()
            .ok()
            .and_then(|c: CandidateDatum| detect_power_shapes(&c).ok())
            .unwrap_or_default()
            .into_iter()
            .filter(|sh| {
                sh.r == r
                    && sh.k == k
                    && ((sh.x == s.x && sh.y == s.y) || (sh.x == s.y && sh.y == s.x))
            })
            .any(|sh| all_splits(&sh.mu1, r, k).is_ok_and(|all| all.solutions.contains(&expected)));
        t.record(if found {
            Ok(())
        } else {
            Err(format!("{} (r={r})", s.lifted))
        });
    }
    t
}

pub fn run(seed: u64, maps: usize, lift_count: usize, format: Format) -> (String, u8) {
    let checks = [
        ("lemma", lemma(seed, maps)),
        ("reports", reports(seed, maps)),
        ("lifts", lifts(seed, lift_count)),
    ];
    let ok = checks.iter().all(|(_, t)| t.failures.is_empty());
    let text = match format {
        Format::Json => {
            let mut v = json!({ "seed": seed, "passed": ok });
            for (name, t) in &checks {
                v[*name] = json!({ "checked": t.checked, "failures": t.failures });
            }
            format!("{v}\n")
        }
        Format::Table => {
            let mut s = String::new();
            for (name, t) in &checks {
                let passed = t.checked - t.failures.len();
                s.push_str(&format!("{name:<8} {passed}/{} (seed {seed})\n", t.checked));
                for f in &t.failures {
                    s.push_str(&format!("  {f}\n"));
                }
            }
            s
        }
    };
    (text, if ok { 0 } else { 1 })
}
