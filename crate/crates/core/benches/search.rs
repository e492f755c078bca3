//! Oracle and engine throughput, threaded against single-threaded.
//!
//! Without the `parallel` feature both variants run the sequential path.

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use hurwitz::criteria::{decide_all, Engine, EngineConfig};
use hurwitz::datum::{enumerate_candidates, CandidateDatum};
use hurwitz::oracle::{decide_by_search, SearchConfig, DEFAULT_BUDGET};

fn search(parallel: bool) -> SearchConfig {
    SearchConfig {
        budget: DEFAULT_BUDGET,
        parallel,
    }
}

/// Exhaustive searches: the oracle must visit every tuple.
fn oracle_exhaustion(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle_exhaustion");
    group.sample_size(10);
    for text in [
        "8:[5,3];[2,2,2,2];[2,2,2,2]",
        "9:[2,2,2,2,1];[3,3,3];[3,3,3]",
        "10:[6,4];[2,2,2,2,2];[2,2,2,2,2]",
        "12:[7,5];[2,2,2,2,2,2];[2,2,2,2,2,2]",
    ] {
        let datum: CandidateDatum = text.parse().unwrap();
        for (name, parallel) in [("parallel", true), ("sequential", false)] {
            group.bench_with_input(BenchmarkId::new(name, text), &datum, |b, d| {
                b.iter(|| decide_by_search(d, &search(parallel)))
            });
        }
    }
    group.finish();
}

/// Every three-point sphere candidate of one degree, decided by the oracle alone.
fn oracle_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle_sweep");
    group.sample_size(10);
    for degree in [7, 9] {
        let data: Vec<CandidateDatum> = enumerate_candidates(degree, 3, 2).collect();
        for (name, parallel) in [("parallel", true), ("sequential", false)] {
            group.bench_with_input(BenchmarkId::new(name, degree), &data, |b, data| {
                b.iter(|| {
                    for d in data {
                        black_box(decide_by_search(d, &search(parallel)));
                    }
                })
            });
        }
    }
    group.finish();
}

/// The full pipeline with a fresh memo per iteration.
fn engine_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("engine_sweep");
    group.sample_size(10);
    for degree in [8, 10] {
        let data: Vec<CandidateDatum> = enumerate_candidates(degree, 3, 2).collect();
        for (name, parallel) in [("parallel", true), ("sequential", false)] {
            let config = EngineConfig {
                search: search(parallel),
                ..EngineConfig::default()
            };
            group.bench_with_input(BenchmarkId::new(name, degree), &data, |b, data| {
                b.iter(|| decide_all(&Engine::new(config.clone()), data))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, oracle_exhaustion, oracle_sweep, engine_sweep);
criterion_main!(benches);
