//! Numeric properties of explicit rational maps over seeded random samples.

use std::f64::consts::TAU;

use hurwitz::ratmap::{
    apply_moebius, branching_report, build_map, local_degree, power, Complex64, Point, RationalMap,
    Side,
};
use hurwitz::sample::{lemma_pair, random_map, random_point_with_value};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cayley(k: u32) -> RationalMap {
    let ring = |offset: f64| -> Vec<(Complex64, u32)> {
        (0..k)
            .map(|j| {
                (
                    Complex64::from_polar(1.0, TAU * (j as f64 + offset) / k as f64),
                    1,
                )
            })
            .collect()
    };
    build_map(&ring(0.0), &ring(0.5)).unwrap()
}

fn sorted_partitions(f: &RationalMap) -> Vec<Vec<u32>> {
    let mut out: Vec<Vec<u32>> = branching_report(f)
        .unwrap()
        .entries
        .iter()
        .map(|e| e.partition.parts().to_vec())
        .collect();
    out.sort();
    out
}

#[test]
fn local_degree_survives_powers_at_regular_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..100 {
        let g = random_map(&mut rng, 6, 3);
        let z0 = random_point_with_value(&mut rng, &g, 1e-3);
        for r in [2, 3] {
            let (a, b) = lemma_pair(&g, z0, r).unwrap();
            assert_eq!(a, b, "r={r} z0={z0}");
        }
    }
}

#[test]
fn coefficient_form_agrees_at_regular_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(4048);
    for _ in 0..100 {
        let product = random_map(&mut rng, 6, 3);
        let g =
            RationalMap::from_coefficients(product.num().clone(), product.den().clone()).unwrap();
        assert!(g.factored().is_none());
        let z0 = random_point_with_value(&mut rng, &g, 1e-3);
        let p = Point::Finite(z0);
        let expected = local_degree(&product, p).unwrap();
        for r in [1, 2, 3] {
            assert_eq!(
                local_degree(&power(&g, r), p).unwrap(),
                expected,
                "r={r} z0={z0}"
            );
        }
    }
}

#[test]
fn local_degree_survives_powers_at_critical_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut checked = 0;
    for _ in 0..60 {
        let g = random_map(&mut rng, 6, 3);
        for c in g.wronskian().roots().unwrap() {
            let Point::Finite(v) = g.eval(Point::Finite(c)) else {
                continue;
            };
            if v.norm() < 1e-3 || v.norm() > 1e6 {
                continue;
            }
            for r in [2, 3] {
                let (a, b) = lemma_pair(&g, c, r).unwrap();
                assert!(a >= 2, "{c} is critical");
                assert_eq!(a, b, "r={r} z0={c}");
            }
            checked += 1;
        }
    }
    assert!(checked > 50, "only {checked} critical points");
}

#[test]
fn reports_satisfy_riemann_hurwitz() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let f = random_map(&mut rng, 6, 3);
        let report = branching_report(&f).unwrap();
        assert_eq!(report.total_branching, 2 * u64::from(f.degree()) - 2);
        for e in &report.entries {
            assert_eq!(e.partition.degree(), f.degree());
            assert!(e.residual < 1e-8, "residual {}", e.residual);
        }
    }
}

#[test]
fn cayley_squares_reproduce_the_two_two_datum() {
    for k in 2..=6 {
        let f = power(&cayley(k), 2);
        let twos = vec![2; k as usize];
        let mut expected = vec![vec![k, k], twos.clone(), twos];
        expected.sort();
        assert_eq!(sorted_partitions(&f), expected, "k={k}");
    }
}

fn random_triple(rng: &mut ChaCha8Rng) -> [Point; 3] {
    let mut pick = || Point::finite(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
    let mut t = [pick(), pick(), pick()];
    if rng.gen_bool(0.3) {
        t[rng.gen_range(0..3)] = Point::Infinity;
    }
    t
}

#[test]
fn moebius_changes_keep_partitions() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut done = 0;
    while done < 100 {
        let f = random_map(&mut rng, 6, 3);
        let (from, to) = (random_triple(&mut rng), random_triple(&mut rng));
        let side = if rng.gen_bool(0.5) {
            Side::Target
        } else {
            Side::Source
        };
        let Ok(h) = apply_moebius(&f, &from, &to, side) else {
            continue;
        };
        assert_eq!(sorted_partitions(&h), sorted_partitions(&f));
        done += 1;
    }
    let g = cayley(3);
    let omega = |j: u32| Point::Finite(Complex64::from_polar(1.0, TAU * j as f64 / 3.0));
    let from = [omega(0), omega(1), omega(2)];
    let to = [
        Point::finite(0.0, 0.0),
        Point::finite(2.0, 1.0),
        Point::Infinity,
    ];
    let h = apply_moebius(&g, &from, &to, Side::Source).unwrap();
    assert_eq!(sorted_partitions(&h), vec![vec![3], vec![3]]);
}

#[test]
fn target_moebius_relocates_values() {
    let g = cayley(3);
    let third = Point::finite(0.5, 0.5);
    let from = [Point::finite(-1.0, 0.0), Point::finite(1.0, 0.0), third];
    let to = [Point::finite(0.0, 0.0), Point::Infinity, third];
    let h = apply_moebius(&g, &from, &to, Side::Target).unwrap();
    let report = branching_report(&h).unwrap();
    let values: Vec<Point> = report.entries.iter().map(|e| e.value).collect();
    assert_eq!(values.len(), 2);
    assert!(values[0].chordal(&Point::finite(0.0, 0.0)) < 1e-6);
    assert!(values[1].is_infinite());
}

#[test]
fn derivative_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut checked = 0;
    while checked < 200 {
        let f = random_map(&mut rng, 6, 3);
        let z = random_point_with_value(&mut rng, &f, 1e-3);
        let Some(exact) = f.derivative_at(z) else {
            continue;
        };
        if exact.norm() < 1e-3 || exact.norm() > 1e3 {
            continue;
        }
        let at = |w: Complex64| match f.eval(Point::Finite(w)) {
            Point::Finite(v) => v,
            Point::Infinity => Complex64::new(f64::NAN, 0.0),
        };
        let h = 1e-5;
        let estimate = (at(z + h) - at(z - h)
            + (at(z + Complex64::i() * h) - at(z - Complex64::i() * h)) / Complex64::i())
            / (4.0 * h);
        assert!((estimate - exact).norm() / exact.norm() < 1e-6, "{z}");
        checked += 1;
    }
}

#[test]
fn local_degree_at_special_points() {
    let g = cayley(4);
    assert_eq!(local_degree(&g, Point::finite(0.0, 0.0)).unwrap(), 4);
    assert_eq!(local_degree(&g, Point::Infinity).unwrap(), 4);
    let pole = Point::Finite(Complex64::from_polar(1.0, TAU / 8.0));
    assert_eq!(local_degree(&g, pole).unwrap(), 1);
    assert_eq!(local_degree(&power(&g, 3), pole).unwrap(), 3);
}
