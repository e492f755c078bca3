//! Seeded random inputs for property checks.

use num_complex::Complex64;
use rand::Rng;

use crate::criteria::lift_roots_of_unity;
use crate::datum::BranchingDatum;
use crate::partition::Partition;
use crate::ratmap::{build_scaled, local_degree, power, Point, RationalMap, RatmapError};

/// A uniformly chosen composition of `n`, sorted into a partition.
pub fn random_partition<R: Rng + ?Sized>(rng: &mut R, n: u32) -> Partition {
    let mut parts = Vec::new();
    let mut left = n;
    while left > 0 {
        let p = rng.gen_range(1..=left);
        parts.push(p);
        left -= p;
    }
    Partition::new(parts).expect("positive parts")
}

fn separated_point<R: Rng + ?Sized>(rng: &mut R, taken: &[Complex64], gap: f64) -> Complex64 {
    loop {
        let z = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        if taken.iter().all(|w| (z - w).norm() > gap) {
            return z;
        }
    }
}

/// A map of degree `2..=max_degree` in product form with well separated
/// zeros and poles, each of multiplicity at most `max_multiplicity`.
/// Poles may total less than the degree; the rest sit at infinity.
pub fn random_map<R: Rng + ?Sized>(
    rng: &mut R,
    max_degree: u32,
    max_multiplicity: u32,
) -> RationalMap {
    let degree = rng.gen_range(2..=max_degree.max(2));
    let pole_total = rng.gen_range(0..=degree);
    let mut taken = Vec::new();
    let mut place = |rng: &mut R, total: u32| {
        let mut items = Vec::new();
        let mut left = total;
        while left > 0 {
            let m = rng.gen_range(1..=left.min(max_multiplicity.max(1)));
            let z = separated_point(rng, &taken, 0.25);
            taken.push(z);
            items.push((z, m));
            left -= m;
        }
        items
    };
    let zeros = place(rng, degree);
    let poles = place(rng, pole_total);
    let scale = Complex64::from_polar(
        rng.gen_range(0.5..2.0),
        rng.gen_range(0.0..std::f64::consts::TAU),
    );
    build_scaled(scale, &zeros, &poles).expect("separated points give a valid map")
}

/// A finite point where `|f| > min_value` and `f` is finite.
pub fn random_point_with_value<R: Rng + ?Sized>(
    rng: &mut R,
    f: &RationalMap,
    min_value: f64,
) -> Complex64 {
    loop {
        let z = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        if let Point::Finite(v) = f.eval(Point::Finite(z)) {
            if v.norm() > min_value && v.norm() < 1e6 {
                return z;
            }
        }
    }
}

/// Local degrees of `g` and `g^r` at `z0`.
pub fn lemma_pair(g: &RationalMap, z0: Complex64, r: u32) -> Result<(u32, u32), RatmapError> {
    let p = Point::Finite(z0);
    Ok((local_degree(g, p)?, local_degree(&power(g, r), p)?))
}

/// Inputs to a roots-of-unity lift whose base is a sphere candidate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftSample {
    pub splits: Vec<Partition>,
    pub x: Partition,
    pub y: Partition,
    pub r: u32,
    pub lifted: BranchingDatum,
}

/// Rejection-samples `(splits, x, y, r)` with `k <= max_k`, `r <= max_r`,
/// at least one nontrivial split, and a base datum of total branching `2k - 2`.
pub fn random_lift_input<R: Rng + ?Sized>(rng: &mut R, max_k: u32, max_r: u32) -> LiftSample {
    loop {
        let k = rng.gen_range(2..=max_k.max(2));
        let r = rng.gen_range(2..=max_r.max(2));
        let s = rng.gen_range(1..=r);
        let splits: Vec<Partition> = (0..s)
            .map(|_| random_partition(rng, k))
            .filter(|p| p.nontrivial())
            .collect();
        if splits.is_empty() {
            continue;
        }
        let x = random_partition(rng, k);
        let y = random_partition(rng, k);
        let nu: u32 = splits.iter().chain([&x, &y]).map(|p| p.branching()).sum();
        if nu != 2 * k - 2 {
            continue;
        }
        let Ok(lifted) = lift_roots_of_unity(&splits, &x, &y, r) else {
            continue;
        };
        return LiftSample {
            splits,
            x,
            y,
            r,
            lifted,
        };
    }
}
