//! Branching data of explicit rational maps, read off numerically.

use num_complex::Complex64;
use serde::Serialize;

use crate::datum::{BranchingDatum, DatumError};
use crate::partition::Partition;

use super::map::{RationalMap, CANCELLED};
use super::moebius::Point;
use super::poly::{relative_residual, Poly};

use super::RatmapError;

/// Critical values closer than this (chordal) are one branch value.
pub const VALUE_TOLERANCE: f64 = 1e-6;
/// Fiber points closer than this (chordal) are one preimage.
pub const ROOT_TOLERANCE: f64 = 1e-4;
/// Fiber points this close (chordal) are candidates for one scattered root.
const COARSE_TOLERANCE: f64 = 1e-2;
/// Taylor ratio below which a group mean counts as a multiple root.
const MULTIPLE_ROOT: f64 = 1e-12;
const NEWTON_STEPS: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportEntry {
    pub value: Point,
    pub partition: Partition,
    /// Largest relative residual of `N - vD` over the fiber's cluster centers.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BranchingReport {
    pub degree: u32,
    pub entries: Vec<ReportEntry>,
    pub total_branching: u64,
}

impl BranchingReport {
    pub fn datum(&self) -> Result<BranchingDatum, DatumError> {
        BranchingDatum::new(
            self.degree,
            self.entries.iter().map(|e| e.partition.clone()).collect(),
        )
    }

    pub fn max_residual(&self) -> f64 {
        self.entries.iter().map(|e| e.residual).fold(0.0, f64::max)
    }

    pub fn entry_at(&self, value: Point, tolerance: f64) -> Option<&ReportEntry> {
        self.entries
            .iter()
            .find(|e| e.value.chordal(&value) < tolerance)
    }
}

/// Groups indices whose points are within `tolerance` of some other member.
fn clusters(points: &[Point], tolerance: f64) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..points.len()).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut root = i;
        while parent[root] != root {
            root = parent[root];
        }
        let mut j = i;
        while parent[j] != root {
            let next = parent[j];
            parent[j] = root;
            j = next;
        }
        root
    }
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if points[i].chordal(&points[j]) < tolerance {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; points.len()];
    for i in 0..points.len() {
        let root = find(&mut parent, i);
        if slot[root] == usize::MAX {
            slot[root] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[root]].push(i);
    }
    groups
}

/// Infinity if any member is infinite or the mean is chordally near it.
fn center(points: &[Point], members: &[usize]) -> Point {
    let mut sum = Complex64::default();
    for &i in members {
        match points[i] {
            Point::Infinity => return Point::Infinity,
            Point::Finite(z) => sum += z,
        }
    }
    let mean = Point::Finite(sum / members.len() as f64);
    if mean.chordal(&Point::Infinity) < VALUE_TOLERANCE {
        Point::Infinity
    } else {
        mean
    }
}

/// `N - vD` (or `D` over infinity) with the coefficient magnitudes that
/// bound rounding in it, and the multiplicity sitting at infinity.
pub(crate) struct Fiber {
    poly: Poly,
    magnitude: Poly,
    deficit: u32,
}

impl Fiber {
    pub(crate) fn new(num: &Poly, den: &Poly, value: Point) -> Self {
        let (poly, magnitude) = match value {
            Point::Infinity => (den.clone(), den.magnitude()),
            Point::Finite(v) => {
                let magnitude = num
                    .magnitude()
                    .add(&den.magnitude().scale(Complex64::new(v.norm(), 0.0)));
                (
                    num.sub(&den.scale(v))
                        .snapped_against(&magnitude, CANCELLED),
                    magnitude,
                )
            }
        };
        let degree = num.degree().max(den.degree()).unwrap_or(0);
        let deficit = (degree - poly.degree().unwrap_or(0)) as u32;
        Self {
            poly,
            magnitude,
            deficit,
        }
    }

    pub(crate) fn poly(&self) -> &Poly {
        &self.poly
    }

    /// Each Taylor coefficient at `z0` over its rounding bound.
    pub(crate) fn ratios(&self, z0: Complex64) -> Vec<f64> {
        let bounds = self.magnitude.taylor_at(Complex64::new(z0.norm(), 0.0));
        self.poly
            .taylor_at(z0)
            .iter()
            .enumerate()
            .map(|(j, t)| match bounds.get(j).map(|b| b.re) {
                Some(b) if b > 0.0 => t.norm() / b,
                _ => 0.0,
            })
            .collect()
    }

    fn points(&self) -> Result<Vec<Point>, RatmapError> {
        let mut points: Vec<Point> = self.poly.roots()?.into_iter().map(Point::Finite).collect();
        points.extend(std::iter::repeat_n(Point::Infinity, self.deficit as usize));
        Ok(points)
    }

    /// A scattered `m`-fold root: after Newton on the `(m-1)`-th derivative,
    /// where the root is simple, the first `m` Taylor coefficients are noise.
    fn is_multiple_root(&self, at: Point, m: usize) -> bool {
        let Point::Finite(mut z) = at else {
            return false;
        };
        let q = (1..m).fold(self.poly.clone(), |p, _| p.derivative());
        let dq = q.derivative();
        for _ in 0..NEWTON_STEPS {
            let slope = dq.eval(z);
            if slope == Complex64::default() {
                break;
            }
            let step = q.eval(z) / slope;
            z -= step;
            if step.norm() <= f64::EPSILON * z.norm().max(1.0) {
                break;
            }
        }
        self.ratios(z).iter().take(m).all(|&r| r < MULTIPLE_ROOT)
    }

    /// Fiber points grouped so that every member lies within
    /// `ROOT_TOLERANCE` of its group's mean, or the group is numerically a
    /// single multiple root.
    fn groups(&self, points: &[Point]) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        for coarse in clusters(points, COARSE_TOLERANCE) {
            let c = center(points, &coarse);
            if coarse
                .iter()
                .all(|&i| points[i].chordal(&c) < ROOT_TOLERANCE)
                || self.is_multiple_root(c, coarse.len())
            {
                out.push(coarse);
                continue;
            }
            let sub: Vec<Point> = coarse.iter().map(|&i| points[i]).collect();
            out.extend(
                clusters(&sub, ROOT_TOLERANCE)
                    .into_iter()
                    .map(|g| g.into_iter().map(|j| coarse[j]).collect::<Vec<_>>()),
            );
        }
        out
    }

    /// Cluster sizes, the largest relative residual over cluster centers,
    /// and the centers of clusters with more than one point.
    fn partition(&self) -> Result<(Partition, f64, Vec<Point>), RatmapError> {
        let points = self.points()?;
        let groups = self.groups(&points);
        let mut residual: f64 = 0.0;
        let mut ramified = Vec::new();
        for g in &groups {
            let c = center(&points, g);
            if let Point::Finite(z) = c {
                residual = residual.max(relative_residual(&self.poly, z));
            }
            if g.len() > 1 {
                ramified.push(c);
            }
        }
        let sizes: Vec<u32> = groups.iter().map(|g| g.len() as u32).collect();
        let partition =
            Partition::new(sizes).map_err(|e| RatmapError::RootFindingFailure(e.to_string()))?;
        Ok((partition, residual, ramified))
    }

    /// Size of the cluster centered at `z0`, if there is one.
    pub(crate) fn multiplicity_at(&self, z0: Complex64) -> Result<Option<u32>, RatmapError> {
        let points = self.points()?;
        let at = Point::Finite(z0);
        Ok(self
            .groups(&points)
            .into_iter()
            .find(|g| center(&points, g).chordal(&at) < ROOT_TOLERANCE)
            .map(|g| g.len() as u32))
    }
}

/// Critical points, critical values clustered on the sphere, and the local
/// degrees over each value. The result must satisfy Riemann-Hurwitz for a
/// map between spheres.
pub fn branching_report(f: &RationalMap) -> Result<BranchingReport, RatmapError> {
    let degree = f.degree();
    if degree < 2 {
        return Err(RatmapError::DegreeTooSmall(degree));
    }
    let mut critical: Vec<Point> = f
        .wronskian()
        .roots()?
        .into_iter()
        .map(Point::Finite)
        .collect();
    let at_infinity = f.degree_at_infinity() > 1;
    if at_infinity {
        critical.push(Point::Infinity);
    }
    let values: Vec<Point> = critical
        .iter()
        .map(|&c| match f.eval(c) {
            v @ Point::Finite(_) if v.chordal(&Point::Infinity) < VALUE_TOLERANCE => {
                Point::Infinity
            }
            v => v,
        })
        .collect();
    let exact_at_infinity = at_infinity.then(|| f.eval(Point::Infinity));
    let mut readings: Vec<(ReportEntry, Vec<Point>)> = Vec::new();
    for group in clusters(&values, VALUE_TOLERANCE) {
        let mut value = center(&values, &group);
        if let Some(exact) = exact_at_infinity {
            if group.iter().any(|&i| critical[i].is_infinite()) {
                value = exact;
            }
        }
        let (partition, residual, ramified) = Fiber::new(f.num(), f.den(), value).partition()?;
        if !partition.nontrivial() {
            continue;
        }
        let entry = ReportEntry {
            value,
            partition,
            residual,
        };
        // A point lies over one value only: poorly separated critical values
        // that reach the same ramified points are one fiber, read best where
        // the most ramification resolved.
        let shared = readings.iter().position(|(_, seen)| {
            seen.iter()
                .any(|a| ramified.iter().any(|b| a.chordal(b) < ROOT_TOLERANCE))
        });
        match shared {
            Some(i) => {
                let kept = &readings[i].0;
                let better = (entry.partition.branching(), -entry.residual)
                    > (kept.partition.branching(), -kept.residual);
                if better {
                    readings[i] = (entry, ramified);
                }
            }
            None => readings.push((entry, ramified)),
        }
    }
    let mut entries: Vec<ReportEntry> = readings.into_iter().map(|(e, _)| e).collect();
    entries.sort_by(|a, b| a.value.report_order(&b.value));
    let total_branching: u64 = entries
        .iter()
        .map(|e| u64::from(e.partition.branching()))
        .sum();
    let expected = 2 * u64::from(degree) - 2;
    let report = BranchingReport {
        degree,
        entries,
        total_branching,
    };
    if total_branching != expected {
        let found = report
            .entries
            .iter()
            .map(|e| format!("{}@{}", e.partition, e.value))
            .collect::<Vec<_>>()
            .join(" ");
        return Err(RatmapError::InconsistentReport {
            expected,
            found: total_branching,
            entries: found,
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratmap::{apply_moebius, build_map, power, Side};
    use std::f64::consts::TAU;

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

    fn parts(report: &BranchingReport) -> Vec<(String, Vec<u32>)> {
        report
            .entries
            .iter()
            .map(|e| (e.value.to_string(), e.partition.parts().to_vec()))
            .collect()
    }

    #[test]
    fn cayley_maps() {
        for k in 2..=6 {
            let r = branching_report(&cayley(k)).unwrap();
            assert_eq!(r.entries.len(), 2);
            assert!(r.entry_at(Point::finite(-1.0, 0.0), 1e-9).is_some());
            assert!(r.entry_at(Point::finite(1.0, 0.0), 1e-9).is_some());
            assert!(r.entries.iter().all(|e| e.partition.parts() == [k]));
            assert!(r.max_residual() < 1e-8);

            let sq = branching_report(&power(&cayley(k), 2)).unwrap();
            let twos = vec![2; k as usize];
            assert_eq!(
                sq.entry_at(Point::finite(1.0, 0.0), 1e-9)
                    .unwrap()
                    .partition
                    .parts(),
                [k, k]
            );
            assert_eq!(
                sq.entry_at(Point::finite(0.0, 0.0), 1e-9)
                    .unwrap()
                    .partition
                    .parts(),
                twos
            );
            assert_eq!(
                sq.entry_at(Point::Infinity, 1e-9)
                    .unwrap()
                    .partition
                    .parts(),
                twos
            );
            assert!(sq.max_residual() < 1e-8);
        }
    }

    #[test]
    fn pure_power() {
        let f = build_map(&[(Complex64::default(), 4)], &[]).unwrap();
        let r = branching_report(&f).unwrap();
        assert_eq!(
            parts(&r),
            vec![("0".to_string(), vec![4]), ("inf".to_string(), vec![4])]
        );
    }

    #[test]
    fn degree_one_rejected() {
        let f = build_map(
            &[(Complex64::default(), 1)],
            &[(Complex64::new(1.0, 0.0), 1)],
        )
        .unwrap();
        assert!(matches!(
            branching_report(&f),
            Err(RatmapError::DegreeTooSmall(1))
        ));
    }

    #[test]
    fn moebius_moves_values_not_partitions() {
        let g = cayley(3);
        let third = Point::finite(0.0, 2.0);
        let from = [Point::finite(-1.0, 0.0), Point::finite(1.0, 0.0), third];
        let to = [Point::finite(0.0, 0.0), Point::Infinity, third];
        let h = apply_moebius(&g, &from, &to, Side::Target).unwrap();
        let r = branching_report(&h).unwrap();
        assert_eq!(
            r.entry_at(Point::finite(0.0, 0.0), 1e-6)
                .unwrap()
                .partition
                .parts(),
            [3]
        );
        assert_eq!(
            r.entry_at(Point::Infinity, 1e-6).unwrap().partition.parts(),
            [3]
        );
    }
}
