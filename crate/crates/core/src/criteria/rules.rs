//! Shape rules: the split criterion for power shapes and the two
//! if-and-only-if criteria for degree `2k` data with an all-2 fiber.

use crate::datum::{BranchingDatum, CandidateDatum, DatumError};
use crate::oracle::MonodromyTuple;
use crate::partition::{gcd, Partition};
use crate::perm::Permutation;
use crate::shape::{detect_power_shapes, PowerShape};
use crate::split::{can_split, find_split};

use super::{Axiom, Certificate, Method, Obstruction, Trace, Verdict, Violation, LIFT_ASSUMPTION};

/// Every necessary condition `shape.mu1` fails.
pub(crate) fn shape_violations(shape: &PowerShape) -> Vec<Violation> {
    let PowerShape { r, k, mu1, .. } = shape;
    let mut out = Vec::new();
    if mu1.len() == 2 && !(*r == 2 && mu1.parts() == [*k, *k]) {
        out.push(Violation::TwoPartsUnbalanced);
    }
    if mu1.len() == *r as usize && mu1.parts().iter().any(|p| p != k) {
        out.push(Violation::RPartsNotUniform);
    }
    if mu1.largest() > *k {
        out.push(Violation::PartExceedsK {
            part: mu1.largest(),
        });
    }
    if !can_split(mu1, *r, *k).unwrap_or(false) {
        out.push(Violation::NoSplit);
    }
    out
}

/// The first power shape of a sphere-to-sphere three-point datum whose
/// `mu1` cannot be split into `r` groups summing to `k`.
///
/// Every violated condition of that shape is listed. Data over other
/// surfaces are outside the rule and yield `None`.
pub fn power_obstruction(datum: &CandidateDatum) -> Result<Option<Obstruction>, DatumError> {
    let shapes = detect_power_shapes(datum)?;
    if !datum.is_sphere_to_sphere() {
        return Ok(None);
    }
    Ok(shapes.into_iter().find_map(|shape| {
        let violations = shape_violations(&shape);
        (!violations.is_empty()).then_some(Obstruction::PowerShape {
            r: shape.r,
            k: shape.k,
            mu1: shape.mu1,
            x: shape.x,
            y: shape.y,
            violations,
        })
    }))
}

fn all_twos(k: u32) -> Partition {
    Partition::uniform(2, k as usize)
}

/// `{[a1,a2],[2^k],[2^k]}` with `d = 2k`: realizable exactly when `a1 = a2 = k`.
pub fn iff_two_two(datum: &CandidateDatum) -> Option<Verdict> {
    let parts = datum.partitions();
    let d = datum.degree();
    if parts.len() != 3 || !d.is_multiple_of(2) || d < 4 || !datum.is_sphere_to_sphere() {
        return None;
    }
    let k = d / 2;
    let twos = all_twos(k);
    let alpha = (0..3).find_map(|i| {
        let others: Vec<&Partition> = (0..3).filter(|&j| j != i).map(|j| &parts[j]).collect();
        (parts[i].len() == 2 && others.iter().all(|p| **p == twos)).then(|| parts[i].clone())
    })?;
    if alpha.parts() != [k, k] {
        return Some(Verdict::exceptional(
            Method::IffTwoTwo,
            Obstruction::UnequalPair { k, alpha },
        ));
    }
    let cycle = Permutation::canonical(&Partition::uniform(k, 1));
    let tuple = MonodromyTuple::new(vec![cycle.inverse(), cycle]);
    let single = Partition::uniform(k, 1);
    let base = Trace::Tuple {
        datum: BranchingDatum::new(k, vec![single.clone(), single.clone()]).ok()?,
        tuple,
        map: Some(format!("(z^{k}-1)/(z^{k}+1)")),
    };
    let ones = Partition::trivial(k);
    let trace = Trace::RootsOfUnityLift {
        datum: datum.datum().clone(),
        r: 2,
        splits: vec![single.clone(), single],
        x: ones.clone(),
        y: ones,
        assumption: LIFT_ASSUMPTION.to_string(),
        base: Box::new(base),
    };
    Some(Verdict::realizable(
        Method::IffTwoTwo,
        Certificate::Construction { trace },
    ))
}

/// Matches `{alpha, [2^k], [2^(k-x), 2x]}` with `alpha` of `x + 1` parts;
/// returns `(alpha, x)`.
fn match_general_x(parts: &[Partition], k: u32) -> Option<(Partition, u32)> {
    let twos = all_twos(k);
    for i2 in 0..3 {
        if parts[i2] != twos {
            continue;
        }
        for i3 in (0..3).filter(|&j| j != i2) {
            let third = &parts[i3];
            let x = third.largest() / 2;
            if !third.largest().is_multiple_of(2) || x == 0 || x > k {
                continue;
            }
            let mut expected = vec![2 * x];
            expected.resize((k - x + 1) as usize, 2);
            if third.parts() != expected.as_slice() {
                continue;
            }
            let i1 = 3 - i2 - i3;
            if parts[i1].len() == x as usize + 1 {
                return Some((parts[i1].clone(), x));
            }
        }
    }
    None
}

/// The gcd bound for `{a, b, [x,1,...,1]}` of degree `k`: `x * gcd(a, b) <= k`.
pub fn boccara_condition(a: &Partition, b: &Partition, x: u32) -> bool {
    let g = gcd(a.gcd(), b.gcd());
    u64::from(x) * u64::from(g) <= u64::from(a.degree())
}

/// `{[a_1..a_(x+1)], [2^k], [2^(k-x), 2x]}` with `d = 2k`, `k >= 3`:
/// realizable exactly when the `a_i` split into two groups summing to `k`
/// and `x * gcd(a_i) <= k`.
pub fn iff_general_x(datum: &CandidateDatum) -> Option<Verdict> {
    let parts = datum.partitions();
    let d = datum.degree();
    if parts.len() != 3 || !d.is_multiple_of(2) || d < 6 || !datum.is_sphere_to_sphere() {
        return None;
    }
    let k = d / 2;
    let (alpha, x) = match_general_x(parts, k)?;
    let split = find_split(&alpha, 2, k).ok().flatten();
    let g = alpha.gcd();
    let split = match split {
        Some(s) if u64::from(x) * u64::from(g) <= u64::from(k) => s,
        other => {
            return Some(Verdict::exceptional(
                Method::IffGeneralX,
                Obstruction::SplitOrGcd {
                    k,
                    x,
                    alpha,
                    splittable: other.is_some(),
                    gcd: g,
                },
            ))
        }
    };
    let [a, b] = [split.groups()[0].clone(), split.groups()[1].clone()];
    let splits: Vec<Partition> = split.nontrivial_groups().cloned().collect();
    let ones = Partition::trivial(k);
    let y = Partition::new(vec![x]).ok()?.padded(k - x);
    let base_datum = super::base_datum(&splits, &ones, &y).ok()?;
    let trace = Trace::RootsOfUnityLift {
        datum: datum.datum().clone(),
        r: 2,
        splits,
        x: ones,
        y,
        assumption: LIFT_ASSUMPTION.to_string(),
        base: Box::new(Trace::Axiom {
            datum: base_datum,
            axiom: Axiom::Boccara { a, b, x },
        }),
    };
    Some(Verdict::realizable(
        Method::IffGeneralX,
        Certificate::Construction { trace },
    ))
}
