//! Constructive lifts of branching data through power maps.

use crate::datum::{BranchingDatum, DatumError};
use crate::partition::Partition;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LiftError {
    #[error("partition {partition} has degree {found}, expected {expected}")]
    DegreeMismatch {
        partition: String,
        expected: u32,
        found: u32,
    },
    #[error("{splits} split groups cannot be placed over {r} roots of unity")]
    TooManySplits { splits: usize, r: u32 },
    #[error("lift exponent must be at least 2, got {0}")]
    InvalidExponent(u32),
    #[error(transparent)]
    Datum(#[from] DatumError),
}

/// Composition with a power map: a three-point datum
/// `{alpha, beta, gamma}` of degree `d` becomes
/// `{alpha + (k-1)d ones, k*beta, k*gamma}` of degree `k*d`.
///
/// `alpha_index` selects which partition stays unscaled. Realizability of
/// the input is not checked.
pub fn lift_power(
    base: &BranchingDatum,
    k: u32,
    alpha_index: usize,
) -> Result<BranchingDatum, LiftError> {
    if base.len() != 3 {
        return Err(DatumError::WrongArity {
            expected: 3,
            found: base.len(),
        }
        .into());
    }
    if k < 2 {
        return Err(LiftError::InvalidExponent(k));
    }
    if alpha_index >= 3 {
        return Err(DatumError::WrongArity {
            expected: 3,
            found: alpha_index + 1,
        }
        .into());
    }
    let d = base.degree();
    let parts: Vec<Partition> = base
        .partitions()
        .iter()
        .enumerate()
        .map(|(i, p)| {
            if i == alpha_index {
                p.padded((k - 1) * d)
            } else {
                p.scaled(k)
            }
        })
        .collect();
    Ok(BranchingDatum::new(k * d, parts)?)
}

/// The `r`-th power of a degree-`k` map whose split branch values sit at
/// distinct `r`-th roots of `-1`, with fiber `x` over 0 and `y` over
/// infinity. The fiber over `-1` collects every split plus `(r - s) * k`
/// unramified points; trivial results are dropped.
pub fn lift_roots_of_unity(
    splits: &[Partition],
    x: &Partition,
    y: &Partition,
    r: u32,
) -> Result<BranchingDatum, LiftError> {
    if r < 2 {
        return Err(LiftError::InvalidExponent(r));
    }
    let k = x.degree();
    for p in splits.iter().chain([y]) {
        if p.degree() != k {
            return Err(LiftError::DegreeMismatch {
                partition: p.to_string(),
                expected: k,
                found: p.degree(),
            });
        }
    }
    if splits.len() > r as usize {
        return Err(LiftError::TooManySplits {
            splits: splits.len(),
            r,
        });
    }
    let padding = (r - splits.len() as u32) * k;
    let mu1 = match Partition::union(splits) {
        Some(u) => u.padded(padding),
        None => Partition::trivial(r * k),
    };
    Ok(BranchingDatum::expunging(
        r * k,
        vec![mu1, x.scaled(r), y.scaled(r)],
    )?)
}

/// The datum a base map must have for [`lift_roots_of_unity`] to apply.
pub fn base_datum(
    splits: &[Partition],
    x: &Partition,
    y: &Partition,
) -> Result<BranchingDatum, DatumError> {
    let mut parts: Vec<Partition> = splits.to_vec();
    parts.push(x.clone());
    parts.push(y.clone());
    BranchingDatum::expunging(x.degree(), parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datum::parse_partition_list;

    fn p(parts: &[u32]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    fn datum(s: &str) -> BranchingDatum {
        s.parse().unwrap()
    }

    #[test]
    fn power_lift_examples() {
        let out = lift_power(&datum("3:[2,1];[2,1];[2,1]"), 2, 0).unwrap();
        assert_eq!(out, datum("6:[2,1,1,1,1];[4,2];[4,2]"));
        let out = lift_power(&datum("3:[3];[2,1];[2,1]"), 3, 0).unwrap();
        assert_eq!(out, datum("9:[3,1,1,1,1,1,1];[6,3];[6,3]"));
        assert!(matches!(
            lift_power(&datum("3:[3];[3]"), 2, 0),
            Err(LiftError::Datum(DatumError::WrongArity { .. }))
        ));
    }

    #[test]
    fn power_lift_preserves_sphere_candidates() {
        let base = datum("4:[3,1];[2,2];[3,1]");
        assert_eq!(base.source_euler(2), 2);
        for k in 2..5 {
            for a in 0..3 {
                assert_eq!(lift_power(&base, k, a).unwrap().source_euler(2), 2);
            }
        }
    }

    #[test]
    fn roots_of_unity_examples() {
        let splits = parse_partition_list("[3];[2,1];[2,1]").unwrap();
        let out = lift_roots_of_unity(&splits, &p(&[1, 1, 1]), &p(&[1, 1, 1]), 3).unwrap();
        assert_eq!(out, datum("9:[3,1,1,2,2];[3,3,3];[3,3,3]"));

        let splits = parse_partition_list("[5];[2,2,1];[2,2,1]").unwrap();
        let ones = Partition::trivial(5);
        let out = lift_roots_of_unity(&splits, &ones, &ones, 3).unwrap();
        assert_eq!(out, datum("15:[5,1,1,2,2,2,2];[3,3,3,3,3];[3,3,3,3,3]"));

        for k in 2..7 {
            let ones = Partition::trivial(k);
            let out = lift_roots_of_unity(&[p(&[k]), p(&[k])], &ones, &ones, 2).unwrap();
            let twos = Partition::uniform(2, k as usize);
            assert_eq!(
                out,
                BranchingDatum::new(2 * k, vec![p(&[k, k]), twos.clone(), twos]).unwrap()
            );
        }
    }

    #[test]
    fn roots_of_unity_pads_unused_roots() {
        // two splits over three roots: one fiber of -1 stays unramified
        let out = lift_roots_of_unity(&[p(&[2]), p(&[2])], &p(&[1, 1]), &p(&[1, 1]), 3).unwrap();
        assert_eq!(out, datum("6:[2,2,1,1];[3,3];[3,3]"));
    }

    #[test]
    fn roots_of_unity_errors() {
        assert!(matches!(
            lift_roots_of_unity(&[p(&[2, 1])], &p(&[1, 1]), &p(&[1, 1]), 2),
            Err(LiftError::DegreeMismatch { .. })
        ));
        assert!(matches!(
            lift_roots_of_unity(&[p(&[2]), p(&[2]), p(&[2])], &p(&[1, 1]), &p(&[1, 1]), 2),
            Err(LiftError::TooManySplits { .. })
        ));
        assert!(matches!(
            lift_roots_of_unity(&[p(&[2])], &p(&[1, 1]), &p(&[1, 1]), 1),
            Err(LiftError::InvalidExponent(1))
        ));
    }
}
