//! Detection of the power shape `{mu1, r*x, r*y}` among three-point data.

use serde::Serialize;

use crate::datum::{CandidateDatum, DatumError};
use crate::partition::{gcd, Partition};

/// A factorization of a three-point datum as `{mu1, r*x, r*y}` with `d = r*k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct PowerShape {
    pub r: u32,
    pub k: u32,
    pub mu1: Partition,
    /// Second partition with every part divided by `r`.
    pub x: Partition,
    /// Third partition with every part divided by `r`.
    pub y: Partition,
    /// Indices into the datum's canonical partition list for `mu1`, `r*x`, `r*y`.
    pub roles: [usize; 3],
}

impl PowerShape {
    /// Number of parts of `mu1`.
    pub fn fiber_size(&self) -> usize {
        self.mu1.len()
    }
}

/// Every `(r, role assignment)` with `r >= 2`, `k = d / r >= 2`, and two of
/// the three partitions having all parts divisible by `r`. Shapes that agree
/// on `(r, mu1, x, y)` are reported once.
pub fn detect_power_shapes(datum: &CandidateDatum) -> Result<Vec<PowerShape>, DatumError> {
    let parts = datum.partitions();
    if parts.len() != 3 {
        return Err(DatumError::WrongArity {
            expected: 3,
            found: parts.len(),
        });
    }
    let d = datum.degree();
    let mut out: Vec<PowerShape> = Vec::new();
    for m in 0..3 {
        let (i, j) = match m {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        let g = gcd(parts[i].gcd(), parts[j].gcd());
        for r in 2..=g {
            if !g.is_multiple_of(r) || !d.is_multiple_of(r) || d / r < 2 {
                continue;
            }
            let shape = PowerShape {
                r,
                k: d / r,
                mu1: parts[m].clone(),
                x: parts[i].divided(r).expect("divisible"),
                y: parts[j].divided(r).expect("divisible"),
                roles: [m, i, j],
            };
            if !out
                .iter()
                .any(|s| s.r == shape.r && s.mu1 == shape.mu1 && s.x == shape.x && s.y == shape.y)
            {
                out.push(shape);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shapes(s: &str) -> Vec<PowerShape> {
        detect_power_shapes(&s.parse().unwrap()).unwrap()
    }

    #[test]
    fn degree_six_family_member() {
        let found = shapes("6:[4,2];[2,2,2];[2,2,2]");
        let main = found
            .iter()
            .find(|s| s.mu1.parts() == [4, 2])
            .expect("shape with mu1 = [4,2]");
        assert_eq!((main.r, main.k), (2, 3));
        assert_eq!(main.x.parts(), &[1, 1, 1]);
        assert_eq!(main.y.parts(), &[1, 1, 1]);
        // [4,2] is itself divisible by 2, so mu1 = [2,2,2] is a second shape.
        assert_eq!(found.len(), 2);
        assert!(found
            .iter()
            .any(|s| s.mu1.parts() == [2, 2, 2] && s.x.parts() == [2, 1]));
    }

    #[test]
    fn degree_nine_example() {
        let found = shapes("9:[3,1,1,2,2];[3,3,3];[3,3,3]");
        assert_eq!(found.len(), 1);
        let s = &found[0];
        assert_eq!((s.r, s.k), (3, 3));
        assert_eq!(s.mu1.parts(), &[3, 2, 2, 1, 1]);
        assert_eq!(s.x.parts(), &[1, 1, 1]);
    }

    #[test]
    fn degree_four_classic() {
        let found = shapes("4:[3,1];[2,2];[2,2]");
        assert_eq!(found.len(), 1);
        assert_eq!((found[0].r, found[0].k), (2, 2));
        assert_eq!(found[0].mu1.parts(), &[3, 1]);
    }

    #[test]
    fn no_shape_and_wrong_arity() {
        assert!(shapes("5:[3,2];[3,2];[2,2,1]").is_empty());
        let two: CandidateDatum = "2:[2];[2]".parse().unwrap();
        assert!(matches!(
            detect_power_shapes(&two),
            Err(DatumError::WrongArity { .. })
        ));
    }

    #[test]
    fn several_divisors() {
        // [4,4] and [4,4] admit r = 2 and r = 4.
        let found = shapes("8:[4,4];[4,4];[2,2,1,1,1,1]");
        let rs: Vec<u32> = found
            .iter()
            .filter(|s| s.mu1.parts() == [2, 2, 1, 1, 1, 1])
            .map(|s| s.r)
            .collect();
        assert_eq!(rs, vec![2, 4]);
    }
}
