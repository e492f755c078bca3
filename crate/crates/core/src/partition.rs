//! Integer partitions in canonical (non-increasing) form.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

/// A partition of `degree` into positive parts, stored non-increasing.
///
/// Parts are local degrees over a single branch value; the number of parts is
/// the size of the fiber.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Partition {
    parts: Vec<u32>,
    degree: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PartitionError {
    #[error("partition has no parts")]
    Empty,
    #[error("partition contains a zero part")]
    ZeroPart,
}

impl Partition {
    /// Builds a partition from parts in any order.
    pub fn new(mut parts: Vec<u32>) -> Result<Self, PartitionError> {
        if parts.is_empty() {
            return Err(PartitionError::Empty);
        }
        if parts.contains(&0) {
            return Err(PartitionError::ZeroPart);
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        let degree = parts.iter().sum();
        Ok(Self { parts, degree })
    }

    /// `[1, 1, ..., 1]` with `degree` ones.
    pub fn trivial(degree: u32) -> Self {
        assert!(degree >= 1);
        Self {
            parts: vec![1; degree as usize],
            degree,
        }
    }

    /// `[value; count]`.
    pub fn uniform(value: u32, count: usize) -> Self {
        assert!(value >= 1 && count >= 1);
        Self {
            parts: vec![value; count],
            degree: value * count as u32,
        }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Number of parts.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn largest(&self) -> u32 {
        self.parts[0]
    }

    /// True iff some part is at least 2.
    pub fn nontrivial(&self) -> bool {
        self.parts[0] >= 2
    }

    /// Contribution `sum(part - 1)` to the total branching.
    pub fn branching(&self) -> u32 {
        self.degree - self.parts.len() as u32
    }

    /// Every part multiplied by `factor`.
    pub fn scaled(&self, factor: u32) -> Self {
        Self {
            parts: self.parts.iter().map(|p| p * factor).collect(),
            degree: self.degree * factor,
        }
    }

    /// Every part divided by `divisor`, if all parts are divisible.
    pub fn divided(&self, divisor: u32) -> Option<Self> {
        if divisor == 0 || self.parts.iter().any(|p| p % divisor != 0) {
            return None;
        }
        Some(Self {
            parts: self.parts.iter().map(|p| p / divisor).collect(),
            degree: self.degree / divisor,
        })
    }

    /// Appends `count` fixed points (parts equal to 1).
    pub fn padded(&self, count: u32) -> Self {
        let mut parts = self.parts.clone();
        parts.extend(std::iter::repeat_n(1, count as usize));
        Self {
            parts,
            degree: self.degree + count,
        }
    }

    /// Multiset union of parts.
    pub fn union<'a, I: IntoIterator<Item = &'a Partition>>(items: I) -> Option<Self> {
        let parts: Vec<u32> = items
            .into_iter()
            .flat_map(|p| p.parts.iter().copied())
            .collect();
        Self::new(parts).ok()
    }

    /// Greatest common divisor of all parts.
    pub fn gcd(&self) -> u32 {
        self.parts.iter().fold(0, |acc, &p| gcd(acc, p))
    }

    /// Multiplicity of each distinct part, largest part first.
    pub fn multiplicities(&self) -> Vec<(u32, usize)> {
        let mut out: Vec<(u32, usize)> = Vec::new();
        for &p in &self.parts {
            match out.last_mut() {
                Some((v, c)) if *v == p => *c += 1,
                _ => out.push((p, 1)),
            }
        }
        out
    }

    /// Parts with the trailing ones removed.
    pub fn nontrivial_parts(&self) -> &[u32] {
        let end = self
            .parts
            .iter()
            .position(|&p| p == 1)
            .unwrap_or(self.parts.len());
        &self.parts[..end]
    }
}

impl TryFrom<Vec<u32>> for Partition {
    type Error = PartitionError;

    fn try_from(parts: Vec<u32>) -> Result<Self, Self::Error> {
        Self::new(parts)
    }
}

impl From<Partition> for Vec<u32> {
    fn from(p: Partition) -> Self {
        p.parts
    }
}

/// Lexicographic on the non-increasing part sequence; `Ordering::Greater`
/// sorts first in canonical data.
impl Ord for Partition {
    fn cmp(&self, other: &Self) -> Ordering {
        self.parts.cmp(&other.parts)
    }
}

impl PartialOrd for Partition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str("]")
    }
}

pub(crate) fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// All partitions of `n`, in descending lexicographic order.
pub fn partitions_of(n: u32) -> Vec<Partition> {
    fn rec(rest: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if rest == 0 {
            let degree = cur.iter().sum();
            out.push(Partition {
                parts: cur.clone(),
                degree,
            });
            return;
        }
        for p in (1..=max.min(rest)).rev() {
            cur.push(p);
            rec(rest - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        rec(n, n, &mut Vec::new(), &mut out);
    }
    out
}
