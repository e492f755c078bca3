//! Branching data, candidate validation and the text format `d:[..];[..]`.

use std::fmt;
use std::str::FromStr;

use crate::partition::{partitions_of, Partition, PartitionError};

/// Euler characteristic of the Riemann sphere.
pub const SPHERE_EULER: i64 = 2;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DatumError {
    #[error("degree must be at least 2, got {0}")]
    InvalidDegree(u32),
    #[error("partition #{index} sums to {found}, expected degree {expected}")]
    DegreeMismatch {
        index: usize,
        expected: u32,
        found: u32,
    },
    #[error("partition #{index} is trivial (all parts equal 1)")]
    TrivialPartition { index: usize },
    #[error(
        "Riemann-Hurwitz obstruction: total branching {total_branching} gives source Euler \
         characteristic {source_euler}, which is not an even integer <= 2"
    )]
    EulerObstruction {
        total_branching: u64,
        source_euler: i64,
    },
    #[error("expected {expected} partitions, found {found}")]
    WrongArity { expected: usize, found: usize },
    #[error("target Euler characteristic must be an even integer <= 2, got {0}")]
    InvalidTarget(i64),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// Syntax error with a character offset into the original input.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("parse error at position {position}: {message}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

/// Degree plus a canonical multiset of nontrivial partitions of that degree.
///
/// No Riemann-Hurwitz condition is imposed; see [`CandidateDatum`].
#[derive(
    Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize,
)]
#[serde(into = "String", try_from = "String")]
pub struct BranchingDatum {
    degree: u32,
    partitions: Vec<Partition>,
}

impl BranchingDatum {
    /// Rejects partitions of the wrong degree and trivial partitions.
    pub fn new(degree: u32, partitions: Vec<Partition>) -> Result<Self, DatumError> {
        if degree < 2 {
            return Err(DatumError::InvalidDegree(degree));
        }
        for (index, p) in partitions.iter().enumerate() {
            if p.degree() != degree {
                return Err(DatumError::DegreeMismatch {
                    index,
                    expected: degree,
                    found: p.degree(),
                });
            }
            if !p.nontrivial() {
                return Err(DatumError::TrivialPartition { index });
            }
        }
        Ok(Self::from_sorted(degree, partitions))
    }

    /// Drops trivial partitions instead of rejecting them. Used by the
    /// constructions, which produce fibers that may carry no branching.
    pub fn expunging(degree: u32, partitions: Vec<Partition>) -> Result<Self, DatumError> {
        let kept = partitions
            .into_iter()
            .filter(Partition::nontrivial)
            .collect();
        Self::new(degree, kept)
    }

    fn from_sorted(degree: u32, mut partitions: Vec<Partition>) -> Self {
        partitions.sort_unstable_by(|a, b| b.cmp(a));
        Self { degree, partitions }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn partitions(&self) -> &[Partition] {
        &self.partitions
    }

    /// Number of branch values.
    pub fn len(&self) -> usize {
        self.partitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partitions.is_empty()
    }

    /// `sum over partitions of sum(part - 1)`.
    pub fn total_branching(&self) -> u64 {
        self.partitions.iter().map(|p| p.branching() as u64).sum()
    }

    /// `d * target_euler - total_branching`.
    pub fn source_euler(&self, target_euler: i64) -> i64 {
        self.degree as i64 * target_euler - self.total_branching() as i64
    }

    /// The same quantity computed from fiber sizes: `d * target_euler - sum(d - r_k)`.
    pub fn source_euler_from_fibers(&self, target_euler: i64) -> i64 {
        let d = self.degree as i64;
        let defect: i64 = self.partitions.iter().map(|p| d - p.len() as i64).sum();
        d * target_euler - defect
    }

    /// Validates the Riemann-Hurwitz condition against the sphere.
    pub fn into_candidate(self) -> Result<CandidateDatum, DatumError> {
        CandidateDatum::with_target(self, SPHERE_EULER)
    }
}

impl fmt::Display for BranchingDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.degree)?;
        for (i, p) in self.partitions.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

impl From<BranchingDatum> for String {
    fn from(datum: BranchingDatum) -> String {
        datum.to_string()
    }
}

impl TryFrom<String> for BranchingDatum {
    type Error = DatumError;

    fn try_from(text: String) -> Result<Self, Self::Error> {
        text.parse()
    }
}

impl FromStr for BranchingDatum {
    type Err = DatumError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (degree, partitions) = parse_datum_text(s)?;
        Self::new(degree, partitions)
    }
}

/// A branching datum satisfying the Riemann-Hurwitz formula for some
/// compact orientable source surface.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CandidateDatum {
    datum: BranchingDatum,
    target_euler: i64,
    source_euler: i64,
}

impl CandidateDatum {
    pub fn with_target(datum: BranchingDatum, target_euler: i64) -> Result<Self, DatumError> {
        if target_euler > SPHERE_EULER || target_euler % 2 != 0 {
            return Err(DatumError::InvalidTarget(target_euler));
        }
        let source_euler = datum.source_euler(target_euler);
        debug_assert_eq!(source_euler, datum.source_euler_from_fibers(target_euler));
        if source_euler > 2 || source_euler % 2 != 0 {
            return Err(DatumError::EulerObstruction {
                total_branching: datum.total_branching(),
                source_euler,
            });
        }
        Ok(Self {
            datum,
            target_euler,
            source_euler,
        })
    }

    pub fn datum(&self) -> &BranchingDatum {
        &self.datum
    }

    pub fn degree(&self) -> u32 {
        self.datum.degree
    }

    pub fn partitions(&self) -> &[Partition] {
        &self.datum.partitions
    }

    pub fn len(&self) -> usize {
        self.datum.len()
    }

    pub fn is_empty(&self) -> bool {
        self.datum.is_empty()
    }

    pub fn target_euler(&self) -> i64 {
        self.target_euler
    }

    pub fn source_euler(&self) -> i64 {
        self.source_euler
    }

    pub fn total_branching(&self) -> u64 {
        self.datum.total_branching()
    }

    /// Source and target are both spheres: the rational-map case.
    pub fn is_sphere_to_sphere(&self) -> bool {
        self.target_euler == SPHERE_EULER && self.source_euler == SPHERE_EULER
    }

    pub fn into_datum(self) -> BranchingDatum {
        self.datum
    }
}

impl fmt::Display for CandidateDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.datum.fmt(f)
    }
}

impl serde::Serialize for CandidateDatum {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl FromStr for CandidateDatum {
    type Err = DatumError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (degree, partitions) = parse_datum_text(s)?;
        validate_candidate(degree, partitions)
    }
}

/// `nu(D)`, the total branching.
pub fn total_branching(datum: &CandidateDatum) -> u64 {
    datum.total_branching()
}

/// Source Euler characteristic for the datum's target.
pub fn source_euler(datum: &CandidateDatum) -> i64 {
    datum.source_euler()
}

/// Canonicalizes raw partitions and checks they form a candidate over the sphere.
pub fn validate_candidate(degree: u32, raw: Vec<Partition>) -> Result<CandidateDatum, DatumError> {
    BranchingDatum::new(degree, raw)?.into_candidate()
}

/// Like [`validate_candidate`] for an arbitrary orientable target.
pub fn validate_candidate_with_target(
    degree: u32,
    raw: Vec<Partition>,
    target_euler: i64,
) -> Result<CandidateDatum, DatumError> {
    CandidateDatum::with_target(BranchingDatum::new(degree, raw)?, target_euler)
}

/// Every canonical sphere-target candidate of degree `degree` with exactly
/// `count` partitions and the given source Euler characteristic, in
/// canonical order.
pub fn enumerate_candidates(degree: u32, count: usize, source_euler: i64) -> CandidateStream {
    let pool: Vec<Partition> = if degree >= 2 {
        partitions_of(degree)
            .into_iter()
            .filter(Partition::nontrivial)
            .collect()
    } else {
        Vec::new()
    };
    let wanted = degree as i64 * SPHERE_EULER - source_euler;
    let empty =
        pool.is_empty() || count == 0 || source_euler > 2 || source_euler % 2 != 0 || wanted < 0;
    CandidateStream {
        degree,
        pool,
        wanted: wanted.max(0) as u64,
        indices: if empty { None } else { Some(vec![0; count]) },
    }
}

/// Lazy stream of candidates; each multiset of partitions is visited once as
/// a non-decreasing index vector into the descending partition list.
pub struct CandidateStream {
    degree: u32,
    pool: Vec<Partition>,
    wanted: u64,
    indices: Option<Vec<usize>>,
}

impl CandidateStream {
    fn advance(&mut self) {
        let Some(idx) = self.indices.as_mut() else {
            return;
        };
        let n = self.pool.len();
        let mut pos = idx.len();
        while pos > 0 {
            pos -= 1;
            if idx[pos] + 1 < n {
                let v = idx[pos] + 1;
                for slot in &mut idx[pos..] {
                    *slot = v;
                }
                return;
            }
        }
        self.indices = None;
    }
}

impl Iterator for CandidateStream {
    type Item = CandidateDatum;

    fn next(&mut self) -> Option<CandidateDatum> {
        loop {
            let idx = self.indices.as_ref()?;
            let nu: u64 = idx.iter().map(|&i| self.pool[i].branching() as u64).sum();
            let hit = (nu == self.wanted).then(|| {
                idx.iter()
                    .map(|&i| self.pool[i].clone())
                    .collect::<Vec<_>>()
            });
            self.advance();
            if let Some(parts) = hit {
                let datum = BranchingDatum::from_sorted(self.degree, parts);
                if let Ok(c) = datum.into_candidate() {
                    return Some(c);
                }
            }
        }
    }
}

/// Parses `d: p1; p2; ...` where each `pi` is a comma-separated list of
/// parts with optional brackets. Whitespace is ignored.
pub fn parse_datum_text(input: &str) -> Result<(u32, Vec<Partition>), ParseError> {
    let mut cur = Cursor::new(input);
    let degree = cur.number()?;
    cur.expect(':')?;
    let partitions = if cur.at_end() {
        Vec::new()
    } else {
        cur.partition_list()?
    };
    cur.finish()?;
    Ok((degree, partitions))
}

/// Parses `p1; p2; ...` (the partition list without a degree prefix).
pub fn parse_partition_list(input: &str) -> Result<Vec<Partition>, ParseError> {
    let mut cur = Cursor::new(input);
    let out = cur.partition_list()?;
    cur.finish()?;
    Ok(out)
}

/// Parses a single partition such as `[3,1]` or `3,1`.
pub fn parse_partition(input: &str) -> Result<Partition, ParseError> {
    let mut cur = Cursor::new(input);
    let out = cur.partition()?;
    cur.finish()?;
    Ok(out)
}

struct Cursor<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    len: usize,
    _src: &'a str,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        let chars: Vec<(usize, char)> = src
            .char_indices()
            .filter(|(_, c)| !c.is_whitespace())
            .collect();
        Self {
            chars,
            pos: 0,
            len: src.len(),
            _src: src,
        }
    }

    fn offset(&self) -> usize {
        self.chars.get(self.pos).map_or(self.len, |(i, _)| *i)
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|(_, c)| *c)
    }

    fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            position: self.offset(),
            message: message.into(),
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        match self.peek() {
            Some(x) if x == c => {
                self.pos += 1;
                Ok(())
            }
            Some(x) => Err(self.error(format!("expected '{c}', found '{x}'"))),
            None => Err(self.error(format!("expected '{c}', found end of input"))),
        }
    }

    fn number(&mut self) -> Result<u32, ParseError> {
        let start = self.pos;
        let at = self.offset();
        let mut value: u64 = 0;
        while let Some(c) = self.peek().filter(char::is_ascii_digit) {
            value = value * 10 + c.to_digit(10).unwrap() as u64;
            if value > u32::MAX as u64 {
                return Err(ParseError {
                    position: at,
                    message: "number too large".into(),
                });
            }
            self.pos += 1;
        }
        if self.pos == start {
            return Err(match self.peek() {
                Some(c) => self.error(format!("expected a positive integer, found '{c}'")),
                None => self.error("expected a positive integer, found end of input"),
            });
        }
        Ok(value as u32)
    }

    fn partition(&mut self) -> Result<Partition, ParseError> {
        let at = self.offset();
        let bracketed = self.peek() == Some('[');
        if bracketed {
            self.pos += 1;
        }
        let mut parts = vec![self.number()?];
        while self.peek() == Some(',') {
            self.pos += 1;
            parts.push(self.number()?);
        }
        if bracketed {
            self.expect(']')?;
        }
        Partition::new(parts).map_err(|e| ParseError {
            position: at,
            message: e.to_string(),
        })
    }

    fn partition_list(&mut self) -> Result<Vec<Partition>, ParseError> {
        let mut out = vec![self.partition()?];
        while self.peek() == Some(';') {
            self.pos += 1;
            if self.at_end() {
                break;
            }
            out.push(self.partition()?);
        }
        Ok(out)
    }

    fn finish(&self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(c) => Err(self.error(format!("unexpected '{c}'"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(parts: &[u32]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    fn cand(s: &str) -> CandidateDatum {
        s.parse().unwrap()
    }

    #[test]
    fn total_branching_examples() {
        assert_eq!(total_branching(&cand("4:[3,1];[2,2];[2,2]")), 6);
        assert_eq!(total_branching(&cand("2:[2];[2]")), 2);
        for k in 2..9u32 {
            let d = validate_candidate(k, vec![p(&[k]), p(&[k])]).unwrap();
            assert_eq!(total_branching(&d), 2 * k as u64 - 2);
        }
    }

    #[test]
    fn source_euler_examples() {
        assert_eq!(source_euler(&cand("4:[3,1];[2,2];[2,2]")), 2);
        assert_eq!(source_euler(&cand("3:[3];[3];[3]")), 0);
        assert_eq!(source_euler(&cand("2:[2];[2]")), 2);
    }

    #[test]
    fn validate_accepts_and_canonicalizes() {
        let d = validate_candidate(6, vec![p(&[2, 2, 2]), p(&[4, 2]), p(&[2, 2, 2])]).unwrap();
        assert_eq!(d.source_euler(), 2);
        assert_eq!(d.to_string(), "6:[4,2];[2,2,2];[2,2,2]");
    }

    #[test]
    fn validate_errors() {
        assert!(matches!(
            validate_candidate(4, vec![p(&[3, 1]), p(&[2, 2])]),
            Err(DatumError::EulerObstruction {
                total_branching: 4,
                source_euler: 4
            })
        ));
        assert!(matches!(
            validate_candidate(4, vec![p(&[3, 1]), p(&[2, 1])]),
            Err(DatumError::DegreeMismatch {
                index: 1,
                expected: 4,
                found: 3
            })
        ));
        assert!(matches!(
            validate_candidate(4, vec![p(&[3, 1]), p(&[1, 1, 1, 1])]),
            Err(DatumError::TrivialPartition { index: 1 })
        ));
        // odd source Euler characteristic
        assert!(matches!(
            validate_candidate(3, vec![p(&[2, 1]), p(&[3])]),
            Err(DatumError::EulerObstruction { .. })
        ));
        assert!(matches!(
            validate_candidate(1, vec![]),
            Err(DatumError::InvalidDegree(1))
        ));
    }

    #[test]
    fn higher_genus_and_other_targets() {
        let torus = cand("3:[3];[3];[3]");
        assert!(!torus.is_sphere_to_sphere());
        let t = validate_candidate_with_target(2, vec![p(&[2]), p(&[2])], 0).unwrap();
        assert_eq!(t.source_euler(), -2);
        assert!(validate_candidate_with_target(2, vec![p(&[2])], 1).is_err());
    }

    #[test]
    fn parse_syntax_variants() {
        let a: CandidateDatum = "4:[3,1];[2,2];[2,2]".parse().unwrap();
        let b: CandidateDatum = " 4 : 2,2 ; 1,3 ;[ 2 , 2 ] ".parse().unwrap();
        assert_eq!(a, b);
        assert_eq!(parse_partition("[1,2,3]").unwrap().parts(), &[3, 2, 1]);
        assert_eq!(parse_partition_list("[3];[2,1];[2,1]").unwrap().len(), 3);
    }

    #[test]
    fn parse_errors_report_position() {
        let err = parse_datum_text("4:[3,1];[2,x]").unwrap_err();
        assert_eq!(err.position, 11);
        let err = parse_datum_text("4[3,1]").unwrap_err();
        assert_eq!(err.position, 1);
        assert!(parse_datum_text("4:[3,0]").is_err());
        assert!(parse_datum_text("4:[3,1]]").is_err());
    }

    #[test]
    fn enumerate_small() {
        assert_eq!(enumerate_candidates(2, 1, 2).count(), 0);
        let two: Vec<String> = enumerate_candidates(2, 2, 2)
            .map(|c| c.to_string())
            .collect();
        assert_eq!(two, vec!["2:[2];[2]"]);
        let four: Vec<String> = enumerate_candidates(4, 3, 2)
            .map(|c| c.to_string())
            .collect();
        assert!(four.contains(&"4:[3,1];[2,2];[2,2]".to_string()));
        assert!(four.contains(&"4:[2,2];[2,2];[2,2]".to_string()));
        // total branching 5 is odd, so this one is not a candidate
        assert!(!four.contains(&"4:[2,2];[2,2];[2,1,1]".to_string()));
        assert_eq!(four.len(), 6);
        assert_eq!(enumerate_candidates(4, 3, 3).count(), 0);
    }
}
