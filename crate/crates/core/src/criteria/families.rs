//! Parametrized families of exceptional three-point data.

use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::datum::{BranchingDatum, CandidateDatum, DatumError};
use crate::partition::Partition;

use super::Status;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    /// `{[k1,k2],[2^k],[2^k]}`, `k1 != k2`.
    Z1a,
    /// `{[2^k],[2^j1,2k-2j1],[2^j2,2k-2j2]}`, `j1 + j2 = k`, `j1 != j2`, `k >= 3`.
    Z1b,
    /// `{[k-2,2^(k+1)],[3^k],[3^k]}`, `k >= 3` odd.
    Z2,
    /// `{[j1,j2,1^((r-2)k)],[r^k],[r^k]}`, `j1 + j2 = 2k`, `j1 != j2`.
    Z3,
    /// `{[j1,j2,2^k],[3^k],[3^k]}`, `k >= 3` odd, `j1 + j2 = k` of different parity.
    P1,
    /// `{[3^(k-1),1,1,1],[3^k],[3^k]}`, `k = 2 + 3l`, `l >= 1`.
    P2,
}

impl Family {
    pub const ALL: [Family; 6] = [Self::Z1a, Self::Z1b, Self::Z2, Self::Z3, Self::P1, Self::P2];

    pub fn name(self) -> &'static str {
        match self {
            Self::Z1a => "Z1a",
            Self::Z1b => "Z1b",
            Self::Z2 => "Z2",
            Self::Z3 => "Z3",
            Self::P1 => "P1",
            Self::P2 => "P2",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = FamilyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| FamilyError::UnknownFamily(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FamilyError {
    #[error("unknown family {0:?}")]
    UnknownFamily(String),
    #[error("bad parameters for {family}: {reason}")]
    BadParams { family: Family, reason: String },
    #[error(transparent)]
    Datum(#[from] DatumError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "family")]
pub enum FamilyParams {
    Z1a { k: u32, k1: u32, k2: u32 },
    Z1b { k: u32, j1: u32, j2: u32 },
    Z2 { k: u32 },
    Z3 { r: u32, k: u32, j1: u32, j2: u32 },
    P1 { k: u32, j1: u32, j2: u32 },
    P2 { l: u32 },
}

impl FamilyParams {
    pub fn family(&self) -> Family {
        match self {
            Self::Z1a { .. } => Family::Z1a,
            Self::Z1b { .. } => Family::Z1b,
            Self::Z2 { .. } => Family::Z2,
            Self::Z3 { .. } => Family::Z3,
            Self::P1 { .. } => Family::P1,
            Self::P2 { .. } => Family::P2,
        }
    }
}

impl fmt::Display for FamilyParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Z1a { k, k1, k2 } => write!(f, "k={k} k1={k1} k2={k2}"),
            Self::Z1b { k, j1, j2 } | Self::P1 { k, j1, j2 } => write!(f, "k={k} j1={j1} j2={j2}"),
            Self::Z2 { k } => write!(f, "k={k}"),
            Self::Z3 { r, k, j1, j2 } => write!(f, "r={r} k={k} j1={j1} j2={j2}"),
            Self::P2 { l } => write!(f, "l={l} k={}", 2 + 3 * l),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FamilyInstance {
    pub family: Family,
    pub params: FamilyParams,
    pub datum: CandidateDatum,
    pub expected: Status,
}

fn part(parts: Vec<u32>) -> Partition {
    Partition::new(parts).expect("family partitions have positive parts")
}

fn repeat(value: u32, count: u32) -> impl Iterator<Item = u32> {
    std::iter::repeat_n(value, count as usize)
}

/// Builds and validates one family member.
pub fn generate_family(params: FamilyParams) -> Result<FamilyInstance, FamilyError> {
    let family = params.family();
    let bad = |reason: &str| FamilyError::BadParams {
        family,
        reason: reason.to_string(),
    };
    let (degree, partitions) = match params {
        FamilyParams::Z1a { k, k1, k2 } => {
            if k < 2 {
                return Err(bad("k must be at least 2"));
            }
            if k1 == 0 || k2 == 0 || k1 + k2 != 2 * k {
                return Err(bad("k1 + k2 must equal 2k with positive parts"));
            }
            if k1 == k2 {
                return Err(bad("k1 and k2 must differ"));
            }
            let twos = Partition::uniform(2, k as usize);
            (2 * k, vec![part(vec![k1, k2]), twos.clone(), twos])
        }
        FamilyParams::Z1b { k, j1, j2 } => {
            if k < 3 {
                return Err(bad("k must be at least 3"));
            }
            if j1 == 0 || j2 == 0 || j1 + j2 != k {
                return Err(bad("j1 + j2 must equal k with j1, j2 >= 1"));
            }
            if j1 == j2 {
                return Err(bad("j1 and j2 must differ"));
            }
            let tail = |j: u32| part(repeat(2, j).chain([2 * k - 2 * j]).collect());
            (
                2 * k,
                vec![Partition::uniform(2, k as usize), tail(j1), tail(j2)],
            )
        }
        FamilyParams::Z2 { k } => {
            if k < 3 || k % 2 == 0 {
                return Err(bad("k must be odd and at least 3"));
            }
            let threes = Partition::uniform(3, k as usize);
            let first = part([k - 2].into_iter().chain(repeat(2, k + 1)).collect());
            (3 * k, vec![first, threes.clone(), threes])
        }
        FamilyParams::Z3 { r, k, j1, j2 } => {
            if r < 2 || k < 2 {
                return Err(bad("r and k must be at least 2"));
            }
            if j1 == 0 || j2 == 0 || j1 + j2 != 2 * k {
                return Err(bad("j1 + j2 must equal 2k with positive parts"));
            }
            if j1 == j2 {
                return Err(bad("j1 and j2 must differ"));
            }
            let rs = Partition::uniform(r, k as usize);
            let first = part([j1, j2].into_iter().chain(repeat(1, (r - 2) * k)).collect());
            (r * k, vec![first, rs.clone(), rs])
        }
        FamilyParams::P1 { k, j1, j2 } => {
            if k < 3 || k % 2 == 0 {
                return Err(bad("k must be odd and at least 3"));
            }
            if j1 == 0 || j2 == 0 || j1 + j2 != k {
                return Err(bad("j1 + j2 must equal k with positive parts"));
            }
            if j1 % 2 == j2 % 2 {
                return Err(bad("j1 and j2 must have different parity"));
            }
            let threes = Partition::uniform(3, k as usize);
            let first = part([j1, j2].into_iter().chain(repeat(2, k)).collect());
            (3 * k, vec![first, threes.clone(), threes])
        }
        FamilyParams::P2 { l } => {
            if l < 1 {
                return Err(bad("l must be at least 1"));
            }
            let k = 2 + 3 * l;
            let threes = Partition::uniform(3, k as usize);
            let first = part(repeat(3, k - 1).chain([1, 1, 1]).collect());
            (3 * k, vec![first, threes.clone(), threes])
        }
    };
    let datum = BranchingDatum::new(degree, partitions)?.into_candidate()?;
    Ok(FamilyInstance {
        family,
        params,
        datum,
        expected: Status::Exceptional,
    })
}

/// Parameter ranges for sweeping a family. `k` is ignored by `P2`, which
/// is indexed by `l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyRange {
    pub k: RangeInclusive<u32>,
    pub r: RangeInclusive<u32>,
    pub l: RangeInclusive<u32>,
}

impl FamilyRange {
    /// Ranges wide enough to reach every member of degree at most `max_degree`.
    pub fn up_to_degree(max_degree: u32) -> Self {
        Self {
            k: 2..=max_degree / 2,
            r: 2..=max_degree / 2,
            l: 1..=max_degree / 3,
        }
    }

    /// Every valid parameter choice, one per unordered pair `{j1, j2}` or `{k1, k2}`.
    pub fn params(&self, family: Family) -> Vec<FamilyParams> {
        let mut out = Vec::new();
        match family {
            Family::P2 => out.extend(self.l.clone().map(|l| FamilyParams::P2 { l })),
            Family::Z2 => out.extend(self.k.clone().map(|k| FamilyParams::Z2 { k })),
            Family::Z3 => {
                for r in self.r.clone() {
                    for k in self.k.clone() {
                        for j2 in 1..k {
                            out.push(FamilyParams::Z3 {
                                r,
                                k,
                                j1: 2 * k - j2,
                                j2,
                            });
                        }
                    }
                }
            }
            Family::Z1a => {
                for k in self.k.clone() {
                    for k2 in 1..k {
                        out.push(FamilyParams::Z1a {
                            k,
                            k1: 2 * k - k2,
                            k2,
                        });
                    }
                }
            }
            Family::Z1b | Family::P1 => {
                for k in self.k.clone() {
                    for j2 in 1..k.div_ceil(2) {
                        let j1 = k - j2;
                        out.push(if family == Family::Z1b {
                            FamilyParams::Z1b { k, j1, j2 }
                        } else {
                            FamilyParams::P1 { k, j1, j2 }
                        });
                    }
                }
            }
        }
        out
    }

    /// Instances for every valid parameter choice; invalid choices are skipped.
    pub fn instances(&self, family: Family) -> Vec<FamilyInstance> {
        self.params(family)
            .into_iter()
            .filter_map(|p| generate_family(p).ok())
            .collect()
    }
}
