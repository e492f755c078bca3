//! Decision rules for three-point data and the verdict pipeline built on them.

mod engine;
mod families;
mod json;
mod lift;
mod rules;

use serde::{Deserialize, Serialize};

use crate::datum::{BranchingDatum, CandidateDatum, SPHERE_EULER};
use crate::oracle::{verify_tuple, MonodromyTuple};
use crate::partition::Partition;

pub use engine::{decide, decide_all, Engine, EngineConfig};
pub use families::{
    generate_family, Family, FamilyError, FamilyInstance, FamilyParams, FamilyRange,
};
pub use json::verdict_json;
pub use lift::{base_datum, lift_power, lift_roots_of_unity, LiftError};
pub use rules::{boccara_condition, iff_general_x, iff_two_two, power_obstruction};

/// Tag stored with cached verdicts; bump when any rule changes.
pub const ENGINE_VERSION: &str = concat!("hurwitz-core/", env!("CARGO_PKG_VERSION"), "+rules.1");

/// Placement freedom assumed by every roots-of-unity lift node.
pub const LIFT_ASSUMPTION: &str =
    "branch values of the base map may be placed at distinct r-th roots of -1, with x over 0 and y over infinity";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Realizable,
    Exceptional,
    Unknown,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Realizable => "realizable",
            Self::Exceptional => "exceptional",
            Self::Unknown => "unknown",
        }
    }
}

/// The rule that produced a verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    /// Every candidate over a target of non-positive Euler characteristic is realizable.
    Eks,
    IffTwoTwo,
    IffGeneralX,
    PowerObstruction,
    Recursion,
    RecursiveObstruction,
    Oracle,
    /// No rule applied and the oracle was not consulted.
    None,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Eks => "EKS",
            Self::IffTwoTwo => "iff_two_two",
            Self::IffGeneralX => "iff_general_x",
            Self::PowerObstruction => "power_obstruction",
            Self::Recursion => "recursion",
            Self::RecursiveObstruction => "recursive_obstruction",
            Self::Oracle => "oracle",
            Self::None => "none",
        }
    }
}

/// Why a datum is exceptional, with the witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Obstruction {
    /// A power shape `{mu1, r*x, r*y}` whose `mu1` violates the split criterion.
    PowerShape {
        r: u32,
        k: u32,
        mu1: Partition,
        x: Partition,
        y: Partition,
        violations: Vec<Violation>,
    },
    /// `{[a1,a2],[2^k],[2^k]}` with `a1 != a2`.
    UnequalPair { k: u32, alpha: Partition },
    /// `{alpha,[2^k],[2^(k-x),2x]}` failing the split or the gcd bound.
    SplitOrGcd {
        k: u32,
        x: u32,
        alpha: Partition,
        splittable: bool,
        gcd: u32,
    },
    /// Every datum induced by one power shape is exceptional.
    InducedExceptional {
        r: u32,
        k: u32,
        mu1: Partition,
        induced: Vec<BranchingDatum>,
    },
    /// The oracle examined every tuple.
    SearchExhausted { examined: u64 },
}

/// One failed necessary condition on `mu1` for a shape with exponent `r` and `d = r*k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "condition", rename_all = "snake_case")]
pub enum Violation {
    /// Some part exceeds `k`.
    PartExceedsK { part: u32 },
    /// Two parts, but not `r = 2` with `mu1 = [k,k]`.
    TwoPartsUnbalanced,
    /// Exactly `r` parts, but not all equal to `k`.
    RPartsNotUniform,
    /// No split into `r` groups summing to `k`.
    NoSplit,
}

/// A rule-level fact accepted without a tuple.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Axiom {
    /// `{a, b, [x,1,...,1]}` is realizable when `x * gcd(a, b) <= k`.
    Boccara { a: Partition, b: Partition, x: u32 },
}

/// A tree of lifts whose leaves are independently checkable base data.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum Trace {
    Tuple {
        datum: BranchingDatum,
        tuple: MonodromyTuple,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        map: Option<String>,
    },
    Axiom {
        datum: BranchingDatum,
        axiom: Axiom,
    },
    RootsOfUnityLift {
        datum: BranchingDatum,
        r: u32,
        splits: Vec<Partition>,
        x: Partition,
        y: Partition,
        assumption: String,
        base: Box<Trace>,
    },
    PowerLift {
        datum: BranchingDatum,
        k: u32,
        alpha_index: usize,
        base: Box<Trace>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TraceError {
    #[error("leaf tuple does not realize {0}")]
    LeafRejected(String),
    #[error("axiom does not cover {0}")]
    AxiomRejected(String),
    #[error("base replays to {found}, lift expects {expected}")]
    BaseMismatch { expected: String, found: String },
    #[error("node claims {claimed}, replay gives {replayed}")]
    ResultMismatch { claimed: String, replayed: String },
    #[error(transparent)]
    Lift(#[from] LiftError),
}

impl Trace {
    /// The datum this node claims to realize.
    pub fn datum(&self) -> &BranchingDatum {
        match self {
            Self::Tuple { datum, .. }
            | Self::Axiom { datum, .. }
            | Self::RootsOfUnityLift { datum, .. }
            | Self::PowerLift { datum, .. } => datum,
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Self::Tuple { .. } | Self::Axiom { .. } => 0,
            Self::RootsOfUnityLift { base, .. } | Self::PowerLift { base, .. } => 1 + base.depth(),
        }
    }

    /// Rebuilds the datum bottom-up, checking every leaf and every node.
    pub fn replay(&self) -> Result<BranchingDatum, TraceError> {
        match self {
            Self::Tuple { datum, tuple, .. } => {
                let ok = datum
                    .clone()
                    .into_candidate()
                    .is_ok_and(|c| verify_tuple(tuple, &c));
                if ok {
                    Ok(datum.clone())
                } else {
                    Err(TraceError::LeafRejected(datum.to_string()))
                }
            }
            Self::Axiom { datum, axiom } => {
                if axiom.covers(datum) {
                    Ok(datum.clone())
                } else {
                    Err(TraceError::AxiomRejected(datum.to_string()))
                }
            }
            Self::RootsOfUnityLift {
                datum,
                r,
                splits,
                x,
                y,
                base,
                ..
            } => {
                let expected = base_datum(splits, x, y).map_err(LiftError::from)?;
                let found = base.replay()?;
                if found != expected {
                    return Err(TraceError::BaseMismatch {
                        expected: expected.to_string(),
                        found: found.to_string(),
                    });
                }
                check_claim(datum, lift_roots_of_unity(splits, x, y, *r)?)
            }
            Self::PowerLift {
                datum,
                k,
                alpha_index,
                base,
            } => {
                let found = base.replay()?;
                check_claim(datum, lift_power(&found, *k, *alpha_index)?)
            }
        }
    }
}

fn check_claim(
    claimed: &BranchingDatum,
    replayed: BranchingDatum,
) -> Result<BranchingDatum, TraceError> {
    if *claimed == replayed {
        Ok(replayed)
    } else {
        Err(TraceError::ResultMismatch {
            claimed: claimed.to_string(),
            replayed: replayed.to_string(),
        })
    }
}

impl Axiom {
    pub fn covers(&self, datum: &BranchingDatum) -> bool {
        match self {
            Self::Boccara { a, b, x } => {
                let k = a.degree();
                if b.degree() != k || *x == 0 || *x > k {
                    return false;
                }
                let c = Partition::new(vec![*x]).map(|p| p.padded(k - x));
                let Ok(c) = c else { return false };
                let Ok(expected) = BranchingDatum::expunging(k, vec![a.clone(), b.clone(), c])
                else {
                    return false;
                };
                expected == *datum
                    && datum.source_euler(SPHERE_EULER) == SPHERE_EULER
                    && boccara_condition(a, b, *x)
            }
        }
    }
}

/// Evidence of realizability.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    Monodromy { tuple: MonodromyTuple },
    Construction { trace: Trace },
}

impl Certificate {
    pub fn verify(&self, datum: &CandidateDatum) -> bool {
        match self {
            Self::Monodromy { tuple } => verify_tuple(tuple, datum),
            Self::Construction { trace } => trace.replay().is_ok_and(|d| d == *datum.datum()),
        }
    }

    /// The certificate as a trace node for `datum`.
    pub fn into_trace(self, datum: &BranchingDatum) -> Trace {
        match self {
            Self::Monodromy { tuple } => Trace::Tuple {
                datum: datum.clone(),
                tuple,
                map: None,
            },
            Self::Construction { trace } => trace,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Evidence {
    Certificate(Certificate),
    /// A realizability fact without constructive content.
    Cited(&'static str),
    Obstruction(Obstruction),
    Reason {
        reason: String,
        budget: Option<u64>,
        examined: u64,
    },
}

/// Independent oracle run attached to a rule-based exceptional verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CrossCheck {
    pub oracle: Status,
    pub examined: u64,
}

impl CrossCheck {
    /// An unknown oracle result neither confirms nor contradicts.
    pub fn contradicts(&self, rule: Status) -> bool {
        self.oracle != Status::Unknown && self.oracle != rule
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub status: Status,
    pub method: Method,
    pub evidence: Evidence,
    pub cross_check: Option<CrossCheck>,
}

impl Verdict {
    pub fn realizable(method: Method, certificate: Certificate) -> Self {
        Self {
            status: Status::Realizable,
            method,
            evidence: Evidence::Certificate(certificate),
            cross_check: None,
        }
    }

    pub fn exceptional(method: Method, obstruction: Obstruction) -> Self {
        Self {
            status: Status::Exceptional,
            method,
            evidence: Evidence::Obstruction(obstruction),
            cross_check: None,
        }
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match &self.evidence {
            Evidence::Certificate(c) => Some(c),
            _ => None,
        }
    }

    pub fn obstruction(&self) -> Option<&Obstruction> {
        match &self.evidence {
            Evidence::Obstruction(o) => Some(o),
            _ => None,
        }
    }
}
