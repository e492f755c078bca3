//! The verdict pipeline: surface rule, shape rules, split recursion, oracle.

use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::datum::{BranchingDatum, CandidateDatum};
use crate::oracle::{decide_by_search, SearchConfig, SearchVerdict};
use crate::partition::Partition;
use crate::shape::detect_power_shapes;
use crate::split::{all_splits_limited, DEFAULT_SPLIT_LIMIT};

use super::rules::{iff_general_x, iff_two_two, power_obstruction};
use super::{
    base_datum, Certificate, CrossCheck, Evidence, Method, Obstruction, Status, Trace, Verdict,
    LIFT_ASSUMPTION,
};

const EKS_FACT: &str =
    "every candidate datum over a target of non-positive Euler characteristic is realizable";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EngineConfig {
    pub search: SearchConfig,
    /// Cap on the splits enumerated per power shape.
    pub split_limit: usize,
    /// Run the oracle on the top-level datum when no rule decides it.
    /// Data induced by the recursion always fall back to the oracle.
    pub use_oracle: bool,
    /// Rule-based exceptional verdicts up to this degree are re-checked by
    /// the oracle. Zero disables the check.
    pub cross_check_degree: u32,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            search: SearchConfig::default(),
            split_limit: DEFAULT_SPLIT_LIMIT,
            use_oracle: true,
            cross_check_degree: 0,
        }
    }
}

type MemoKey = (BranchingDatum, i64, bool);

/// A decision procedure with a verdict memo shared across calls and threads.
#[derive(Debug, Default)]
pub struct Engine {
    config: EngineConfig,
    memo: Mutex<HashMap<MemoKey, Verdict>>,
}

impl Engine {
    pub fn new(config: EngineConfig) -> Self {
        Self {
            config,
            memo: Mutex::new(HashMap::new()),
        }
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn memo_len(&self) -> usize {
        self.memo.lock().map(|m| m.len()).unwrap_or(0)
    }

    pub fn decide(&self, datum: &CandidateDatum) -> Verdict {
        self.decide_with(datum, self.config.use_oracle)
    }

    fn decide_with(&self, datum: &CandidateDatum, oracle: bool) -> Verdict {
        let key = (datum.datum().clone(), datum.target_euler(), oracle);
        if let Some(v) = self.memo.lock().ok().and_then(|m| m.get(&key).cloned()) {
            return v;
        }
        let verdict = self.evaluate(datum, oracle);
        if let Ok(mut m) = self.memo.lock() {
            m.insert(key, verdict.clone());
        }
        verdict
    }

    fn evaluate(&self, datum: &CandidateDatum, oracle: bool) -> Verdict {
        if datum.target_euler() <= 0 {
            return Verdict {
                status: Status::Realizable,
                method: Method::Eks,
                evidence: Evidence::Cited(EKS_FACT),
                cross_check: None,
            };
        }
        if datum.is_sphere_to_sphere() && datum.len() == 3 {
            if let Some(v) = shape_rules(datum).or_else(|| self.recursion(datum)) {
                return self.finish(datum, v);
            }
        }
        if oracle {
            return self.oracle(datum);
        }
        Verdict {
            status: Status::Unknown,
            method: Method::None,
            evidence: Evidence::Reason {
                reason: "no rule applies and the oracle is disabled".to_string(),
                budget: None,
                examined: 0,
            },
            cross_check: None,
        }
    }

    fn oracle(&self, datum: &CandidateDatum) -> Verdict {
        match decide_by_search(datum, &self.config.search) {
            SearchVerdict::Realizable { tuple, .. } => {
                Verdict::realizable(Method::Oracle, Certificate::Monodromy { tuple })
            }
            SearchVerdict::Exceptional { examined } => {
                Verdict::exceptional(Method::Oracle, Obstruction::SearchExhausted { examined })
            }
            SearchVerdict::Unknown { examined, budget } => Verdict {
                status: Status::Unknown,
                method: Method::Oracle,
                evidence: Evidence::Reason {
                    reason: "search budget exhausted".to_string(),
                    budget: Some(budget),
                    examined,
                },
                cross_check: None,
            },
        }
    }

    /// Re-verifies certificates and attaches the oracle cross-check.
    fn finish(&self, datum: &CandidateDatum, mut verdict: Verdict) -> Verdict {
        match verdict.status {
            Status::Realizable => {
                if !verdict.certificate().is_some_and(|c| c.verify(datum)) {
                    return Verdict {
                        status: Status::Unknown,
                        method: verdict.method,
                        evidence: Evidence::Reason {
                            reason: "certificate failed verification".to_string(),
                            budget: None,
                            examined: 0,
                        },
                        cross_check: None,
                    };
                }
            }
            Status::Exceptional if datum.degree() <= self.config.cross_check_degree => {
                let search = decide_by_search(datum, &self.config.search);
                let oracle = match search {
                    SearchVerdict::Realizable { .. } => Status::Realizable,
                    SearchVerdict::Exceptional { .. } => Status::Exceptional,
                    SearchVerdict::Unknown { .. } => Status::Unknown,
                };
                verdict.cross_check = Some(CrossCheck {
                    oracle,
                    examined: search.examined(),
                });
            }
            _ => {}
        }
        verdict
    }

    /// Decides the data induced by each power shape and split. One
    /// realizable induced datum gives a lift; a shape whose complete list
    /// of induced data is exceptional gives an obstruction.
    fn recursion(&self, datum: &CandidateDatum) -> Option<Verdict> {
        let shapes = detect_power_shapes(datum).ok()?;
        let mut obstruction = None;
        for shape in shapes {
            let Ok(splits) =
                all_splits_limited(&shape.mu1, shape.r, shape.k, self.config.split_limit)
            else {
                continue;
            };
            let mut induced: BTreeMap<BranchingDatum, Vec<Partition>> = BTreeMap::new();
            for solution in &splits.solutions {
                let groups: Vec<Partition> = solution.nontrivial_groups().cloned().collect();
                if let Ok(base) = base_datum(&groups, &shape.x, &shape.y) {
                    induced.entry(base).or_insert(groups);
                }
            }
            let induced: Vec<(BranchingDatum, Vec<Partition>)> = induced.into_iter().collect();
            let verdicts = self.decide_induced(&induced);
            let mut all_exceptional = !splits.truncated && !induced.is_empty();
            for ((base, groups), v) in induced.iter().zip(&verdicts) {
                match v.status {
                    Status::Realizable => {
                        let certificate = v.certificate()?.clone();
                        let trace = Trace::RootsOfUnityLift {
                            datum: datum.datum().clone(),
                            r: shape.r,
                            splits: groups.clone(),
                            x: shape.x.clone(),
                            y: shape.y.clone(),
                            assumption: LIFT_ASSUMPTION.to_string(),
                            base: Box::new(certificate.into_trace(base)),
                        };
                        return Some(Verdict::realizable(
                            Method::Recursion,
                            Certificate::Construction { trace },
                        ));
                    }
                    Status::Exceptional => {}
                    Status::Unknown => all_exceptional = false,
                }
            }
            if all_exceptional && obstruction.is_none() {
                obstruction = Some(Obstruction::InducedExceptional {
                    r: shape.r,
                    k: shape.k,
                    mu1: shape.mu1.clone(),
                    induced: induced.into_iter().map(|(d, _)| d).collect(),
                });
            }
        }
        obstruction.map(|o| Verdict::exceptional(Method::RecursiveObstruction, o))
    }

    /// Verdicts for induced data, in order. Sequential runs stop at the
    /// first realizable datum; the rest are reported unknown.
    fn decide_induced(&self, induced: &[(BranchingDatum, Vec<Partition>)]) -> Vec<Verdict> {
        let one = |base: &BranchingDatum| match base.clone().into_candidate() {
            Ok(c) => self.decide_with(&c, true),
            Err(_) => Verdict {
                status: Status::Unknown,
                method: Method::None,
                evidence: Evidence::Reason {
                    reason: "induced datum is not a candidate".to_string(),
                    budget: None,
                    examined: 0,
                },
                cross_check: None,
            },
        };
        #[cfg(feature = "parallel")]
        if self.config.search.parallel && induced.len() > 1 {
            return induced.par_iter().map(|(base, _)| one(base)).collect();
        }
        let mut out = Vec::with_capacity(induced.len());
        for (base, _) in induced {
            let v = one(base);
            let done = v.status == Status::Realizable;
            out.push(v);
            if done {
                break;
            }
        }
        out
    }
}

/// Shape-matched criteria, then the split criterion. A negative iff verdict
/// that the split criterion also explains is reported as the latter.
fn shape_rules(datum: &CandidateDatum) -> Option<Verdict> {
    let obstruction = || {
        power_obstruction(datum)
            .ok()
            .flatten()
            .map(|o| Verdict::exceptional(Method::PowerObstruction, o))
    };
    match iff_two_two(datum).or_else(|| iff_general_x(datum)) {
        Some(v) if v.status == Status::Realizable => Some(v),
        Some(v) => obstruction().or(Some(v)),
        None => obstruction(),
    }
}

/// Decides one candidate with a fresh engine.
pub fn decide(datum: &CandidateDatum, config: &EngineConfig) -> Verdict {
    Engine::new(config.clone()).decide(datum)
}

/// Decides many candidates with one shared memo, in parallel when enabled.
pub fn decide_all(engine: &Engine, data: &[CandidateDatum]) -> Vec<Verdict> {
    #[cfg(feature = "parallel")]
    if engine.config().search.parallel {
        return data.par_iter().map(|d| engine.decide(d)).collect();
    }
    data.iter().map(|d| engine.decide(d)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cand(s: &str) -> CandidateDatum {
        s.parse().unwrap()
    }

    fn checked() -> EngineConfig {
        EngineConfig {
            cross_check_degree: 10,
            ..EngineConfig::default()
        }
    }

    #[test]
    fn classic_exceptional() {
        let v = decide(&cand("4:[3,1];[2,2];[2,2]"), &checked());
        assert_eq!(v.status, Status::Exceptional);
        assert_eq!(v.method, Method::PowerObstruction);
        assert_eq!(v.cross_check.map(|c| c.oracle), Some(Status::Exceptional));
    }

    #[test]
    fn degree_fifteen_examples() {
        let d = cand("15:[3,3,1,2,2,2,2];[3,3,3,3,3];[3,3,3,3,3]");
        let v = decide(&d, &EngineConfig::default());
        assert_eq!(v.status, Status::Realizable);
        assert_eq!(v.method, Method::Recursion);
        let Some(Certificate::Construction { trace }) = v.certificate() else {
            panic!("expected a trace");
        };
        let Trace::RootsOfUnityLift { r, base, .. } = trace else {
            panic!("expected a lift");
        };
        assert_eq!(*r, 3);
        assert_eq!(*base.datum(), "5:[3,2];[3,2];[2,2,1]".parse().unwrap());
        assert!(v.certificate().unwrap().verify(&d));

        let v = decide(
            &cand("15:[4,2,1,2,2,2,2];[3,3,3,3,3];[3,3,3,3,3]"),
            &EngineConfig::default(),
        );
        assert_eq!(v.status, Status::Exceptional);
        assert_eq!(v.method, Method::PowerObstruction);
    }

    #[test]
    fn degree_nine_example_lifts() {
        let d = cand("9:[3,1,1,2,2];[3,3,3];[3,3,3]");
        let v = decide(&d, &EngineConfig::default());
        assert_eq!(v.status, Status::Realizable);
        assert!(v.certificate().unwrap().verify(&d));
    }

    #[test]
    fn non_positive_target_is_eks() {
        let d = CandidateDatum::with_target("4:[3,1];[2,2];[2,2]".parse().unwrap(), 0).unwrap();
        let v = decide(&d, &EngineConfig::default());
        assert_eq!(v.status, Status::Realizable);
        assert_eq!(v.method, Method::Eks);
        assert!(v.certificate().is_none());
    }

    #[test]
    fn rules_only_reports_unknown() {
        let config = EngineConfig {
            use_oracle: false,
            ..EngineConfig::default()
        };
        let v = decide(&cand("5:[3,1,1];[3,1,1];[2,2,1];[2,2,1]"), &config);
        assert_eq!(v.status, Status::Unknown);
        assert_eq!(v.method, Method::None);
    }

    #[test]
    fn oracle_fallback_and_budget() {
        let d = cand("5:[3,1,1];[3,1,1];[2,2,1];[2,2,1]");
        let v = decide(&d, &EngineConfig::default());
        assert_eq!(v.status, Status::Realizable);
        assert_eq!(v.method, Method::Oracle);
        let tiny = EngineConfig {
            search: SearchConfig {
                budget: 1,
                parallel: false,
            },
            ..EngineConfig::default()
        };
        let v = decide(&cand("7:[3,3,1];[3,3,1];[3,3,1]"), &tiny);
        assert_eq!(v.status, Status::Unknown);
        assert!(matches!(
            v.evidence,
            Evidence::Reason {
                budget: Some(1),
                ..
            }
        ));
    }

    #[test]
    fn memo_is_shared() {
        let engine = Engine::new(EngineConfig::default());
        let d = cand("15:[3,3,1,2,2,2,2];[3,3,3,3,3];[3,3,3,3,3]");
        let first = engine.decide(&d);
        let size = engine.memo_len();
        assert!(size >= 2);
        assert_eq!(engine.decide(&d), first);
        assert_eq!(engine.memo_len(), size);
    }

    #[test]
    fn parallel_and_sequential_sweeps_agree() {
        let data: Vec<CandidateDatum> = crate::datum::enumerate_candidates(8, 3, 2).collect();
        let par = decide_all(&Engine::new(EngineConfig::default()), &data);
        let seq_config = EngineConfig {
            search: SearchConfig {
                parallel: false,
                ..SearchConfig::default()
            },
            ..EngineConfig::default()
        };
        let seq = decide_all(&Engine::new(seq_config), &data);
        let status = |v: &[Verdict]| v.iter().map(|x| (x.status, x.method)).collect::<Vec<_>>();
        assert_eq!(status(&par), status(&seq));
    }
}
