//! The verdict JSON record `{"datum", "status", "method", "evidence"}`.

use serde_json::{json, Map, Value};

use crate::datum::CandidateDatum;

use super::{Evidence, Verdict};

pub fn verdict_json(datum: &CandidateDatum, verdict: &Verdict) -> Value {
    let mut evidence = Map::new();
    match &verdict.evidence {
        Evidence::Certificate(c) => {
            evidence.insert(
                "certificate".into(),
                serde_json::to_value(c).unwrap_or(Value::Null),
            );
        }
        Evidence::Cited(fact) => {
            evidence.insert("cited".into(), json!(fact));
            evidence.insert("target_euler".into(), json!(datum.target_euler()));
        }
        Evidence::Obstruction(o) => {
            evidence.insert(
                "obstruction".into(),
                serde_json::to_value(o).unwrap_or(Value::Null),
            );
        }
        Evidence::Reason {
            reason,
            budget,
            examined,
        } => {
            evidence.insert("reason".into(), json!(reason));
            if let Some(b) = budget {
                evidence.insert("budget".into(), json!(b));
            }
            evidence.insert("examined".into(), json!(examined));
        }
    }
    if let Some(check) = verdict.cross_check {
        evidence.insert(
            "oracle_check".into(),
            json!({
                "status": check.oracle.as_str(),
                "examined": check.examined,
                "agrees": !check.contradicts(verdict.status),
            }),
        );
    }
    json!({
        "datum": datum.to_string(),
        "status": verdict.status.as_str(),
        "method": verdict.method.as_str(),
        "evidence": Value::Object(evidence),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::{decide, Certificate, EngineConfig, Trace};

    #[test]
    fn field_names() {
        let d: CandidateDatum = "4:[3,1];[2,2];[2,2]".parse().unwrap();
        let v = decide(&d, &EngineConfig::default());
        let j = verdict_json(&d, &v);
        assert_eq!(j["datum"], "4:[3,1];[2,2];[2,2]");
        assert_eq!(j["status"], "exceptional");
        assert_eq!(j["method"], "power_obstruction");
        assert_eq!(j["evidence"]["obstruction"]["rule"], "power_shape");
        assert_eq!(j["evidence"]["obstruction"]["k"], 2);
    }

    #[test]
    fn certificate_round_trips() {
        let d: CandidateDatum = "9:[3,1,1,2,2];[3,3,3];[3,3,3]".parse().unwrap();
        let v = decide(&d, &EngineConfig::default());
        let j = verdict_json(&d, &v);
        assert_eq!(j["status"], "realizable");
        let c: Certificate = serde_json::from_value(j["evidence"]["certificate"].clone()).unwrap();
        assert!(c.verify(&d));
        let Certificate::Construction { trace } = c else {
            panic!()
        };
        assert!(matches!(trace, Trace::RootsOfUnityLift { r: 3, .. }));
    }
}
