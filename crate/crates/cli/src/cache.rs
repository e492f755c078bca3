//! Append-only JSONL verdict cache.
//!
//! One record per line. A record is reused only when its engine version and
//! decision settings match the running process exactly; later lines win.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, ErrorKind, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::Context;
use hurwitz::criteria::{EngineConfig, ENGINE_VERSION};
use hurwitz::datum::BranchingDatum;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

/// Engine settings that can change a verdict.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Settings {
    pub budget: u64,
    pub oracle: bool,
    pub cross_check: u32,
    pub split_limit: usize,
}

impl Settings {
    pub fn of(config: &EngineConfig) -> Self {
        Self {
            budget: config.search.budget,
            oracle: config.use_oracle,
            cross_check: config.cross_check_degree,
            split_limit: config.split_limit,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CacheRecord {
    pub key: String,
    pub target_euler: i64,
    pub status: String,
    pub method: String,
    pub evidence: Value,
    pub version: String,
    pub settings: Settings,
    /// Exhausted budget, present on unknown verdicts.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
    pub timestamp: u64,
}

impl CacheRecord {
    fn from_verdict(target_euler: i64, verdict: &Value, settings: &Settings) -> Option<Self> {
        let text = |k: &str| verdict.get(k)?.as_str().map(str::to_string);
        let status = text("status")?;
        let budget = (status == "unknown").then_some(settings.budget);
        Some(Self {
            key: text("datum")?,
            target_euler,
            status,
            method: text("method")?,
            evidence: verdict.get("evidence")?.clone(),
            version: ENGINE_VERSION.to_string(),
            settings: settings.clone(),
            budget,
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        })
    }

    /// The verdict JSON this record was made from.
    pub fn verdict(&self) -> Value {
        json!({
            "datum": self.key,
            "status": self.status,
            "method": self.method,
            "evidence": self.evidence,
        })
    }

    fn check(&self) -> Result<(), String> {
        let datum: BranchingDatum = self.key.parse().map_err(|e| format!("bad key: {e}"))?;
        if datum.to_string() != self.key {
            return Err(format!("key {:?} is not canonical", self.key));
        }
        if self.status == "unknown" && self.budget.is_none() {
            return Err("unknown verdict without a budget".into());
        }
        Ok(())
    }
}

pub struct Cache {
    path: Option<PathBuf>,
    settings: Settings,
    records: HashMap<(String, i64), CacheRecord>,
    pending: Vec<CacheRecord>,
}

impl Cache {
    /// A cache that never reads or writes.
    pub fn disabled(settings: Settings) -> Self {
        Self {
            path: None,
            settings,
            records: HashMap::new(),
            pending: Vec::new(),
        }
    }

    pub fn open(path: &Path, settings: Settings) -> anyhow::Result<Self> {
        let mut cache = Self {
            path: Some(path.to_path_buf()),
            settings,
            records: HashMap::new(),
            pending: Vec::new(),
        };
        let file = match File::open(path) {
            Ok(f) => f,
            Err(e) if e.kind() == ErrorKind::NotFound => return Ok(cache),
            Err(e) => return Err(e).with_context(|| format!("reading {}", path.display())),
        };
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line.with_context(|| format!("reading {}", path.display()))?;
            if line.trim().is_empty() {
                continue;
            }
            let record = serde_json::from_str::<CacheRecord>(&line)
                .map_err(|e| e.to_string())
                .and_then(|r| r.check().map(|()| r));
            match record {
                Ok(r) if r.version == ENGINE_VERSION && r.settings == cache.settings => {
                    cache.records.insert((r.key.clone(), r.target_euler), r);
                }
                Ok(_) => {}
                Err(e) => eprintln!(
                    "warning: {}:{}: skipping corrupt cache record ({e})",
                    path.display(),
                    i + 1
                ),
            }
        }
        Ok(cache)
    }

    pub fn get(&self, key: &str, target_euler: i64) -> Option<Value> {
        self.path.as_ref()?;
        self.records
            .get(&(key.to_string(), target_euler))
            .map(CacheRecord::verdict)
    }

    pub fn put(&mut self, target_euler: i64, verdict: &Value) {
        if self.path.is_none() {
            return;
        }
        if let Some(r) = CacheRecord::from_verdict(target_euler, verdict, &self.settings) {
            self.records
                .insert((r.key.clone(), r.target_euler), r.clone());
            self.pending.push(r);
        }
    }

    /// Appends pending records under an exclusive lock.
    pub fn flush(&mut self) -> anyhow::Result<()> {
        let Some(path) = &self.path else {
            return Ok(());
        };
        if self.pending.is_empty() {
            return Ok(());
        }
        let mut out = String::new();
        for r in self.pending.drain(..) {
            out.push_str(&serde_json::to_string(&r)?);
            out.push('\n');
        }
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .with_context(|| format!("opening {}", path.display()))?;
        file.lock()
            .with_context(|| format!("locking {}", path.display()))?;
        file.write_all(out.as_bytes())
            .with_context(|| format!("writing {}", path.display()))?;
        file.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn settings() -> Settings {
        Settings::of(&EngineConfig::default())
    }

    fn verdict() -> Value {
        json!({
            "datum": "4:[3,1];[2,2];[2,2]",
            "status": "exceptional",
            "method": "power_obstruction",
            "evidence": {"obstruction": {"kind": "x"}},
        })
    }

    #[test]
    fn round_trip_and_corrupt_lines() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.jsonl");
        let mut c = Cache::open(&path, settings()).unwrap();
        c.put(2, &verdict());
        c.flush().unwrap();
        let mut text = std::fs::read_to_string(&path).unwrap();
        text.push_str("{not json\n");
        text.push_str(&text.lines().next().unwrap().replace("4:[3,1]", "4:[1,3]"));
        text.push('\n');
        std::fs::write(&path, text).unwrap();
        let c = Cache::open(&path, settings()).unwrap();
        assert_eq!(c.get("4:[3,1];[2,2];[2,2]", 2), Some(verdict()));
        assert_eq!(c.get("4:[3,1];[2,2];[2,2]", 0), None);
        let other = Settings {
            budget: 1,
            ..settings()
        };
        assert_eq!(
            Cache::open(&path, other)
                .unwrap()
                .get("4:[3,1];[2,2];[2,2]", 2),
            None
        );
    }

    #[test]
    fn unknown_records_keep_the_budget() {
        let v = json!({"datum": "3:[3];[3];[3]", "status": "unknown", "method": "oracle", "evidence": {}});
        let r = CacheRecord::from_verdict(2, &v, &settings()).unwrap();
        assert_eq!(r.budget, Some(settings().budget));
        assert!(r.check().is_ok());
    }
}
