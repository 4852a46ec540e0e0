use std::collections::BTreeMap;

use crate::model::{Instance, TimeWindow};

use super::IoError;

/// Flat `key=value` manifest, rendered with sorted keys so the file is
/// byte-stable.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Manifest {
    entries: BTreeMap<String, String>,
}

impl Manifest {
    pub fn new() -> Self {
        Manifest::default()
    }

    /// Manifest describing an existing instance: horizon, slot duration and
    /// tag universe, plus entity counts for quick inspection.
    pub fn for_instance(instance: &Instance) -> Self {
        let mut m = Manifest::new();
        m.set("format", "trmoa-instance/1");
        m.set("t1", instance.horizon.start);
        m.set("t2", instance.horizon.end);
        m.set("slot_duration", instance.slot_duration);
        m.set("tag_universe", instance.db.tag_labels.join(";"));
        m.set("users", instance.user_count());
        m.set("boards", instance.catalog.board_count());
        m.set("slots", instance.slot_count());
        m.set("advertisers", instance.advertiser_count());
        m
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.entries.insert(key.to_string(), value.to_string());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    fn required(&self, key: &str) -> Result<&str, IoError> {
        self.get(key)
            .ok_or_else(|| IoError::BadManifest(format!("missing required key {key}")))
    }

    fn parse_i64(&self, key: &str) -> Result<i64, IoError> {
        self.required(key)?
            .parse()
            .map_err(|e| IoError::BadManifest(format!("{key}: {e}")))
    }

    pub fn horizon(&self) -> Result<TimeWindow, IoError> {
        Ok(TimeWindow::new(self.parse_i64("t1")?, self.parse_i64("t2")?))
    }

    pub fn slot_duration(&self) -> Result<i64, IoError> {
        self.parse_i64("slot_duration")
    }

    pub fn gamma(&self) -> Option<f64> {
        self.get("gamma").and_then(|v| v.parse().ok())
    }

    pub fn tag_universe(&self) -> Result<Vec<String>, IoError> {
        let raw = self.required("tag_universe")?;
        if raw.is_empty() {
            return Ok(Vec::new());
        }
        Ok(raw.split(';').map(str::to_string).collect())
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            out.push_str(k);
            out.push('=');
            out.push_str(v);
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, IoError> {
        let mut entries = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                IoError::BadManifest(format!("line {}: expected key=value, got {line:?}", i + 1))
            })?;
            entries.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(Manifest { entries })
    }
}
