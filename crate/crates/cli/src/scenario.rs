//! Scenario description, presets and config loading.

use std::path::{Path, PathBuf};

use regionlab_core::{BaselineChannel, ChannelBudget, SearchConfig};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

/// One comparison run. Gains are amplitudes; powers enter squared gains only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub ptotal1: f64,
    pub p2: f64,
    pub sqrt_c21: f64,
    pub sqrt_c12: f64,
    pub search: SearchConfig,
    pub outputs: PathBuf,
}

pub const PRESETS: [&str; 2] = ["fig3-I", "fig3-II"];

pub fn preset(name: &str) -> Option<Scenario> {
    let p2 = match name {
        "fig3-I" => 6.0,
        "fig3-II" => 3.0,
        _ => return None,
    };
    Some(Scenario {
        name: name.to_string(),
        ptotal1: 6.0,
        p2,
        sqrt_c21: 0.3,
        sqrt_c12: 2.0,
        search: SearchConfig::default(),
        outputs: PathBuf::from("out"),
    })
}

impl Scenario {
    pub fn c21(&self) -> f64 {
        self.sqrt_c21 * self.sqrt_c21
    }

    pub fn c12(&self) -> f64 {
        self.sqrt_c12 * self.sqrt_c12
    }

    pub fn budget(&self) -> ChannelBudget {
        ChannelBudget {
            ptotal1: self.ptotal1,
            p2: self.p2,
            c12: self.c12(),
            c21: self.c21(),
        }
    }

    /// The baseline gives sender 1 the whole budget, since it has no relay.
    pub fn baseline_channel(&self) -> BaselineChannel {
        BaselineChannel {
            p1: self.ptotal1,
            p2: self.p2,
            c12: self.c12(),
            c21: self.c21(),
        }
    }

    /// Field-level validation.
    pub fn validate(&self) -> Result<(), CliError> {
        for (field, v) in [
            ("ptotal1", self.ptotal1),
            ("p2", self.p2),
            ("sqrt_c21", self.sqrt_c21),
            ("sqrt_c12", self.sqrt_c12),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(CliError::Config(format!("{field}: must be finite and >= 0, got {v}")));
            }
        }
        self.search
            .validate()
            .map_err(|e| CliError::Config(format!("search: {e}")))
    }
}

fn merge(base: &mut Value, patch: Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                match b.get_mut(&k) {
                    Some(slot) if slot.is_object() && v.is_object() => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

/// Applies a partial JSON config on top of `base`. Keys absent from the file
/// keep their base values; unknown keys are rejected.
pub fn apply_config(base: &Scenario, json: &str) -> Result<Scenario, CliError> {
    let patch: Value = serde_json::from_str(json).map_err(|e| CliError::Config(format!("config: {e}")))?;
    if !patch.is_object() {
        return Err(CliError::Config("config: top level must be a JSON object".into()));
    }
    let mut v = serde_json::to_value(base).map_err(|e| CliError::Runtime(e.to_string()))?;
    merge(&mut v, patch);
    serde_json::from_value(v).map_err(|e| CliError::Config(format!("config: {e}")))
}

pub fn load_config(base: &Scenario, path: &Path) -> Result<Scenario, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("config: cannot read {}: {e}", path.display())))?;
    apply_config(base, &text)
}
