//! Run configuration: a TOML file with `[run]`, `[gauge]`, `[curves]`,
//! `[analytic]` and `[mc]` sections. Every key is optional; command-line
//! flags override file values.
//!
//! ```toml
//! [run]
//! model = "models/trig.model"   # or "builtin:trig"
//! n = 64
//! samples = 10000
//! seed = 1
//! out = "out"
//! workers = 1
//! full = false
//!
//! [gauge]
//! grid = 4096
//!
//! [curves]
//! scan_grid = 256
//!
//! [analytic]
//! quantity = "i2"               # i2 | i3 | corr | gen-func | moments
//! points = [0.3, 1.5]
//! sources = [0.01, -0.02]
//!
//! [mc]
//! kind = "moments"              # moments | corr | gen-func
//! method = "pencil"             # pencil | unwrap | roots
//! bootstrap = 1000
//! oracle_checks = 10
//! points = [0.0, 0.785398]
//! sources = []
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

pub const DEFAULT_N: usize = 64;
pub const DEFAULT_SAMPLES: usize = 1000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub run: RunSection,
    pub gauge: GaugeSection,
    pub curves: CurvesSection,
    pub analytic: AnalyticSection,
    pub mc: McSection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub model: Option<String>,
    pub n: Option<usize>,
    pub samples: Option<usize>,
    pub seed: u64,
    pub out: PathBuf,
    pub workers: usize,
    pub full: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaugeSection {
    pub grid: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CurvesSection {
    pub scan_grid: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalyticSection {
    pub quantity: String,
    pub points: Vec<f64>,
    pub sources: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McSection {
    pub kind: String,
    pub method: String,
    pub bootstrap: usize,
    pub oracle_checks: usize,
    pub points: Vec<f64>,
    pub sources: Vec<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            run: RunSection::default(),
            gauge: GaugeSection { grid: chiral_winding::DEFAULT_GAUGE_GRID },
            curves: CurvesSection { scan_grid: 256 },
            analytic: AnalyticSection::default(),
            mc: McSection::default(),
        }
    }
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection { model: None, n: None, samples: None, seed: 1, out: PathBuf::from("out"), workers: 1, full: false }
    }
}

impl Default for GaugeSection {
    fn default() -> Self {
        GaugeSection { grid: chiral_winding::DEFAULT_GAUGE_GRID }
    }
}

impl Default for CurvesSection {
    fn default() -> Self {
        CurvesSection { scan_grid: 256 }
    }
}

impl Default for AnalyticSection {
    fn default() -> Self {
        AnalyticSection { quantity: "i2".into(), points: Vec::new(), sources: Vec::new() }
    }
}

impl Default for McSection {
    fn default() -> Self {
        McSection {
            kind: "moments".into(),
            method: "pencil".into(),
            bootstrap: 1000,
            oracle_checks: 10,
            points: Vec::new(),
            sources: Vec::new(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    /// Rejects non-positive sizes before any work starts.
    pub fn check(&self) -> Result<(), String> {
        let positive = [
            ("n", self.run.n.unwrap_or(1)),
            ("samples", self.run.samples.unwrap_or(1)),
            ("workers", self.run.workers),
            ("gauge.grid", self.gauge.grid),
            ("curves.scan_grid", self.curves.scan_grid),
            ("mc.bootstrap", self.mc.bootstrap),
        ];
        for (name, v) in positive {
            if v == 0 {
                return Err(format!("{name} must be positive"));
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.run.n.unwrap_or(DEFAULT_N)
    }

    pub fn samples(&self) -> usize {
        self.run.samples.unwrap_or(DEFAULT_SAMPLES)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }
}
