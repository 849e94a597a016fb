use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use super::units::{parse_quantity, Dimension};
use crate::error::{Error, Result};
use crate::physcore::IonSpecies;

const SECTIONS: &[&str] = &["species", "trap", "protocol", "grid", "sweep", "run", "noise", "squeeze", "kick", "check"];

/// Which grid geometry a transport scenario uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridPreset {
    /// Transport distance shrunk (with L3, L4 co-scaled) so the grid stays small.
    Desk,
    /// Literal distances; needs up to 2²⁴ points.
    Paper,
}

/// Sampled sweep axis.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub parameter: String,
    pub values: Vec<f64>,
}

/// A parsed scenario configuration. Values are looked up lazily by the
/// scenario; every lookup is echoed into the run report.
#[derive(Debug)]
pub struct ScenarioConfig {
    pub scenario: String,
    pub species: IonSpecies,
    pub grid: GridPreset,
    pub out_dir: Option<PathBuf>,
    pub slow: bool,
    pub seed: u64,
    pub jobs: Option<usize>,
    table: toml::Table,
    echo: Mutex<BTreeMap<String, String>>,
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| config_err(e.message().to_string()))?;
        for (k, v) in &table {
            if k == "scenario" {
                continue;
            }
            if !SECTIONS.contains(&k.as_str()) {
                return Err(config_err(format!("unknown section [{k}]")));
            }
            if !v.is_table() {
                return Err(config_err(format!("[{k}] must be a section")));
            }
        }
        let scenario = match table.get("scenario") {
            Some(toml::Value::String(s)) => s.clone(),
            Some(_) => return Err(config_err("scenario must be a string")),
            None => return Err(config_err("missing top-level `scenario` key")),
        };
        let mut cfg = Self {
            scenario,
            species: IonSpecies::calcium40(),
            grid: GridPreset::Desk,
            out_dir: None,
            slow: false,
            seed: 0,
            jobs: None,
            table,
            echo: Mutex::new(BTreeMap::new()),
        };
        cfg.species = cfg.parse_species()?;
        cfg.grid = match cfg.string_or("grid", "preset", "desk")?.as_str() {
            "desk" => GridPreset::Desk,
            "paper" => GridPreset::Paper,
            other => return Err(config_err(format!("grid.preset must be \"desk\" or \"paper\", got {other:?}"))),
        };
        cfg.slow = cfg.bool_or("run", "slow", false)?;
        cfg.seed = cfg.integer_or("run", "seed", 0)?;
        cfg.out_dir = cfg.raw("run", "out").map(|v| v.as_str().map(PathBuf::from)).transpose_str("run.out")?;
        let jobs = cfg.integer_or("run", "jobs", 0)?;
        cfg.jobs = (jobs > 0).then_some(jobs as usize);
        Ok(cfg)
    }

    fn parse_species(&self) -> Result<IonSpecies> {
        let name = self.string_or("species", "preset", "ca40")?;
        let base = IonSpecies::preset(&name).ok_or_else(|| config_err(format!("unknown species preset {name:?}")))?;
        let mass = match self.raw("species", "mass_amu") {
            None => base.mass,
            Some(v) => {
                let amu = v.as_float().or_else(|| v.as_integer().map(|i| i as f64)).ok_or_else(|| config_err("species.mass_amu must be a number"))?;
                amu * crate::physcore::constants::ATOMIC_MASS_UNIT
            }
        };
        IonSpecies::new(mass, base.charge, base.label).map_err(|e| config_err(e.to_string()))
    }

    fn raw(&self, section: &str, key: &str) -> Option<&toml::Value> {
        self.table.get(section).and_then(|s| s.get(key))
    }

    fn record(&self, section: &str, key: &str, value: String) {
        self.echo.lock().expect("echo lock").insert(format!("{section}.{key}"), value);
    }

    /// Parameters read so far, as "section.key" → text.
    pub fn parameters(&self) -> BTreeMap<String, String> {
        let mut m = self.echo.lock().expect("echo lock").clone();
        m.insert("scenario".into(), self.scenario.clone());
        m.insert("species".into(), self.species.label.clone());
        m.insert("run.seed".into(), self.seed.to_string());
        m.insert("run.slow".into(), self.slow.to_string());
        m.insert("grid.preset".into(), format!("{:?}", self.grid).to_lowercase());
        m
    }

    fn value_text(v: &toml::Value, what: &str) -> Result<String> {
        match v {
            toml::Value::String(s) => Ok(s.clone()),
            toml::Value::Integer(i) => Ok(i.to_string()),
            toml::Value::Float(f) => Ok(f.to_string()),
            _ => Err(config_err(format!("{what} must be a string or number"))),
        }
    }

    /// A quantity with units, or `None` if absent.
    pub fn quantity(&self, section: &str, key: &str, dim: Dimension) -> Result<Option<f64>> {
        let Some(v) = self.raw(section, key) else { return Ok(None) };
        let text = Self::value_text(v, &format!("{section}.{key}"))?;
        let q = parse_quantity(&text, dim).map_err(|e| config_err(format!("{section}.{key}: {e}")))?;
        self.record(section, key, text);
        Ok(Some(q))
    }

    pub fn quantity_or(&self, section: &str, key: &str, dim: Dimension, default: &str) -> Result<f64> {
        match self.quantity(section, key, dim)? {
            Some(q) => Ok(q),
            None => {
                self.record(section, key, default.to_string());
                parse_quantity(default, dim)
            }
        }
    }

    pub fn string_or(&self, section: &str, key: &str, default: &str) -> Result<String> {
        let s = match self.raw(section, key) {
            None => default.to_string(),
            Some(toml::Value::String(s)) => s.clone(),
            Some(_) => return Err(config_err(format!("{section}.{key} must be a string"))),
        };
        self.record(section, key, s.clone());
        Ok(s)
    }

    pub fn integer_or(&self, section: &str, key: &str, default: u64) -> Result<u64> {
        let v = match self.raw(section, key) {
            None => default,
            Some(toml::Value::Integer(i)) if *i >= 0 => *i as u64,
            Some(_) => return Err(config_err(format!("{section}.{key} must be a non-negative integer"))),
        };
        self.record(section, key, v.to_string());
        Ok(v)
    }

    pub fn bool_or(&self, section: &str, key: &str, default: bool) -> Result<bool> {
        let v = match self.raw(section, key) {
            None => default,
            Some(toml::Value::Boolean(b)) => *b,
            Some(_) => return Err(config_err(format!("{section}.{key} must be true or false"))),
        };
        self.record(section, key, v.to_string());
        Ok(v)
    }

    /// Uniform sweep from `[sweep]`, falling back to the given defaults. The
    /// configured parameter name must match `parameter`.
    pub fn sweep(&self, parameter: &str, dim: Dimension, start: &str, stop: &str, samples: u64) -> Result<SweepAxis> {
        let name = self.string_or("sweep", "parameter", parameter)?;
        if name != parameter {
            return Err(config_err(format!("scenario {} sweeps {parameter:?}, not {name:?}", self.scenario)));
        }
        let a = self.quantity_or("sweep", "start", dim, start)?;
        let b = self.quantity_or("sweep", "stop", dim, stop)?;
        let n = self.integer_or("sweep", "samples", samples)? as usize;
        if n == 0 {
            return Err(config_err("sweep.samples must be at least 1"));
        }
        if !(a.is_finite() && b.is_finite()) {
            return Err(config_err("sweep range must be finite"));
        }
        let values = if n == 1 { vec![a] } else { (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect() };
        Ok(SweepAxis { parameter: name, values })
    }
}

trait TransposeStr<T> {
    fn transpose_str(self, what: &str) -> Result<Option<T>>;
}

impl<T> TransposeStr<T> for Option<Option<T>> {
    fn transpose_str(self, what: &str) -> Result<Option<T>> {
        match self {
            None => Ok(None),
            Some(Some(v)) => Ok(Some(v)),
            Some(None) => Err(config_err(format!("{what} must be a string"))),
        }
    }
}
