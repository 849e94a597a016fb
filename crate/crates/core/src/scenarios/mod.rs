//! Named experiments wired from configuration files, with CSV output and a
//! pass/fail report per run.

mod config;
mod misc;
mod properties;
mod report;
mod squeeze;
mod switching;
mod transport;
pub mod units;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

pub use config::{GridPreset, ScenarioConfig, SweepAxis};
pub use report::{num, Check, Rule, RunReport, ScenarioOutput, Status, Table};
pub use transport::{auto_grid, run_transport, TransportOutcome, TransportSetup};

use crate::error::{Error, Result};

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

type Runner = fn(&ScenarioConfig) -> Result<ScenarioOutput>;

pub struct ScenarioInfo {
    pub name: &'static str,
    pub summary: &'static str,
    /// Built-in configuration used by `check`.
    pub default_config: &'static str,
    runner: Runner,
}

static SCENARIOS: &[ScenarioInfo] = &[
    ScenarioInfo {
        name: "fig6",
        summary: "Fock populations after throw-catch transport vs. quartic anharmonicity 1/L4",
        default_config: include_str!("../../configs/fig6.toml"),
        runner: transport::fig6,
    },
    ScenarioInfo {
        name: "fig7",
        summary: "ground-state population vs. end-well frequency (transport well fixed)",
        default_config: include_str!("../../configs/fig7.toml"),
        runner: transport::fig7,
    },
    ScenarioInfo {
        name: "throw-catch",
        summary: "harmonic throw-catch identity with instantaneous switches",
        default_config: include_str!("../../configs/throw-catch.toml"),
        runner: transport::throw_catch,
    },
    ScenarioInfo {
        name: "timing",
        summary: "switch-timing tolerance and symmetric-ramp cancellation",
        default_config: include_str!("../../configs/timing.toml"),
        runner: switching::timing,
    },
    ScenarioInfo {
        name: "fig9",
        summary: "residual excitation vs. catch ramp duration for linear ramps",
        default_config: include_str!("../../configs/fig9.toml"),
        runner: switching::fig9,
    },
    ScenarioInfo {
        name: "squeeze",
        summary: "frequency-switch squeezing, heating lifetime, anharmonic lifetime",
        default_config: include_str!("../../configs/squeeze.toml"),
        runner: squeeze::squeeze,
    },
    ScenarioInfo {
        name: "properties",
        summary: "propagator and covariance invariants",
        default_config: include_str!("../../configs/properties.toml"),
        runner: properties::properties,
    },
    ScenarioInfo {
        name: "kick",
        summary: "energy delivered by a sudden well displacement",
        default_config: include_str!("../../configs/kick.toml"),
        runner: misc::kick,
    },
    ScenarioInfo {
        name: "micromotion",
        summary: "axial micromotion sideband amplitudes",
        default_config: include_str!("../../configs/micromotion.toml"),
        runner: misc::micromotion,
    },
];

pub fn scenarios() -> &'static [ScenarioInfo] {
    SCENARIOS
}

pub fn find(name: &str) -> Result<&'static ScenarioInfo> {
    SCENARIOS
        .iter()
        .find(|s| s.name == name)
        .ok_or_else(|| Error::Config(format!("unknown scenario {name:?} (see `iontide list`)")))
}

/// Built-in configuration of a scenario.
pub fn default_config(name: &str) -> Result<ScenarioConfig> {
    ScenarioConfig::parse(find(name)?.default_config)
}

/// Runs the configured scenario, writing CSV tables and `report.json` into
/// the output directory if one is set.
pub fn run(cfg: &ScenarioConfig) -> Result<RunReport> {
    let info = find(&cfg.scenario)?;
    let start = Instant::now();
    let out = match cfg.jobs {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build().map_err(|e| Error::Config(e.to_string()))?;
            pool.install(|| (info.runner)(cfg))?
        }
        None => (info.runner)(cfg)?,
    };
    let wall = start.elapsed().as_secs_f64();
    let mut report = RunReport {
        scenario: cfg.scenario.clone(),
        parameters: cfg.parameters(),
        checks: out.checks,
        info: out.info,
        outputs: Vec::new(),
        wall_time_s: wall,
        code_version: CODE_VERSION.into(),
    };
    if let Some(dir) = &cfg.out_dir {
        report.outputs = write_outputs(dir, &report, &out.tables)?;
    }
    Ok(report)
}

fn write_outputs(dir: &Path, report: &RunReport, tables: &[Table]) -> Result<Vec<String>> {
    std::fs::create_dir_all(dir)?;
    let mut meta = BTreeMap::new();
    meta.insert("code_version".to_string(), CODE_VERSION.to_string());
    for (k, v) in &report.parameters {
        meta.insert(k.clone(), v.clone());
    }
    let mut written = Vec::new();
    for t in tables {
        let p: PathBuf = dir.join(format!("{}.csv", t.name));
        t.write(&p, &meta)?;
        written.push(p.display().to_string());
    }
    let p = dir.join("report.json");
    let mut r = report.clone();
    r.outputs = written.clone();
    std::fs::write(&p, r.to_json())?;
    written.push(p.display().to_string());
    Ok(written)
}

pub const CRITERIA: [(u8, &str); 10] = [
    (1, "Fig. 6 anchor point (L4 = -120 um)"),
    (2, "harmonic throw-catch identity"),
    (3, "switch timing tolerance"),
    (4, "finite switching, linear ramps"),
    (5, "symmetric-ramp cancellation"),
    (6, "squeezing enhancement factor"),
    (7, "heating lifetime and Monte-Carlo oracle"),
    (8, "anharmonic squeezed-state lifetime"),
    (9, "propagator property suite"),
    (10, "micromotion sideband amplitude"),
];

/// Aggregate status of one acceptance criterion over a set of reports.
#[derive(Debug, Clone, PartialEq)]
pub struct CriterionResult {
    pub id: u8,
    pub title: &'static str,
    pub status: Status,
    pub detail: String,
}

pub fn summarize_criteria(reports: &[RunReport]) -> Vec<CriterionResult> {
    CRITERIA
        .iter()
        .map(|&(id, title)| {
            let checks: Vec<&Check> = reports.iter().flat_map(|r| &r.checks).filter(|c| c.criterion == Some(id)).collect();
            let failed: Vec<&str> = checks.iter().filter(|c| c.status == Status::Fail).map(|c| c.name.as_str()).collect();
            let ran = checks.iter().filter(|c| c.status != Status::Skipped).count();
            let status = if checks.is_empty() || !failed.is_empty() {
                Status::Fail
            } else if ran == 0 {
                Status::Skipped
            } else {
                Status::Pass
            };
            let detail = if checks.is_empty() {
                "no checks ran".to_string()
            } else if !failed.is_empty() {
                format!("failed: {}", failed.join(", "))
            } else {
                let skipped = checks.len() - ran;
                if skipped > 0 {
                    format!("{ran} checks passed, {skipped} skipped")
                } else {
                    format!("{ran} checks passed")
                }
            };
            CriterionResult { id, title, status, detail }
        })
        .collect()
}

/// Runs every scenario that carries acceptance checks with its built-in
/// configuration.
pub fn run_acceptance(slow: bool, out_root: Option<&Path>) -> Result<Vec<RunReport>> {
    let mut reports = Vec::new();
    for s in SCENARIOS {
        let mut cfg = ScenarioConfig::parse(s.default_config)?;
        cfg.slow |= slow;
        cfg.out_dir = out_root.map(|d| d.join(s.name));
        reports.push(run(&cfg)?);
    }
    Ok(reports)
}
