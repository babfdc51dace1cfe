//! Scenario runner behind the `regionlab` binary.

pub mod output;
pub mod scenario;
pub mod validate;

use std::time::Instant;

use regionlab_core::{dominance_report, icdms_frontier, optimize_frontier, Frontier};
use thiserror::Error;

use output::{Comparison, FrontierSummary, Runtime, SquaredGains, ICDMS_COLUMNS, UDC_COLUMNS};
pub use scenario::{preset, Scenario, PRESETS};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Gap below which the cooperative frontier still counts as dominating.
pub const DOMINANCE_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl From<regionlab_core::Error> for CliError {
    fn from(e: regionlab_core::Error) -> Self {
        use regionlab_core::Error::*;
        match e {
            Domain { .. } | Config(_) => CliError::Config(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

pub struct RunOutcome {
    pub udc: Frontier,
    pub icdms: Frontier,
    pub comparison: Comparison,
}

/// Computes both frontiers and writes every artifact into `s.outputs`.
pub fn run_scenario(s: &Scenario) -> Result<RunOutcome, CliError> {
    s.validate()?;
    let dir = &s.outputs;
    std::fs::create_dir_all(dir).map_err(|e| CliError::Runtime(format!("{}: {e}", dir.display())))?;

    let start = Instant::now();
    let udc = optimize_frontier(s.budget(), &s.search)?;
    let udc_seconds = start.elapsed().as_secs_f64();
    let t = Instant::now();
    let baseline = s.baseline_channel();
    let icdms = icdms_frontier(&baseline, &s.search)?;
    let icdms_seconds = t.elapsed().as_secs_f64();
    let dominance = dominance_report(&udc, &icdms)?;

    output::write_file(
        &dir.join("udc_frontier.csv"),
        &output::frontier_csv(&udc, &UDC_COLUMNS)?,
    )?;
    output::write_file(
        &dir.join("icdms_frontier.csv"),
        &output::frontier_csv(&icdms, &ICDMS_COLUMNS)?,
    )?;
    output::write_file(
        &dir.join("udc_frontier.dat"),
        &output::frontier_dat(&udc, "UDC frontier"),
    )?;
    output::write_file(
        &dir.join("icdms_frontier.dat"),
        &output::frontier_dat(&icdms, "IC-DMS frontier"),
    )?;
    let title = format!(
        "{}: P1 = {}, P2 = {}, sqrt(c21) = {}, sqrt(c12) = {}",
        s.name, s.ptotal1, s.p2, s.sqrt_c21, s.sqrt_c12
    );
    let svg = output::comparison_svg(
        &title,
        &[
            ("UDC achievable region", "#c0392b", &udc),
            ("IC-DMS region", "#2c3e50", &icdms),
        ],
    );
    output::write_file(&dir.join("comparison.svg"), &svg)?;

    let comparison = Comparison {
        tool: "regionlab".into(),
        version: VERSION.into(),
        scenario: s.clone(),
        gains_squared: SquaredGains {
            c21: s.c21(),
            c12: s.c12(),
        },
        icdms_region: baseline.region_label().into(),
        udc: FrontierSummary::of(&udc),
        icdms: FrontierSummary::of(&icdms),
        udc_dominates: dominance.min_gap >= -DOMINANCE_TOL,
        dominance,
        runtime: Runtime {
            udc_seconds,
            icdms_seconds,
            total_seconds: start.elapsed().as_secs_f64(),
        },
    };
    let json = serde_json::to_string_pretty(&comparison).map_err(|e| CliError::Runtime(e.to_string()))?;
    output::write_file(&dir.join("comparison.json"), &(json + "\n"))?;

    Ok(RunOutcome { udc, icdms, comparison })
}
