use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use regionlab_cli::validate::{run_suite, SUITES};
use regionlab_cli::{preset, run_scenario, scenario, CliError, PRESETS};

#[derive(Parser)]
#[command(
    name = "regionlab",
    version,
    about = "Rate-region frontiers for the cooperative interference channel"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute both frontiers for a scenario and write the comparison artifacts.
    Run {
        /// Named parameter set; also the base that --config patches.
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(PRESETS))]
        preset: Option<String>,
        /// Output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        mu_count: Option<usize>,
        /// Worker threads for the search. Outputs do not depend on it.
        #[arg(long)]
        workers: Option<usize>,
        /// JSON scenario file; keys it omits keep their preset values.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Run an oracle suite and print its report as JSON.
    Validate {
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(SUITES))]
        suite: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::Run {
            preset: name,
            out,
            seed,
            mu_count,
            workers,
            config,
        } => {
            let mut s = preset(name.as_deref().unwrap_or("fig3-I")).expect("preset names are validated by clap");
            if let Some(path) = config {
                s = scenario::load_config(&s, &path)?;
            }
            if let Some(out) = out {
                s.outputs = out;
            }
            if let Some(seed) = seed {
                s.search.seed = seed;
            }
            if let Some(m) = mu_count {
                s.search.mu_count = m;
            }
            if workers.is_some() {
                s.search.workers = workers;
            }
            let outcome = run_scenario(&s)?;
            let c = &outcome.comparison;
            println!("scenario {}", s.name);
            println!("  ptotal1 = {}, p2 = {}", s.ptotal1, s.p2);
            println!(
                "  sqrt_c21 = {} (c21 = {}), sqrt_c12 = {} (c12 = {})",
                s.sqrt_c21,
                s.c21(),
                s.sqrt_c12,
                s.c12()
            );
            println!(
                "  UDC frontier: {} vertices, max R1 {:.6}, max R2 {:.6}",
                c.udc.vertices, c.udc.max_r1_bits, c.udc.max_r2_bits
            );
            println!(
                "  IC-DMS frontier ({}): {} vertices, max R1 {:.6}, max R2 {:.6}",
                c.icdms_region, c.icdms.vertices, c.icdms.max_r1_bits, c.icdms.max_r2_bits
            );
            println!(
                "  gap UDC - IC-DMS: min {:.6}, max {:.6} bits; UDC dominates: {}",
                c.dominance.min_gap, c.dominance.max_gap, c.udc_dominates
            );
            println!("  wrote {} in {:.1} s", s.outputs.display(), c.runtime.total_seconds);
            Ok(true)
        }
        Command::Validate { suite, seed } => {
            let report = run_suite(&suite, seed)?;
            let json = serde_json::to_string_pretty(&report).map_err(|e| CliError::Runtime(e.to_string()))?;
            println!("{json}");
            Ok(report.passed)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
