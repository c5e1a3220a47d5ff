//! Batch verification front-end: run suites from a scenario config, emit
//! scan tables, or print the model constants.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use contact_forge::config::ScenarioConfig;
use contact_forge::error::Error;
use contact_forge::flows::Constants;
use contact_forge::report::Report;
use contact_forge::suites::{emit_table, exit_code, run_suites};

#[derive(Parser)]
#[command(name = "contact-forge", version, about = "numerical checks for a contact-geometry model library")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification suites and emit JSON reports.
    Run {
        /// Scenario config path; defaults apply when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Suite selection; repeatable. Overrides the config's selection.
        #[arg(long = "suite")]
        suites: Vec<String>,
        /// Seed override (the CONTACT_FORGE_SEED variable wins over both
        /// this flag and the config).
        #[arg(long)]
        seed: Option<u64>,
        /// Run suites on separate threads.
        #[arg(long)]
        parallel: bool,
        /// Write the JSON report document here instead of stdout.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Emit a CSV scan table.
    Table {
        /// g_scan | G_scan | flow_portrait
        #[arg(long)]
        kind: String,
        #[arg(long, default_value_t = 1000)]
        points: usize,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print r_M, the sharp bound, ln(7/6), and g_max as JSON.
    Constants,
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Run { config, suites, seed, parallel, json } => {
            let mut cfg = match config {
                Some(path) => ScenarioConfig::parse(&std::fs::read_to_string(path)?)?,
                None => ScenarioConfig::default(),
            };
            if !suites.is_empty() {
                cfg.suites = suites;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Ok(env_seed) = std::env::var("CONTACT_FORGE_SEED") {
                cfg.seed = env_seed.parse().map_err(|_| Error::ConfigError {
                    line: 0,
                    column: 0,
                    message: format!("CONTACT_FORGE_SEED is not an integer: `{env_seed}`"),
                })?;
            }
            let reports = run_suites(&cfg, parallel)?;
            for r in &reports {
                println!("{}: {:?} (samples {}, max residual {:.3e})", r.check, r.status, r.samples, r.max_residual);
            }
            let doc = report_document(&reports);
            match json {
                Some(path) => std::fs::write(path, doc)?,
                None => println!("{doc}"),
            }
            Ok(ExitCode::from(exit_code(&reports) as u8))
        }
        Command::Table { kind, points, out } => {
            match out {
                Some(path) => {
                    let mut file = std::fs::File::create(path)?;
                    emit_table(&kind, points, &mut file)?;
                }
                None => {
                    let mut stdout = std::io::stdout().lock();
                    emit_table(&kind, points, &mut stdout)?;
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Constants => {
            let c = Constants::compute();
            println!("{}", serde_json::to_string_pretty(&c).expect("constants serialize"));
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn report_document(reports: &[Report]) -> String {
    let doc = serde_json::json!({ "schema": 1, "reports": reports });
    serde_json::to_string_pretty(&doc).expect("reports serialize")
}
