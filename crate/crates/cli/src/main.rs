use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};

use momsep::criteria::CRITERIA;
use momsep::library::{CLASS_PRESETS, LIBRARY_STATES};
use momsep::regression::run_fixtures;
use momsep_cli::config::NAMED_MAPS;
use momsep_cli::{exit_code, run, Format, Overrides, RegressionSummary, RunConfig, EXIT_ERROR, EXIT_OK};

#[derive(Parser)]
#[command(name = "momsep", version, about = "Entanglement criteria from matrices of moments")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Per-mode cutoff for library states
    #[arg(long, global = true)]
    cutoff: Option<usize>,

    /// Coherent-state truncation budget
    #[arg(long, global = true)]
    epsilon: Option<f64>,

    /// Default criterion tolerance
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Output format: human or structured (JSON)
    #[arg(long, global = true)]
    format: Option<Format>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the criteria of a configuration file on its states
    Analyze {
        config: PathBuf,
        /// Write the report here instead of standard output
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check every stored reference value
    Regress,
    /// Library states
    ListStates,
    /// Criteria, class presets and named maps
    ListCriteria,
}

fn analyze(cli: &Cli, path: &PathBuf, out: Option<&PathBuf>) -> anyhow::Result<i32> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let cfg = RunConfig::parse(&text).with_context(|| format!("in {}", path.display()))?;
    let overrides = Overrides { cutoff: cli.cutoff, epsilon: cli.epsilon, tol: cli.tol };
    let report = run(&cfg, overrides);
    let rendered = match cli.format.or(cfg.format).unwrap_or_default() {
        Format::Human => report.render_human(),
        Format::Structured => report.to_json() + "\n",
    };
    match out {
        Some(p) => std::fs::write(p, rendered).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{rendered}"),
    }
    Ok(exit_code(&report))
}

fn regress(cli: &Cli) -> i32 {
    let summary = RegressionSummary::from(&run_fixtures());
    match cli.format.unwrap_or_default() {
        Format::Human => print!("{}", summary.render_human()),
        Format::Structured => println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes")),
    }
    if summary.failed == 0 {
        EXIT_OK
    } else {
        EXIT_ERROR
    }
}

fn list(rows: &[(&str, &str)]) {
    let w = rows.iter().map(|(n, _)| n.len()).max().unwrap_or(0);
    for (name, desc) in rows {
        println!("  {name:<w$}  {desc}");
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match &cli.command {
        Command::Analyze { config, out } => analyze(&cli, config, out.as_ref()).unwrap_or_else(|e| {
            eprintln!("error: {e:#}");
            EXIT_ERROR
        }),
        Command::Regress => regress(&cli),
        Command::ListStates => {
            list(LIBRARY_STATES);
            EXIT_OK
        }
        Command::ListCriteria => {
            println!("criteria:");
            list(CRITERIA);
            println!("class presets:");
            list(CLASS_PRESETS);
            println!("named maps:");
            for m in NAMED_MAPS {
                println!("  {m}");
            }
            EXIT_OK
        }
    };
    ExitCode::from(code as u8)
}
