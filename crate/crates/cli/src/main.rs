use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use moodgauge::{
    cmd_run, cmd_validate, compute, parse_window_mode, replication, CliError, RunArgs, WeekRange,
};
use moodgauge_core::ingestion::diagnostics_csv;
use moodgauge_core::temporal::WindowMode;
use moodgauge_core::CountryCode;

#[derive(Parser)]
#[command(
    name = "moodgauge",
    version,
    about = "Search-attention vs. stock-index mood indicators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Analysis {
    /// Panel config (TOML).
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u32).range(0..=100))]
    zeta_min: u32,
    #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u32).range(0..=100))]
    zeta_max: u32,
    /// iso-week or fixed-5.
    #[arg(long, default_value = "iso-week", value_parser = parse_window_mode)]
    window_mode: WindowMode,
    /// Keep only ISO weeks A..=B in the windowed outputs, e.g. 10:11.
    #[arg(long)]
    weeks: Option<WeekRange>,
    /// Comma-separated ISO 3166-1 alpha-3 codes.
    #[arg(long, value_delimiter = ',')]
    countries: Option<Vec<CountryCode>>,
}

impl Analysis {
    fn into_args(self, out: PathBuf) -> RunArgs {
        RunArgs {
            zeta_min: self.zeta_min,
            zeta_max: self.zeta_max,
            window_mode: self.window_mode,
            weeks: self.weeks,
            countries: self.countries,
            ..RunArgs::new(self.config, out)
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check that every configured pair ingests cleanly; prints diagnostics CSV.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Compute all indicators and write the report files.
    Run {
        #[command(flatten)]
        analysis: Analysis,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare a run on the 2020 panel with the published reference figures.
    Compare {
        #[command(flatten)]
        analysis: Analysis,
    },
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("moodgauge: {e}");
    if let CliError::Data { diagnostics, .. } = e {
        if !diagnostics.is_empty() {
            let _ = std::io::stderr().write_all(&diagnostics_csv(diagnostics));
        }
    }
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Validate { config } => match cmd_validate(&config, None) {
            Ok(report) => {
                if !report.is_clean() {
                    let _ = std::io::stdout().write_all(&diagnostics_csv(&report.diagnostics));
                }
                ExitCode::from(report.exit_code() as u8)
            }
            Err(e) => fail(&e),
        },
        Command::Run { analysis, out } => match cmd_run(&analysis.into_args(out)) {
            Ok(manifest) => {
                println!(
                    "wrote {} files to {}",
                    manifest.files.len() + 1,
                    manifest.out_dir.display()
                );
                ExitCode::SUCCESS
            }
            Err(e) => fail(&e),
        },
        Command::Compare { analysis } => match compute(&analysis.into_args(PathBuf::new())) {
            Ok((results, _, _)) => {
                print!(
                    "{}",
                    replication::format_table(&replication::compare(&results))
                );
                ExitCode::SUCCESS
            }
            Err(e) => fail(&e),
        },
    }
}
