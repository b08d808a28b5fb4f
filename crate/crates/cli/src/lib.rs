//! Command implementations behind the `moodgauge` binary.
//!
//! Exit-code contract: 0 success, 1 data errors, 2 usage or config errors.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use moodgauge_core::global::zeta_range;
use moodgauge_core::ingestion::{
    build_country, collect_panels, diagnostics_csv, fs_resolver, ConfigError, Diagnostic,
    PanelConfig, PanelError,
};
use moodgauge_core::pipeline::{
    analyze_country, render_reports, AnalysisOptions, CountryResults, ReportFile,
};
use moodgauge_core::temporal::WindowMode;
use moodgauge_core::CountryCode;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

pub mod replication;

pub const THREADS_ENV: &str = "MOODGAUGE_THREADS";
pub const MANIFEST_FILE: &str = "manifest.txt";
pub const DIAGNOSTICS_FILE: &str = "diagnostics.csv";

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data {
        message: String,
        diagnostics: Vec<Diagnostic>,
    },
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 2,
            Self::Data { .. } | Self::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Usage(m) => write!(f, "usage error: {m}"),
            Self::Data { message, .. } => write!(f, "data error: {message}"),
            Self::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        Self::Usage(e.to_string())
    }
}

/// `A:B`, an inclusive range of ISO week numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WeekRange(pub u32, pub u32);

impl FromStr for WeekRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s
            .split_once(':')
            .ok_or_else(|| format!("expected A:B, got {s:?}"))?;
        let a: u32 = a.trim().parse().map_err(|_| format!("bad week {a:?}"))?;
        let b: u32 = b.trim().parse().map_err(|_| format!("bad week {b:?}"))?;
        if a < 1 || b > 53 || a > b {
            return Err(format!("week range {a}:{b} must satisfy 1 <= A <= B <= 53"));
        }
        Ok(Self(a, b))
    }
}

pub fn parse_window_mode(s: &str) -> Result<WindowMode, String> {
    match s {
        "iso-week" => Ok(WindowMode::IsoWeek),
        "fixed-5" => Ok(WindowMode::Fixed5),
        other => Err(format!("unknown window mode {other:?} (iso-week, fixed-5)")),
    }
}

fn window_mode_name(m: WindowMode) -> &'static str {
    match m {
        WindowMode::IsoWeek => "iso-week",
        WindowMode::Fixed5 => "fixed-5",
    }
}

#[derive(Debug, Clone)]
pub struct RunArgs {
    pub config: PathBuf,
    pub out: PathBuf,
    pub zeta_min: u32,
    pub zeta_max: u32,
    pub window_mode: WindowMode,
    pub weeks: Option<WeekRange>,
    pub countries: Option<Vec<CountryCode>>,
    /// Worker count; `None` reads [`THREADS_ENV`], then falls back to rayon's default.
    pub threads: Option<usize>,
}

impl RunArgs {
    pub fn new(config: impl Into<PathBuf>, out: impl Into<PathBuf>) -> Self {
        Self {
            config: config.into(),
            out: out.into(),
            zeta_min: 0,
            zeta_max: moodgauge_core::global::DEFAULT_ZETA_MAX,
            window_mode: WindowMode::IsoWeek,
            weeks: None,
            countries: None,
            threads: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmittedFile {
    pub name: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunManifest {
    pub config: PathBuf,
    pub out_dir: PathBuf,
    pub zeta_min: u32,
    pub zeta_max: u32,
    pub window_mode: WindowMode,
    pub weeks: Option<WeekRange>,
    pub countries: Option<Vec<CountryCode>>,
    pub created_utc: String,
    pub files: Vec<EmittedFile>,
}

impl RunManifest {
    /// `key = value` lines; `file` lines are `name sha256:<hex> <bytes>`.
    pub fn to_text(&self) -> String {
        let mut s = String::from("# moodgauge run manifest\n");
        let _ = writeln!(s, "config = {}", self.config.display());
        let _ = writeln!(s, "out_dir = {}", self.out_dir.display());
        let _ = writeln!(s, "zeta_min = {}", self.zeta_min);
        let _ = writeln!(s, "zeta_max = {}", self.zeta_max);
        let _ = writeln!(s, "window_mode = {}", window_mode_name(self.window_mode));
        let _ = writeln!(
            s,
            "weeks = {}",
            self.weeks
                .map_or("all".to_owned(), |w| format!("{}:{}", w.0, w.1))
        );
        let _ = writeln!(
            s,
            "countries = {}",
            self.countries.as_ref().map_or("all".to_owned(), |c| {
                c.iter()
                    .map(CountryCode::as_str)
                    .collect::<Vec<_>>()
                    .join(",")
            })
        );
        let _ = writeln!(s, "created_utc = {}", self.created_utc);
        for f in &self.files {
            let _ = writeln!(s, "file = {} sha256:{} {}", f.name, f.sha256, f.bytes);
        }
        s
    }
}

fn thread_pool(threads: Option<usize>) -> Result<rayon::ThreadPool, CliError> {
    let n = match threads {
        Some(n) => n,
        None => match std::env::var(THREADS_ENV) {
            Ok(v) => v
                .trim()
                .parse::<usize>()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(|| {
                    CliError::Usage(format!("{THREADS_ENV}={v:?} is not a positive integer"))
                })?,
            Err(_) => 0,
        },
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map_err(|e| CliError::Io(e.to_string()))
}

fn load_config(path: &Path, countries: Option<&[CountryCode]>) -> Result<PanelConfig, CliError> {
    let mut config = PanelConfig::load(path)?;
    if let Some(codes) = countries {
        for c in codes {
            if !config.entries.iter().any(|e| &e.country == c) {
                return Err(CliError::Usage(format!("country {c} is not in the config")));
            }
        }
        config.restrict_to(codes);
    }
    Ok(config)
}

/// Ingests every pair, in parallel across countries; results keep config order.
fn ingest(
    config: &PanelConfig,
    pool: &rayon::ThreadPool,
) -> Result<moodgauge_core::ingestion::PanelBuild, PanelError> {
    let builds = pool.install(|| {
        config
            .entries
            .par_iter()
            .map(|e| build_country(e, &config.date_format, &fs_resolver))
            .collect()
    });
    collect_panels(builds)
}

/// Outcome of `validate`: every diagnostic found. Clean iff empty.
#[derive(Debug)]
pub struct ValidationReport {
    pub diagnostics: Vec<Diagnostic>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.diagnostics.is_empty()
    }

    pub fn exit_code(&self) -> i32 {
        if self.is_clean() {
            0
        } else {
            1
        }
    }
}

pub fn cmd_validate(config: &Path, threads: Option<usize>) -> Result<ValidationReport, CliError> {
    let config = load_config(config, None)?;
    let pool = thread_pool(threads)?;
    let diagnostics = match ingest(&config, &pool) {
        Ok(build) => build.diagnostics,
        Err(PanelError::CountryEmpty { diagnostics, .. }) => diagnostics,
    };
    Ok(ValidationReport { diagnostics })
}

fn digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> Result<EmittedFile, CliError> {
    let path = dir.join(name);
    fs::write(&path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(EmittedFile {
        name: name.to_owned(),
        sha256: digest(bytes),
        bytes: bytes.len(),
    })
}

/// Per-country results, rendered report files and ingestion diagnostics.
pub type Computed = (Vec<CountryResults>, Vec<ReportFile>, Vec<Diagnostic>);

/// Runs the full pipeline and returns the per-country results along with
/// the rendered files, without touching the filesystem for output.
pub fn compute(args: &RunArgs) -> Result<Computed, CliError> {
    let grid =
        zeta_range(args.zeta_min, args.zeta_max).map_err(|e| CliError::Usage(e.to_string()))?;
    let config = load_config(&args.config, args.countries.as_deref())?;
    let pool = thread_pool(args.threads)?;
    let build = ingest(&config, &pool).map_err(|e| {
        let PanelError::CountryEmpty { diagnostics, .. } = &e;
        CliError::Data {
            message: e.to_string(),
            diagnostics: diagnostics.clone(),
        }
    })?;
    let options = AnalysisOptions {
        window_mode: args.window_mode,
        zeta_grid: grid,
        weeks: args.weeks.map(|w| (w.0, w.1)),
    };
    let results: Vec<CountryResults> = pool
        .install(|| {
            build
                .panels
                .par_iter()
                .map(|p| analyze_country(p, &options))
                .collect::<Result<Vec<_>, _>>()
        })
        .map_err(|e| CliError::Data {
            message: e.to_string(),
            diagnostics: Vec::new(),
        })?;
    let files = render_reports(&results).map_err(|e| CliError::Data {
        message: e.to_string(),
        diagnostics: Vec::new(),
    })?;
    Ok((results, files, build.diagnostics))
}

pub fn cmd_run(args: &RunArgs) -> Result<RunManifest, CliError> {
    let created_utc = chrono::Utc::now().format("%Y-%m-%dT%H:%M:%SZ").to_string();
    fs::create_dir_all(&args.out)
        .map_err(|e| CliError::Io(format!("{}: {e}", args.out.display())))?;

    let (files, diagnostics) = match compute(args) {
        Ok((_, files, diagnostics)) => (files, diagnostics),
        Err(CliError::Data {
            message,
            diagnostics,
        }) => {
            write_file(&args.out, DIAGNOSTICS_FILE, &diagnostics_csv(&diagnostics))?;
            return Err(CliError::Data {
                message,
                diagnostics,
            });
        }
        Err(e) => return Err(e),
    };

    let mut emitted = Vec::with_capacity(files.len() + 1);
    for f in &files {
        emitted.push(write_file(&args.out, &f.name, &f.bytes)?);
    }
    emitted.push(write_file(
        &args.out,
        DIAGNOSTICS_FILE,
        &diagnostics_csv(&diagnostics),
    )?);

    let manifest = RunManifest {
        config: args.config.clone(),
        out_dir: args.out.clone(),
        zeta_min: args.zeta_min,
        zeta_max: args.zeta_max,
        window_mode: args.window_mode,
        weeks: args.weeks,
        countries: args.countries.clone(),
        created_utc,
        files: emitted,
    };
    write_file(&args.out, MANIFEST_FILE, manifest.to_text().as_bytes())?;
    Ok(manifest)
}
