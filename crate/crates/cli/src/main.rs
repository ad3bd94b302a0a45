//! `gaudin-cm`: batch verification campaigns from the command line.

mod cache;
mod campaign;
mod config;
mod render;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::cache::RootCache;
use crate::campaign::{run_campaign, run_exact, run_identities, Mode};
use crate::config::CampaignConfig;
use crate::render::{cache_bytes, document_bytes, emit, Document, Format};

const EXIT_FAILED: u8 = 1;
const EXIT_CONFIG: u8 = 2;

#[derive(Parser)]
#[command(name = "gaudin-cm", version, about = "Boundary Gaudin / Calogero-Moser correspondence checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Campaign configuration (JSON).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the Bethe residual gate (`check-identities`: every check gate).
    #[arg(long)]
    tol: Option<f64>,
    /// Overrides the RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for case-level parallelism.
    #[arg(long)]
    jobs: Option<usize>,
    /// Root cache file; defaults to $GAUDIN_CM_CACHE when set.
    #[arg(long)]
    cache: Option<PathBuf>,
    /// Report destination; stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Solve, check collapse and identities, and compare against exact spectra.
    Verify(Common),
    /// Bethe roots only.
    SolveBethe(Common),
    /// Exact spectra of the Gaudin Hamiltonians.
    ExactDiag(Common),
    /// Randomized off-shell and structural checks.
    CheckIdentities {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 50)]
        draws: usize,
        /// Restrict to these checks (repeatable).
        #[arg(long)]
        only: Vec<String>,
    },
    /// Re-render a saved report, or the root cache when no input is given.
    Report {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        input: Option<PathBuf>,
    },
}

/// A failure that maps to an exit code.
struct Fail(u8, String);

fn config_error(msg: impl std::fmt::Display) -> Fail {
    Fail(EXIT_CONFIG, msg.to_string())
}

fn load_config(c: &Common) -> Result<CampaignConfig, Fail> {
    let path = c.config.as_deref().ok_or_else(|| config_error("--config is required"))?;
    let mut cfg = CampaignConfig::load(path).map_err(config_error)?;
    if let Some(t) = c.tol {
        cfg.tolerances.bethe = t;
    }
    if let Some(s) = c.seed {
        cfg.seeds.rng = s;
    }
    cfg.validate().map_err(config_error)?;
    Ok(cfg)
}

fn output_path(c: &Common, cfg: Option<&CampaignConfig>) -> Option<PathBuf> {
    c.output
        .clone()
        .or_else(|| cfg.and_then(|k| k.output.as_ref().map(PathBuf::from)))
}

fn write_document(doc: &Document, format: Format, path: Option<&Path>) -> Result<(), Fail> {
    let bytes = document_bytes(doc, format).map_err(|e| Fail(EXIT_FAILED, e.to_string()))?;
    emit(&bytes, path).map_err(|e| Fail(EXIT_FAILED, format!("cannot write report: {e}")))
}

fn campaign(c: &Common, mode: Mode) -> Result<Document, Fail> {
    let cfg = load_config(c)?;
    let cache_path = cache::resolve_path(c.cache.as_deref());
    let mut cache = cache_path.as_deref().map(RootCache::load);
    let report = run_campaign(&cfg, cache.as_mut(), mode);
    if let (Some(p), Some(cache)) = (&cache_path, &cache) {
        cache
            .save(p)
            .map_err(|e| Fail(EXIT_FAILED, format!("cannot write cache {}: {e}", p.display())))?;
    }
    let doc = match mode {
        Mode::Verify => Document::Verify(report),
        Mode::Solve => Document::SolveBethe(report),
    };
    write_document(&doc, c.format, output_path(c, Some(&cfg)).as_deref())?;
    Ok(doc)
}

fn run(cli: Cli) -> Result<Option<Document>, Fail> {
    let common = match &cli.command {
        Command::Verify(c) | Command::SolveBethe(c) | Command::ExactDiag(c) => c,
        Command::CheckIdentities { common, .. } | Command::Report { common, .. } => common,
    };
    if let Some(j) = common.jobs {
        if j == 0 {
            return Err(config_error("--jobs must be at least 1"));
        }
        // only fails if a global pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j).build_global();
    }
    match &cli.command {
        Command::Verify(c) => campaign(c, Mode::Verify).map(Some),
        Command::SolveBethe(c) => campaign(c, Mode::Solve).map(Some),
        Command::ExactDiag(c) => {
            let cfg = load_config(c)?;
            let doc = Document::ExactDiag(run_exact(&cfg));
            write_document(&doc, c.format, output_path(c, Some(&cfg)).as_deref())?;
            Ok(Some(doc))
        }
        Command::CheckIdentities { common: c, draws, only } => {
            if let Some(t) = c.tol.filter(|t| !(*t > 0.0)) {
                return Err(config_error(format!("--tol must be positive, got {t}")));
            }
            let report = run_identities(only, c.seed.unwrap_or(0), *draws, c.tol).map_err(config_error)?;
            let doc = Document::CheckIdentities(report);
            write_document(&doc, c.format, output_path(c, None).as_deref())?;
            Ok(Some(doc))
        }
        Command::Report { common: c, input } => {
            if let Some(path) = input {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?;
                let doc: Document = serde_json::from_str(&text)
                    .map_err(|e| config_error(format!("cannot parse {}: {e}", path.display())))?;
                write_document(&doc, c.format, c.output.as_deref())?;
                return Ok(Some(doc));
            }
            let path = cache::resolve_path(c.cache.as_deref())
                .ok_or_else(|| config_error("report needs --input or a cache path"))?;
            if !path.exists() {
                return Err(config_error(format!("no cache at {}", path.display())));
            }
            let bytes = cache_bytes(&RootCache::load(&path), c.format).map_err(|e| Fail(EXIT_FAILED, e.to_string()))?;
            emit(&bytes, c.output.as_deref()).map_err(|e| Fail(EXIT_FAILED, e.to_string()))?;
            Ok(None)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Some(doc)) => {
            let s = doc.summary();
            eprintln!(
                "{} cases: {} passed, {} failed, {} without admissible roots, {} rejected",
                s.cases, s.passed, s.failed, s.no_admissible_roots, s.rejected
            );
            if s.ok() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_FAILED)
            }
        }
        Ok(None) => ExitCode::SUCCESS,
        Err(Fail(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
