//! JSON and CSV output.

use std::io::Write;
use std::path::Path;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::cache::RootCache;
use crate::campaign::{CampaignReport, CaseStatus, ExactReport, IdentityReport, Summary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Every report the tool writes, tagged by the command that produced it.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Document {
    Verify(CampaignReport),
    SolveBethe(CampaignReport),
    ExactDiag(ExactReport),
    CheckIdentities(IdentityReport),
}

impl Document {
    pub fn summary(&self) -> &Summary {
        match self {
            Self::Verify(r) | Self::SolveBethe(r) => &r.summary,
            Self::ExactDiag(r) => &r.summary,
            Self::CheckIdentities(r) => &r.summary,
        }
    }
}

fn fold_max(acc: Option<f64>, x: f64) -> Option<f64> {
    Some(match acc {
        Some(a) if a >= x || x.is_nan() => a,
        _ => x,
    })
}

#[derive(Serialize)]
struct CaseRow<'a> {
    index: usize,
    root_system: &'a str,
    superalgebra: Option<&'a str>,
    geometry: Option<&'a str>,
    n: usize,
    m: usize,
    status: CaseStatus,
    roots_found: usize,
    max_bethe_residual: Option<f64>,
    max_charpoly_defect: Option<f64>,
    max_certified_eigenvalue: Option<f64>,
    max_identity_residual: Option<f64>,
    max_oracle_distance: Option<f64>,
    oracle: &'a str,
    wall_time_s: f64,
    reason: Option<&'a str>,
}

fn campaign_rows(r: &CampaignReport) -> Vec<CaseRow<'_>> {
    r.cases
        .iter()
        .map(|c| {
            let mut row = CaseRow {
                index: c.index,
                root_system: &c.input.root_system,
                superalgebra: c.spec.as_ref().and_then(|s| s.superalgebra.as_deref()),
                geometry: c.spec.as_ref().map(|s| s.geometry.as_str()),
                n: c.input.n,
                m: c.input.m,
                status: c.status,
                roots_found: c.roots_found,
                max_bethe_residual: None,
                max_charpoly_defect: None,
                max_certified_eigenvalue: None,
                max_identity_residual: None,
                max_oracle_distance: None,
                oracle: &c.oracle,
                wall_time_s: c.wall_time_s,
                reason: c.reason.as_deref(),
            };
            for s in &c.root_sets {
                row.max_bethe_residual = fold_max(row.max_bethe_residual, s.residual);
                if let Some(d) = s.oracle_distance {
                    row.max_oracle_distance = fold_max(row.max_oracle_distance, d);
                }
                if let Some(col) = &s.collapse {
                    row.max_charpoly_defect = fold_max(row.max_charpoly_defect, col.charpoly_defect);
                    row.max_certified_eigenvalue =
                        fold_max(row.max_certified_eigenvalue, col.certified_eigenvalue_bound);
                    for v in col.identity_residuals.values() {
                        row.max_identity_residual = fold_max(row.max_identity_residual, *v);
                    }
                }
                if let Some(p) = &s.periodic {
                    row.max_certified_eigenvalue = fold_max(row.max_certified_eigenvalue, p.certified_radius);
                    row.max_identity_residual = fold_max(row.max_identity_residual, p.identity.max());
                }
            }
            row
        })
        .collect()
}

#[derive(Serialize)]
struct ExactRow<'a> {
    index: usize,
    root_system: Option<&'a str>,
    superalgebra: Option<&'a str>,
    n: Option<usize>,
    status: CaseStatus,
    tuples: Option<usize>,
    commutator_residual: Option<f64>,
    triangularity_residual: Option<f64>,
    reason: Option<&'a str>,
}

#[derive(Serialize)]
struct CacheRow<'a> {
    digest: &'a str,
    family: &'a str,
    geometry: &'a str,
    n: usize,
    m: usize,
    root_sets: usize,
}

fn write_rows<T: Serialize>(rows: impl IntoIterator<Item = T>) -> csv::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(w.into_inner().expect("flushed"))
}

pub fn document_bytes(doc: &Document, format: Format) -> csv::Result<Vec<u8>> {
    match format {
        Format::Json => Ok(pretty(doc)),
        Format::Csv => match doc {
            Document::Verify(r) | Document::SolveBethe(r) => write_rows(campaign_rows(r)),
            Document::ExactDiag(r) => write_rows(r.cases.iter().map(|c| ExactRow {
                index: c.index,
                root_system: c.spec.as_ref().map(|s| s.root_system.as_str()),
                superalgebra: c.spec.as_ref().and_then(|s| s.superalgebra.as_deref()),
                n: c.spec.as_ref().map(|s| s.n),
                status: c.status,
                tuples: c.spectrum.as_ref().map(|s| s.tuples.len()),
                commutator_residual: c.spectrum.as_ref().map(|s| s.commutator_residual),
                triangularity_residual: c.spectrum.as_ref().map(|s| s.triangularity_residual),
                reason: c.reason.as_deref(),
            })),
            Document::CheckIdentities(r) => write_rows(&r.checks),
        },
    }
}

pub fn cache_bytes(cache: &RootCache, format: Format) -> csv::Result<Vec<u8>> {
    match format {
        Format::Json => Ok(pretty(cache)),
        Format::Csv => write_rows(cache.entries.iter().map(|(digest, e)| CacheRow {
            digest,
            family: &e.key.family,
            geometry: &e.key.geometry,
            n: e.key.n,
            m: e.key.m,
            root_sets: e.roots.len(),
        })),
    }
}

fn pretty<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("plain data serializes");
    out.push(b'\n');
    out
}

/// To `path`, or stdout when absent.
pub fn emit(bytes: &[u8], path: Option<&Path>) -> std::io::Result<()> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(p, bytes)
        }
        None => std::io::stdout().lock().write_all(bytes),
    }
}
