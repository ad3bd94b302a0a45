//! Per-case pipelines and the campaign driver.

use std::time::Instant;

use gaudin_cm::bethe::{
    seed_strategy, solve_bethe, ATypeSystem, BetheRoots, BetheSystem, BoundarySystem, SolveOptions, DEDUP_TOL,
};
use gaudin_cm::calogero::RootKind;
use gaudin_cm::chain::{exact_spectrum, nearest_tuple_distance, ExactSpectrum};
use gaudin_cm::duality::{
    verify_a_collapse, verify_collapse, ATypeCase, ATypeReport, CollapseGates, CollapseReport, CorrespondenceCase,
};
use gaudin_cm::linalg::{multiset_distance, C64};
use gaudin_cm::registry::{all_checks, check, run_check, CheckOutcome};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cache::{CacheKey, RootCache};
use crate::config::{CampaignConfig, CaseConfig, Sector, Seeds, Tolerances, SCHEMA_VERSION};

/// Largest `N` for which the exact-diagonalization oracle runs inside `verify`.
pub const ORACLE_MAX_N: usize = 3;
/// Relative tuple distance below which a Bethe tuple matches the oracle.
pub const ORACLE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseStatus {
    #[serde(rename = "pass")]
    Pass,
    #[serde(rename = "fail")]
    Fail,
    #[serde(rename = "no admissible roots")]
    NoAdmissibleRoots,
    #[serde(rename = "rejected")]
    Rejected,
}

/// The materialized model, echoed back.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecEcho {
    pub root_system: String,
    pub superalgebra: Option<String>,
    pub geometry: String,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub z: Vec<C64>,
    pub xi: Option<C64>,
    pub hbar: C64,
    pub omega: Option<C64>,
}

impl SpecEcho {
    fn of(sector: &Sector) -> Self {
        match sector {
            Sector::Boundary { kind, spec } => Self {
                root_system: kind.to_string(),
                superalgebra: Some(spec.tag.to_string()),
                geometry: spec.geometry.to_string(),
                n: spec.n(),
                m: spec.excitations,
                z: spec.z.clone(),
                xi: Some(spec.xi),
                hbar: spec.hbar,
                omega: None,
            },
            Sector::Periodic { z, omega, hbar, m } => Self {
                root_system: "A".into(),
                superalgebra: None,
                geometry: "N".into(),
                n: z.len(),
                m: *m,
                z: z.clone(),
                xi: None,
                hbar: *hbar,
                omega: Some(*omega),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootSetReport {
    pub mu: Vec<C64>,
    pub residual: f64,
    pub eigenvalues: Vec<C64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub collapse: Option<CollapseReport>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub periodic: Option<ATypeReport>,
    /// Relative distance to the nearest exact eigenvalue tuple.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub oracle_distance: Option<f64>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseReport {
    pub index: usize,
    pub input: CaseConfig,
    pub spec: Option<SpecEcho>,
    pub status: CaseStatus,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reason: Option<String>,
    pub roots_found: usize,
    pub root_sets: Vec<RootSetReport>,
    /// `matched`, `mismatch`, `skipped` or an error message.
    pub oracle: String,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub cases: usize,
    pub passed: usize,
    pub failed: usize,
    pub no_admissible_roots: usize,
    pub rejected: usize,
}

impl Summary {
    pub fn ok(&self) -> bool {
        self.failed == 0 && self.rejected == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub schema_version: u32,
    pub tolerances: Tolerances,
    pub seeds: Seeds,
    pub cases: Vec<CaseReport>,
    pub summary: Summary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Roots, collapse, identities and oracle.
    Verify,
    /// Roots only.
    Solve,
}

enum System {
    Boundary(RootKind, BoundarySystem),
    Periodic(ATypeSystem),
}

impl System {
    fn build(sector: &Sector) -> gaudin_cm::Result<Self> {
        Ok(match sector {
            Sector::Boundary { kind, spec } => Self::Boundary(*kind, BoundarySystem::new(spec.clone())?),
            Sector::Periodic { z, omega, hbar, m } => Self::Periodic(ATypeSystem::new(z.clone(), *omega, *hbar, *m)?),
        })
    }

    fn dyn_system(&self) -> &dyn BetheSystem {
        match self {
            Self::Boundary(_, s) => s,
            Self::Periodic(s) => s,
        }
    }
}

fn lexicographic(a: &BetheRoots, b: &BetheRoots) -> std::cmp::Ordering {
    a.mu.iter()
        .zip(&b.mu)
        .map(|(x, y)| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

/// Union over the configured seed strategies.
fn solve(system: &dyn BetheSystem, seeds: &Seeds, gate: f64) -> Vec<BetheRoots> {
    let opts = SolveOptions {
        seeds: seeds.newton_count,
        rng_seed: seeds.rng,
        gate,
        ..SolveOptions::default()
    };
    let mut found: Vec<BetheRoots> = Vec::new();
    for name in &seeds.strategies {
        let strategy = seed_strategy(name).expect("validated strategy name");
        for r in solve_bethe(system, strategy.as_ref(), &opts) {
            if !found
                .iter()
                .any(|f| multiset_distance(&f.mu, &r.mu).is_some_and(|d| d < DEDUP_TOL))
            {
                found.push(r);
            }
        }
    }
    found.sort_by(lexicographic);
    found
}

struct CaseOutcome {
    report: CaseReport,
    solved: Option<(CacheKey, Vec<BetheRoots>)>,
}

fn rejected(index: usize, input: &CaseConfig, spec: Option<SpecEcho>, reason: String, start: Instant) -> CaseOutcome {
    CaseOutcome {
        report: CaseReport {
            index,
            input: input.clone(),
            spec,
            status: CaseStatus::Rejected,
            reason: Some(reason),
            roots_found: 0,
            root_sets: Vec::new(),
            oracle: "skipped".into(),
            wall_time_s: start.elapsed().as_secs_f64(),
        },
        solved: None,
    }
}

fn relative_distance(tuple: &[C64], exact: &ExactSpectrum) -> f64 {
    let scale = tuple.iter().fold(1.0_f64, |a, x| a.max(x.norm()));
    nearest_tuple_distance(tuple, exact) / scale
}

fn examine(system: &System, sector: &Sector, roots: &BetheRoots, tol: &Tolerances) -> RootSetReport {
    let mut out = RootSetReport {
        mu: roots.mu.clone(),
        residual: roots.residual,
        eigenvalues: Vec::new(),
        collapse: None,
        periodic: None,
        oracle_distance: None,
        passed: false,
        error: None,
    };
    match system.dyn_system().eigenvalues(&roots.mu) {
        Ok(e) => out.eigenvalues = e,
        Err(e) => {
            out.error = Some(e.to_string());
            return out;
        }
    }
    let verdict = match (system, sector) {
        (System::Boundary(kind, _), Sector::Boundary { spec, .. }) => {
            let gates = CollapseGates {
                eigenvalue: tol.collapse,
                identity: tol.identity,
                ..CollapseGates::default()
            };
            CorrespondenceCase::new(*kind, spec.clone(), roots.clone())
                .and_then(|case| verify_collapse(&case, &gates))
                .map(|r| {
                    let ok = r.passed();
                    out.collapse = Some(r);
                    ok
                })
        }
        (System::Periodic(_), Sector::Periodic { z, omega, hbar, .. }) => {
            let case = ATypeCase {
                z: z.clone(),
                omega: *omega,
                hbar: *hbar,
                roots: roots.clone(),
            };
            verify_a_collapse(&case, tol.collapse).map(|r| {
                let ok = r.passed;
                out.periodic = Some(r);
                ok
            })
        }
        _ => unreachable!("system built from its sector"),
    };
    match verdict {
        Ok(ok) => out.passed = ok,
        Err(e) => out.error = Some(e.to_string()),
    }
    out
}

fn run_case(index: usize, input: &CaseConfig, cfg: &CampaignConfig, cache: Option<&RootCache>, mode: Mode) -> CaseOutcome {
    let start = Instant::now();
    let sector = match input.materialize() {
        Ok(s) => s,
        Err(reason) => return rejected(index, input, None, reason, start),
    };
    let echo = SpecEcho::of(&sector);
    let system = match System::build(&sector) {
        Ok(s) => s,
        Err(e) => return rejected(index, input, Some(echo), e.to_string(), start),
    };
    let tol = &cfg.tolerances;
    let key = CacheKey::of(&sector);
    let cached = cache.and_then(|c| c.lookup(&key, system.dyn_system(), tol.bethe));
    let (roots, solved) = match cached {
        Some(r) => (r, None),
        None => {
            let r = solve(system.dyn_system(), &cfg.seeds, tol.bethe);
            (r.clone(), Some((key, r)))
        }
    };

    let mut status = if roots.is_empty() {
        CaseStatus::NoAdmissibleRoots
    } else {
        CaseStatus::Pass
    };
    let mut root_sets: Vec<RootSetReport> = match mode {
        Mode::Solve => roots
            .iter()
            .map(|r| RootSetReport {
                mu: r.mu.clone(),
                residual: r.residual,
                eigenvalues: system.dyn_system().eigenvalues(&r.mu).unwrap_or_default(),
                collapse: None,
                periodic: None,
                oracle_distance: None,
                passed: true,
                error: None,
            })
            .collect(),
        Mode::Verify => roots.iter().map(|r| examine(&system, &sector, r, tol)).collect(),
    };
    let mut oracle = "skipped".to_string();
    if mode == Mode::Verify {
        if root_sets.iter().any(|r| !r.passed) {
            status = CaseStatus::Fail;
        }
        if let Sector::Boundary { spec, .. } = &sector {
            if spec.n() <= ORACLE_MAX_N && !roots.is_empty() {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seeds.rng);
                match exact_spectrum(spec, &mut rng) {
                    Ok(exact) => {
                        let mut matched = true;
                        for r in &mut root_sets {
                            let d = relative_distance(&r.eigenvalues, &exact);
                            r.oracle_distance = Some(d);
                            if !(d < ORACLE_TOL) {
                                r.passed = false;
                                matched = false;
                            }
                        }
                        oracle = if matched { "matched" } else { "mismatch" }.into();
                        if !matched {
                            status = CaseStatus::Fail;
                        }
                    }
                    Err(e) => {
                        oracle = format!("error: {e}");
                        status = CaseStatus::Fail;
                    }
                }
            }
        }
    }
    CaseOutcome {
        report: CaseReport {
            index,
            input: input.clone(),
            spec: Some(echo),
            status,
            reason: (status == CaseStatus::NoAdmissibleRoots).then(|| "no admissible roots".to_string()),
            roots_found: roots.len(),
            root_sets,
            oracle,
            wall_time_s: start.elapsed().as_secs_f64(),
        },
        solved,
    }
}

pub fn summarize<'a>(statuses: impl Iterator<Item = &'a CaseStatus>) -> Summary {
    let mut s = Summary::default();
    for st in statuses {
        s.cases += 1;
        match st {
            CaseStatus::Pass => s.passed += 1,
            CaseStatus::Fail => s.failed += 1,
            CaseStatus::NoAdmissibleRoots => s.no_admissible_roots += 1,
            CaseStatus::Rejected => s.rejected += 1,
        }
    }
    s
}

/// Runs every case in parallel on the current rayon pool. Freshly solved
/// sectors are added to `cache`.
pub fn run_campaign(cfg: &CampaignConfig, cache: Option<&mut RootCache>, mode: Mode) -> CampaignReport {
    let outcomes: Vec<CaseOutcome> = {
        let shared = cache.as_deref();
        cfg.cases
            .par_iter()
            .enumerate()
            .map(|(i, case)| run_case(i, case, cfg, shared, mode))
            .collect()
    };
    if let Some(cache) = cache {
        for o in &outcomes {
            if let Some((key, roots)) = &o.solved {
                cache.insert(key.clone(), roots.clone());
            }
        }
    }
    let cases: Vec<CaseReport> = outcomes.into_iter().map(|o| o.report).collect();
    CampaignReport {
        schema_version: SCHEMA_VERSION,
        tolerances: cfg.tolerances,
        seeds: cfg.seeds.clone(),
        summary: summarize(cases.iter().map(|c| &c.status)),
        cases,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExactCase {
    pub index: usize,
    pub spec: Option<SpecEcho>,
    pub status: CaseStatus,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub spectrum: Option<ExactSpectrum>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExactReport {
    pub schema_version: u32,
    pub cases: Vec<ExactCase>,
    pub summary: Summary,
}

fn exact_case(index: usize, input: &CaseConfig, seed: u64) -> ExactCase {
    let fail = |spec, status, reason: String| ExactCase {
        index,
        spec,
        status,
        reason: Some(reason),
        spectrum: None,
    };
    let sector = match input.materialize() {
        Ok(s) => s,
        Err(reason) => return fail(None, CaseStatus::Rejected, reason),
    };
    let echo = SpecEcho::of(&sector);
    let Sector::Boundary { spec, .. } = &sector else {
        return fail(Some(echo), CaseStatus::Rejected, "no spin chain for A-type cases".into());
    };
    match exact_spectrum(spec, &mut ChaCha8Rng::seed_from_u64(seed)) {
        Ok(s) => ExactCase {
            index,
            spec: Some(echo),
            status: CaseStatus::Pass,
            reason: None,
            spectrum: Some(s),
        },
        Err(e) => fail(Some(echo), CaseStatus::Fail, e.to_string()),
    }
}

pub fn run_exact(cfg: &CampaignConfig) -> ExactReport {
    let cases: Vec<ExactCase> = cfg
        .cases
        .par_iter()
        .enumerate()
        .map(|(i, c)| exact_case(i, c, cfg.seeds.rng))
        .collect();
    ExactReport {
        schema_version: SCHEMA_VERSION,
        summary: summarize(cases.iter().map(|c| &c.status)),
        cases,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub schema_version: u32,
    pub seed: u64,
    pub draws: usize,
    pub gate_override: Option<f64>,
    pub checks: Vec<CheckOutcome>,
    pub summary: Summary,
}

/// Runs the named checks (all when `only` is empty). With `tol`, every check
/// is judged against it instead of its own gate.
pub fn run_identities(only: &[String], seed: u64, draws: usize, tol: Option<f64>) -> Result<IdentityReport, String> {
    let selected = if only.is_empty() {
        all_checks()
    } else {
        only.iter()
            .map(|n| check(n).ok_or_else(|| format!("unknown check `{n}`")))
            .collect::<Result<_, _>>()?
    };
    let checks: Vec<CheckOutcome> = selected
        .par_iter()
        .map(|c| {
            let mut o = run_check(c.as_ref(), draws, seed);
            if let Some(t) = tol {
                o.gate = t;
                o.passed = o.error.is_none() && o.residual < t;
            }
            o
        })
        .collect();
    let statuses: Vec<CaseStatus> = checks
        .iter()
        .map(|c| if c.passed { CaseStatus::Pass } else { CaseStatus::Fail })
        .collect();
    Ok(IdentityReport {
        schema_version: SCHEMA_VERSION,
        seed,
        draws,
        gate_override: tol,
        checks,
        summary: summarize(statuses.iter()),
    })
}
