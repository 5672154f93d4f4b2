//! The `verify` and `spectrum` pipelines: one report per coupling draw and
//! particle number (or listed sector), plus a flat table and a manifest.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use sunchain_core::spectra::{
    analyze_sector, level_ordering_report, permuted_sector_consistency, ChainEcho,
    PermutationCheck, SectorSummary, SpectraError, SpectrumReport, Verdict,
};
use sunchain_core::ChainConfig;
use thiserror::Error;

use crate::config::{ConfigError, ExperimentConfig, OutputFormat, Workload};

pub const REPORT_SCHEMA: &str = "sunchain-report/1";
pub const MANIFEST_SCHEMA: &str = "sunchain-manifest/1";

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl RunError {
    /// 2 for anything the user can fix in the config, 3 for solver trouble.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Spectra(SpectraError::Solver { .. }) => 3,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Verify,
    Spectrum,
}

/// Checks on one explicitly listed sector.
#[derive(Debug, Clone, Serialize)]
pub struct SectorCheck {
    pub summary: SectorSummary,
    pub permutation: PermutationCheck,
}

#[derive(Debug, Clone, Serialize)]
pub struct DrawReport {
    pub index: usize,
    pub chain: ChainEcho,
    pub spectra: Vec<SpectrumReport>,
    pub sectors: Vec<SectorCheck>,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct CheckCount {
    pub passed: usize,
    pub failed: usize,
    pub indeterminate: usize,
}

impl CheckCount {
    fn add(&mut self, v: Verdict) {
        match v {
            Verdict::Pass => self.passed += 1,
            Verdict::Fail => self.failed += 1,
            Verdict::Indeterminate => self.indeterminate += 1,
        }
    }
}

pub type Tally = BTreeMap<&'static str, CheckCount>;

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema: &'static str,
    pub command: Command,
    pub sites: usize,
    pub flavors: usize,
    pub seed: Option<u64>,
    pub draws: Vec<DrawReport>,
    pub checks: Tally,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub schema: &'static str,
    pub version: &'static str,
    pub command: Command,
    pub config: ExperimentConfig,
    pub seed: Option<u64>,
    pub draws: usize,
    pub checks: Tally,
    pub passed: bool,
    /// Only recorded on request, since it breaks byte-for-byte comparison.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_seconds: Option<f64>,
}

pub struct RunOutput {
    pub report: RunReport,
    pub manifest: Manifest,
}

fn tally_summary(t: &mut Tally, s: &SectorSummary) {
    let b = Verdict::from_bool;
    t.entry("symmetry").or_default().add(b(s.symmetric));
    t.entry("nonpositivity").or_default().add(b(s.nonpositive));
    t.entry("connectivity").or_default().add(b(s.connected));
    t.entry("positivity").or_default().add(s.positivity.verdict);
    t.entry("uniqueness").or_default().add(s.uniqueness.verdict);
    if let Some(m) = &s.multiplet {
        t.entry("highest_weight").or_default().add(m.verdict);
    }
}

fn tally_report(t: &mut Tally, r: &SpectrumReport) {
    for s in &r.sectors {
        tally_summary(t, s);
    }
    for entry in r.diagrams.values() {
        if let Some(v) = entry.permutation {
            t.entry("permutation").or_default().add(v);
        }
    }
    let ordering = t.entry("ordering").or_default();
    ordering.passed += r.comparable_pairs - r.violations.len();
    ordering.failed += r.violations.len();
    t.entry("ground_diagram").or_default().add(r.ground.diagram_verdict);
    t.entry("ground_multiplicity").or_default().add(r.ground.multiplicity_verdict);
    if let Some(f) = &r.free_fermion {
        t.entry("free_fermion").or_default().add(f.verdict);
    }
}

fn run_draw(
    index: usize,
    chain: &ChainConfig,
    work: &Workload,
    cfg: &ExperimentConfig,
) -> Result<DrawReport, SpectraError> {
    let options = cfg.analysis_options();
    let mut failures = Vec::new();
    let mut spectra = Vec::new();
    let mut sectors = Vec::new();
    match work {
        Workload::Totals(totals) => {
            for &m in totals {
                let r = level_ordering_report(chain, m, &options)?;
                failures.extend(r.failures().into_iter().map(|f| format!("M={m}: {f}")));
                spectra.push(r);
            }
        }
        Workload::Sectors(list) => {
            for s in list {
                let summary = analyze_sector(chain, s, 2, &options)?.summary;
                let permutation = permuted_sector_consistency(chain, s, &options)?;
                failures.extend(summary.failures());
                if !permutation.verdict.is_pass() {
                    failures.push(format!(
                        "sector {s}: rearranged sectors disagree (spread {:e})",
                        permutation.spread
                    ));
                }
                sectors.push(SectorCheck {
                    summary,
                    permutation,
                });
            }
        }
    }
    Ok(DrawReport {
        index,
        chain: ChainEcho::of(chain),
        spectra,
        sectors,
        failures,
    })
}

/// Runs every draw. Results do not depend on the worker count.
pub fn execute(cfg: &ExperimentConfig, command: Command, timing: bool) -> Result<RunOutput, RunError> {
    let start = Instant::now();
    let work = cfg.workload()?;
    let chains = cfg.chains()?;
    let draws: Vec<DrawReport> = chains
        .par_iter()
        .enumerate()
        .map(|(i, c)| run_draw(i, c, &work, cfg))
        .collect::<Result<_, _>>()?;

    let mut checks = Tally::new();
    for d in &draws {
        for r in &d.spectra {
            tally_report(&mut checks, r);
        }
        for s in &d.sectors {
            tally_summary(&mut checks, &s.summary);
            checks.entry("permutation").or_default().add(s.permutation.verdict);
        }
    }
    let passed = draws.iter().all(|d| d.failures.is_empty());
    let seed = cfg.seed();
    let report = RunReport {
        schema: REPORT_SCHEMA,
        command,
        sites: cfg.chain.sites,
        flavors: cfg.chain.flavors,
        seed,
        draws,
        checks: checks.clone(),
        passed,
    };
    let manifest = Manifest {
        schema: MANIFEST_SCHEMA,
        version: env!("CARGO_PKG_VERSION"),
        command,
        config: cfg.clone(),
        seed,
        draws: report.draws.len(),
        checks,
        passed,
        wall_time_seconds: timing.then(|| start.elapsed().as_secs_f64()),
    };
    Ok(RunOutput { report, manifest })
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct DiagramRow<'a> {
    draw: usize,
    particles: usize,
    diagram: String,
    feasible: bool,
    energy: Option<f64>,
    sector: Option<String>,
    gap: Option<f64>,
    free_energy: Option<f64>,
    positivity: Option<&'a str>,
    uniqueness: Option<&'a str>,
    highest_weight: Option<&'a str>,
    permutation: Option<&'a str>,
}

#[derive(Serialize)]
struct SectorRow<'a> {
    draw: usize,
    sector: String,
    dimension: usize,
    energy: f64,
    gap: Option<f64>,
    positivity: Option<&'a str>,
    uniqueness: Option<&'a str>,
    highest_weight: Option<&'a str>,
    permutation: Option<&'a str>,
}

fn verdict_str(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "pass",
        Verdict::Fail => "fail",
        Verdict::Indeterminate => "indeterminate",
    }
}

/// One row per draw and diagram (or per draw and sector). `spectrum` tables
/// leave the verdict columns empty.
pub fn to_csv(report: &RunReport) -> String {
    let with_verdicts = report.command == Command::Verify;
    let v = |x: Option<Verdict>| if with_verdicts { x.map(verdict_str) } else { None };
    let mut w = csv::Writer::from_writer(Vec::new());
    for d in &report.draws {
        for r in &d.spectra {
            for (diagram, e) in &r.diagrams {
                w.serialize(DiagramRow {
                    draw: d.index,
                    particles: r.particles,
                    diagram: diagram.to_string(),
                    feasible: e.feasible,
                    energy: e.energy,
                    sector: e.sector.as_ref().map(ToString::to_string),
                    gap: e.gap,
                    free_energy: e.free_energy,
                    positivity: v(e.positivity),
                    uniqueness: v(e.uniqueness),
                    highest_weight: v(e.highest_weight),
                    permutation: v(e.permutation),
                })
                .expect("in-memory csv");
            }
        }
        for s in &d.sectors {
            let m = &s.summary;
            w.serialize(SectorRow {
                draw: d.index,
                sector: m.sector.to_string(),
                dimension: m.dimension,
                energy: m.energies[0],
                gap: m.uniqueness.gap,
                positivity: v(Some(m.positivity.verdict)),
                uniqueness: v(Some(m.uniqueness.verdict)),
                highest_weight: v(m.multiplet.map(|x| x.verdict)),
                permutation: v(Some(s.permutation.verdict)),
            })
            .expect("in-memory csv");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8 csv")
}

fn write(path: PathBuf, text: &str) -> Result<PathBuf, RunError> {
    fs::write(&path, text).map_err(|source| RunError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

/// Writes `report.json`, `table.csv` and `manifest.json` as selected.
pub fn write_outputs(out: &RunOutput, dir: &Path, format: OutputFormat) -> Result<Vec<PathBuf>, RunError> {
    fs::create_dir_all(dir).map_err(|source| RunError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut written = Vec::new();
    if format.json() {
        written.push(write(dir.join("report.json"), &to_json(&out.report))?);
    }
    if format.csv() {
        written.push(write(dir.join("table.csv"), &to_csv(&out.report))?);
    }
    written.push(write(dir.join("manifest.json"), &to_json(&out.manifest))?);
    Ok(written)
}
