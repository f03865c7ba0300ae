//! Emitted artefacts: cut CSVs, the JSON report, the manifest and error
//! records. Everything is written in a fixed order with no timestamps, so
//! identical inputs give identical bytes.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use modebeam::beamform::SteeringSolution;
use modebeam::geometry::PortId;
use modebeam::metrics::{EccEntry, MetricsReport, PatternCut};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;
use crate::runner::{ecc_table, evaluate_target, ResonanceSummary, RunOptions, Setup, TargetResult};
use crate::scenario::{Scenario, Target};

pub const CSV_HEADER: &str = "angle_deg,power_db,e_theta_re,e_theta_im,e_phi_re,e_phi_im";
pub const REPORT_FILE: &str = "report.json";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const ERROR_FILE: &str = "error.json";
pub const CUT_DIR: &str = "cuts";

/// Renders a cut that was sampled with its fields kept.
pub fn cut_csv(cut: &PatternCut<f64>) -> Result<String, CliError> {
    let fields = cut.fields.as_ref().ok_or_else(|| CliError::Numeric("cut carries no field samples".into()))?;
    let mut out = String::with_capacity(64 * cut.angles.len());
    out.push_str(CSV_HEADER);
    out.push('\n');
    for ((a, p), e) in cut.angles.iter().zip(&cut.power).zip(fields) {
        let cols = [*a, *p, e.e_theta.re, e.e_theta.im, e.e_phi.re, e.e_phi.im];
        let row: Vec<String> = cols.iter().map(|&v| fmt_num(v)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    Ok(out)
}

/// Shortest round-trip form, switching to exponent notation for very small
/// or large magnitudes.
pub fn fmt_num(v: f64) -> String {
    let m = v.abs();
    if v == 0.0 {
        "0".into()
    } else if (1e-4..1e9).contains(&m) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PortWeight {
    pub port: PortId,
    pub re: f64,
    pub im: f64,
    pub amplitude: f64,
    pub phase_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionRecord {
    pub excitation: Vec<PortWeight>,
    pub achieved_peak_deg: f64,
    pub peak_gain_rel_db: f64,
    pub within_tolerance: bool,
    pub candidates: usize,
}

impl From<&SteeringSolution<f64>> for SolutionRecord {
    fn from(s: &SteeringSolution<f64>) -> Self {
        Self {
            excitation: s
                .excitation
                .weights
                .iter()
                .map(|(p, w)| PortWeight { port: *p, re: w.re, im: w.im, amplitude: w.norm(), phase_deg: w.arg().to_degrees() })
                .collect(),
            achieved_peak_deg: s.achieved_peak,
            peak_gain_rel_db: s.peak_gain_rel,
            within_tolerance: s.trace.within_tolerance,
            candidates: s.trace.candidates,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetRecord {
    pub target: Target,
    pub cut_file: String,
    pub solution: SolutionRecord,
    pub metrics: MetricsReport<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub scenario: Scenario,
    pub resonance: ResonanceSummary,
    pub ecc: Vec<EccEntry<f64>>,
    pub targets: Vec<TargetRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub scenario: Scenario,
    pub options: RunOptions,
    pub status: String,
    pub files: Vec<ManifestEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub kind: String,
    pub exit_code: i32,
    pub message: String,
}

/// Writes files under one output directory and remembers each of them.
pub struct OutputDir {
    root: PathBuf,
    entries: Vec<ManifestEntry>,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(root).map_err(|e| CliError::Io(format!("{}: {e}", root.display())))?;
        Ok(Self { root: root.to_path_buf(), entries: Vec::new() })
    }

    /// Writes `bytes` at `rel` (forward-slash separated) below the root.
    pub fn write(&mut self, rel: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        self.entries.push(ManifestEntry {
            path: rel.to_string(),
            bytes: bytes.len() as u64,
            sha256: hex_digest(bytes),
        });
        Ok(path)
    }

    pub fn write_json<S: Serialize>(&mut self, rel: &str, value: &S) -> Result<PathBuf, CliError> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Numeric(format!("serialising {rel}: {e}")))?;
        text.push('\n');
        self.write(rel, text.as_bytes())
    }

    /// Writes the manifest listing every file written so far.
    pub fn finish(mut self, scenario: &Scenario, options: &RunOptions, status: &str) -> Result<Vec<PathBuf>, CliError> {
        let manifest = Manifest {
            tool: "modebeam".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            scenario: scenario.clone(),
            options: *options,
            status: status.into(),
            files: self.entries.clone(),
        };
        let mut paths: Vec<PathBuf> = self.entries.iter().map(|e| self.root.join(&e.path)).collect();
        let text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Numeric(e.to_string()))? + "\n";
        let path = self.root.join(MANIFEST_FILE);
        fs::write(&path, text)?;
        self.entries.clear();
        paths.push(path);
        Ok(paths)
    }
}

fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

pub fn cut_file_name(index: usize, target: &Target) -> String {
    format!("{CUT_DIR}/{index:02}_{}.csv", target.label())
}

/// Runs every target and writes cuts, report and manifest below `root`.
/// A failure still leaves an error record and a manifest behind.
pub fn run_scenario(s: &Scenario, root: &Path, opts: &RunOptions) -> Result<Vec<PathBuf>, CliError> {
    let mut out = OutputDir::create(root)?;
    match emit(s, &mut out, opts) {
        Ok(()) => out.finish(s, opts, "ok"),
        Err(e) => {
            let record = ErrorRecord { kind: e.kind().into(), exit_code: e.exit_code(), message: e.to_string() };
            out.write_json(ERROR_FILE, &record)?;
            out.finish(s, opts, "error")?;
            Err(e)
        }
    }
}

/// Resolved setup, port ECC table and per-target results of one scenario.
pub type Computed = (Setup, Vec<EccEntry<f64>>, Vec<TargetResult>);

/// Solves and evaluates every target of `s` without writing anything.
pub fn compute(s: &Scenario, opts: &RunOptions) -> Result<Computed, CliError> {
    let setup = Setup::new(s)?;
    let grid = opts.grid.build()?;
    let ecc = ecc_table(&setup, &grid)?;
    let results = s
        .steering
        .iter()
        .map(|t| evaluate_target(s, &setup, t, &grid, &ecc, opts))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((setup, ecc, results))
}

fn emit(s: &Scenario, out: &mut OutputDir, opts: &RunOptions) -> Result<(), CliError> {
    let (setup, ecc, results) = compute(s, opts)?;
    let mut targets = Vec::with_capacity(results.len());
    for (i, r) in results.iter().enumerate() {
        let name = cut_file_name(i, &r.target);
        out.write(&name, cut_csv(&r.cut)?.as_bytes())?;
        targets.push(TargetRecord {
            target: r.target,
            cut_file: name,
            solution: SolutionRecord::from(&r.solution),
            metrics: r.metrics.clone(),
        });
    }
    let report = Report { scenario: s.clone(), resonance: setup.resonance, ecc, targets };
    out.write_json(REPORT_FILE, &report)?;
    Ok(())
}
