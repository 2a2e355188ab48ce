//! The `run` / `analyze` / `check` commands behind the CLI, plus the run
//! manifest (config echo, seeds, wall time, file inventory with checksums).
//!
//! Exit codes: 0 success, 2 config error, 3 suite failure, 4 blow-up trip.
//! The output directory can be overridden with the `EMTOR_OUTPUT_DIR`
//! environment variable (CLI flag takes precedence).

use crate::config::RunConfig;
use crate::diagnostics::{self, decay_report, energy_report, CheckOutcome};
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::record::{self, RunRecord, RunStatus};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use std::time::Instant;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_SUITE: i32 = 3;
pub const EXIT_BLOWUP: i32 = 4;

pub const OUTPUT_DIR_ENV: &str = "EMTOR_OUTPUT_DIR";

pub const SUITE_NAMES: [&str; 8] = [
    "partition",
    "bernstein",
    "embed",
    "product",
    "composition",
    "commutator",
    "poincare",
    "convergence",
];

#[derive(Debug, Serialize, Deserialize)]
pub struct FileEntry {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub status: RunStatus,
    pub seeds: Vec<u64>,
    pub wall_time_s: f64,
    pub config: String,
    pub files: Vec<FileEntry>,
}

fn sha256_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path)?;
    let mut h = Sha256::new();
    h.update(&bytes);
    Ok(hex_string(&h.finalize()))
}

fn hex_string(bytes: &[u8]) -> String {
    let mut s = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        s.push_str(&format!("{b:02x}"));
    }
    s
}

/// Checksum every regular file in `dir` (except the manifest itself),
/// sorted by name.
pub fn inventory(dir: &Path) -> Result<Vec<FileEntry>> {
    let mut names: Vec<String> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .filter(|e| e.file_type().map(|t| t.is_file()).unwrap_or(false))
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| n != "manifest.json")
        .collect();
    names.sort();
    names
        .into_iter()
        .map(|n| {
            Ok(FileEntry {
                sha256: sha256_file(&dir.join(&n))?,
                path: n,
            })
        })
        .collect()
}

pub fn write_manifest(
    dir: &Path,
    status: &RunStatus,
    seeds: Vec<u64>,
    wall_time_s: f64,
    config_echo: String,
) -> Result<Manifest> {
    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        status: status.clone(),
        seeds,
        wall_time_s,
        config: config_echo,
        files: inventory(dir)?,
    };
    std::fs::write(
        dir.join("manifest.json"),
        serde_json::to_string_pretty(&manifest).expect("manifest serializes"),
    )?;
    Ok(manifest)
}

pub fn load_manifest(dir: &Path) -> Result<Manifest> {
    let text = std::fs::read_to_string(dir.join("manifest.json"))?;
    serde_json::from_str(&text).map_err(|e| Error::Format(e.to_string()))
}

/// Resolve the run directory: CLI override, then `EMTOR_OUTPUT_DIR`, then
/// the config's `output.dir`.
pub fn resolve_output_dir(cfg: &RunConfig, cli_override: Option<&Path>) -> PathBuf {
    if let Some(p) = cli_override {
        return p.to_path_buf();
    }
    if let Ok(p) = std::env::var(OUTPUT_DIR_ENV) {
        if !p.is_empty() {
            return PathBuf::from(p);
        }
    }
    PathBuf::from(&cfg.output.dir)
}

fn write_reports(
    dir: &Path,
    record: &RunRecord,
    mu0: f64,
    eps: f64,
    windows: &[f64],
) -> Result<()> {
    if record.snapshots.len() < 2 {
        log::warn!("fewer than 2 snapshots; skipping analysis reports");
        return Ok(());
    }
    let mut reports = Vec::new();
    if windows.is_empty() {
        reports.push(energy_report(record, mu0, None)?);
    } else {
        for t in windows {
            reports.push(energy_report(record, mu0, Some(*t))?);
        }
    }
    std::fs::write(
        dir.join("energy_report.json"),
        serde_json::to_string_pretty(&reports).expect("report serializes"),
    )?;
    let decay = decay_report(record, eps)?;
    std::fs::write(
        dir.join("decay_report.json"),
        serde_json::to_string_pretty(&decay).expect("report serializes"),
    )?;
    Ok(())
}

/// Execute a config file end to end: run, write outputs, analyze with the
/// default `μ₀ = 0.1`, `ε = 0.5`, write the manifest. Returns the run
/// directory, the record and the suggested process exit code (0 or 4).
pub fn cmd_run(
    config_path: &Path,
    output_override: Option<&Path>,
) -> Result<(PathBuf, RunRecord, i32)> {
    let started = Instant::now();
    let cfg = RunConfig::load(config_path)?;
    let dir = resolve_output_dir(&cfg, output_override);
    let record = record::run_simulation(&cfg)?;
    record::write_run_dir(&record, &dir)?;
    write_reports(&dir, &record, 0.1, 0.5, &[])?;
    write_manifest(
        &dir,
        &record.status,
        vec![cfg.init.seed],
        started.elapsed().as_secs_f64(),
        cfg.to_toml(),
    )?;
    let code = if record.tripped() { EXIT_BLOWUP } else { EXIT_OK };
    Ok((dir, record, code))
}

/// Re-analyze an existing run directory with explicit `ε`, `μ₀` and time
/// windows (empty = full horizon), refreshing the reports and manifest.
pub fn cmd_analyze(run_dir: &Path, eps: f64, mu0: f64, windows: &[f64]) -> Result<()> {
    if !run_dir.join("run_meta.json").exists() {
        return Err(Error::Config(format!(
            "{} is not a run directory (missing run_meta.json)",
            run_dir.display()
        )));
    }
    let started = Instant::now();
    let record = record::load_run_dir(run_dir)?;
    write_reports(run_dir, &record, mu0, eps, windows)?;
    write_manifest(
        run_dir,
        &record.status,
        vec![record.config.init.seed],
        started.elapsed().as_secs_f64(),
        record.config.to_toml(),
    )?;
    Ok(())
}

/// Run the named check suites (all of them for an empty list). Returns the
/// outcomes; any failure maps to exit code 3.
pub fn cmd_check(suites: &[String], grid_n: usize, trials: usize) -> Result<Vec<CheckOutcome>> {
    let names: Vec<String> = if suites.is_empty() {
        SUITE_NAMES.iter().map(|s| s.to_string()).collect()
    } else {
        suites.to_vec()
    };
    let grid = GridSpec::new(2, grid_n)?;
    let mut outcomes = Vec::new();
    for name in &names {
        match name.as_str() {
            "partition" => outcomes.push(diagnostics::check_partition(50, 1000)?),
            "bernstein" => {
                outcomes.push(diagnostics::check_bernstein_p2(grid, 50, 2000)?);
                outcomes.push(diagnostics::check_bernstein_linf(grid, trials, trials, 2500)?);
            }
            "embed" => outcomes.push(diagnostics::check_embedding(grid, trials, trials, 3000)?),
            "product" => {
                outcomes.push(diagnostics::check_product_estimate(grid, trials, trials, 4000)?)
            }
            "composition" => {
                outcomes.push(diagnostics::check_composition_value(
                    grid, 2.0, trials, trials, 5000,
                )?);
                outcomes.push(diagnostics::check_composition_difference(
                    grid, 2.0, trials, trials, 5200,
                )?);
                outcomes.push(diagnostics::check_splitting_identity(
                    grid, trials, trials, 7500,
                )?);
            }
            "commutator" => outcomes.push(diagnostics::check_commutator_estimate(
                grid, trials, trials, 6000,
            )?),
            "poincare" => outcomes.push(diagnostics::check_poincare(grid, trials.max(100), 7000)?),
            "convergence" => outcomes.push(diagnostics::check_convergence(8000)?),
            other => {
                return Err(Error::Config(format!(
                    "unknown suite {other:?}; available: {SUITE_NAMES:?}"
                )))
            }
        }
    }
    Ok(outcomes)
}

/// One `name: PASS/FAIL` line per outcome.
pub fn verdict_table(outcomes: &[CheckOutcome]) -> String {
    let mut out = String::new();
    for o in outcomes {
        out.push_str(&format!(
            "{:<24} {}  (C = {:.6}, bound = {:.6}, worst fresh = {:.6}{})\n",
            o.name,
            if o.passed { "PASS" } else { "FAIL" },
            o.c_hat,
            o.bound,
            o.worst_fresh,
            match o.failing_seed {
                Some(s) => format!(", failing seed = {s}"),
                None => String::new(),
            }
        ));
    }
    out
}
