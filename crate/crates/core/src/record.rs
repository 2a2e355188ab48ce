//! Run records: the in-memory result of a simulation (time series +
//! snapshots + monitors) and its on-disk layout.
//!
//! A run directory contains:
//! * `config.toml` — echo of the configuration,
//! * `series.csv` — per-step series: `t_sym, t_phys, gauss_residual, div_b,
//!   blowup_integral`, plus one column per requested diagnostic norm,
//! * `run_meta.json` — status, monitors, norm column names,
//! * `snap_NNNNNN.bin` — state snapshots: six binary field records in the
//!   order `(ϱ+, υ+, ϱ-, υ-, Ẽ, B̃)`,
//! * `snap_NNNNNN.json` — sidecar `{t, t_phys, gamma, b_bar, seed,
//!   amplitude, band}`.

use crate::config::RunConfig;
use crate::dyadic::{besov_norm, BesovSpec, DyadicPartition};
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::integrator::{choose_dt, step, MonitorState, TripReason};
use crate::model::{critical_regularity, make_initial_data, SymState};
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeriesRow {
    pub t_sym: f64,
    pub t_phys: f64,
    pub gauss_residual: f64,
    pub div_b: f64,
    pub blowup_integral: f64,
    pub norms: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub t_sym: f64,
    pub state: SymState,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RunStatus {
    Completed,
    Tripped { reason: TripReason, t_sym: f64 },
}

#[derive(Debug, Clone)]
pub struct RunRecord {
    pub config: RunConfig,
    pub norm_names: Vec<String>,
    pub series: Vec<SeriesRow>,
    pub snapshots: Vec<Snapshot>,
    pub monitor: MonitorState,
    pub status: RunStatus,
}

impl RunRecord {
    pub fn tripped(&self) -> bool {
        matches!(self.status, RunStatus::Tripped { .. })
    }

    /// Final time reached (symmetrized clock).
    pub fn t_final(&self) -> f64 {
        self.series.last().map(|r| r.t_sym).unwrap_or(0.0)
    }
}

fn eval_norm(name: &str, w: &SymState, part: &DyadicPartition) -> Result<f64> {
    let sc = critical_regularity(w.dim());
    match name {
        "w_sc" => besov_norm(&w.concat(), &BesovSpec::inhomogeneous(sc, 2.0, 1.0), part),
        "e_scm1" => besov_norm(&w.e, &BesovSpec::inhomogeneous(sc - 1.0, 2.0, 1.0), part),
        "b_scm2" => besov_norm(&w.b, &BesovSpec::inhomogeneous(sc - 2.0, 2.0, 1.0), part),
        other => Err(Error::Config(format!("unknown norm column {other:?}"))),
    }
}

/// Execute a full run: initial data, RK4 loop under CFL control, monitor
/// updates every step, snapshots at the configured cadence. On a monitor
/// trip or admissibility loss the run stops and the partial record is
/// returned with `RunStatus::Tripped`.
pub fn run_simulation(cfg: &RunConfig) -> Result<RunRecord> {
    cfg.validate()?;
    let grid = cfg.grid_spec();
    let params = cfg.params();
    let part = DyadicPartition::build(&grid);
    let norm_names = cfg.norm_columns();
    let mut w = make_initial_data(
        grid,
        &params,
        cfg.init.amplitude,
        cfg.init.seed,
        (cfg.init.band[0], cfg.init.band[1]),
    )?;
    let sqrt_gamma = params.sqrt_gamma();
    let mut monitor = MonitorState::new();
    let mut series = Vec::new();
    let mut snapshots = Vec::new();
    let mut t = 0.0f64;
    let mut step_index = 0usize;

    let push_row = |w: &SymState,
                        t: f64,
                        h: f64,
                        monitor: &mut MonitorState,
                        series: &mut Vec<SeriesRow>|
     -> Result<()> {
        let sample = monitor.update(w, t, h, cfg.monitors.blowup_threshold)?;
        let norms = norm_names
            .iter()
            .map(|n| eval_norm(n, w, &part))
            .collect::<Result<Vec<f64>>>()?;
        series.push(SeriesRow {
            t_sym: t,
            t_phys: t / sqrt_gamma,
            gauss_residual: sample.gauss,
            div_b: sample.div_b,
            blowup_integral: monitor.blowup_integral,
            norms,
        });
        Ok(())
    };

    push_row(&w, t, 0.0, &mut monitor, &mut series)?;
    snapshots.push(Snapshot {
        t_sym: t,
        state: w.clone(),
    });

    let mut status = RunStatus::Completed;
    while t < cfg.time.t_end - 1e-12 {
        let h = choose_dt(&w, cfg.time.cfl)?.min(cfg.time.t_end - t);
        match step(&w, h) {
            Ok(next) => {
                w = next;
            }
            Err(Error::Vacuum(reason)) => {
                monitor.mark_admissibility_lost(t);
                status = RunStatus::Tripped {
                    reason: TripReason::AdmissibilityLost,
                    t_sym: t,
                };
                log::warn!("run aborted at t_sym = {t}: {reason}");
                break;
            }
            Err(e) => return Err(e),
        }
        t += h;
        step_index += 1;
        push_row(&w, t, h, &mut monitor, &mut series)?;
        let due = step_index % cfg.time.snapshot_every == 0 || t >= cfg.time.t_end - 1e-12;
        if due {
            snapshots.push(Snapshot {
                t_sym: t,
                state: w.clone(),
            });
        }
        if let Some(reason) = monitor.tripped {
            status = RunStatus::Tripped { reason, t_sym: t };
            // keep the state at trip time for post-mortem analysis
            if !due {
                snapshots.push(Snapshot {
                    t_sym: t,
                    state: w.clone(),
                });
            }
            break;
        }
    }

    Ok(RunRecord {
        config: cfg.clone(),
        norm_names,
        series,
        snapshots,
        monitor,
        status,
    })
}

// ---- on-disk layout ----

#[derive(Debug, Serialize, Deserialize)]
struct RunMeta {
    status: RunStatus,
    monitor: MonitorState,
    norm_names: Vec<String>,
    snapshot_count: usize,
}

#[derive(Debug, Serialize, Deserialize)]
struct SnapshotSidecar {
    t: f64,
    t_phys: f64,
    gamma: f64,
    b_bar: Vec<f64>,
    seed: u64,
    amplitude: f64,
    band: [i32; 2],
}

pub fn series_csv(record: &RunRecord) -> String {
    let mut out = String::from("t_sym,t_phys,gauss_residual,div_b,blowup_integral");
    for n in &record.norm_names {
        out.push(',');
        out.push_str(n);
    }
    out.push('\n');
    for row in &record.series {
        out.push_str(&format!(
            "{},{},{},{},{}",
            row.t_sym, row.t_phys, row.gauss_residual, row.div_b, row.blowup_integral
        ));
        for v in &row.norms {
            out.push_str(&format!(",{v}"));
        }
        out.push('\n');
    }
    out
}

fn parse_series_csv(text: &str, norm_count: usize) -> Result<Vec<SeriesRow>> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 || line.is_empty() {
            continue;
        }
        let vals: Vec<f64> = line
            .split(',')
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|e| Error::Format(format!("series.csv line {}: {e}", i + 1)))
            })
            .collect::<Result<_>>()?;
        if vals.len() != 5 + norm_count {
            return Err(Error::Format(format!(
                "series.csv line {}: expected {} columns, got {}",
                i + 1,
                5 + norm_count,
                vals.len()
            )));
        }
        rows.push(SeriesRow {
            t_sym: vals[0],
            t_phys: vals[1],
            gauss_residual: vals[2],
            div_b: vals[3],
            blowup_integral: vals[4],
            norms: vals[5..].to_vec(),
        });
    }
    Ok(rows)
}

/// Write the run record into `dir` (creating it). Returns the list of file
/// names written (for the manifest).
pub fn write_run_dir(record: &RunRecord, dir: &Path) -> Result<Vec<String>> {
    std::fs::create_dir_all(dir)?;
    let mut files = Vec::new();
    let config_echo = record.config.to_toml();
    std::fs::write(dir.join("config.toml"), &config_echo)?;
    files.push("config.toml".to_string());
    std::fs::write(dir.join("series.csv"), series_csv(record))?;
    files.push("series.csv".to_string());
    let meta = RunMeta {
        status: record.status.clone(),
        monitor: record.monitor.clone(),
        norm_names: record.norm_names.clone(),
        snapshot_count: record.snapshots.len(),
    };
    std::fs::write(
        dir.join("run_meta.json"),
        serde_json::to_string_pretty(&meta).expect("meta serializes"),
    )?;
    files.push("run_meta.json".to_string());
    for (i, snap) in record.snapshots.iter().enumerate() {
        let base = format!("snap_{i:06}");
        let bin = format!("{base}.bin");
        let mut f = std::io::BufWriter::new(std::fs::File::create(dir.join(&bin))?);
        for field in [
            &snap.state.rho_plus,
            &snap.state.v_plus,
            &snap.state.rho_minus,
            &snap.state.v_minus,
            &snap.state.e,
            &snap.state.b,
        ] {
            field.write_record(&mut f)?;
        }
        f.flush()?;
        files.push(bin);
        let sidecar = SnapshotSidecar {
            t: snap.t_sym,
            t_phys: snap.t_sym / record.config.params().sqrt_gamma(),
            gamma: record.config.physics.gamma,
            b_bar: record.config.effective_b_bar(),
            seed: record.config.init.seed,
            amplitude: record.config.init.amplitude,
            band: record.config.init.band,
        };
        let json = format!("{base}.json");
        std::fs::write(
            dir.join(&json),
            serde_json::to_string_pretty(&sidecar).expect("sidecar serializes"),
        )?;
        files.push(json);
    }
    Ok(files)
}

/// Load a run directory back into memory.
pub fn load_run_dir(dir: &Path) -> Result<RunRecord> {
    let config = RunConfig::load(dir.join("config.toml"))?;
    let meta_text = std::fs::read_to_string(dir.join("run_meta.json"))?;
    let meta: RunMeta =
        serde_json::from_str(&meta_text).map_err(|e| Error::Format(e.to_string()))?;
    let series = parse_series_csv(
        &std::fs::read_to_string(dir.join("series.csv"))?,
        meta.norm_names.len(),
    )?;
    let params = config.params();
    let mut snapshots = Vec::new();
    for i in 0..meta.snapshot_count {
        let base = format!("snap_{i:06}");
        let sidecar_text = std::fs::read_to_string(dir.join(format!("{base}.json")))?;
        let sidecar: SnapshotSidecar =
            serde_json::from_str(&sidecar_text).map_err(|e| Error::Format(e.to_string()))?;
        let mut f =
            std::io::BufReader::new(std::fs::File::open(dir.join(format!("{base}.bin")))?);
        let rho_plus = SpectralField::read_record(&mut f)?;
        let v_plus = SpectralField::read_record(&mut f)?;
        let rho_minus = SpectralField::read_record(&mut f)?;
        let v_minus = SpectralField::read_record(&mut f)?;
        let e = SpectralField::read_record(&mut f)?;
        let b = SpectralField::read_record(&mut f)?;
        snapshots.push(Snapshot {
            t_sym: sidecar.t,
            state: SymState {
                rho_plus,
                rho_minus,
                v_plus,
                v_minus,
                e,
                b,
                params: params.clone(),
            },
        });
    }
    Ok(RunRecord {
        config,
        norm_names: meta.norm_names,
        series,
        snapshots,
        monitor: meta.monitor,
        status: meta.status,
    })
}
