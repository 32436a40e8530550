//! Run manifest written next to every output.

use anyhow::{Context, Result};
use rislink::ingest::{PatternSource, RisSource, ScenarioConfig};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

#[derive(Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config: FileDigest,
    pub inputs: Vec<FileDigest>,
    pub seed: u64,
    pub overrides: Value,
    pub resolved: Value,
    pub outputs: Vec<FileDigest>,
    pub results: Value,
    pub started_unix_s: f64,
    pub finished_unix_s: f64,
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

fn resolved(cfg: &ScenarioConfig) -> Value {
    let s = &cfg.scenario;
    let ris = match &cfg.ris {
        Some(RisSource::Touchstone { path, freq_tol_hz }) => {
            json!({ "file": path.display().to_string(), "freq_tol_hz": freq_tol_hz })
        }
        Some(RisSource::Synthetic(m)) => json!({ "synthetic": format!("{m:?}") }),
        None => Value::Null,
    };
    let patterns = match &cfg.patterns {
        Some(PatternSource::Table(path)) => json!({ "file": path.display().to_string() }),
        Some(p) => json!({ "model": format!("{p:?}") }),
        None => Value::Null,
    };
    json!({
        "freq_hz": s.freq_hz(),
        "range_m": s.range_m(),
        "alpha_deg": s.alpha_rad().to_degrees(),
        "beta_deg": s.beta_rad().to_degrees(),
        "gain_tx_lin": s.gain_tx(),
        "gain_rx_lin": s.gain_rx(),
        "z0_ohm": cfg.z0_ohm,
        "elements": s.elements().iter().map(|e| json!([e.index_m, e.x_m, e.z_m])).collect::<Vec<_>>(),
        "board_m": s.board().map(|b| json!([b.width_m, b.height_m])),
        "bounds_f": [cfg.bounds.c_min(), cfg.bounds.c_max()],
        "varactor": {
            "series_resistance_ohm": cfg.varactor.series_resistance_ohm,
            "series_inductance_h": cfg.varactor.series_inductance_h,
        },
        "ris": ris,
        "patterns": patterns,
        "optimizer": {
            "starts": cfg.optimizer.starts,
            "max_evals": cfg.optimizer.max_evals,
            "seed": cfg.optimizer.seed,
            "polish": cfg.optimizer.polish,
            "gradient": cfg.optimizer.gradient_refine,
            "ftol": cfg.optimizer.ftol,
        },
        "sweep_deg": [cfg.sweep.alpha_min_deg, cfg.sweep.alpha_max_deg, cfg.sweep.alpha_step_deg],
    })
}

impl Manifest {
    pub fn new(command: &str, config_path: &Path, config_text: &str, cfg: &ScenarioConfig) -> Self {
        Self {
            tool: "rislink",
            version: env!("CARGO_PKG_VERSION"),
            command: command.into(),
            config: FileDigest {
                path: config_path.display().to_string(),
                sha256: sha256_hex(config_text.as_bytes()),
            },
            inputs: Vec::new(),
            seed: cfg.optimizer.seed,
            overrides: Value::Null,
            resolved: resolved(cfg),
            outputs: Vec::new(),
            results: Value::Null,
            started_unix_s: now(),
            finished_unix_s: 0.0,
        }
    }

    pub fn add_input(&mut self, path: &Path) -> Result<()> {
        let bytes = std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
        self.inputs.push(FileDigest {
            path: path.display().to_string(),
            sha256: sha256_hex(&bytes),
        });
        Ok(())
    }

    pub fn add_output(&mut self, path: &Path, bytes: &[u8]) {
        self.outputs.push(FileDigest {
            path: path.display().to_string(),
            sha256: sha256_hex(bytes),
        });
    }

    pub fn write(mut self, path: &Path) -> Result<()> {
        self.finished_unix_s = now();
        let text = serde_json::to_string_pretty(&self)?;
        std::fs::write(path, text + "\n").with_context(|| format!("cannot write {}", path.display()))
    }
}
