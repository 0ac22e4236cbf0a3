//! Plain-file outputs: CSVs for curves, traces, histograms, and grid
//! results, plus a small JSON manifest describing each run.
//!
//! Numbers are written with the shortest representation that parses back
//! to the same value, so identical runs produce identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::calibration::{CalibrationReport, TraceRow};
use crate::core::ActionSpace;
use crate::error::Result;
use crate::learner::TrainingCurvePoint;

pub fn write_curve_csv(path: &Path, curve: &[TrainingCurvePoint]) -> Result<()> {
    let mut out = String::from("iteration,mean_raw_utility,mean_kl_penalty,mean_regularized_reward\n");
    for pt in curve {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            pt.iteration, pt.mean_raw_utility, pt.mean_kl_penalty, pt.mean_regularized_reward
        );
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn write_trace_csv(path: &Path, rows: &[TraceRow]) -> Result<()> {
    let mut out = String::from("episode,step,agent,lambda,action,utility,price\n");
    for r in rows {
        let price = r.price.map(|p| p.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{price}",
            r.episode, r.step, r.agent, r.lambda, r.action_value, r.utility
        );
    }
    fs::write(path, out)?;
    Ok(())
}

/// One row per grid bin: the bin's value and its probability mass.
pub fn write_histogram_csv(path: &Path, space: &ActionSpace, masses: &[f64]) -> Result<()> {
    let mut out = String::from("action,mass\n");
    for (i, &m) in masses.iter().enumerate() {
        let _ = writeln!(out, "{},{m}", space.value(i));
    }
    fs::write(path, out)?;
    Ok(())
}

/// File name of the winning policy for one (repetition, direction) search.
pub fn selected_checkpoint_name(repetition: usize, direction: usize) -> String {
    format!("rep{repetition}_dir{direction}_checkpoint.json")
}

/// One row per (repetition, direction, grid cell); selected rows name
/// their saved checkpoint file.
pub fn write_cells_csv(path: &Path, report: &CalibrationReport) -> Result<()> {
    let mut out = String::from(
        "repetition,direction,mu,sigma_star,seed,train_mse,test_rmse,selected,checkpoint\n",
    );
    for r in &report.rows {
        let ckpt = if r.selected {
            selected_checkpoint_name(r.repetition, r.direction)
        } else {
            String::new()
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{ckpt}",
            r.repetition,
            r.direction,
            r.mu,
            r.sigma_star,
            r.seed,
            r.train_mse,
            r.test_rmse,
            r.selected
        );
    }
    fs::write(path, out)?;
    Ok(())
}

/// Failed grid cells, one row each; written only when there are any.
pub fn write_failures_csv(path: &Path, report: &CalibrationReport) -> Result<()> {
    let mut out = String::from("repetition,mu,sigma_star,seed,message\n");
    for f in &report.failures {
        let message = f.message.replace(',', ";").replace('\n', " ");
        let _ = writeln!(out, "{},{},{},{},{message}", f.repetition, f.mu, f.sigma_star, f.seed);
    }
    fs::write(path, out)?;
    Ok(())
}

/// Rank-ready one-row summary of a calibration run.
pub fn write_summary_csv(path: &Path, model: &str, report: &CalibrationReport) -> Result<()> {
    let cell = report.rmse_summary();
    let out = format!(
        "model,environment,rmse_mean,rmse_std\n{model},{},{},{}\n",
        report.env_name, cell.mean, cell.std
    );
    fs::write(path, out)?;
    Ok(())
}

/// What produced the files next to it. The timestamp is the only field
/// allowed to differ between reruns of the same command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: Option<String>,
    pub seed: u64,
    pub out_dir: String,
    pub version: String,
    pub unix_timestamp: u64,
}

impl RunManifest {
    pub fn new(command: &[String], config: Option<&Path>, seed: u64, out_dir: &Path) -> Self {
        RunManifest {
            command: command.join(" "),
            config: config.map(|p| p.display().to_string()),
            seed,
            out_dir: out_dir.display().to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            unix_timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut body = serde_json::to_string_pretty(self)?;
        body.push('\n');
        fs::write(path, body)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let body = fs::read_to_string(path)?;
        let manifest = serde_json::from_str(&body)
            .map_err(|e| crate::error::Error::data(format!("{}: {e}", path.display())))?;
        Ok(manifest)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_csv_has_header_and_rows() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("curve.csv");
        let curve = vec![
            TrainingCurvePoint {
                iteration: 0,
                mean_raw_utility: 1.5,
                mean_kl_penalty: 0.25,
                mean_regularized_reward: 1.25,
            },
            TrainingCurvePoint {
                iteration: 1,
                mean_raw_utility: 2.0,
                mean_kl_penalty: 0.1,
                mean_regularized_reward: 1.9,
            },
        ];
        write_curve_csv(&path, &curve).unwrap();
        let body = fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = body.lines().collect();
        assert_eq!(lines[0], "iteration,mean_raw_utility,mean_kl_penalty,mean_regularized_reward");
        assert_eq!(lines[1], "0,1.5,0.25,1.25");
        assert_eq!(lines.len(), 3);
    }

    #[test]
    fn trace_csv_leaves_price_empty_when_absent() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("trace.csv");
        let rows = vec![
            TraceRow {
                episode: 0,
                step: 0,
                agent: 1,
                lambda: 0.5,
                action_value: 20.0,
                utility: 32.0,
                price: None,
            },
            TraceRow {
                episode: 0,
                step: 1,
                agent: 0,
                lambda: 0.5,
                action_value: 5.9,
                utility: 1300.0,
                price: Some(5.905),
            },
        ];
        write_trace_csv(&path, &rows).unwrap();
        let body = fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = body.lines().collect();
        assert_eq!(lines[1], "0,0,1,0.5,20,32,");
        assert_eq!(lines[2], "0,1,0,0.5,5.9,1300,5.905");
    }

    #[test]
    fn histogram_csv_pairs_bins_with_masses() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("hist.csv");
        let space = ActionSpace::integers(8, 10).unwrap();
        write_histogram_csv(&path, &space, &[0.25, 0.5, 0.25]).unwrap();
        let body = fs::read_to_string(&path).unwrap();
        assert_eq!(body, "action,mass\n8,0.25\n9,0.5\n10,0.25\n");
    }

    #[test]
    fn manifest_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("manifest.json");
        let manifest = RunManifest::new(
            &["train".into(), "--env".into(), "cobweb".into()],
            None,
            7,
            dir.path(),
        );
        manifest.save(&path).unwrap();
        let loaded = RunManifest::load(&path).unwrap();
        assert_eq!(manifest, loaded);
        assert_eq!(loaded.command, "train --env cobweb");
        assert_eq!(loaded.seed, 7);
        assert!(!loaded.version.is_empty());
    }
}
