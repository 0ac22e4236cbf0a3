//! Cross-model comparison tables.
//!
//! Input: one RMSE summary (mean and spread) per model and environment.
//! Output: per-environment ranks with ties averaged, plus a weighted
//! average rank per model. Weights are per environment and only their
//! proportions matter; the classic setup gives the two oligopoly variants
//! half weight each so they jointly count as one setting.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RmseCell {
    pub mean: f64,
    pub std: f64,
}

/// A complete models-by-environments RMSE table.
#[derive(Debug, Clone, PartialEq)]
pub struct RmseTable {
    pub models: Vec<String>,
    pub environments: Vec<String>,
    /// Indexed `[model][environment]`.
    pub cells: Vec<Vec<RmseCell>>,
}

impl RmseTable {
    pub fn new(
        models: Vec<String>,
        environments: Vec<String>,
        cells: Vec<Vec<RmseCell>>,
    ) -> Result<Self> {
        if models.is_empty() {
            return Err(Error::data("rank table needs at least one model"));
        }
        if environments.is_empty() {
            return Err(Error::data("rank table needs at least one environment"));
        }
        if cells.len() != models.len() {
            return Err(Error::data(format!(
                "{} cell rows for {} models",
                cells.len(),
                models.len()
            )));
        }
        for (model, row) in models.iter().zip(&cells) {
            if row.len() != environments.len() {
                return Err(Error::data(format!(
                    "model {model:?} has {} cells for {} environments",
                    row.len(),
                    environments.len()
                )));
            }
            for (env, cell) in environments.iter().zip(row) {
                if !cell.mean.is_finite() || cell.mean < 0.0 || !cell.std.is_finite() || cell.std < 0.0
                {
                    return Err(Error::data(format!(
                        "model {model:?}, environment {env:?}: RMSE {} ± {} is not a \
                         nonnegative finite pair",
                        cell.mean, cell.std
                    )));
                }
            }
        }
        Ok(RmseTable { models, environments, cells })
    }

    /// Reads the long-form CSV `model,environment,rmse_mean,rmse_std`.
    /// Models and environments keep first-appearance order; every
    /// (model, environment) pair must appear exactly once.
    pub fn load_csv(path: &Path) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| Error::data(format!("{}: {e}", path.display())))?;
        let headers = reader
            .headers()
            .map_err(|e| Error::data(format!("{}: {e}", path.display())))?
            .clone();
        if headers.iter().collect::<Vec<_>>() != ["model", "environment", "rmse_mean", "rmse_std"]
        {
            return Err(Error::data_at(
                1,
                "header must be `model,environment,rmse_mean,rmse_std`".to_string(),
            ));
        }
        let mut models: Vec<String> = Vec::new();
        let mut environments: Vec<String> = Vec::new();
        let mut entries: Vec<(usize, usize, RmseCell, u64)> = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| Error::data(format!("{}: {e}", path.display())))?;
            let line = record.position().map(|p| p.line()).unwrap_or(0);
            if record.len() != 4 {
                return Err(Error::data_at(
                    line,
                    format!("expected 4 fields, found {}", record.len()),
                ));
            }
            let model = record[0].to_string();
            let env = record[1].to_string();
            let mean: f64 = record[2]
                .parse()
                .map_err(|_| Error::data_at(line, format!("rmse_mean {:?} is not a number", &record[2])))?;
            let std: f64 = record[3]
                .parse()
                .map_err(|_| Error::data_at(line, format!("rmse_std {:?} is not a number", &record[3])))?;
            let mi = models.iter().position(|m| *m == model).unwrap_or_else(|| {
                models.push(model);
                models.len() - 1
            });
            let ei = environments.iter().position(|e| *e == env).unwrap_or_else(|| {
                environments.push(env);
                environments.len() - 1
            });
            if entries.iter().any(|&(m, e, _, _)| m == mi && e == ei) {
                return Err(Error::data_at(
                    line,
                    format!(
                        "duplicate cell for model {:?}, environment {:?}",
                        models[mi], environments[ei]
                    ),
                ));
            }
            entries.push((mi, ei, RmseCell { mean, std }, line));
        }
        if models.is_empty() {
            return Err(Error::data(format!("{}: table has no rows", path.display())));
        }
        let mut cells = vec![vec![None; environments.len()]; models.len()];
        for (mi, ei, cell, _) in entries {
            cells[mi][ei] = Some(cell);
        }
        let mut full = Vec::with_capacity(models.len());
        for (mi, row) in cells.into_iter().enumerate() {
            let mut out = Vec::with_capacity(environments.len());
            for (ei, cell) in row.into_iter().enumerate() {
                out.push(cell.ok_or_else(|| {
                    Error::data(format!(
                        "missing cell: model {:?} has no row for environment {:?}",
                        models[mi], environments[ei]
                    ))
                })?);
            }
            full.push(out);
        }
        RmseTable::new(models, environments, full)
    }
}

/// Ranks plus the inputs they were computed from.
#[derive(Debug, Clone, PartialEq)]
pub struct RankTable {
    pub table: RmseTable,
    /// One weight per environment; proportions are what matter.
    pub weights: Vec<f64>,
    /// Indexed `[model][environment]`; ties share the average of the
    /// positions they span.
    pub ranks: Vec<Vec<f64>>,
    /// Weighted mean rank per model.
    pub average_rank: Vec<f64>,
}

/// Fractional ranking of one environment column: rank = (# strictly
/// smaller) + (# equal + 1) / 2, counting the value itself as equal.
fn column_ranks(means: &[f64]) -> Vec<f64> {
    means
        .iter()
        .map(|&m| {
            let less = means.iter().filter(|&&x| x < m).count();
            let equal = means.iter().filter(|&&x| x == m).count();
            less as f64 + (equal as f64 + 1.0) / 2.0
        })
        .collect()
}

pub fn rank_models(table: &RmseTable, weights: &[f64]) -> Result<RankTable> {
    // re-validate so hand-built tables get the same checks as loaded ones
    let table = RmseTable::new(
        table.models.clone(),
        table.environments.clone(),
        table.cells.clone(),
    )?;
    if weights.len() != table.environments.len() {
        return Err(Error::Config(format!(
            "{} weights for {} environments",
            weights.len(),
            table.environments.len()
        )));
    }
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::Config(format!(
            "weights cannot be normalized: {weights:?} (each must be finite and nonnegative)"
        )));
    }
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return Err(Error::Config(format!(
            "weights cannot be normalized: {weights:?} (sum must be positive)"
        )));
    }
    let m = table.models.len();
    let mut ranks = vec![vec![0.0; table.environments.len()]; m];
    for ei in 0..table.environments.len() {
        let means: Vec<f64> = (0..m).map(|mi| table.cells[mi][ei].mean).collect();
        for (mi, r) in column_ranks(&means).into_iter().enumerate() {
            ranks[mi][ei] = r;
        }
    }
    let average_rank = (0..m)
        .map(|mi| {
            let s: f64 = ranks[mi].iter().zip(weights).map(|(r, w)| r * w).sum();
            s / total
        })
        .collect();
    Ok(RankTable { table, weights: weights.to_vec(), ranks, average_rank })
}

impl RankTable {
    /// Long-form CSV: a row per cell, then one `average` row per model.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("model,environment,weight,rmse_mean,rmse_std,rank\n");
        for (mi, model) in self.table.models.iter().enumerate() {
            for (ei, env) in self.table.environments.iter().enumerate() {
                let cell = self.table.cells[mi][ei];
                let _ = writeln!(
                    out,
                    "{model},{env},{},{},{},{}",
                    self.weights[ei], cell.mean, cell.std, self.ranks[mi][ei]
                );
            }
        }
        for (mi, model) in self.table.models.iter().enumerate() {
            let _ = writeln!(out, "{model},average,,,,{}", self.average_rank[mi]);
        }
        out
    }

    /// Aligned text table: one environment per row, one model per column,
    /// cells as `mean ± std (rank)`, average ranks on the last row.
    pub fn render_text(&self) -> String {
        let m = self.table.models.len();
        let mut grid: Vec<Vec<String>> = Vec::new();
        let mut header = vec!["environment".to_string(), "weight".to_string()];
        header.extend(self.table.models.iter().cloned());
        grid.push(header);
        for (ei, env) in self.table.environments.iter().enumerate() {
            let mut row = vec![env.clone(), format!("{:.2}", self.weights[ei])];
            for mi in 0..m {
                let cell = self.table.cells[mi][ei];
                row.push(format!(
                    "{:.3} \u{b1} {:.3} ({})",
                    cell.mean, cell.std, self.ranks[mi][ei]
                ));
            }
            grid.push(row);
        }
        let mut avg = vec!["average rank".to_string(), String::new()];
        avg.extend(self.average_rank.iter().map(|r| format!("{r}")));
        grid.push(avg);
        let cols = grid[0].len();
        let widths: Vec<usize> = (0..cols)
            .map(|c| grid.iter().map(|row| row[c].chars().count()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for row in &grid {
            let mut line = String::new();
            for (c, cell) in row.iter().enumerate() {
                let pad = widths[c] - cell.chars().count();
                line.push_str(cell);
                if c + 1 < cols {
                    line.push_str(&" ".repeat(pad + 2));
                }
            }
            out.push_str(line.trim_end());
            out.push('\n');
        }
        out
    }
}
