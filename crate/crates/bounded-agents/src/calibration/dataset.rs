//! Empirical decision data.
//!
//! A dataset is a flat list of recorded decisions (or realized prices),
//! one row per subject and round, tagged with the environment it came
//! from. The on-disk format is CSV with header `env,subject,round,value`.

use std::path::Path;

use crate::core::ActionSpace;
use crate::error::{Error, Result};

use super::histogram;

#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub subject: String,
    pub round: u64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDataset {
    env: String,
    observations: Vec<Observation>,
}

impl EmpiricalDataset {
    pub fn new(env: impl Into<String>, observations: Vec<Observation>) -> Result<Self> {
        let env = env.into();
        if env.is_empty() {
            return Err(Error::data("dataset needs a nonempty environment tag"));
        }
        if observations.is_empty() {
            return Err(Error::data("dataset has no observations"));
        }
        for obs in &observations {
            if !obs.value.is_finite() {
                return Err(Error::data(format!(
                    "non-finite value {} for subject {}",
                    obs.value, obs.subject
                )));
            }
        }
        Ok(EmpiricalDataset { env, observations })
    }

    pub fn env(&self) -> &str {
        &self.env
    }

    pub fn observations(&self) -> &[Observation] {
        &self.observations
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn values(&self) -> Vec<f64> {
        self.observations.iter().map(|o| o.value).collect()
    }

    /// Values at the given observation indices, in index order.
    pub fn values_at(&self, indices: &[usize]) -> Result<Vec<f64>> {
        indices
            .iter()
            .map(|&i| {
                self.observations
                    .get(i)
                    .map(|o| o.value)
                    .ok_or_else(|| {
                        Error::data(format!("observation index {i} out of range ({})", self.len()))
                    })
            })
            .collect()
    }

    /// Histogram of all values over the grid. `bin_to_nearest` snaps
    /// off-grid values (prices) to the closest bin; without it any
    /// off-grid value is an error.
    pub fn histogram(&self, space: &ActionSpace, bin_to_nearest: bool) -> Result<Vec<f64>> {
        histogram(&self.values(), space, bin_to_nearest)
    }

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
        let expected = ["env", "subject", "round", "value"];
        if headers.iter().collect::<Vec<_>>() != expected {
            return Err(Error::data_at(
                1,
                format!(
                    "{}: header must be `env,subject,round,value`, found `{}`",
                    path.display(),
                    headers.iter().collect::<Vec<_>>().join(",")
                ),
            ));
        }
        let mut env: Option<String> = None;
        let mut observations = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| Error::data(format!("{}: {e}", path.display())))?;
            let line = record
                .position()
                .map(|p| p.line())
                .unwrap_or(0);
            if record.len() != 4 {
                return Err(Error::data_at(
                    line,
                    format!("expected 4 fields, found {}", record.len()),
                ));
            }
            let row_env = record[0].to_string();
            match &env {
                None => env = Some(row_env),
                Some(tag) if *tag != row_env => {
                    return Err(Error::data_at(
                        line,
                        format!("environment tag {row_env:?} does not match {tag:?}"),
                    ));
                }
                Some(_) => {}
            }
            let round: u64 = record[2].parse().map_err(|_| {
                Error::data_at(line, format!("round {:?} is not a nonnegative integer", &record[2]))
            })?;
            let value: f64 = record[3].parse().map_err(|_| {
                Error::data_at(line, format!("value {:?} is not a number", &record[3]))
            })?;
            if !value.is_finite() {
                return Err(Error::data_at(line, format!("value {value} is not finite")));
            }
            observations.push(Observation { subject: record[1].to_string(), round, value });
        }
        let env = env.ok_or_else(|| {
            Error::data(format!("{}: dataset has no observations", path.display()))
        })?;
        EmpiricalDataset::new(env, observations)
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let fail = |e: csv::Error| Error::data(format!("{}: {e}", path.display()));
        let mut writer = csv::Writer::from_path(path).map_err(fail)?;
        writer.write_record(["env", "subject", "round", "value"]).map_err(fail)?;
        for obs in &self.observations {
            writer
                .write_record([
                    self.env.as_str(),
                    obs.subject.as_str(),
                    &obs.round.to_string(),
                    &obs.value.to_string(),
                ])
                .map_err(fail)?;
        }
        writer.flush()?;
        Ok(())
    }
}
