use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::regime::RegimeReport;
use crate::error::{Error, Result};
use crate::stats::Estimate;

/// One CSV line. `experiment` is `name/quantity`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub experiment: String,
    pub class: String,
    pub distribution: String,
    pub m: usize,
    pub trials: usize,
    pub estimate: f64,
    pub ci_half_width: f64,
    pub seed: u64,
    pub regime_mode: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub config: ExperimentConfig,
    pub rows: Vec<ResultRow>,
    pub checks: Vec<Check>,
    pub regime: RegimeReport,
}

impl ResultTable {
    pub fn new(config: &ExperimentConfig, regime: RegimeReport) -> Self {
        ResultTable { config: config.clone(), rows: Vec::new(), checks: Vec::new(), regime }
    }

    pub fn push(&mut self, quantity: &str, class: &str, distribution: &str, m: usize, e: &Estimate) {
        self.rows.push(ResultRow {
            experiment: format!("{}/{quantity}", self.config.experiment),
            class: class.into(),
            distribution: distribution.into(),
            m,
            trials: e.trials,
            estimate: e.mean,
            ci_half_width: e.ci_half_width,
            seed: self.config.seed,
            regime_mode: self.config.regime_mode.to_string(),
        });
    }

    pub fn check(&mut self, name: &str, passed: bool, detail: String) {
        self.checks.push(Check { name: name.into(), passed, detail });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn find(&self, quantity: &str, class: &str, distribution: &str, m: usize) -> Option<&ResultRow> {
        let e = format!("{}/{quantity}", self.config.experiment);
        self.rows.iter().find(|r| r.experiment == e && r.class == class && r.distribution == distribution && r.m == m)
    }

    /// Rows in a canonical order: by experiment, class, distribution, then m.
    pub fn sorted_rows(&self) -> Vec<ResultRow> {
        let mut rows = self.rows.clone();
        rows.sort_by(|a, b| {
            (&a.experiment, &a.class, &a.distribution, a.m).cmp(&(&b.experiment, &b.class, &b.distribution, b.m))
        });
        rows
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Config(format!("unknown format {other}"))),
        }
    }
}

fn csv_err(e: impl std::fmt::Display) -> Error {
    Error::Config(format!("csv: {e}"))
}

pub fn to_csv(rows: &[ResultRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    String::from_utf8(w.into_inner().map_err(csv_err)?).map_err(csv_err)
}

pub fn from_csv(text: &str) -> Result<Vec<ResultRow>> {
    csv::Reader::from_reader(text.as_bytes()).deserialize().map(|r| r.map_err(csv_err)).collect()
}

pub fn render(table: &ResultTable, format: Format) -> Result<String> {
    if table.rows.is_empty() {
        return Err(Error::InvalidParameter("empty result table".into()));
    }
    match format {
        Format::Csv => to_csv(&table.sorted_rows()),
        Format::Json => {
            let mut t = table.clone();
            t.rows = t.sorted_rows();
            Ok(serde_json::to_string_pretty(&t)? + "\n")
        }
    }
}

pub fn emit_results(table: &ResultTable, format: Format, path: &Path) -> Result<()> {
    std::fs::write(path, render(table, format)?)?;
    Ok(())
}
