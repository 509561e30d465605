use std::fs;
use std::path::{Path, PathBuf};

use cesaro_core::criteria::DyadicGrid;
use cesaro_core::{
    classical_cesaro, measure_moments, power_log_family, Complex64, EtaSeq, MeasureSpec,
    PowerOptions,
};
use serde::{Deserialize, Serialize};

use crate::failure::Failure;

/// A real number or a `[re, im]` pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Real(f64),
    Complex([f64; 2]),
}

impl From<Scalar> for Complex64 {
    fn from(s: Scalar) -> Self {
        match s {
            Scalar::Real(x) => Complex64::new(x, 0.0),
            Scalar::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EtaSource {
    Classical,
    Measure {
        measure: MeasureSpec,
    },
    PowerLog {
        s: f64,
        #[serde(default)]
        r: f64,
    },
    Explicit {
        values: Vec<Scalar>,
    },
}

impl EtaSource {
    /// Stable key used in merged tables.
    pub fn label(&self) -> String {
        match self {
            EtaSource::Classical => "classical".into(),
            EtaSource::PowerLog { s, r } => format!("power_log(s={s},r={r})"),
            EtaSource::Measure { measure } => {
                format!(
                    "measure({})",
                    serde_json::to_string(measure).unwrap_or_default()
                )
            }
            EtaSource::Explicit { values } => format!("explicit(len={})", values.len()),
        }
    }

    /// Generates `η_0..=η_{n_max}`; explicit sequences keep their own length.
    pub fn generate(&self, n_max: usize) -> Result<EtaSeq, Failure> {
        Ok(match self {
            EtaSource::Classical => classical_cesaro(n_max),
            EtaSource::PowerLog { s, r } => power_log_family(*s, *r, n_max)?,
            EtaSource::Measure { measure } => measure_moments(measure, n_max)?,
            EtaSource::Explicit { values } => {
                EtaSeq::custom(values.iter().map(|&v| v.into()).collect())?.with_tag("explicit")
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Criterion,
    PartialSum,
    Shortcut,
    Sections,
    Residuals,
    LowerBounds,
    Carleson,
}

impl Task {
    pub fn name(&self) -> &'static str {
        match self {
            Task::Criterion => "criterion",
            Task::PartialSum => "partial_sum",
            Task::Shortcut => "shortcut",
            Task::Sections => "sections",
            Task::Residuals => "residuals",
            Task::LowerBounds => "lower_bounds",
            Task::Carleson => "carleson",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: PathBuf,
    #[serde(default)]
    pub format: OutputFormat,
}

fn default_seed() -> u64 {
    42
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub eta_source: EtaSource,
    pub alpha: f64,
    pub beta: f64,
    pub n_grid: DyadicGrid,
    /// Generated length is `n_max + 1`; defaults to 16 times the top grid point.
    #[serde(default)]
    pub n_max: Option<usize>,
    pub tasks: Vec<Task>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub max_iter: Option<usize>,
    pub output: OutputSpec,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, Failure> {
        serde_json::from_str(text).map_err(|e| Failure::Validation(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| e.context(&path.display().to_string()))
    }

    pub fn power_options(&self) -> PowerOptions {
        let mut o = PowerOptions::default().with_seed(self.seed);
        if let Some(t) = self.tol {
            o = o.with_tol(t);
        }
        if let Some(m) = self.max_iter {
            o.max_iter = m;
        }
        o
    }

    pub fn n_max(&self) -> usize {
        match &self.eta_source {
            EtaSource::Explicit { values } => values.len().saturating_sub(1),
            _ => self.n_max.unwrap_or(16 * self.n_grid.top()),
        }
    }

    /// Tasks in canonical order, without repeats.
    pub fn task_list(&self) -> Vec<Task> {
        let mut t = self.tasks.clone();
        t.sort();
        t.dedup();
        t
    }

    pub fn validate(&self) -> Result<(), Failure> {
        let bad = |m: String| Err(Failure::Validation(m));
        if self.tasks.is_empty() {
            return bad("at least one task is required".into());
        }
        if !self.alpha.is_finite() || !self.beta.is_finite() {
            return bad("alpha and beta must be finite".into());
        }
        self.n_grid.validate()?;
        let len = self.n_max() + 1;
        if let EtaSource::Explicit { values } = &self.eta_source {
            if values.is_empty() {
                return bad("explicit eta is empty".into());
            }
            if self.n_max.is_some() {
                return bad("n_max cannot be set for an explicit eta".into());
            }
        }
        let top = self.n_grid.top();
        for task in self.task_list() {
            match task {
                Task::Criterion if top > len / 16 => {
                    return bad(format!(
                        "criterion needs the top grid point {top} <= length/16 = {}",
                        len / 16
                    ))
                }
                Task::PartialSum | Task::Shortcut if !(self.alpha > 0.0) => {
                    return bad(format!("{} requires alpha > 0", task.name()))
                }
                Task::Carleson => {
                    if !matches!(self.eta_source, EtaSource::Measure { .. }) {
                        return bad("carleson requires a measure eta source".into());
                    }
                    if !(1.0 + (self.alpha - self.beta) / 2.0 > 0.0) {
                        return bad("carleson requires 1 + (alpha - beta)/2 > 0".into());
                    }
                }
                _ => {}
            }
            if top >= len {
                return bad(format!("grid top {top} exceeds generated length {len}"));
            }
        }
        Ok(())
    }
}
