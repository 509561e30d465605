use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

use cesaro_core::criteria::fmt_f64;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ExperimentConfig, Task};
use crate::failure::Failure;
use crate::run::{run, RunSummary};

/// One merged row per configuration, keyed by `(eta_source, alpha, beta)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub eta_source: String,
    pub alpha: f64,
    pub beta: f64,
    pub verdict_bounded: Option<String>,
    pub verdict_compact: Option<String>,
    pub slope: Option<f64>,
    pub sigma_max: Option<f64>,
    pub run_dir: String,
}

pub const SWEEP_HEADER: [&str; 8] = [
    "eta_source",
    "alpha",
    "beta",
    "verdict_bounded",
    "verdict_compact",
    "slope",
    "sigma_max",
    "run_dir",
];

fn row(s: &RunSummary, dir: String) -> SweepRow {
    let v = |w| s.verdict(Task::Criterion, w).map(|v| v.to_string());
    SweepRow {
        eta_source: s.eta_source.clone(),
        alpha: s.alpha,
        beta: s.beta,
        verdict_bounded: v("verdict_bounded"),
        verdict_compact: v("verdict_compact"),
        slope: s.number(Task::Criterion, "slope"),
        sigma_max: s.number(Task::Sections, "sigma_max"),
        run_dir: dir,
    }
}

/// Runs the configurations concurrently, each into `out/run-<index>`, and
/// writes the merged table `out/sweep.csv` in configuration order.
pub fn sweep(configs: &[ExperimentConfig], out: &Path) -> Result<Vec<SweepRow>, Failure> {
    fs::create_dir_all(out)?;
    let results: Vec<Result<SweepRow, Failure>> = configs
        .par_iter()
        .enumerate()
        .map(|(i, cfg)| {
            let name = format!("run-{i:03}");
            let mut cfg = cfg.clone();
            cfg.output.dir = out.join(&name);
            run(&cfg)
                .map(|s| row(&s, name))
                .map_err(|e| e.context(&format!("config #{i}")))
        })
        .collect();
    let rows = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(out.join("sweep.csv"))?));
    w.write_record(SWEEP_HEADER)?;
    let opt = |x: Option<f64>| x.map(fmt_f64).unwrap_or_default();
    for r in &rows {
        w.write_record([
            r.eta_source.clone(),
            fmt_f64(r.alpha),
            fmt_f64(r.beta),
            r.verdict_bounded.clone().unwrap_or_default(),
            r.verdict_compact.clone().unwrap_or_default(),
            opt(r.slope),
            opt(r.sigma_max),
            r.run_dir.clone(),
        ])?;
    }
    w.flush()?;
    Ok(rows)
}
