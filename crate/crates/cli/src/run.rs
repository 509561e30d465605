use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use cesaro_core::criteria::{fmt_f64, CarlesonReport, DEFAULT_CARLESON_LEVELS};
use cesaro_core::testfuncs::{lower_bound_sweep, TestFamily};
use cesaro_core::{
    carleson_statistic, criterion, decreasing_shortcut, partial_sum_form, residual_norm, section,
    section_norm, CriterionReport, EtaSeq, NormEstimate, PowerOptions, Verdict,
};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::{EtaSource, ExperimentConfig, OutputFormat, Task};
use crate::failure::Failure;

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub eta_source: String,
    pub eta_tag: String,
    pub eta_len: usize,
    pub alpha: f64,
    pub beta: f64,
    pub seed: u64,
    pub tasks: Map<String, Value>,
}

impl RunSummary {
    pub fn verdict(&self, task: Task, which: &str) -> Option<Verdict> {
        let v = self.tasks.get(task.name())?.get(which)?.clone();
        serde_json::from_value(v).ok()
    }

    pub fn number(&self, task: Task, key: &str) -> Option<f64> {
        self.tasks.get(task.name())?.get(key)?.as_f64()
    }
}

struct Sink<'a> {
    dir: &'a Path,
    format: OutputFormat,
}

impl Sink<'_> {
    fn path(&self, stem: &str) -> PathBuf {
        let ext = match self.format {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        };
        self.dir.join(format!("{stem}.{ext}"))
    }

    /// Writes `rows` as CSV under `header`, or as a JSON array of objects.
    fn table(
        &self,
        stem: &str,
        header: &[&str],
        rows: &[Vec<String>],
        json_rows: Value,
    ) -> Result<String, Failure> {
        let path = self.path(stem);
        let file = BufWriter::new(File::create(&path)?);
        match self.format {
            OutputFormat::Csv => {
                let mut w = csv::Writer::from_writer(file);
                w.write_record(header)?;
                for r in rows {
                    w.write_record(r)?;
                }
                w.flush()?;
            }
            OutputFormat::Json => write_json(file, &json_rows)?,
        }
        Ok(file_name(&path))
    }

    fn criterion(&self, stem: &str, rep: &CriterionReport) -> Result<String, Failure> {
        let path = self.path(stem);
        let file = BufWriter::new(File::create(&path)?);
        match self.format {
            OutputFormat::Csv => rep.write_csv(file)?,
            OutputFormat::Json => write_json(file, &serde_json::to_value(rep)?)?,
        }
        Ok(file_name(&path))
    }

    fn carleson(&self, rep: &CarlesonReport) -> Result<String, Failure> {
        let path = self.path("carleson");
        let file = BufWriter::new(File::create(&path)?);
        match self.format {
            OutputFormat::Csv => rep.write_csv(file)?,
            OutputFormat::Json => write_json(file, &serde_json::to_value(rep)?)?,
        }
        Ok(file_name(&path))
    }
}

fn file_name(p: &Path) -> String {
    p.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

pub fn write_json<W: Write>(mut w: W, v: &Value) -> Result<(), Failure> {
    serde_json::to_writer_pretty(&mut w, v)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn criterion_summary(rep: &CriterionReport, file: String) -> Value {
    json!({
        "file": file,
        "verdict_bounded": rep.verdict_bounded,
        "verdict_compact": rep.verdict_compact,
        "slope": rep.slope,
        "last_slope": rep.last_slope,
        "sup_s": rep.sup_s,
        "tail_estimate": rep.tail_estimate,
        "tail_majorant": rep.tail_majorant,
    })
}

fn require_converged(what: &str, n: usize, est: &NormEstimate) -> Result<(), Failure> {
    if est.converged {
        Ok(())
    } else {
        Err(Failure::Numerical(format!(
            "{what} at N={n} did not converge after {} iterations (residual {:.3e})",
            est.iterations, est.residual
        )))
    }
}

/// Section norms on the grid points, all of which must converge.
pub fn section_norms(
    eta: &EtaSeq,
    alpha: f64,
    beta: f64,
    ns: &[usize],
    opts: &PowerOptions,
) -> Result<Vec<NormEstimate>, Failure> {
    ns.iter()
        .map(|&n| {
            let est = section_norm(&section(eta, alpha, beta, n)?, opts)?;
            require_converged("section norm", n, &est)?;
            Ok(est)
        })
        .collect()
}

fn run_task(
    cfg: &ExperimentConfig,
    eta: &EtaSeq,
    task: Task,
    sink: &Sink,
) -> Result<Value, Failure> {
    let (alpha, beta, grid) = (cfg.alpha, cfg.beta, &cfg.n_grid);
    let opts = cfg.power_options();
    Ok(match task {
        Task::Criterion => {
            let rep = criterion(eta, alpha, beta, grid)?;
            criterion_summary(&rep, sink.criterion("criterion", &rep)?)
        }
        Task::PartialSum => {
            let rep = partial_sum_form(eta, alpha, beta, grid)?;
            criterion_summary(&rep, sink.criterion("partial_sum", &rep)?)
        }
        Task::Shortcut => {
            let rep = decreasing_shortcut(eta, alpha, beta, grid)?;
            criterion_summary(&rep, sink.criterion("shortcut", &rep)?)
        }
        Task::Sections => {
            let ns = grid.points();
            let ests = section_norms(eta, alpha, beta, &ns, &opts)?;
            let rows: Vec<Vec<String>> = ns
                .iter()
                .zip(&ests)
                .map(|(n, e)| {
                    vec![
                        n.to_string(),
                        fmt_f64(e.value),
                        e.iterations.to_string(),
                        e.converged.to_string(),
                    ]
                })
                .collect();
            let jrows = ns
                .iter()
                .zip(&ests)
                .map(|(n, e)| json!({"N": n, "sigma_max": e.value, "iterations": e.iterations, "converged": e.converged}))
                .collect();
            let file = sink.table(
                "sections",
                &["N", "sigma_max", "iterations", "converged"],
                &rows,
                jrows,
            )?;
            let last = ests.last().map_or(0.0, |e| e.value);
            let prev = ests
                .get(ests.len().wrapping_sub(2))
                .map_or(0.0, |e| e.value);
            json!({
                "file": file,
                "sigma_max": last,
                "top_octave_change": if prev > 0.0 { last / prev - 1.0 } else { 0.0 },
            })
        }
        Task::Residuals => {
            let n_big = grid.top();
            let cuts: Vec<usize> = grid.points().into_iter().filter(|&c| c < n_big).collect();
            let mut vals = Vec::with_capacity(cuts.len());
            for &c in &cuts {
                let est = residual_norm(eta, alpha, beta, c, n_big, &opts)?;
                require_converged("residual norm", c, &est)?;
                vals.push(est.value);
            }
            let rows: Vec<Vec<String>> = cuts
                .iter()
                .zip(&vals)
                .map(|(c, v)| vec![c.to_string(), fmt_f64(*v)])
                .collect();
            let jrows = cuts
                .iter()
                .zip(&vals)
                .map(|(c, v)| json!({"N_cut": c, "residual": v}))
                .collect();
            let file = sink.table("residuals", &["N_cut", "residual"], &rows, jrows)?;
            json!({
                "file": file,
                "n_big": n_big,
                "first": vals.first(),
                "last": vals.last(),
            })
        }
        Task::LowerBounds => {
            let family = if alpha > 0.0 {
                TestFamily::GBAlpha
            } else {
                TestFamily::HB
            };
            // b = 1 − 2^{−j} with 16/(1−b) inside the stored sequence
            let top_level = (2..=30u32)
                .take_while(|j| (16usize << j) < eta.len())
                .last();
            let certs = match top_level {
                Some(j) => lower_bound_sweep(eta, alpha, beta, family, 2..=j)?,
                None => Vec::new(),
            };
            let pick = |c: &cesaro_core::Certificate, k: &str| c.param(k).unwrap_or(f64::NAN);
            let rows: Vec<Vec<String>> = certs
                .iter()
                .map(|c| vec![fmt_f64(pick(c, "b")), fmt_f64(c.value)])
                .collect();
            let jrows = certs
                .iter()
                .map(|c| json!({"b": pick(c, "b"), "lower_bound": c.value}))
                .collect();
            let file = sink.table("lower_bounds", &["b", "lower_bound"], &rows, jrows)?;
            json!({
                "file": file,
                "family": family,
                "max": certs.iter().map(|c| c.value).fold(f64::NEG_INFINITY, f64::max),
            })
        }
        Task::Carleson => {
            let EtaSource::Measure { measure } = &cfg.eta_source else {
                return Err(Failure::Validation("carleson requires a measure".into()));
            };
            let s = 1.0 + (alpha - beta) / 2.0;
            let rep = carleson_statistic(measure, s, DEFAULT_CARLESON_LEVELS)?;
            json!({
                "file": sink.carleson(&rep)?,
                "s": s,
                "sup": rep.sup,
                "slope": rep.slope,
                "verdict": rep.verdict,
            })
        }
    })
}

/// Runs every task of a validated configuration, writing one file per task
/// and `summary.json` into the output directory.
pub fn run(cfg: &ExperimentConfig) -> Result<RunSummary, Failure> {
    cfg.validate()?;
    let eta = cfg.eta_source.generate(cfg.n_max())?;
    fs::create_dir_all(&cfg.output.dir)?;
    let sink = Sink {
        dir: &cfg.output.dir,
        format: cfg.output.format,
    };
    let mut tasks = Map::new();
    for task in cfg.task_list() {
        let v = run_task(cfg, &eta, task, &sink).map_err(|e| e.context(task.name()))?;
        tasks.insert(task.name().to_string(), v);
    }
    let summary = RunSummary {
        eta_source: cfg.eta_source.label(),
        eta_tag: eta.tag().to_string(),
        eta_len: eta.len(),
        alpha: cfg.alpha,
        beta: cfg.beta,
        seed: cfg.seed,
        tasks,
    };
    let file = BufWriter::new(File::create(cfg.output.dir.join("summary.json"))?);
    write_json(file, &serde_json::to_value(&summary)?)?;
    Ok(summary)
}
