use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use cesaro_cli::config::Scalar;
use cesaro_cli::run::write_json;
use cesaro_cli::{run, sweep, EtaSource, ExperimentConfig, Failure};
use cesaro_core::criteria::{fmt_f64, DyadicGrid};
use cesaro_core::testfuncs::{bennett_table, lower_bound_sweep, TestFamily};
use cesaro_core::{
    bennett_check, criterion, decreasing_shortcut, partial_sum_form, schur_certify, section,
    section_norm, MeasureSpec, PowerOptions,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "cesaro-lab",
    version,
    about = "Numerical experiments with generalized Cesàro operators on weighted Dirichlet spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one JSON experiment configuration.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the configuration's output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run a JSON list of configurations and merge their summaries.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Dump the moment sequence of a measure as CSV `n,eta`.
    Moments {
        /// Measure as inline JSON or `@path`.
        #[arg(long)]
        measure: String,
        #[arg(long)]
        n_max: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Largest singular value of one finite section.
    SectionNorm {
        #[command(flatten)]
        eta: EtaArgs,
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, allow_hyphen_values = true)]
        beta: f64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        max_iter: Option<usize>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Boundedness/compactness statistic on a dyadic grid.
    Criterion {
        #[command(flatten)]
        eta: EtaArgs,
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, allow_hyphen_values = true)]
        beta: f64,
        #[arg(long, default_value_t = 4)]
        min_exp: u32,
        #[arg(long, default_value_t = 16)]
        max_exp: u32,
        #[arg(long, value_enum, default_value_t = Form::Tail)]
        form: Form,
        /// Print the `N,A_N,S_N` table instead of the JSON report.
        #[arg(long)]
        csv: bool,
    },
    /// Norm certificates.
    Certify {
        #[command(subcommand)]
        kind: CertifyKind,
    },
}

#[derive(Subcommand)]
enum CertifyKind {
    /// Lower bounds from the test functions h_b (alpha <= 0) or g_{b,alpha} (alpha > 0).
    LowerBound {
        #[command(flatten)]
        eta: EtaArgs,
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, allow_hyphen_values = true)]
        beta: f64,
        /// Largest level j in b = 1 - 2^-j.
        #[arg(long, default_value_t = 12)]
        levels: u32,
    },
    /// Schur test for a nonnegative kernel on 1..=N.
    Schur {
        #[arg(long, value_enum)]
        kernel: Kernel,
        #[arg(long)]
        n: usize,
    },
    /// Bennett check with u_n = n^{1-beta}|eta_n|^2, v_k = k^{alpha-1}, w_k = k^{-p}/k^{alpha-1}.
    Bennett {
        #[command(flatten)]
        eta: EtaArgs,
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, allow_hyphen_values = true)]
        beta: f64,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        #[arg(long, default_value_t = 4)]
        min_exp: u32,
        #[arg(long, default_value_t = 16)]
        max_exp: u32,
        /// Also print the per-N ratios as CSV `N,hypothesis_ratio,conclusion_ratio`.
        #[arg(long)]
        table: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Form {
    Tail,
    PartialSum,
    Shortcut,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kernel {
    /// 1/(sqrt(jm) log(j+m+1)) with p_j = j^{-1/2}(1+log j)^{-1/2}
    Log,
    /// 1/(j+m) with p_j = j^{-1/2}
    Hilbert,
}

#[derive(Clone, Copy, ValueEnum)]
enum EtaKind {
    Classical,
    PowerLog,
    Measure,
    Explicit,
}

#[derive(Args)]
struct EtaArgs {
    #[arg(long = "eta", value_enum, default_value_t = EtaKind::Classical)]
    kind: EtaKind,
    #[arg(long, allow_hyphen_values = true)]
    s: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    r: Option<f64>,
    /// Measure as inline JSON or `@path`.
    #[arg(long)]
    measure: Option<String>,
    /// Comma-separated real values for an explicit eta.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    values: Option<Vec<f64>>,
    /// Generated length is n_max + 1 (ignored for explicit eta).
    #[arg(long)]
    n_max: Option<usize>,
}

fn validation<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Validation(msg.into()))
}

fn read_inline_or_file(arg: &str) -> Result<String, Failure> {
    match arg.strip_prefix('@') {
        Some(p) => fs::read_to_string(p).map_err(|e| Failure::Validation(format!("{p}: {e}"))),
        None => Ok(arg.to_string()),
    }
}

fn parse_measure(arg: &str) -> Result<MeasureSpec, Failure> {
    MeasureSpec::from_json(&read_inline_or_file(arg)?).map_err(Failure::Validation)
}

impl EtaArgs {
    fn source(&self) -> Result<EtaSource, Failure> {
        Ok(match self.kind {
            EtaKind::Classical => EtaSource::Classical,
            EtaKind::PowerLog => match self.s {
                Some(s) => EtaSource::PowerLog {
                    s,
                    r: self.r.unwrap_or(0.0),
                },
                None => return validation("--eta power-log needs --s"),
            },
            EtaKind::Measure => match &self.measure {
                Some(m) => EtaSource::Measure {
                    measure: parse_measure(m)?,
                },
                None => return validation("--eta measure needs --measure"),
            },
            EtaKind::Explicit => match &self.values {
                Some(v) => EtaSource::Explicit {
                    values: v.iter().map(|&x| Scalar::Real(x)).collect(),
                },
                None => return validation("--eta explicit needs --values"),
            },
        })
    }

    fn generate(&self, default_n_max: usize) -> Result<cesaro_core::EtaSeq, Failure> {
        let src = self.source()?;
        let n_max = match src {
            EtaSource::Explicit { ref values } => values.len().saturating_sub(1),
            _ => self.n_max.unwrap_or(default_n_max),
        };
        src.generate(n_max)
    }
}

fn stdout_json(v: &serde_json::Value) -> Result<(), Failure> {
    write_json(io::stdout().lock(), v)
}

fn execute(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Run { config, out, seed } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(d) = out {
                cfg.output.dir = d;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let summary = run(&cfg)?;
            stdout_json(&serde_json::to_value(summary)?)
        }
        Command::Sweep { config, out, seed } => {
            let text = fs::read_to_string(&config)
                .map_err(|e| Failure::Validation(format!("{}: {e}", config.display())))?;
            let mut cfgs: Vec<ExperimentConfig> = serde_json::from_str(&text)
                .map_err(|e| Failure::Validation(format!("{}: {e}", config.display())))?;
            if let Some(s) = seed {
                cfgs.iter_mut().for_each(|c| c.seed = s);
            }
            let rows = sweep(&cfgs, &out)?;
            stdout_json(&json!({"runs": rows.len(), "table": out.join("sweep.csv")}))
        }
        Command::Moments {
            measure,
            n_max,
            out,
        } => {
            let mu = parse_measure(&measure)?;
            let eta = cesaro_core::measure_moments(&mu, n_max)?;
            let sink: Box<dyn Write> = match &out {
                Some(p) => Box::new(BufWriter::new(File::create(p)?)),
                None => Box::new(io::stdout().lock()),
            };
            let mut w = csv::Writer::from_writer(sink);
            w.write_record(["n", "eta"])?;
            for (n, z) in eta.values().iter().enumerate() {
                w.write_record([n.to_string(), fmt_f64(z.re)])?;
            }
            w.flush()?;
            Ok(())
        }
        Command::SectionNorm {
            eta,
            alpha,
            beta,
            n,
            tol,
            max_iter,
            seed,
        } => {
            let e = eta.generate(n)?;
            let mut opts = PowerOptions::default().with_seed(seed);
            if let Some(t) = tol {
                opts = opts.with_tol(t);
            }
            if let Some(m) = max_iter {
                opts.max_iter = m;
            }
            let est = section_norm(&section(&e, alpha, beta, n)?, &opts)?;
            stdout_json(&json!({"N": n, "alpha": alpha, "beta": beta, "estimate": est}))?;
            if !est.converged {
                return Err(Failure::Numerical(format!(
                    "power iteration did not converge at N={n}"
                )));
            }
            Ok(())
        }
        Command::Criterion {
            eta,
            alpha,
            beta,
            min_exp,
            max_exp,
            form,
            csv,
        } => {
            let grid = DyadicGrid::new(min_exp, max_exp)?;
            let e = eta.generate(16 * grid.top())?;
            let rep = match form {
                Form::Tail => criterion(&e, alpha, beta, &grid)?,
                Form::PartialSum => partial_sum_form(&e, alpha, beta, &grid)?,
                Form::Shortcut => decreasing_shortcut(&e, alpha, beta, &grid)?,
            };
            if csv {
                rep.write_csv(io::stdout().lock())?;
                Ok(())
            } else {
                stdout_json(&serde_json::to_value(rep)?)
            }
        }
        Command::Certify { kind } => certify(kind),
    }
}

fn certify(kind: CertifyKind) -> Result<(), Failure> {
    match kind {
        CertifyKind::LowerBound {
            eta,
            alpha,
            beta,
            levels,
        } => {
            if levels < 2 {
                return validation("--levels must be at least 2");
            }
            let e = eta.generate(16usize << levels)?;
            let family = if alpha > 0.0 {
                TestFamily::GBAlpha
            } else {
                TestFamily::HB
            };
            let certs = lower_bound_sweep(&e, alpha, beta, family, 2..=levels)?;
            stdout_json(&serde_json::to_value(certs)?)
        }
        CertifyKind::Schur { kernel, n } => {
            let cert = match kernel {
                Kernel::Log => schur_certify(
                    |j, m| 1.0 / (((j * m) as f64).sqrt() * ((j + m + 1) as f64).ln()),
                    |j| 1.0 / ((j as f64).sqrt() * (1.0 + (j as f64).ln()).sqrt()),
                    n,
                )?,
                Kernel::Hilbert => {
                    schur_certify(|j, m| 1.0 / (j + m) as f64, |j| (j as f64).powf(-0.5), n)?
                }
            };
            stdout_json(&serde_json::to_value(cert)?)
        }
        CertifyKind::Bennett {
            eta,
            alpha,
            beta,
            p,
            min_exp,
            max_exp,
            table,
        } => {
            let grid = DyadicGrid::new(min_exp, max_exp)?;
            let n = grid.top();
            let e = eta.generate(n)?;
            if e.len() <= n {
                return validation(format!("eta has {} entries, grid needs {}", e.len(), n + 1));
            }
            let idx = |k: usize| k as f64;
            let u: Vec<f64> = (1..=n)
                .map(|k| idx(k).powf(1.0 - beta) * e.values()[k].norm_sqr())
                .collect();
            let v: Vec<f64> = (1..=n).map(|k| idx(k).powf(alpha - 1.0)).collect();
            let w: Vec<f64> = (1..=n)
                .map(|k| idx(k).powf(-p) / idx(k).powf(alpha - 1.0))
                .collect();
            let cert = bennett_check(&u, &v, &w, &grid)?;
            if table {
                let mut out = csv::Writer::from_writer(io::stdout().lock());
                out.write_record(["N", "hypothesis_ratio", "conclusion_ratio"])?;
                for r in bennett_table(&u, &v, &w, &grid)? {
                    out.write_record([
                        r.n.to_string(),
                        fmt_f64(r.hypothesis_ratio),
                        fmt_f64(r.conclusion_ratio),
                    ])?;
                }
                out.flush()?;
                Ok(())
            } else {
                stdout_json(&serde_json::to_value(cert)?)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cesaro-lab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
