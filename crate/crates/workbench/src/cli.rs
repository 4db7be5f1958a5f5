//! Command-line front end. Every subcommand writes text by default, or JSON
//! or CSV with the global `--json` and `--csv` flags.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::time::Instant;

use berlu_core::analysis::{
    aggregate_trials, check_probe, estimate_lipschitz, find_critical_init, fit_decay, grad_check,
    grid_away_from_seams, probe_trial, CorrelationTrace, DecayFit, ProbeConfig,
};
use berlu_core::bernstein::mollify;
use berlu_core::trainer::{init_net, train};
use berlu_core::{ActivationSpec, BerLUParams, PiecewiseLinear, TrainConfig};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use crate::bench::{self, bench_suite};
use crate::datasets::{DatasetSource, FileOptions};
use crate::error::{Error, Result};
use crate::io::{self as wio, num, to_json};
use crate::sweep::{self, run_sweep, SweepConfig};

#[derive(Debug, Parser)]
#[command(name = "berlu", version, about = "BerLU activation toolkit")]
pub struct Cli {
    /// Emit JSON.
    #[arg(long, global = true, conflicts_with = "csv")]
    pub json: bool,
    /// Emit CSV.
    #[arg(long, global = true)]
    pub csv: bool,
    /// Seed for every random draw; overrides seeds in config files.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Write the primary output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate an activation and its derivatives at points.
    Eval(EvalArgs),
    /// Smooth every kink of a piecewise-linear function.
    Mollify(MollifyArgs),
    /// Compare analytic derivatives with central differences.
    Gradcheck(GradcheckArgs),
    /// Estimate the Lipschitz constant.
    Lipschitz(LipschitzArgs),
    /// Track input correlation through a deep random network.
    CorrProbe(CorrProbeArgs),
    /// Train a dense classifier.
    Train(TrainArgs),
    /// Sweep BerLU's epsilon and report validation accuracy.
    Sweep(SweepArgs),
    /// Time the vectorised forward and derivative kernels.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct ActArgs {
    /// Activation name.
    #[arg(long = "act", default_value = "berlu", value_parser = parse_act_name)]
    pub act: String,
    /// Negative-side slope (berlu, leaky_relu, prelu).
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Transition half-width (berlu).
    #[arg(long, allow_negative_numbers = true)]
    pub eps: Option<f64>,
    /// Saturation scale (elu, celu).
    #[arg(long, allow_negative_numbers = true)]
    pub scale: Option<f64>,
}

impl ActArgs {
    pub fn spec(&self) -> Result<ActivationSpec> {
        let base = ActivationSpec::from_name(&self.act)
            .ok_or_else(|| Error::Usage(unknown_act(&self.act)))?;
        let reject = |flag: &str| {
            Err(Error::Usage(format!(
                "--{flag} does not apply to {}",
                base.name()
            )))
        };
        let spec = match base {
            ActivationSpec::BerLU(p) => ActivationSpec::BerLU(BerLUParams::with_any_alpha(
                self.alpha.unwrap_or(p.alpha()),
                self.eps.unwrap_or(p.epsilon()),
            )?),
            _ if self.eps.is_some() => return reject("eps"),
            ActivationSpec::LeakyReLU { alpha } => ActivationSpec::LeakyReLU {
                alpha: self.alpha.unwrap_or(alpha),
            },
            ActivationSpec::PReLU { alpha } => ActivationSpec::PReLU {
                alpha: self.alpha.unwrap_or(alpha),
            },
            _ if self.alpha.is_some() => return reject("alpha"),
            ActivationSpec::ELU { scale } => ActivationSpec::ELU {
                scale: self.scale.unwrap_or(scale),
            },
            ActivationSpec::CELU { scale } => ActivationSpec::CELU {
                scale: self.scale.unwrap_or(scale),
            },
            _ if self.scale.is_some() => return reject("scale"),
            other => other,
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub act: ActArgs,
    /// Comma-separated points.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "range")]
    pub x: Option<String>,
    /// Grid `lo:hi:step`, both ends included.
    #[arg(long, allow_hyphen_values = true)]
    pub range: Option<String>,
}

#[derive(Debug, Args)]
pub struct MollifyArgs {
    /// JSON file with `breakpoints`, `slopes` and `value_at_zero`.
    #[arg(long, conflicts_with = "leaky")]
    pub pwl: Option<PathBuf>,
    /// Use leaky ReLU with this slope instead of a file.
    #[arg(long, allow_negative_numbers = true)]
    pub leaky: Option<f64>,
    #[arg(long, default_value_t = berlu_core::activations::DEFAULT_EPSILON)]
    pub eps: f64,
    #[arg(long, default_value_t = 2)]
    pub degree: usize,
    /// Also write dense samples `x,y,dydx` of the smoothed function to this CSV.
    #[arg(long)]
    pub samples_out: Option<PathBuf>,
    #[arg(long, default_value_t = 1001)]
    pub samples: usize,
}

#[derive(Debug, Args)]
pub struct GradcheckArgs {
    #[command(flatten)]
    pub act: ActArgs,
    #[arg(long, default_value = "-5:5", allow_hyphen_values = true)]
    pub range: String,
    #[arg(long, default_value_t = 10_001)]
    pub points: usize,
    #[arg(long, default_value_t = 1e-5)]
    pub step: f64,
    /// Points closer than this to a seam are skipped; defaults to ten steps.
    #[arg(long)]
    pub margin: Option<f64>,
}

#[derive(Debug, Args)]
pub struct LipschitzArgs {
    #[command(flatten)]
    pub act: ActArgs,
    #[arg(long, default_value = "-10:10", allow_hyphen_values = true)]
    pub range: String,
    #[arg(long, default_value_t = 20_001)]
    pub coarse: usize,
    #[arg(long, default_value_t = 100)]
    pub refine: usize,
}

#[derive(Debug, Args)]
pub struct CorrProbeArgs {
    #[command(flatten)]
    pub act: ActArgs,
    #[arg(long, default_value_t = 64)]
    pub depth: usize,
    #[arg(long, default_value_t = 1024)]
    pub width: usize,
    #[arg(long, default_value_t = 32)]
    pub trials: usize,
    #[arg(long, default_value_t = 0.5)]
    pub c0: f64,
    /// Target pre-activation second moment.
    #[arg(long, default_value_t = 1.0)]
    pub q: f64,
    /// Weight variance; solved for criticality when omitted.
    #[arg(long)]
    pub weight_var: Option<f64>,
    /// Inclusive layer range `lo:hi` for the power-law fit.
    #[arg(long, default_value = "8:64")]
    pub fit: String,
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// spirals, moons, csv or idx.
    #[arg(long, default_value = "spirals")]
    pub dataset: String,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = 0.05)]
    pub noise: f64,
    #[arg(long, default_value_t = 1.5)]
    pub turns: f64,
    /// CSV file for `--dataset csv`.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// IDX image file for `--dataset idx`.
    #[arg(long)]
    pub images: Option<PathBuf>,
    /// IDX label file for `--dataset idx`.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Validation fraction for csv and idx data, which otherwise train on everything.
    #[arg(long, default_value_t = 0.0)]
    pub val_fraction: f64,
    /// Standardize csv and idx features.
    #[arg(long)]
    pub standardize: bool,
}

impl DataArgs {
    pub fn source(&self) -> Result<DatasetSource> {
        let need = |p: &Option<PathBuf>, flag: &str| {
            p.clone()
                .ok_or_else(|| Error::Usage(format!("--dataset {} needs --{flag}", self.dataset)))
        };
        let options = FileOptions {
            val_fraction: self.val_fraction,
            standardize: self.standardize,
        };
        Ok(match self.dataset.as_str() {
            "spirals" => DatasetSource::Spirals {
                n: self.n,
                turns: self.turns,
                noise: self.noise,
            },
            "moons" => DatasetSource::Moons {
                n: self.n,
                noise: self.noise,
            },
            "csv" => DatasetSource::Csv {
                path: need(&self.data, "data")?,
                options,
            },
            "idx" => DatasetSource::Idx {
                images: need(&self.images, "images")?,
                labels: need(&self.labels, "labels")?,
                options,
            },
            other => {
                return Err(Error::Usage(format!(
                    "unknown dataset '{other}'; valid: spirals, moons, csv, idx"
                )))
            }
        })
    }
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub act: ActArgs,
    #[command(flatten)]
    pub data: DataArgs,
    /// Comma-separated hidden widths.
    #[arg(long, default_value = "32,32")]
    pub hidden: String,
    /// JSON training config; missing fields take defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Append per-epoch metrics to this CSV.
    #[arg(long)]
    pub metrics_csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// JSON sweep config; missing fields take defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Comma-separated epsilons.
    #[arg(long)]
    pub eps_list: Option<String>,
    #[arg(long)]
    pub seeds: Option<usize>,
    #[arg(long)]
    pub epochs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Activations to time; all when omitted.
    #[arg(long = "act", value_parser = parse_act_name)]
    pub acts: Vec<String>,
    #[arg(long, default_value_t = 10_000_000)]
    pub len: usize,
    #[arg(long, default_value_t = 20)]
    pub reps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Text,
    Json,
    Csv,
}

/// Parses `args`, runs the command and returns the process exit code. Errors
/// are reported on `stderr` as a single line `error: <kind>: <message>`.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = write!(stdout, "{e}");
            return 0;
        }
        Err(e) => {
            let text = e.to_string();
            let line = text
                .lines()
                .next()
                .unwrap_or_default()
                .trim_start_matches("error: ");
            let _ = writeln!(stderr, "error: usage: {line}");
            return 2;
        }
    };
    match run(&cli, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            let _ = writeln!(stderr, "error: {}: {msg}", e.kind());
            1
        }
    }
}

pub fn run(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let format = match (cli.json, cli.csv) {
        (true, _) => Format::Json,
        (_, true) => Format::Csv,
        _ => Format::Text,
    };
    let mut file;
    let out: &mut dyn Write = match &cli.out {
        Some(path) => {
            file = BufWriter::new(File::create(path).map_err(|e| Error::Io {
                path: path.clone(),
                source: e,
            })?);
            &mut file
        }
        None => stdout,
    };
    match &cli.command {
        Command::Eval(a) => cmd_eval(a, format, out),
        Command::Mollify(a) => cmd_mollify(a, format, out),
        Command::Gradcheck(a) => cmd_gradcheck(a, format, out),
        Command::Lipschitz(a) => cmd_lipschitz(a, format, out),
        Command::CorrProbe(a) => cmd_corr_probe(a, cli.seed.unwrap_or(0), format, out),
        Command::Train(a) => cmd_train(a, cli.seed, format, out, stderr),
        Command::Sweep(a) => cmd_sweep(a, cli.seed, format, out),
        Command::Bench(a) => cmd_bench(a, cli.seed.unwrap_or(0), format, out),
    }?;
    out.flush()?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct EvalRow {
    x: f64,
    f: f64,
    dfdx: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    dfdalpha: Option<f64>,
}

fn cmd_eval(a: &EvalArgs, format: Format, out: &mut dyn Write) -> Result<()> {
    let spec = a.act.spec()?;
    let xs = match (&a.x, &a.range) {
        (Some(list), _) => parse_list(list, "--x")?,
        (None, Some(range)) => parse_grid(range)?,
        (None, None) => return Err(Error::Usage("eval needs --x or --range".into())),
    };
    let rows: Vec<EvalRow> = xs
        .into_iter()
        .map(|x| {
            if !x.is_finite() {
                return Err(Error::Core(berlu_core::Error::NonFinite {
                    index: 0,
                    value: x,
                }));
            }
            Ok(EvalRow {
                x,
                f: spec.forward(x),
                dfdx: spec.dx(x),
                dfdalpha: spec.dalpha(x),
            })
        })
        .collect::<Result<_>>()?;
    let learnable = spec.dalpha(0.0).is_some();
    match format {
        Format::Json => out.write_all(to_json(&rows)?.as_bytes())?,
        Format::Csv | Format::Text => {
            let sep = if format == Format::Csv { "," } else { "\t" };
            let mut header = vec!["x", "f", "dfdx"];
            if learnable {
                header.push("dfdalpha");
            }
            writeln!(out, "{}", header.join(sep))?;
            for r in &rows {
                let mut cells = vec![num(r.x), num(r.f), num(r.dfdx)];
                cells.extend(r.dfdalpha.map(num));
                writeln!(out, "{}", cells.join(sep))?;
            }
        }
    }
    Ok(())
}

fn cmd_mollify(a: &MollifyArgs, format: Format, out: &mut dyn Write) -> Result<()> {
    let pwl = match (&a.pwl, a.leaky) {
        (Some(path), _) => wio::read_pwl(path)?,
        (None, Some(alpha)) => PiecewiseLinear::new(vec![0.0], vec![alpha, 1.0], 0.0)?,
        (None, None) => return Err(Error::Usage("mollify needs --pwl or --leaky".into())),
    };
    let smooth = mollify(&pwl, a.eps, a.degree)?;
    if let Some(path) = &a.samples_out {
        let bps = pwl.breakpoints();
        let pad = 2.0 + a.eps;
        let (lo, hi) = match (bps.first(), bps.last()) {
            (Some(&l), Some(&h)) => (l - pad, h + pad),
            _ => (-pad, pad),
        };
        let xs = berlu_core::NumericBuffer::linspace(lo, hi, a.samples.max(2));
        let mut s = String::from("x,y,dydx\n");
        for &x in xs.iter() {
            s.push_str(&format!(
                "{},{},{}\n",
                num(x),
                num(smooth.value(x)),
                num(smooth.derivative(x))
            ));
        }
        std::fs::write(path, s).map_err(|e| Error::Io {
            path: path.clone(),
            source: e,
        })?;
    }
    match format {
        Format::Json => out.write_all(to_json(&smooth)?.as_bytes())?,
        Format::Csv => {
            writeln!(out, "center,epsilon,degree,k,beta")?;
            for t in &smooth.transitions {
                for (k, b) in t.control_points.iter().enumerate() {
                    writeln!(
                        out,
                        "{},{},{},{k},{}",
                        num(t.center),
                        num(t.epsilon),
                        t.degree,
                        num(*b)
                    )?;
                }
            }
        }
        Format::Text => {
            for t in &smooth.transitions {
                let beta: Vec<String> = t.control_points.iter().map(|&b| num(b)).collect();
                writeln!(
                    out,
                    "center {} epsilon {} degree {} beta [{}]",
                    num(t.center),
                    num(t.epsilon),
                    t.degree,
                    beta.join(", ")
                )?;
            }
        }
    }
    Ok(())
}

fn cmd_gradcheck(a: &GradcheckArgs, format: Format, out: &mut dyn Write) -> Result<()> {
    let spec = a.act.spec()?;
    let (lo, hi) = parse_pair(&a.range)?;
    let margin = a.margin.unwrap_or(10.0 * a.step);
    if margin.is_nan() || margin <= a.step {
        return Err(Error::Usage(format!(
            "--margin ({margin}) must exceed --step ({})",
            a.step
        )));
    }
    let xs = grid_away_from_seams(&spec, lo, hi, a.points, margin);
    let report = grad_check(&spec, &xs, a.step)?;
    match format {
        Format::Json => out.write_all(to_json(&report)?.as_bytes())?,
        Format::Csv => {
            writeln!(out, "activation,points,step,max_rel_error,worst_x")?;
            writeln!(
                out,
                "{},{},{},{},{}",
                spec.name(),
                xs.len(),
                num(a.step),
                num(report.max_rel_error),
                num(report.worst_x)
            )?;
        }
        Format::Text => writeln!(
            out,
            "{}: max relative error {:.3e} at x = {} over {} points (step {})",
            spec.name(),
            report.max_rel_error,
            num(report.worst_x),
            xs.len(),
            num(a.step)
        )?,
    }
    Ok(())
}

fn cmd_lipschitz(a: &LipschitzArgs, format: Format, out: &mut dyn Write) -> Result<()> {
    let spec = a.act.spec()?;
    let report = estimate_lipschitz(&spec, parse_pair(&a.range)?, a.coarse, a.refine)?;
    match format {
        Format::Json => out.write_all(to_json(&report)?.as_bytes())?,
        Format::Csv => {
            writeln!(out, "activation,estimate,exact,argmax_x,alpha_outside_unit")?;
            let exact = report.exact.map(num).unwrap_or_default();
            writeln!(
                out,
                "{},{},{exact},{},{}",
                spec.name(),
                num(report.estimate),
                num(report.argmax_x),
                report.alpha_outside_unit
            )?;
        }
        Format::Text => {
            write!(
                out,
                "{}: L = {:.6} at x = {:.6}",
                spec.name(),
                report.estimate,
                report.argmax_x
            )?;
            if let Some(exact) = report.exact {
                write!(out, " (exact {exact})")?;
            }
            writeln!(out)?;
            if report.alpha_outside_unit {
                writeln!(
                    out,
                    "warning: |alpha| > 1, the activation is not non-expansive"
                )?;
            }
        }
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct ProbeOutput {
    activation: ActivationSpec,
    trace: CorrelationTrace,
    fit: DecayFit,
}

/// Runs the correlation probe with trials spread over threads. The result
/// matches the sequential probe bit for bit.
pub fn parallel_probe(
    spec: &ActivationSpec,
    cfg: &ProbeConfig,
    weight_var: Option<f64>,
) -> Result<CorrelationTrace> {
    let weight_var = match weight_var {
        Some(w) => w,
        None => find_critical_init(spec, cfg.target_q)?.weight_var,
    };
    check_probe(spec, cfg, weight_var)?;
    let trials = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|t| probe_trial(spec, cfg, weight_var, t))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(aggregate_trials(cfg, weight_var, &trials))
}

fn cmd_corr_probe(a: &CorrProbeArgs, seed: u64, format: Format, out: &mut dyn Write) -> Result<()> {
    let spec = a.act.spec()?;
    let fit_range = parse_usize_pair(&a.fit)?;
    let cfg = ProbeConfig {
        depth: a.depth,
        width: a.width,
        trials: a.trials,
        c0: a.c0,
        target_q: a.q,
        seed,
    };
    let trace = parallel_probe(&spec, &cfg, a.weight_var)?;
    let fit = fit_decay(&trace, fit_range)?;
    match format {
        Format::Json => out.write_all(
            to_json(&ProbeOutput {
                activation: spec,
                trace,
                fit,
            })?
            .as_bytes(),
        )?,
        Format::Csv => {
            writeln!(out, "layer,one_minus_c")?;
            for (l, v) in trace.one_minus_c.iter().enumerate() {
                writeln!(out, "{},{}", l + 1, num(*v))?;
            }
        }
        Format::Text => {
            writeln!(
                out,
                "{}: sigma_w^2 = {:.6}, 1 - c decays as {:.4} * l^-{:.4} over layers {}..{} (r^2 {:.4})",
                spec.name(),
                trace.init.weight_var,
                fit.coefficient,
                fit.exponent,
                fit.fit_range.0,
                fit.fit_range.1,
                fit.r_squared
            )?;
        }
    }
    Ok(())
}

fn cmd_train(
    a: &TrainArgs,
    seed: Option<u64>,
    format: Format,
    out: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<()> {
    let spec = a.act.spec()?;
    let mut cfg = match &a.config {
        Some(path) => wio::read_train_config(path)?,
        None => TrainConfig::default(),
    };
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    if let Some(epochs) = a.epochs {
        cfg.epochs = epochs;
    }
    let ds = a.data.source()?.load(cfg.seed)?;
    let mut dims = vec![ds.dim()];
    dims.extend(parse_usize_list(&a.hidden, "--hidden")?);
    dims.push(ds.classes);
    let net = init_net(&dims, spec, cfg.seed)?;

    let start = Instant::now();
    let (_, mut report) = train(net, &ds, &cfg)?;
    report.wall_time_s = start.elapsed().as_secs_f64();
    writeln!(stderr, "wall_time_s={:.3}", report.wall_time_s)?;

    if let Some(path) = &a.metrics_csv {
        wio::append_metrics_csv(path, &report)?;
    }
    match format {
        Format::Csv => {
            writeln!(out, "{}", wio::METRICS_HEADER)?;
            for (i, m) in report.per_epoch.iter().enumerate() {
                writeln!(out, "{}", wio::metrics_row(i + 1, m))?;
            }
        }
        Format::Json | Format::Text => wio::write_report(&report, out)?,
    }
    Ok(())
}

fn cmd_sweep(a: &SweepArgs, seed: Option<u64>, format: Format, out: &mut dyn Write) -> Result<()> {
    let mut cfg: SweepConfig = match &a.config {
        Some(path) => wio::read_json(path)?,
        None => SweepConfig::default(),
    };
    if let Some(list) = &a.eps_list {
        cfg.epsilons = parse_list(list, "--eps-list")?;
    }
    if let Some(seeds) = a.seeds {
        cfg.seeds = seeds;
    }
    if let Some(epochs) = a.epochs {
        cfg.train.epochs = epochs;
    }
    if let Some(seed) = seed {
        cfg.base_seed = seed;
    }
    let rows = run_sweep(&cfg)?;
    match format {
        Format::Json => out.write_all(to_json(&rows)?.as_bytes())?,
        Format::Csv | Format::Text => sweep::write_csv(&rows, out)?,
    }
    Ok(())
}

fn cmd_bench(a: &BenchArgs, seed: u64, format: Format, out: &mut dyn Write) -> Result<()> {
    let specs = if a.acts.is_empty() {
        ActivationSpec::all_defaults()
    } else {
        a.acts
            .iter()
            .map(|n| ActivationSpec::from_name(n).ok_or_else(|| Error::Usage(unknown_act(n))))
            .collect::<Result<_>>()?
    };
    let results = bench_suite(&specs, a.len, a.reps, seed)?;
    match format {
        Format::Json => out.write_all(to_json(&results)?.as_bytes())?,
        Format::Csv | Format::Text => bench::write_csv(&results, out)?,
    }
    Ok(())
}

fn unknown_act(name: &str) -> String {
    format!(
        "unknown activation '{name}'; valid: {}",
        ActivationSpec::NAMES.join(", ")
    )
}

fn parse_act_name(name: &str) -> std::result::Result<String, String> {
    match ActivationSpec::from_name(name) {
        Some(_) => Ok(name.to_string()),
        None => Err(unknown_act(name)),
    }
}

fn parse_f64(s: &str, what: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Usage(format!("{what}: cannot parse '{s}' as a number")))
}

fn parse_list(s: &str, what: &str) -> Result<Vec<f64>> {
    s.split(',').map(|p| parse_f64(p, what)).collect()
}

fn parse_usize_list(s: &str, what: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| Error::Usage(format!("{what}: cannot parse '{p}' as a count")))
        })
        .collect()
}

fn parse_pair(s: &str) -> Result<(f64, f64)> {
    match s.split(':').collect::<Vec<_>>()[..] {
        [lo, hi] => Ok((parse_f64(lo, "range")?, parse_f64(hi, "range")?)),
        _ => Err(Error::Usage(format!("expected lo:hi, got '{s}'"))),
    }
}

fn parse_usize_pair(s: &str) -> Result<(usize, usize)> {
    match parse_usize_list(&s.replace(':', ","), "--fit")?[..] {
        [lo, hi] => Ok((lo, hi)),
        _ => Err(Error::Usage(format!("expected lo:hi, got '{s}'"))),
    }
}

/// `lo:hi:step` with both ends included.
fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, step] = parts[..] else {
        return Err(Error::Usage(format!("expected lo:hi:step, got '{s}'")));
    };
    let (lo, hi, step) = (
        parse_f64(lo, "--range")?,
        parse_f64(hi, "--range")?,
        parse_f64(step, "--range")?,
    );
    if !(lo.is_finite() && hi.is_finite() && lo <= hi && step > 0.0) {
        return Err(Error::Usage(format!("invalid grid '{s}'")));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    if count > 10_000_000 {
        return Err(Error::Usage(format!("grid '{s}' has more than 1e7 points")));
    }
    // Scaling an integer offset lands exactly on decimal grids like -0.02:0.02:0.01.
    let base = lo / step;
    Ok((0..count).map(|i| (base + i as f64) * step).collect())
}

/// Entry point for the binary.
pub fn main() -> i32 {
    let stdout = io::stdout();
    let stderr = io::stderr();
    main_with(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_includes_both_ends() {
        assert_eq!(
            parse_grid("-1:1:0.5").unwrap(),
            vec![-1.0, -0.5, 0.0, 0.5, 1.0]
        );
        assert_eq!(parse_grid("0:0:1").unwrap(), vec![0.0]);
        assert!(parse_grid("1:0:0.5").is_err());
        assert!(parse_grid("0:1").is_err());
    }

    #[test]
    fn act_args_apply_overrides() {
        let args = ActArgs {
            act: "berlu".into(),
            alpha: Some(1.5),
            eps: Some(0.1),
            scale: None,
        };
        let spec = args.spec().unwrap();
        assert_eq!(spec.alpha(), Some(1.5));
        let bad = ActArgs {
            act: "gelu".into(),
            alpha: Some(0.1),
            eps: None,
            scale: None,
        };
        assert!(matches!(bad.spec(), Err(Error::Usage(_))));
    }

    #[test]
    fn parallel_probe_matches_sequential() {
        let spec = ActivationSpec::ReLU;
        let cfg = ProbeConfig {
            depth: 16,
            width: 256,
            trials: 8,
            ..ProbeConfig::default()
        };
        let seq = berlu_core::analysis::correlation_probe(&spec, &cfg).unwrap();
        let par = parallel_probe(&spec, &cfg, None).unwrap();
        assert_eq!(seq, par);
    }
}
