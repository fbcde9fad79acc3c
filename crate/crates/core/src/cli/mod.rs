//! `ghz-sim` command line: `validate`, `ghz` and `sweep`.
//!
//! Exit codes: 0 success, 1 failed check or accuracy/truncation failure,
//! 2 usage or configuration error.

pub mod config;
pub mod validate;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::fock::Label;
use crate::io::{Cell, Format, Table};
use crate::protocol::{protocol_series, sweep, FidelityReport, ProtocolSeries, SweepAxis};
use crate::{Error, Result};

pub use config::{ConfigFile, Overrides, RunConfig, Units};
pub use validate::{run_checks, CheckOutcome, Fault};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Environment variable bounding the sweep thread pool.
pub const THREADS_ENV: &str = "GHZ_SIM_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "ghz-sim",
    version,
    about = "Single-step GHZ generation in trapped-ion cavity QED"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run the self-check suite.
    Validate(ValidateArgs),
    /// Run the protocol once and write the time series.
    Ghz(CommonArgs),
    /// Run the protocol over a range of one parameter.
    Sweep(SweepArgs),
}

#[derive(Args, Debug, Clone, Default)]
pub struct CommonArgs {
    /// JSON configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    pub format: Option<String>,
    /// block, ld, rwa or lab.
    #[arg(long)]
    pub model: Option<String>,
    /// Fock truncation as NxM (phonons x photons).
    #[arg(long)]
    pub shape: Option<String>,
    /// Pulse index p of the operation time t_p.
    #[arg(long)]
    pub p: Option<u32>,
    /// Initial basis state, e.g. g,0,0.
    #[arg(long)]
    pub initial: Option<String>,
    /// Number of time samples.
    #[arg(long)]
    pub samples: Option<usize>,
}

impl CommonArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            output: self.output.clone(),
            format: self.format.clone(),
            model: self.model.clone(),
            shape: self.shape.clone(),
            p: self.p,
            initial: self.initial.clone(),
            samples: self.samples,
        }
    }

    fn load(&self) -> Result<RunConfig> {
        RunConfig::load(self.config.as_deref(), self.overrides())
    }
}

#[derive(Args, Debug, Clone)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Print check names and thresholds without running them.
    #[arg(long)]
    pub list: bool,
    #[arg(long, value_enum, hide = true)]
    pub inject_fault: Option<Fault>,
}

#[derive(Args, Debug, Clone)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// eta_c, eta_l, phi, p, vib_dim, cav_dim or dt.
    #[arg(long)]
    pub axis: String,
    /// `start:stop:step` (inclusive) or `v1,v2,...`; dt in config time units.
    #[arg(long)]
    pub values: String,
}

/// Exit code for a library error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Accuracy { .. } | Error::Truncation { .. } | Error::Model(_) => EXIT_FAILURE,
        _ => EXIT_USAGE,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match &cli.command {
        Command::Validate(a) => cmd_validate(a, out),
        Command::Ghz(a) => cmd_ghz(a, out),
        Command::Sweep(a) => cmd_sweep(a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn cmd_validate(args: &ValidateArgs, out: &mut dyn Write) -> Result<i32> {
    if args.list {
        for (name, threshold) in validate::CHECKS {
            writeln!(out, "{name} < {threshold:e}")?;
        }
        return Ok(EXIT_OK);
    }
    let cfg = args.common.load()?;
    let outcomes = run_checks(&cfg.setup.params, cfg.setup.shape, args.inject_fault)?;
    for c in &outcomes {
        writeln!(out, "{c}")?;
    }
    let failed = outcomes.iter().filter(|c| !c.passed()).count();
    writeln!(out, "{} checks, {failed} failed", outcomes.len())?;
    Ok(if failed == 0 { EXIT_OK } else { EXIT_FAILURE })
}

/// Column-safe spelling of a label: `g_0_0`.
pub fn label_tag(label: Label) -> String {
    label.to_string().replace(',', "_")
}

const US: f64 = 1e6;
const MHZ: f64 = 1e-6;

const SUMMARY_COLUMNS: [&str; 12] = [
    "model",
    "initial",
    "p",
    "t_p_us",
    "time_us",
    "tuned_g_mhz",
    "fidelity",
    "block_leakage",
    "norm",
    "max_truncation_leak",
    "block_m",
    "block_n",
];

fn summary_cells(r: &FidelityReport, block: (usize, usize)) -> Vec<Cell> {
    vec![
        r.model.tag().into(),
        label_tag(r.initial).into(),
        f64::from(r.p).into(),
        (r.t_p * US).into(),
        (r.time * US).into(),
        (r.tuned_g * MHZ).into(),
        r.fidelity.into(),
        r.block_leakage.into(),
        r.norm.into(),
        r.max_truncation_leak.into(),
        (block.0 as f64).into(),
        (block.1 as f64).into(),
    ]
}

/// Time series table: time, active populations, fidelity, norm, leakage.
pub fn series_table(series: &ProtocolSeries) -> Result<Table> {
    let labels = series.active_labels();
    let mut columns = vec!["t_us".to_string()];
    columns.extend(labels.iter().map(|&l| format!("pop_{}", label_tag(l))));
    columns.extend(["fidelity", "norm", "block_leakage"].map(String::from));
    let mut table = Table::new(columns);
    for pt in &series.points {
        let mut row: Vec<Cell> = vec![(pt.t * US).into()];
        for &l in &labels {
            row.push(pt.state.population(l)?.into());
        }
        row.extend([pt.fidelity.into(), pt.norm.into(), pt.block_leakage.into()]);
        table.push(row)?;
    }
    Ok(table)
}

pub fn summary_table(report: &FidelityReport, block: (usize, usize)) -> Result<Table> {
    let mut t = Table::new(SUMMARY_COLUMNS.map(String::from).to_vec());
    t.push(summary_cells(report, block))?;
    Ok(t)
}

/// `run.csv` → `run.summary.csv`.
pub fn summary_path(output: &Path, format: Format) -> PathBuf {
    let stem = output
        .file_stem()
        .map_or_else(|| "ghz".into(), |s| s.to_string_lossy().into_owned());
    output.with_file_name(format!("{stem}.summary.{}", format.extension()))
}

fn emit(table: &Table, format: Format, path: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => table.write_to(p, format),
        None => match format {
            Format::Csv => table.write_csv(out),
            Format::Json => table.write_json(out),
        },
    }
}

fn cmd_ghz(args: &CommonArgs, out: &mut dyn Write) -> Result<i32> {
    let cfg = args.load()?;
    let series = protocol_series(&cfg.setup, cfg.samples)?;
    let r = &series.report;
    emit(
        &series_table(&series)?,
        cfg.format,
        cfg.output.as_deref(),
        out,
    )?;
    if let Some(path) = &cfg.output {
        summary_table(r, cfg.setup.block)?.write_to(&summary_path(path, cfg.format), cfg.format)?;
        writeln!(
            out,
            "model={} initial={} p={} t_p={:.6} us g={:.6} MHz fidelity={:.10} leakage={:.3e}",
            r.model.tag(),
            label_tag(r.initial),
            r.p,
            r.t_p * US,
            r.tuned_g * MHZ,
            r.fidelity,
            r.block_leakage
        )?;
    }
    Ok(EXIT_OK)
}

/// Parses `start:stop:step` (inclusive of `stop` up to rounding) or a comma list.
pub fn parse_values(spec: &str) -> Result<Vec<f64>> {
    let bad = |why: &str| Error::InvalidArgument(format!("bad --values '{spec}': {why}"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad("not a number"));
    let trimmed = spec.trim().trim_start_matches('{').trim_end_matches('}');
    if trimmed.contains(':') {
        let parts: Vec<&str> = trimmed.split(':').collect();
        let [a, b, step] = parts[..] else {
            return Err(bad("range needs start:stop:step"));
        };
        let (a, b, step) = (num(a)?, num(b)?, num(step)?);
        if !step.is_finite() || step <= 0.0 || b < a || !a.is_finite() || !b.is_finite() {
            return Err(bad("need start <= stop and step > 0"));
        }
        let n = ((b - a) / step + 1e-9).floor() as usize;
        if n > 100_000 {
            return Err(bad("too many points"));
        }
        Ok((0..=n).map(|k| a + k as f64 * step).collect())
    } else {
        let vals = trimmed
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(num)
            .collect::<Result<Vec<_>>>()?;
        if vals.is_empty() {
            return Err(bad("no values"));
        }
        Ok(vals)
    }
}

fn thread_pool() -> Result<Option<rayon::ThreadPool>> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(None);
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        Error::Configuration(format!(
            "{THREADS_ENV} must be a positive integer (got '{raw}')"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map(Some)
        .map_err(|e| Error::Configuration(e.to_string()))
}

fn cmd_sweep(args: &SweepArgs, out: &mut dyn Write) -> Result<i32> {
    let cfg = args.common.load()?;
    let axis: SweepAxis = args.axis.parse()?;
    let mut values = parse_values(&args.values)?;
    if axis == SweepAxis::Dt {
        let t = cfg.units.time_scale();
        values.iter_mut().for_each(|v| *v *= t);
    }
    let rows = match thread_pool()? {
        Some(pool) => pool.install(|| sweep(&cfg.setup, axis, &values))?,
        None => sweep(&cfg.setup, axis, &values)?,
    };

    let mut labels: Vec<Label> = rows
        .iter()
        .flat_map(|r| r.report.populations.iter().map(|(l, _)| *l))
        .collect();
    labels.sort();
    labels.dedup();
    let mut columns = vec![axis.name().to_string()];
    columns.extend(SUMMARY_COLUMNS.map(String::from));
    columns.extend(labels.iter().map(|&l| format!("pop_{}", label_tag(l))));
    let mut table = Table::new(columns);
    for (row, &raw) in rows.iter().zip(&reported_values(axis, &values)) {
        let mut cells: Vec<Cell> = vec![raw.into()];
        cells.extend(summary_cells(&row.report, cfg.setup.block));
        for &l in &labels {
            let p = row
                .report
                .populations
                .iter()
                .find(|(x, _)| *x == l)
                .map_or(0.0, |(_, p)| *p);
            cells.push(p.into());
        }
        table.push(cells)?;
    }
    emit(&table, cfg.format, cfg.output.as_deref(), out)?;
    Ok(EXIT_OK)
}

/// Sweep values as reported: dt back in μs, everything else unchanged.
fn reported_values(axis: SweepAxis, values: &[f64]) -> Vec<f64> {
    if axis == SweepAxis::Dt {
        values.iter().map(|v| v * US).collect()
    } else {
        values.to_vec()
    }
}
