//! Experiment runner: batches of shuffled runs, aggregation across runs and
//! hyperparameter sweeps, with traces and summaries written to disk.
//!
//! Output layout for `run`:
//!
//! ```text
//! <out>/run-01/trace.csv
//! <out>/run-01/summary.txt
//! ...
//! <out>/aggregate.txt
//! ```
//!
//! Shuffle `i` (0-based) uses seed `seed + i` for every method, so runs of
//! different methods with the same index see the same instance order.

mod config;

use std::fmt;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;

pub use config::{ExperimentConfig, Source};

use crate::ensemble::Fabboo;
use crate::error::{ConfigError, DataError, Error};
use crate::prequential::{run_prequential, write_trace, EvalConfig, RunOutput, Summary};
use crate::stream::{load_csv, Dataset, StreamSource};
use crate::synth;

/// Process exit status for an error: 2 for configuration, 3 for data and
/// 1 for anything else.
pub fn exit_code(error: &Error) -> i32 {
    match error {
        Error::Config(_) => 2,
        Error::Data(_) => 3,
        Error::Io(_) => 1,
    }
}

/// Loaded input shared by all shuffles of a batch.
enum Prepared {
    Dataset(Dataset),
    Generator(synth::GeneratorConfig),
}

impl Prepared {
    fn load(source: &Source) -> Result<Self, Error> {
        Ok(match source {
            Source::Csv { path, schema } => {
                let ds = load_csv(path, schema)?;
                if ds.is_empty() {
                    return Err(DataError::Parse {
                        row: 0,
                        column: String::new(),
                        message: format!("{} has no data rows", path.display()),
                    }
                    .into());
                }
                Prepared::Dataset(ds)
            }
            Source::Preset { name, length } => {
                let g = synth::preset(name)?;
                Prepared::Generator(match length {
                    Some(n) => g.rescaled(*n),
                    None => g,
                })
            }
            Source::Generator(g) => Prepared::Generator(g.clone()),
        })
    }

    fn stream(&self, seed: u64) -> Result<StreamSource, Error> {
        Ok(match self {
            Prepared::Dataset(ds) => ds.shuffle(seed),
            Prepared::Generator(g) => synth::generate(&g.clone().with_seed(seed))?,
        })
    }
}

/// The generator behind a preset or generator source, seeded with
/// `config.seed`. CSV sources have none.
pub fn generator_for(config: &ExperimentConfig) -> Result<synth::GeneratorConfig, Error> {
    match Prepared::load(&config.source)? {
        Prepared::Generator(g) => Ok(g.with_seed(config.seed)),
        Prepared::Dataset(_) => Err(ConfigError::invalid("dataset", "a CSV source has no generator").into()),
    }
}

/// The stream seen by shuffle `index` of `config`.
pub fn stream_for(config: &ExperimentConfig, index: u32) -> Result<StreamSource, Error> {
    Prepared::load(&config.source)?.stream(config.seed + u64::from(index))
}

/// Runs one shuffle in memory.
pub fn run_single(config: &ExperimentConfig, index: u32) -> Result<RunOutput, Error> {
    config.validate()?;
    let prepared = Prepared::load(&config.source)?;
    run_prepared(config, &prepared, index)
}

fn run_prepared(config: &ExperimentConfig, prepared: &Prepared, index: u32) -> Result<RunOutput, Error> {
    let stream = prepared.stream(config.seed + u64::from(index))?;
    let mut model = Fabboo::new(stream.feature_space(), config.model()?)?;
    let eval = EvalConfig {
        stride: config.stride,
        notion: config.notion,
        smoothing: config.smoothing,
    };
    run_prequential(&mut model, stream, &eval).map_err(|aborted| Error::Data(aborted.error))
}

/// Mean and sample standard deviation of one quantity across runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stat {
    pub mean: f64,
    pub std: f64,
}

impl Stat {
    pub fn of(xs: &[f64]) -> Self {
        let n = xs.len() as f64;
        if xs.is_empty() {
            return Self { mean: 0.0, std: 0.0 };
        }
        let mean = xs.iter().sum::<f64>() / n;
        let std = if xs.len() < 2 {
            0.0
        } else {
            (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        };
        Self { mean, std }
    }
}

/// Quantities aggregated across runs, in table order.
pub const AGGREGATE_FIELDS: [&str; 11] = [
    "bal_acc",
    "gmean",
    "recall",
    "kappa",
    "cum_sp",
    "cum_eqop",
    "cum_peq",
    "abs_cum_sp",
    "abs_cum_eqop",
    "abs_cum_peq",
    "seconds",
];

fn field(s: &Summary, name: &str) -> f64 {
    match name {
        "bal_acc" => s.metrics.bal_acc,
        "gmean" => s.metrics.gmean,
        "recall" => s.metrics.recall,
        "kappa" => s.metrics.kappa,
        "cum_sp" => s.cum_sp,
        "cum_eqop" => s.cum_eqop,
        "cum_peq" => s.cum_peq,
        "abs_cum_sp" => s.cum_sp.abs(),
        "abs_cum_eqop" => s.cum_eqop.abs(),
        "abs_cum_peq" => s.cum_peq.abs(),
        "seconds" => s.seconds,
        _ => unreachable!("unknown aggregate field {name}"),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub runs: usize,
    pub stats: Vec<(&'static str, Stat)>,
}

impl Aggregate {
    pub fn of(summaries: &[Summary]) -> Self {
        let stats = AGGREGATE_FIELDS
            .iter()
            .map(|&f| {
                let xs: Vec<f64> = summaries.iter().map(|s| field(s, f)).collect();
                (f, Stat::of(&xs))
            })
            .collect();
        Self {
            runs: summaries.len(),
            stats,
        }
    }

    pub fn get(&self, name: &str) -> Option<Stat> {
        self.stats.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
    }
}

impl fmt::Display for Aggregate {
    /// Whitespace-aligned `metric mean std` table.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# runs={}", self.runs)?;
        writeln!(f, "{:<14} {:>14} {:>14}", "metric", "mean", "std")?;
        for (name, s) in &self.stats {
            writeln!(f, "{:<14} {:>14.6} {:>14.6}", name, s.mean, s.std)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct BatchReport {
    pub summaries: Vec<Summary>,
    pub aggregate: Aggregate,
    pub run_dirs: Vec<PathBuf>,
}

fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<fs::File>) -> std::io::Result<()>) -> Result<(), Error> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    f(&mut w)?;
    w.flush()?;
    Ok(())
}

/// Runs every shuffle of `config` (in parallel), writes traces, summaries
/// and the aggregate table under `config.out`.
pub fn run(config: &ExperimentConfig) -> Result<BatchReport, Error> {
    config.validate()?;
    let prepared = Prepared::load(&config.source)?;
    fs::create_dir_all(&config.out)?;
    let results: Vec<(Summary, PathBuf)> = (0..config.shuffles)
        .into_par_iter()
        .map(|i| -> Result<_, Error> {
            let out = run_prepared(config, &prepared, i)?;
            let dir = config.out.join(format!("run-{:02}", i + 1));
            fs::create_dir_all(&dir)?;
            write_file(&dir.join("trace.csv"), |w| write_trace(w, &out.trace))?;
            write_file(&dir.join("summary.txt"), |w| w.write_all(out.summary.to_text().as_bytes()))?;
            Ok((out.summary, dir))
        })
        .collect::<Result<_, _>>()?;
    let (summaries, run_dirs): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    let aggregate = Aggregate::of(&summaries);
    write_file(&config.out.join("aggregate.txt"), |w| write!(w, "{aggregate}"))?;
    Ok(BatchReport {
        summaries,
        aggregate,
        run_dirs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Learners,
    Lambda,
    Window,
}

impl SweepParam {
    pub fn key(self) -> &'static str {
        match self {
            SweepParam::Learners => "learners",
            SweepParam::Lambda => "lambda",
            SweepParam::Window => "window",
        }
    }
}

impl FromStr for SweepParam {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "n" | "learners" => Ok(SweepParam::Learners),
            "lambda" => Ok(SweepParam::Lambda),
            "m" | "window" => Ok(SweepParam::Window),
            other => Err(ConfigError::invalid("param", format!("cannot sweep `{other}` (use N, lambda or M)"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub value: String,
    pub aggregate: Aggregate,
}

/// Wide CSV: the swept value, then `<field>_mean,<field>_std` pairs.
pub fn sweep_table(param: SweepParam, rows: &[SweepRow]) -> String {
    let mut out = String::from(param.key());
    for f in AGGREGATE_FIELDS {
        out.push_str(&format!(",{f}_mean,{f}_std"));
    }
    out.push('\n');
    for r in rows {
        out.push_str(&r.value);
        for (_, s) in &r.aggregate.stats {
            out.push_str(&format!(",{},{}", s.mean, s.std));
        }
        out.push('\n');
    }
    out
}

/// Runs `config` once per value of `param`, each under
/// `<out>/<param>-<value>/`, and writes `<out>/sweep-<param>.csv`.
pub fn sweep(config: &ExperimentConfig, param: SweepParam, values: &[String]) -> Result<Vec<SweepRow>, Error> {
    if values.is_empty() {
        return Err(ConfigError::invalid("values", "sweep needs at least one value").into());
    }
    let mut rows = Vec::with_capacity(values.len());
    for v in values {
        let mut c = config.clone();
        c.set(param.key(), v)?;
        c.out = config.out.join(format!("{}-{v}", param.key()));
        let report = run(&c)?;
        rows.push(SweepRow {
            value: v.clone(),
            aggregate: report.aggregate,
        });
    }
    fs::create_dir_all(&config.out)?;
    fs::write(config.out.join(format!("sweep-{}.csv", param.key())), sweep_table(param, &rows))?;
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_std() {
        let s = Stat::of(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.mean, 2.5);
        assert!((s.std - (5.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert_eq!(Stat::of(&[7.0]).std, 0.0);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&ConfigError::UnknownKey("x".into()).into()), 2);
        assert_eq!(exit_code(&DataError::MissingColumn("x".into()).into()), 3);
        assert_eq!(exit_code(&std::io::Error::other("disk").into()), 1);
    }

    #[test]
    fn sweep_param_names() {
        assert_eq!("N".parse::<SweepParam>().unwrap(), SweepParam::Learners);
        assert_eq!("M".parse::<SweepParam>().unwrap(), SweepParam::Window);
        assert!("gamma".parse::<SweepParam>().is_err());
    }
}
