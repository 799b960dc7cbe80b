use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fabboo::harness::{self, ExperimentConfig, SweepParam};
use fabboo::{synth, ConfigError, Error};

#[derive(Parser)]
#[command(name = "fabboo", version, about = "Fairness- and imbalance-aware online boosting experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every shuffle of an experiment and write traces and summaries.
    Run(Experiment),
    /// Repeat an experiment for several values of one hyperparameter.
    Sweep {
        #[command(flatten)]
        experiment: Experiment,
        /// N, lambda or M.
        #[arg(long)]
        param: SweepParam,
        /// Comma-separated values, e.g. `500,1000,2000`.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<String>,
    },
    /// Write a synthetic stream to CSV.
    Export {
        #[command(flatten)]
        experiment: Experiment,
        /// Override the stream length, keeping its shape.
        #[arg(long)]
        length: Option<u64>,
    },
    /// Print the configuration after overrides, in file format.
    Show(Experiment),
}

#[derive(Args)]
struct Experiment {
    /// Configuration file; flags below override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Preset name, `csv` or `generator`.
    #[arg(long)]
    dataset: Option<String>,
    #[arg(long)]
    method: Option<String>,
    /// none, sp, eqop or peq.
    #[arg(long)]
    fairness: Option<String>,
    #[arg(long)]
    learners: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long)]
    lambda: Option<String>,
    #[arg(long)]
    window: Option<String>,
    #[arg(long)]
    epsilon: Option<String>,
    #[arg(long)]
    smoothing: Option<String>,
    #[arg(long)]
    chunk: Option<String>,
    #[arg(long)]
    shuffles: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    stride: Option<String>,
    /// Output directory (`export`: output file).
    #[arg(long)]
    out: Option<String>,
}

impl Experiment {
    fn resolve(&self) -> Result<ExperimentConfig, Error> {
        let mut config = match (&self.config, &self.dataset) {
            (Some(path), _) => fs::read_to_string(path)?.parse::<ExperimentConfig>()?,
            (None, Some(name)) => ExperimentConfig::preset(name),
            (None, None) => return Err(ConfigError::invalid("dataset", "pass --config or --dataset").into()),
        };
        let overrides = [
            ("dataset", &self.dataset),
            ("method", &self.method),
            ("fairness", &self.fairness),
            ("learners", &self.learners),
            ("gamma", &self.gamma),
            ("lambda", &self.lambda),
            ("window", &self.window),
            ("epsilon", &self.epsilon),
            ("smoothing", &self.smoothing),
            ("chunk", &self.chunk),
            ("shuffles", &self.shuffles),
            ("seed", &self.seed),
            ("stride", &self.stride),
            ("out", &self.out),
        ];
        let given: Vec<(&str, &str)> = overrides
            .iter()
            .filter(|(key, _)| !(*key == "dataset" && self.config.is_none()))
            .filter_map(|(key, v)| v.as_deref().map(|v| (*key, v)))
            .collect();
        config.set_all(given)?;
        config.validate()?;
        Ok(config)
    }
}

fn execute(command: Command) -> Result<(), Error> {
    let mut stdout = io::stdout().lock();
    match command {
        Command::Run(e) => {
            let config = e.resolve()?;
            let report = harness::run(&config)?;
            write!(stdout, "{}", report.aggregate)?;
        }
        Command::Sweep {
            experiment,
            param,
            values,
        } => {
            let config = experiment.resolve()?;
            let rows = harness::sweep(&config, param, &values)?;
            write!(stdout, "{}", harness::sweep_table(param, &rows))?;
        }
        Command::Export { experiment, length } => {
            if experiment.out.is_none() {
                return Err(ConfigError::invalid("out", "export needs --out FILE").into());
            }
            let config = experiment.resolve()?;
            let mut generator = harness::generator_for(&config)?;
            if let Some(n) = length {
                generator = generator.rescaled(n);
            }
            let stream = synth::generate(&generator)?;
            let schema = generator.schema();
            let writer = BufWriter::new(fs::File::create(&config.out)?);
            fabboo::stream::write_csv(writer, &schema, stream)?;
        }
        Command::Show(e) => write!(stdout, "{}", e.resolve()?.to_text())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(harness::exit_code(&e) as u8)
        }
    }
}
