//! Drive a batch from configuration text, override keys the way the CLI
//! flags do, and print the aggregate table.
//!
//! cargo run --release --example config_file

use fabboo::harness::{self, ExperimentConfig};

const CONFIG: &str = "
[source]
dataset = generator

[model]
method = cfbb
fairness = eqop
chunk = 2000

[run]
shuffles = 4
seed = 11
stride = 1000

[generator]
means.neg = 0, 0, 0
means.pos = 1.5, 1, 0
std.neg = 1, 1, 1
std.pos = 1, 1, 1
ratio = 1:0.3
bias = 1:0.1, 20000:0.25
protected_share = 0.5
protected_shrink = 0.2
group_feature = true
length = 20000
drift.0 = sudden 10000 0 | 0, 0, 1 | 0, 0, 1
";

fn main() -> Result<(), fabboo::Error> {
    let dir = tempfile::tempdir()?;
    let mut config: ExperimentConfig = CONFIG.parse()?;
    let out = dir.path().display().to_string();
    config.set_all([("window", "1000"), ("out", out.as_str())])?;
    println!("{}", config.to_text());
    let report = harness::run(&config)?;
    print!("{}", report.aggregate);
    Ok(())
}
