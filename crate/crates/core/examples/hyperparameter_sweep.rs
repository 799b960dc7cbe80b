//! Sweep lambda on a stream whose class ratio keeps changing and report
//! recall and balanced accuracy per value.
//!
//! cargo run --release --example hyperparameter_sweep

use fabboo::harness::{sweep, ExperimentConfig, SweepParam};

fn main() -> Result<(), fabboo::Error> {
    let dir = tempfile::tempdir()?;
    let mut c = ExperimentConfig::preset("ratio_fluctuating");
    c.shuffles = 3;
    c.stride = 5000;
    c.out = dir.path().to_path_buf();
    let values: Vec<String> = ["0.0", "0.2", "0.4", "0.6", "0.8", "0.9", "0.99"].map(String::from).to_vec();
    let rows = sweep(&c, SweepParam::Lambda, &values)?;
    println!("{:>7} {:>16} {:>16} {:>10}", "lambda", "recall", "bal_acc", "|cum_sp|");
    for r in rows {
        let s = |k: &str| r.aggregate.get(k).unwrap();
        println!(
            "{:>7} {:>8.4} ± {:<5.3} {:>8.4} ± {:<5.3} {:>10.4}",
            r.value,
            s("recall").mean,
            s("recall").std,
            s("bal_acc").mean,
            s("bal_acc").std,
            s("abs_cum_sp").mean
        );
    }
    Ok(())
}
