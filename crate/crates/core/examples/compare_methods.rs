//! Every method on the same shuffle of the same stream.
//!
//! cargo run --release --example compare_methods

use fabboo::harness::{run_single, ExperimentConfig, Source};
use fabboo::{FairnessNotion, Method};

fn main() -> Result<(), fabboo::Error> {
    println!(
        "{:<15} {:>8} {:>8} {:>8} {:>8} {:>8}",
        "method", "bal_acc", "recall", "gmean", "cum_sp", "seconds"
    );
    for method in Method::ALL {
        let mut c = ExperimentConfig::preset("paper_synth");
        c.source = Source::Preset {
            name: "paper_synth".into(),
            length: Some(50_000),
        };
        c.method = method;
        c.notion = match method {
            Method::OsBoost | Method::ImbalanceOnly => None,
            _ => Some(FairnessNotion::StatisticalParity),
        };
        let s = run_single(&c, 0)?.summary;
        println!(
            "{:<15} {:>8.4} {:>8.4} {:>8.4} {:>8.4} {:>8.2}",
            method.as_str(),
            s.metrics.bal_acc,
            s.metrics.recall,
            s.metrics.gmean,
            s.cum_sp,
            s.seconds
        );
    }
    Ok(())
}
