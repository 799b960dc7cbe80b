//! Train FABBOO on a synthetic biased stream and print the run summary.
//!
//! cargo run --release --example quickstart

use fabboo::synth::{generate, preset};
use fabboo::{run_prequential, EvalConfig, Fabboo, FabbooConfig, FairnessNotion, Method};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let stream = generate(&preset("paper_synth")?.rescaled(20_000))?;
    let notion = Some(FairnessNotion::StatisticalParity);
    let config = FabbooConfig::for_method(Method::Fabboo, notion, 1000)?;
    let mut model = Fabboo::new(stream.feature_space(), config)?;

    let eval = EvalConfig {
        stride: 2000,
        notion,
        smoothing: 1.0,
    };
    let out = run_prequential(&mut model, stream, &eval)?;

    println!("{:>6} {:>8} {:>8} {:>8}", "t", "bal_acc", "cum_sp", "theta");
    for row in &out.trace {
        println!("{:>6} {:>8.4} {:>8.4} {:>8.4}", row.t, row.metrics.bal_acc, row.cum_metric, row.theta);
    }
    println!();
    print!("{}", out.summary.to_text());
    Ok(())
}
