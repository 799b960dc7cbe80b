//! Follow the decayed class-imbalance estimate as the class ratio moves.
//!
//! cargo run --release --example imbalance_monitor

use fabboo::ensemble::imbalance_weight;
use fabboo::synth::{generate, preset};
use fabboo::{ImbalanceMonitor, Label};

fn main() -> Result<(), fabboo::ConfigError> {
    let cfg = preset("ratio_increasing")?;
    let mut monitors = [0.5, 0.9, 0.99].map(ImbalanceMonitor::new);
    println!("{:>6} {:>8} {:>9} {:>9} {:>9}", "t", "p(+)", "l=0.5", "l=0.9", "l=0.99");
    for x in generate(&cfg)? {
        for m in &mut monitors {
            m.update(x.label);
        }
        if x.seq % 5000 == 0 {
            let o = monitors.each_ref().map(|m| m.ocis());
            println!("{:>6} {:>8.3} {:>+9.3} {:>+9.3} {:>+9.3}", x.seq, cfg.ratio.at(x.seq), o[0], o[1], o[2]);
        }
    }
    let ocis = monitors[1].ocis();
    println!(
        "\nwith OCIS {ocis:+.3}, a boosting weight of 1 becomes {:.3} for a positive and {:.3} for a negative",
        imbalance_weight(1.0, Label::Positive, ocis),
        imbalance_weight(1.0, Label::Negative, ocis)
    );
    Ok(())
}
