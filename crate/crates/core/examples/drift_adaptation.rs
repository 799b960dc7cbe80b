//! A single Hoeffding tree across a sudden concept flip, with and without
//! subtree replacement.
//!
//! cargo run --release --example drift_adaptation

use fabboo::synth::{generate, preset};
use fabboo::{HoeffdingTree, TreeParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = preset("drift_sudden")?;
    let variants = [("adaptive", TreeParams::default()), ("frozen", TreeParams::default().without_adaptation())];
    let mut accuracy = Vec::new();
    for (name, params) in variants {
        let stream = generate(&cfg)?;
        let mut tree = HoeffdingTree::new(stream.feature_space(), params)?;
        let mut hits = vec![0u32; 10];
        for x in stream {
            if tree.predict(&x.features) == x.label {
                hits[((x.seq - 1) / 5000) as usize] += 1;
            }
            tree.train_weighted(&x.features, x.label, 1.0)?;
        }
        let stats = tree.stats();
        println!(
            "{name:<9} splits {:>3}, alternates {:>2}, replacements {:>2}, final depth {}",
            stats.splits,
            stats.alternates_started,
            stats.replacements,
            tree.depth()
        );
        accuracy.push(hits);
    }
    println!("\nconcept flips at t=25000; accuracy per 5k window");
    println!("{:>13} {:>9} {:>9}", "window", "adaptive", "frozen");
    for w in 0..10 {
        let f = |i: usize| f64::from(accuracy[i][w]) / 5000.0;
        println!("{:>6}-{:<6} {:>9.3} {:>9.3}", w * 5000 + 1, (w + 1) * 5000, f(0), f(1));
    }
    Ok(())
}
