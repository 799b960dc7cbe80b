//! Inspect the bundled stream presets and build a custom generator.
//!
//! cargo run --release --example synthetic_streams

use fabboo::synth::{generate, preset, DriftEvent, DriftKind, GeneratorConfig, Schedule, PRESETS};
use fabboo::{Group, Label};

fn describe(name: &str, cfg: &GeneratorConfig) -> Result<(), fabboo::ConfigError> {
    let xs: Vec<_> = generate(cfg)?.collect();
    let windows = xs.chunks(xs.len().div_ceil(5).max(1));
    let cells: Vec<String> = windows
        .map(|w| {
            let rate = |g: Group| {
                let members: Vec<_> = w.iter().filter(|i| i.group == g).collect();
                members.iter().filter(|i| i.label == Label::Positive).count() as f64 / members.len().max(1) as f64
            };
            let pos = w.iter().filter(|i| i.label == Label::Positive).count() as f64 / w.len() as f64;
            format!("{:.2}/{:+.2}", pos, rate(Group::NonProtected) - rate(Group::Protected))
        })
        .collect();
    println!("{name:<18} {:>7}  {}", xs.len(), cells.join("  "));
    Ok(())
}

fn main() -> Result<(), fabboo::ConfigError> {
    println!("positive share / label bias in five equal windows\n");
    for name in PRESETS {
        describe(name, &preset(name)?)?;
    }

    // Two attributes, a ratio that drifts from 1:1 to 1:4, bias that
    // appears halfway, and a gradual shift of the positive class.
    let mut custom = GeneratorConfig {
        ratio: Schedule::linear(0.5, 0.2, 40_000),
        bias: Schedule::piecewise(vec![(1, 0.0), (20_000, 0.0), (20_001, 0.2)])?,
        ..GeneratorConfig::basic(2, 1.5, 40_000, 3)
    };
    custom.drifts.push(DriftEvent {
        kind: DriftKind::Gradual,
        start: 10_000,
        duration: 10_000,
        shift: [vec![0.0, 0.0], vec![-1.0, 1.0]],
    });
    describe("custom", &custom)?;
    println!("\nmeans at t=1: {:?}, at t=40000: {:?}", custom.means_at(1), custom.means_at(40_000));
    Ok(())
}
