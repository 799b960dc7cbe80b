//! Load a CSV with a schema and run several shuffles of it.
//!
//! cargo run --release --example csv_dataset

use fabboo::harness::{self, ExperimentConfig};

// A made-up loan book: income and debt drive approval, and applicants of
// group `b` were approved less often for the same profile.
fn loans(n: usize) -> String {
    let mut out = String::from("income,debt,region,group,approved\n");
    let mut state = 7u64;
    let mut next = || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    for _ in 0..n {
        let income = 20.0 + 80.0 * next();
        let debt = 40.0 * next();
        let region = ["north", "south", "east"][(next() * 3.0) as usize];
        let group = if next() < 0.4 { "b" } else { "a" };
        let mut p = (income - debt - 30.0) / 60.0;
        if group == "b" {
            p -= 0.15;
        }
        let approved = if next() < p.clamp(0.05, 0.95) { "yes" } else { "no" };
        out.push_str(&format!("{income:.1},{debt:.1},{region},{group},{approved}\n"));
    }
    out
}

fn main() -> Result<(), fabboo::Error> {
    let dir = tempfile::tempdir()?;
    let csv = dir.path().join("loans.csv");
    std::fs::write(&csv, loans(20_000))?;

    let text = format!(
        "[source]
dataset = {}

[schema]
attributes = income:numeric, debt:numeric, region:categorical
values.region = north, south, east
protected = group
protected_value = b
protected_values = a, b
label = approved
label_value = yes
label_values = yes, no

[model]
method = fabboo
fairness = sp

[run]
shuffles = 5
stride = 1000
out = {}
",
        csv.display(),
        dir.path().join("runs").display()
    );
    let config: ExperimentConfig = text.parse()?;
    let report = harness::run(&config)?;
    print!("{}", report.aggregate);
    println!("traces under {}", config.out.display());
    Ok(())
}
