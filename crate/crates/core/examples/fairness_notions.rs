//! The three parity notions, each enforced in turn, plus the ledger arithmetic
//! behind the boundary shift.
//!
//! cargo run --release --example fairness_notions

use fabboo::fairness::GroupCounts;
use fabboo::harness::{run_single, ExperimentConfig, Source};
use fabboo::{FairnessLedger, FairnessNotion, Method};

fn main() -> Result<(), fabboo::Error> {
    // 100 protected and 300 non-protected arrivals; the model predicts
    // positive for 20 and 120 of them.
    let counts = |seen, seen_pos, pred_pos, tp, tn| GroupCounts {
        seen,
        seen_pos,
        seen_neg: seen - seen_pos,
        pred_pos,
        pred_pos_given_pos: tp,
        pred_neg_given_neg: tn,
    };
    let ledger = FairnessLedger::from_counts(counts(100, 30, 20, 15, 65), counts(300, 130, 120, 100, 150), 1.0);
    for notion in FairnessNotion::ALL {
        println!(
            "{notion:>4}: discrimination {:+.4}, flips to parity {:?}",
            ledger.cumulative_fairness(notion).value,
            ledger.required_flips(notion)
        );
    }
    println!();

    let mut base = ExperimentConfig::preset("paper_synth");
    base.source = Source::Preset {
        name: "paper_synth".into(),
        length: Some(50_000),
    };
    base.method = Method::ImbalanceOnly;
    base.notion = None;
    let plain = run_single(&base, 0)?.summary;

    println!("{:<10} {:>9} {:>9} {:>9} {:>8}", "enforced", "cum_sp", "cum_eqop", "cum_peq", "bal_acc");
    println!(
        "{:<10} {:>9.4} {:>9.4} {:>9.4} {:>8.4}",
        "none", plain.cum_sp, plain.cum_eqop, plain.cum_peq, plain.metrics.bal_acc
    );
    for notion in FairnessNotion::ALL {
        let mut c = base.clone();
        c.method = Method::Fabboo;
        c.notion = Some(notion);
        let s = run_single(&c, 0)?.summary;
        println!(
            "{:<10} {:>9.4} {:>9.4} {:>9.4} {:>8.4}",
            notion.as_str(),
            s.cum_sp,
            s.cum_eqop,
            s.cum_peq,
            s.metrics.bal_acc
        );
    }
    Ok(())
}
