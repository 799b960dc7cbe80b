//! Test-then-train evaluation.
//!
//! For each arriving instance the driver asks the model for a prediction
//! using only the features, group and sequence number, records the outcome
//! in the running metrics, and only then hands the labeled instance to the
//! model for training.

use std::io::Write;
use std::time::Instant;

use crate::error::DataError;
use crate::fairness::{FairnessLedger, FairnessNotion};
use crate::metrics::{ConfusionCounts, Metrics};
use crate::stream::{Group, Instance, Label, Query};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub label: Label,
    /// Confidence in the positive class, in `[0, 1]`.
    pub score: f64,
}

/// Internal state worth tracing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Probe {
    pub ocis: f64,
    pub theta: f64,
}

impl Default for Probe {
    fn default() -> Self {
        Self { ocis: 0.0, theta: 0.5 }
    }
}

pub trait OnlineClassifier {
    fn predict(&self, query: &Query<'_>) -> Prediction;

    /// Trains on the labeled instance. `prediction` is what [`predict`]
    /// returned for it.
    ///
    /// [`predict`]: OnlineClassifier::predict
    fn learn(&mut self, instance: &Instance, prediction: &Prediction) -> Result<(), DataError>;

    fn probe(&self) -> Probe {
        Probe::default()
    }
}

impl<M: OnlineClassifier + ?Sized> OnlineClassifier for Box<M> {
    fn predict(&self, query: &Query<'_>) -> Prediction {
        (**self).predict(query)
    }

    fn learn(&mut self, instance: &Instance, prediction: &Prediction) -> Result<(), DataError> {
        (**self).learn(instance, prediction)
    }

    fn probe(&self) -> Probe {
        (**self).probe()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalConfig {
    /// Emit a trace row whenever `t % stride == 0`.
    pub stride: u64,
    /// Fairness notion reported in the `cum_metric` column. Statistical
    /// parity when `None`.
    pub notion: Option<FairnessNotion>,
    /// Denominator smoothing of the evaluation ledger.
    pub smoothing: f64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            stride: 1,
            notion: None,
            smoothing: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub t: u64,
    pub pred: Label,
    pub label: Label,
    pub group: Group,
    pub ocis: f64,
    pub cum_metric: f64,
    pub theta: f64,
    pub metrics: Metrics,
}

pub const TRACE_HEADER: &str = "t,pred,label,group,ocis,cum_metric,theta,bal_acc,gmean,recall,kappa";

impl TraceRow {
    /// Labels are written as `1` / `-1`, the group as `1` for protected.
    pub fn to_csv(&self) -> String {
        let m = &self.metrics;
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.t,
            self.pred.sign() as i8,
            self.label.sign() as i8,
            u8::from(self.group == Group::Protected),
            self.ocis,
            self.cum_metric,
            self.theta,
            m.bal_acc,
            m.gmean,
            m.recall,
            m.kappa
        )
    }
}

pub fn write_trace<W: Write>(mut out: W, rows: &[TraceRow]) -> std::io::Result<()> {
    writeln!(out, "{TRACE_HEADER}")?;
    for r in rows {
        writeln!(out, "{}", r.to_csv())?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub instances: u64,
    pub counts: ConfusionCounts,
    pub metrics: Metrics,
    pub cum_sp: f64,
    pub cum_eqop: f64,
    pub cum_peq: f64,
    /// Wall-clock time of the evaluation loop.
    pub seconds: f64,
}

impl Summary {
    pub fn cum(&self, notion: FairnessNotion) -> f64 {
        match notion {
            FairnessNotion::StatisticalParity => self.cum_sp,
            FairnessNotion::EqualOpportunity => self.cum_eqop,
            FairnessNotion::PredictiveEquality => self.cum_peq,
        }
    }

    /// `key=value` lines, one per field.
    pub fn to_text(&self) -> String {
        let c = &self.counts;
        let m = &self.metrics;
        format!(
            "instances={}\ntp={}\nfp={}\ntn={}\nfn={}\nbal_acc={}\ngmean={}\nrecall={}\nkappa={}\ncum_sp={}\ncum_eqop={}\ncum_peq={}\nseconds={}\n",
            self.instances, c.tp, c.fp, c.tn, c.fn_, m.bal_acc, m.gmean, m.recall, m.kappa, self.cum_sp, self.cum_eqop, self.cum_peq, self.seconds
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub trace: Vec<TraceRow>,
    pub summary: Summary,
}

/// A run that stopped early. `partial` covers every instance processed
/// before the failure.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("run aborted after {} instances: {error}", .partial.summary.instances)]
pub struct RunAborted {
    pub error: DataError,
    pub partial: RunOutput,
}

struct Tally {
    counts: ConfusionCounts,
    ledger: FairnessLedger,
    instances: u64,
}

impl Tally {
    fn summary(&self, seconds: f64) -> Summary {
        Summary {
            instances: self.instances,
            counts: self.counts,
            metrics: self.counts.metrics(),
            cum_sp: self.ledger.cumulative_fairness(FairnessNotion::StatisticalParity).value,
            cum_eqop: self.ledger.cumulative_fairness(FairnessNotion::EqualOpportunity).value,
            cum_peq: self.ledger.cumulative_fairness(FairnessNotion::PredictiveEquality).value,
            seconds,
        }
    }
}

/// Runs `model` over `source` in test-then-train order.
pub fn run_prequential<M, I>(model: &mut M, source: I, config: &EvalConfig) -> Result<RunOutput, RunAborted>
where
    M: OnlineClassifier + ?Sized,
    I: IntoIterator<Item = Instance>,
{
    let stride = config.stride.max(1);
    let notion = config.notion.unwrap_or(FairnessNotion::StatisticalParity);
    let mut tally = Tally {
        counts: ConfusionCounts::default(),
        ledger: FairnessLedger::cumulative(config.smoothing),
        instances: 0,
    };
    let mut trace = Vec::new();
    let mut previous: Option<u64> = None;
    let start = Instant::now();

    for instance in source {
        if let Some(prev) = previous {
            if instance.seq <= prev {
                let error = DataError::Sequence {
                    previous: prev,
                    got: instance.seq,
                };
                return Err(abort(error, trace, &tally, start));
            }
        }
        previous = Some(instance.seq);

        let prediction = model.predict(&instance.query());
        tally.counts.update(instance.label, prediction.label);
        tally.ledger.record(instance.group, instance.label, prediction.label);
        tally.instances += 1;

        if let Err(error) = model.learn(&instance, &prediction) {
            return Err(abort(error, trace, &tally, start));
        }

        let t = tally.instances;
        if t.is_multiple_of(stride) {
            let probe = model.probe();
            trace.push(TraceRow {
                t,
                pred: prediction.label,
                label: instance.label,
                group: instance.group,
                ocis: probe.ocis,
                cum_metric: tally.ledger.cumulative_fairness(notion).value,
                theta: probe.theta,
                metrics: tally.counts.metrics(),
            });
        }
    }

    let seconds = start.elapsed().as_secs_f64();
    Ok(RunOutput {
        trace,
        summary: tally.summary(seconds),
    })
}

fn abort(error: DataError, trace: Vec<TraceRow>, tally: &Tally, start: Instant) -> RunAborted {
    RunAborted {
        error,
        partial: RunOutput {
            trace,
            summary: tally.summary(start.elapsed().as_secs_f64()),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::Value;
    use std::cell::RefCell;
    use std::rc::Rc;
    use Label::{Negative as N, Positive as P};

    fn inst(seq: u64, label: Label, group: Group) -> Instance {
        Instance {
            features: vec![Value::Num(seq as f64)],
            group,
            label,
            seq,
        }
    }

    fn stream(labels: &[Label]) -> Vec<Instance> {
        labels
            .iter()
            .enumerate()
            .map(|(i, &y)| inst(i as u64 + 1, y, if i % 2 == 0 { Group::Protected } else { Group::NonProtected }))
            .collect()
    }

    struct Constant(Label);

    impl OnlineClassifier for Constant {
        fn predict(&self, _: &Query<'_>) -> Prediction {
            Prediction {
                label: self.0,
                score: if self.0 == P { 1.0 } else { 0.0 },
            }
        }
        fn learn(&mut self, _: &Instance, _: &Prediction) -> Result<(), DataError> {
            Ok(())
        }
    }

    /// Predicts the label it will be told, by peeking at a shared record of
    /// the stream. Only used to get a perfect predictor.
    struct Oracle(Vec<Label>);

    impl OnlineClassifier for Oracle {
        fn predict(&self, q: &Query<'_>) -> Prediction {
            let label = self.0[q.seq as usize - 1];
            Prediction { label, score: 0.5 + label.sign() / 2.0 }
        }
        fn learn(&mut self, _: &Instance, _: &Prediction) -> Result<(), DataError> {
            Ok(())
        }
    }

    #[derive(Debug, PartialEq)]
    enum Call {
        Predict(u64),
        Learn(u64),
    }

    struct Spy(Rc<RefCell<Vec<Call>>>);

    impl OnlineClassifier for Spy {
        fn predict(&self, q: &Query<'_>) -> Prediction {
            self.0.borrow_mut().push(Call::Predict(q.seq));
            Prediction { label: N, score: 0.0 }
        }
        fn learn(&mut self, i: &Instance, _: &Prediction) -> Result<(), DataError> {
            self.0.borrow_mut().push(Call::Learn(i.seq));
            Ok(())
        }
    }

    #[test]
    fn constant_positive_counts() {
        let out = run_prequential(&mut Constant(P), stream(&[P, N, P]), &EvalConfig::default()).unwrap();
        let c = out.summary.counts;
        assert_eq!((c.tp, c.fp, c.tn, c.fn_), (2, 1, 0, 0));
        assert_eq!(out.summary.metrics.recall, 1.0);
    }

    #[test]
    fn perfect_oracle() {
        let labels: Vec<Label> = (0..50).map(|i| if i % 3 == 0 { P } else { N }).collect();
        let out = run_prequential(&mut Oracle(labels.clone()), stream(&labels), &EvalConfig::default()).unwrap();
        assert_eq!(out.summary.metrics.bal_acc, 1.0);
        assert_eq!(out.summary.metrics.kappa, 1.0);
    }

    #[test]
    fn stride_controls_rows() {
        let labels = vec![P; 100];
        let out = run_prequential(&mut Constant(N), stream(&labels), &EvalConfig::default()).unwrap();
        assert_eq!(out.trace.len(), 100);
        let cfg = EvalConfig { stride: 7, ..EvalConfig::default() };
        let out = run_prequential(&mut Constant(N), stream(&labels), &cfg).unwrap();
        assert_eq!(out.trace.len(), 14);
        assert_eq!(out.trace[0].t, 7);
    }

    #[test]
    fn predict_precedes_learn() {
        let log = Rc::new(RefCell::new(Vec::new()));
        run_prequential(&mut Spy(log.clone()), stream(&[P, N, N, P]), &EvalConfig::default()).unwrap();
        let expected: Vec<Call> = (1..=4).flat_map(|s| [Call::Predict(s), Call::Learn(s)]).collect();
        assert_eq!(*log.borrow(), expected);
    }

    #[test]
    fn out_of_order_sequence_aborts_with_partial_trace() {
        let mut xs = stream(&[P, N, P, N]);
        xs[2].seq = 1;
        let err = run_prequential(&mut Constant(P), xs, &EvalConfig::default()).unwrap_err();
        assert_eq!(err.error, DataError::Sequence { previous: 2, got: 1 });
        assert_eq!(err.partial.trace.len(), 2);
        assert_eq!(err.partial.summary.instances, 2);
    }

    #[test]
    fn counts_match_trace() {
        let labels: Vec<Label> = (0..40).map(|i| if i % 4 == 1 { P } else { N }).collect();
        struct Alternating;
        impl OnlineClassifier for Alternating {
            fn predict(&self, q: &Query<'_>) -> Prediction {
                let label = if q.seq % 3 == 0 { P } else { N };
                Prediction { label, score: 0.5 }
            }
            fn learn(&mut self, _: &Instance, _: &Prediction) -> Result<(), DataError> {
                Ok(())
            }
        }
        let out = run_prequential(&mut Alternating, stream(&labels), &EvalConfig::default()).unwrap();
        let mut offline = ConfusionCounts::default();
        for r in &out.trace {
            offline.update(r.label, r.pred);
        }
        assert_eq!(offline, out.summary.counts);
        assert_eq!(offline.metrics(), out.summary.metrics);
    }

    #[test]
    fn trace_csv_layout() {
        let row = TraceRow {
            t: 3,
            pred: P,
            label: N,
            group: Group::Protected,
            ocis: -0.25,
            cum_metric: 0.5,
            theta: 0.5,
            metrics: Metrics::default(),
        };
        assert_eq!(row.to_csv(), "3,1,-1,1,-0.25,0.5,0.5,0,0,0,0");
        let mut buf = Vec::new();
        write_trace(&mut buf, &[row]).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with(TRACE_HEADER));
    }
}
