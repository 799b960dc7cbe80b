//! Fairness- and imbalance-aware online boosting.
//!
//! The ensemble trains `N` Hoeffding trees sequentially on every instance.
//! Each tree sees the instance with a weight derived from how well its
//! predecessors already handle it (online smooth boosting), optionally
//! rescaled by the current class imbalance so minority instances count for
//! more. Predictions average the trees' margins into a confidence score.
//!
//! For fairness, the ensemble tracks a cumulative discrimination score for
//! one notion. When the protected group falls behind by more than `epsilon`
//! it lowers the protected group's decision boundary to the confidence of
//! the `n`-th most confident recently rejected protected instance, where
//! `n` is the number of decisions that would need to flip to restore parity.

mod window;

use std::fmt;
use std::str::FromStr;

pub use window::BoundaryWindow;

use crate::error::{ConfigError, DataError};
use crate::fairness::{FairnessLedger, FairnessNotion, LedgerMode};
use crate::imbalance::ImbalanceMonitor;
use crate::prequential::{OnlineClassifier, Prediction, Probe};
use crate::stream::{FeatureSpace, Group, Instance, Label, Query, Value};
use crate::tree::{HoeffdingTree, TreeParams};

/// Smallest divisor used when rescaling weights by `1 +- OCIS`.
pub const MIN_DIVISOR: f64 = 1e-3;

/// What a weak learner contributes to the boosting recurrence and the vote.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WeakOutput {
    /// The tree's margin in `[-1, 1]`.
    #[default]
    Margin,
    /// `+1` or `-1`.
    Hard,
}

/// Named learner variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Imbalance weighting plus cumulative fairness.
    Fabboo,
    /// Plain online smooth boosting.
    OsBoost,
    /// Fairness without imbalance weighting.
    Ofib,
    /// FABBOO with chunk-based instead of cumulative fairness.
    Cfbb,
    /// Imbalance weighting only.
    ImbalanceOnly,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::Fabboo, Method::OsBoost, Method::Ofib, Method::Cfbb, Method::ImbalanceOnly];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Fabboo => "fabboo",
            Method::OsBoost => "osboost",
            Method::Ofib => "ofib",
            Method::Cfbb => "cfbb",
            Method::ImbalanceOnly => "imbalance_only",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| ConfigError::invalid("method", format!("unknown method `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FabbooConfig {
    /// Number of weak learners `N`.
    pub learners: usize,
    /// Boosting edge `gamma` in `(0, 1)`.
    pub gamma: f64,
    /// Decay of the class-imbalance monitor.
    pub lambda: f64,
    /// Capacity `M` of the boundary window.
    pub window: usize,
    /// Discrimination tolerance.
    pub epsilon: f64,
    /// Denominator smoothing `l` of the fairness ledger.
    pub smoothing: f64,
    pub imbalance_adjust: bool,
    pub notion: Option<FairnessNotion>,
    pub ledger: LedgerMode,
    pub weak_output: WeakOutput,
    pub tree: TreeParams,
}

impl Default for FabbooConfig {
    fn default() -> Self {
        Self {
            learners: 20,
            gamma: 0.1,
            lambda: 0.9,
            window: 2000,
            epsilon: 1e-4,
            smoothing: 1.0,
            imbalance_adjust: true,
            notion: Some(FairnessNotion::StatisticalParity),
            ledger: LedgerMode::Cumulative,
            weak_output: WeakOutput::Margin,
            tree: TreeParams::default(),
        }
    }
}

pub const DEFAULT_CHUNK: u64 = 1000;

impl FabbooConfig {
    /// Defaults for `method` monitoring `notion`. Methods without a fairness
    /// component reject a notion; `chunk` only matters for [`Method::Cfbb`].
    pub fn for_method(method: Method, notion: Option<FairnessNotion>, chunk: u64) -> Result<Self, ConfigError> {
        let base = Self::default();
        let (imbalance_adjust, fair, ledger) = match method {
            Method::Fabboo => (true, true, LedgerMode::Cumulative),
            Method::OsBoost => (false, false, LedgerMode::Cumulative),
            Method::Ofib => (false, true, LedgerMode::Cumulative),
            Method::Cfbb => (true, true, LedgerMode::Chunked(chunk)),
            Method::ImbalanceOnly => (true, false, LedgerMode::Cumulative),
        };
        if !fair && notion.is_some() {
            return Err(ConfigError::invalid(
                "fairness",
                format!("method {method} does not support a fairness notion"),
            ));
        }
        let cfg = Self {
            imbalance_adjust,
            notion,
            ledger,
            ..base
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.learners == 0 {
            return Err(ConfigError::invalid("learners", "need at least one learner"));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(ConfigError::invalid("gamma", "must lie strictly between 0 and 1"));
        }
        if !(0.0..1.0).contains(&self.lambda) {
            return Err(ConfigError::invalid("lambda", "must lie in [0, 1)"));
        }
        if self.window == 0 {
            return Err(ConfigError::invalid("window", "must be at least 1"));
        }
        if !(self.epsilon >= 0.0) {
            return Err(ConfigError::invalid("epsilon", "must be nonnegative"));
        }
        if !(self.smoothing >= 0.0 && self.smoothing.is_finite()) {
            return Err(ConfigError::invalid("smoothing", "must be nonnegative"));
        }
        if self.ledger == LedgerMode::Chunked(0) {
            return Err(ConfigError::invalid("chunk", "must be at least 1"));
        }
        self.tree.validate()
    }
}

/// Rescales a boosting weight so the class that is currently rarer
/// (by the sign of `ocis`) weighs more.
pub fn imbalance_weight(w: f64, label: Label, ocis: f64) -> f64 {
    let divisor = match label {
        Label::Positive => 1.0 + ocis,
        Label::Negative => 1.0 - ocis,
    };
    w / divisor.max(MIN_DIVISOR)
}

/// Protected-group decision boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Boundary {
    /// Everyone is classified by `score >= 0.5`.
    Neutral,
    /// Protected instances are compared against this threshold.
    Adjusted(f64),
}

impl Boundary {
    pub fn theta(self) -> f64 {
        match self {
            Boundary::Neutral => 0.5,
            Boundary::Adjusted(t) => t,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Fabboo {
    config: FabbooConfig,
    learners: Vec<HoeffdingTree>,
    monitor: ImbalanceMonitor,
    ledger: FairnessLedger,
    window: BoundaryWindow,
    boundary: Boundary,
}

impl Fabboo {
    pub fn new(space: FeatureSpace, config: FabbooConfig) -> Result<Self, ConfigError> {
        config.validate()?;
        let learners = (0..config.learners)
            .map(|_| HoeffdingTree::new(space.clone(), config.tree))
            .collect::<Result<_, _>>()?;
        Ok(Self {
            monitor: ImbalanceMonitor::new(config.lambda),
            ledger: FairnessLedger::new(config.smoothing, config.ledger),
            window: BoundaryWindow::new(config.window),
            boundary: Boundary::Neutral,
            learners,
            config,
        })
    }

    pub fn config(&self) -> &FabbooConfig {
        &self.config
    }

    pub fn learners(&self) -> &[HoeffdingTree] {
        &self.learners
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn theta(&self) -> f64 {
        self.boundary.theta()
    }

    pub fn ocis(&self) -> f64 {
        self.monitor.ocis()
    }

    pub fn ledger(&self) -> &FairnessLedger {
        &self.ledger
    }

    pub fn window(&self) -> &BoundaryWindow {
        &self.window
    }

    fn weak(&self, tree: &HoeffdingTree, x: &[Value]) -> f64 {
        let m = tree.predict_margin(x);
        match self.config.weak_output {
            WeakOutput::Margin => m,
            WeakOutput::Hard => {
                if m >= 0.0 {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }

    /// Ensemble confidence in the positive class: `(1 + mean output) / 2`.
    pub fn score(&self, features: &[Value]) -> f64 {
        let sum: f64 = self.learners.iter().map(|t| self.weak(t, features)).sum();
        (1.0 + sum / self.learners.len() as f64) / 2.0
    }

    /// Applies the decision rule to a precomputed score.
    pub fn decide(&self, score: f64, group: Group) -> Label {
        let positive = |b: bool| if b { Label::Positive } else { Label::Negative };
        match (self.boundary, self.config.notion, group) {
            (Boundary::Adjusted(theta), Some(notion), Group::Protected) => match notion {
                FairnessNotion::PredictiveEquality => positive(1.0 - score < theta),
                _ => positive(score >= theta),
            },
            _ => positive(score >= 0.5),
        }
    }

    pub fn classify(&self, features: &[Value], group: Group) -> Label {
        self.decide(self.score(features), group)
    }

    /// One boosting pass: learner `i` is trained with the weight produced by
    /// learners `1..i`, rescaled by `1 +- ocis` when imbalance adjustment is on.
    pub fn train(&mut self, features: &[Value], label: Label, ocis: f64) -> Result<(), DataError> {
        let gamma = self.config.gamma;
        let y = label.sign();
        let mut w = 1.0;
        let mut q = 0.0;
        for i in 0..self.learners.len() {
            self.learners[i].train_weighted(features, label, w)?;
            q += y * self.weak(&self.learners[i], features) - gamma / (2.0 + gamma);
            w = (1.0 - gamma).powf(q / 2.0).min(1.0);
            if self.config.imbalance_adjust {
                w = imbalance_weight(w, label, ocis);
            }
        }
        Ok(())
    }

    /// Records the outcome in the window and recomputes the boundary.
    /// Expects the ledger to already include this outcome.
    pub fn observe_and_adjust(&mut self, instance: &Instance, prediction: &Prediction) -> f64 {
        let Some(notion) = self.config.notion else {
            self.boundary = Boundary::Neutral;
            return self.theta();
        };
        if instance.group == Group::Protected {
            let entry = match notion {
                FairnessNotion::StatisticalParity => {
                    (prediction.label == Label::Negative).then_some(prediction.score)
                }
                FairnessNotion::EqualOpportunity => {
                    (instance.label == Label::Positive && prediction.label == Label::Negative).then_some(prediction.score)
                }
                FairnessNotion::PredictiveEquality => (instance.label == Label::Negative
                    && prediction.label == Label::Positive)
                    .then_some(1.0 - prediction.score),
            };
            if let Some(c) = entry {
                self.window.push(c, instance.seq);
            }
        }

        self.boundary = Boundary::Neutral;
        if self.ledger.cumulative_fairness(notion).value > self.config.epsilon {
            if let Ok(n) = self.ledger.required_flips(notion) {
                if n > 0 {
                    if let Some(theta) = self.window.nth_highest(n as usize) {
                        self.boundary = Boundary::Adjusted(theta);
                    }
                }
            }
        }
        self.theta()
    }
}

impl OnlineClassifier for Fabboo {
    fn predict(&self, query: &Query<'_>) -> Prediction {
        let score = self.score(query.features);
        Prediction {
            label: self.decide(score, query.group),
            score,
        }
    }

    fn learn(&mut self, instance: &Instance, prediction: &Prediction) -> Result<(), DataError> {
        self.monitor.update(instance.label);
        self.ledger.record(instance.group, instance.label, prediction.label);
        self.train(&instance.features, instance.label, self.monitor.ocis())?;
        self.observe_and_adjust(instance, prediction);
        Ok(())
    }

    fn probe(&self) -> Probe {
        Probe {
            ocis: self.ocis(),
            theta: self.theta(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fairness::GroupCounts;
    use crate::stream::FeatureKind;
    use Label::{Negative as N, Positive as P};

    fn space() -> FeatureSpace {
        vec![FeatureKind::Numeric].into()
    }

    fn model(notion: Option<FairnessNotion>) -> Fabboo {
        let cfg = FabbooConfig {
            notion,
            ..FabbooConfig::default()
        };
        Fabboo::new(space(), cfg).unwrap()
    }

    fn instance(group: Group, label: Label, seq: u64) -> Instance {
        Instance {
            features: vec![Value::Num(0.0)],
            group,
            label,
            seq,
        }
    }

    #[test]
    fn empty_ensemble_scores_half() {
        let m = model(None);
        assert_eq!(m.score(&[Value::Num(3.0)]), 0.5);
        assert_eq!(m.theta(), 0.5);
    }

    #[test]
    fn method_table() {
        let sp = Some(FairnessNotion::StatisticalParity);
        assert!(FabbooConfig::for_method(Method::OsBoost, sp, 1000).is_err());
        assert!(FabbooConfig::for_method(Method::ImbalanceOnly, sp, 1000).is_err());
        let c = FabbooConfig::for_method(Method::Cfbb, sp, 500).unwrap();
        assert_eq!(c.ledger, LedgerMode::Chunked(500));
        let o = FabbooConfig::for_method(Method::Ofib, sp, 500).unwrap();
        assert!(!o.imbalance_adjust && o.notion == sp);
        for m in Method::ALL {
            assert_eq!(m.as_str().parse::<Method>().unwrap(), m);
        }
    }

    #[test]
    fn weight_recurrence_first_step() {
        let gamma: f64 = 0.1;
        let q1 = 1.0 - gamma / (2.0 + gamma);
        assert!((q1 - 0.952_38).abs() < 1e-5);
        let w2 = (1.0 - gamma).powf(q1 / 2.0).min(1.0);
        assert!((w2 - 0.951_06).abs() < 1e-5);
    }

    /// Captures the per-learner weights by replaying `train` against the
    /// recorded class weights of fresh learners.
    fn weights_seen(m: &Fabboo) -> Vec<f64> {
        m.learners
            .iter()
            .map(|t| {
                // With a single training call, each root leaf holds exactly
                // the weight it was given; the margin encodes it.
                let margin = t.predict_margin(&[Value::Num(0.0)]);
                // margin = 2 (w + 1) / (w + 2) - 1  =>  w = 2 m / (1 - m)
                2.0 * margin / (1.0 - margin)
            })
            .collect()
    }

    #[test]
    fn imbalance_rescaling() {
        let mut plain = Fabboo::new(space(), FabbooConfig { imbalance_adjust: false, ..FabbooConfig::default() }).unwrap();
        let mut adj = Fabboo::new(space(), FabbooConfig::default()).unwrap();
        plain.train(&[Value::Num(0.0)], P, -0.5).unwrap();
        adj.train(&[Value::Num(0.0)], P, -0.5).unwrap();
        let wp = weights_seen(&plain);
        let wa = weights_seen(&adj);
        // The first learner always gets weight 1; the second gets the same
        // base weight in both models, divided by 1 + ocis when adjusting.
        // Later learners diverge because their predecessors saw different weights.
        assert!((wa[0] - 1.0).abs() < 1e-9 && (wp[0] - 1.0).abs() < 1e-9);
        assert!((wa[1] - wp[1] / 0.5).abs() < 1e-9, "{} vs {}", wa[1], wp[1]);
    }

    #[test]
    fn imbalance_weight_examples() {
        assert!((imbalance_weight(0.8, P, -0.5) - 1.6).abs() < 1e-15);
        assert!((imbalance_weight(0.8, N, -0.5) - 0.8 / 1.5).abs() < 1e-15);
        assert_eq!(imbalance_weight(0.8, P, 0.0), 0.8);
        assert_eq!(imbalance_weight(0.5, P, -1.0), 0.5 / MIN_DIVISOR);
    }

    #[test]
    fn balanced_ocis_is_identity() {
        let mut plain = Fabboo::new(space(), FabbooConfig { imbalance_adjust: false, ..FabbooConfig::default() }).unwrap();
        let mut adj = Fabboo::new(space(), FabbooConfig::default()).unwrap();
        for (i, y) in [P, N, N, P, N].into_iter().enumerate() {
            let x = [Value::Num(i as f64)];
            plain.train(&x, y, 0.0).unwrap();
            adj.train(&x, y, 0.0).unwrap();
        }
        for i in 0..5 {
            let x = [Value::Num(i as f64 + 0.5)];
            assert_eq!(plain.score(&x).to_bits(), adj.score(&x).to_bits());
        }
    }

    #[test]
    fn extreme_ocis_is_clamped() {
        let mut m = Fabboo::new(space(), FabbooConfig::default()).unwrap();
        m.train(&[Value::Num(0.0)], P, -1.0).unwrap();
        for w in weights_seen(&m) {
            assert!(w > 0.0 && w <= 1.0 / MIN_DIVISOR + 1e-6);
        }
    }

    #[test]
    fn protected_boundary_rules() {
        let mut m = model(Some(FairnessNotion::StatisticalParity));
        m.boundary = Boundary::Adjusted(0.3);
        assert_eq!(m.decide(0.4, Group::Protected), P);
        assert_eq!(m.decide(0.4, Group::NonProtected), N);

        let mut m = model(Some(FairnessNotion::PredictiveEquality));
        m.boundary = Boundary::Adjusted(0.3);
        assert_eq!(m.decide(0.6, Group::Protected), N);
        assert_eq!(m.decide(0.75, Group::Protected), P);
        assert_eq!(m.decide(0.6, Group::NonProtected), P);
    }

    #[test]
    fn neutral_boundary_treats_groups_alike() {
        for notion in [None, Some(FairnessNotion::StatisticalParity), Some(FairnessNotion::PredictiveEquality)] {
            let m = model(notion);
            for k in 0..=100 {
                let s = k as f64 / 100.0;
                assert_eq!(m.decide(s, Group::Protected), m.decide(s, Group::NonProtected));
            }
        }
    }

    #[test]
    fn lowering_theta_only_adds_positives() {
        let mut m = model(Some(FairnessNotion::EqualOpportunity));
        for hi in 0..=20 {
            for lo in 0..=hi {
                for k in 0..=20 {
                    let s = k as f64 / 20.0;
                    m.boundary = Boundary::Adjusted(hi as f64 / 20.0);
                    let before = m.decide(s, Group::Protected);
                    m.boundary = Boundary::Adjusted(lo as f64 / 20.0);
                    if before == P {
                        assert_eq!(m.decide(s, Group::Protected), P);
                    }
                }
            }
        }
    }

    fn disadvantaged_ledger(l: f64) -> FairnessLedger {
        // Protected: 10 seen, 1 predicted positive. Other: 10 seen, 5 positive.
        let z = GroupCounts { seen: 10, seen_pos: 5, seen_neg: 5, pred_pos: 1, pred_pos_given_pos: 1, pred_neg_given_neg: 5 };
        let zbar = GroupCounts { seen: 10, seen_pos: 5, seen_neg: 5, pred_pos: 5, pred_pos_given_pos: 5, pred_neg_given_neg: 5 };
        FairnessLedger::from_counts(z, zbar, l)
    }

    #[test]
    fn boundary_from_window_rank() {
        let mut m = model(Some(FairnessNotion::StatisticalParity));
        m.ledger = disadvantaged_ledger(1.0);
        // Needs 4 flips; the window holds three, so the highest is used.
        for (i, c) in [0.45, 0.40, 0.30].into_iter().enumerate() {
            m.window.push(c, i as u64 + 1);
        }
        let pred = Prediction { label: P, score: 0.9 };
        let theta = m.observe_and_adjust(&instance(Group::NonProtected, P, 10), &pred);
        assert_eq!(theta, 0.45);
        // Two flips needed: protected positives raised from 1 to 3.
        let mut z = *m.ledger.counts(Group::Protected);
        z.pred_pos = 3;
        m.ledger = FairnessLedger::from_counts(z, *m.ledger.counts(Group::NonProtected), 1.0);
        let theta = m.observe_and_adjust(&instance(Group::NonProtected, P, 11), &pred);
        assert_eq!(theta, 0.40);
    }

    #[test]
    fn tolerance_gate_resets_boundary() {
        let mut m = model(Some(FairnessNotion::StatisticalParity));
        m.ledger = disadvantaged_ledger(1.0);
        m.window.push(0.4, 1);
        m.config.epsilon = 10.0;
        let theta = m.observe_and_adjust(&instance(Group::NonProtected, P, 2), &Prediction { label: P, score: 0.9 });
        assert_eq!(theta, 0.5);
        assert_eq!(m.boundary(), Boundary::Neutral);
    }

    #[test]
    fn reverse_discrimination_stays_neutral() {
        let mut m = model(Some(FairnessNotion::StatisticalParity));
        let l = disadvantaged_ledger(1.0);
        m.ledger = FairnessLedger::from_counts(*l.counts(Group::NonProtected), *l.counts(Group::Protected), 1.0);
        m.window.push(0.4, 1);
        let theta = m.observe_and_adjust(&instance(Group::NonProtected, P, 2), &Prediction { label: P, score: 0.9 });
        assert_eq!(theta, 0.5);
    }

    #[test]
    fn window_admission_per_notion() {
        let cases = [
            (FairnessNotion::StatisticalParity, N, N, Some(0.2)),
            (FairnessNotion::StatisticalParity, P, N, Some(0.2)),
            (FairnessNotion::StatisticalParity, P, P, None),
            (FairnessNotion::EqualOpportunity, N, N, None),
            (FairnessNotion::EqualOpportunity, P, N, Some(0.2)),
            (FairnessNotion::PredictiveEquality, N, P, Some(0.8)),
            (FairnessNotion::PredictiveEquality, N, N, None),
        ];
        for (notion, truth, predicted, expected) in cases {
            let mut m = model(Some(notion));
            let pred = Prediction { label: predicted, score: 0.2 };
            m.observe_and_adjust(&instance(Group::Protected, truth, 1), &pred);
            m.observe_and_adjust(&instance(Group::NonProtected, truth, 2), &pred);
            let got: Vec<f64> = m.window.iter().map(|e| e.0).collect();
            assert_eq!(got, expected.into_iter().collect::<Vec<_>>(), "{notion} {truth:?} {predicted:?}");
        }
    }

    #[test]
    fn theta_stays_in_unit_interval_or_window() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for notion in FairnessNotion::ALL {
            let mut m = model(Some(notion));
            m.config.window = 50;
            m.window = BoundaryWindow::new(50);
            for seq in 1..3000u64 {
                let x: f64 = rng.random_range(-2.0..2.0);
                let group = if rng.random_bool(0.4) { Group::Protected } else { Group::NonProtected };
                let y = if x + if group == Group::Protected { -0.5 } else { 0.5 } > 0.0 { P } else { N };
                let inst = Instance { features: vec![Value::Num(x)], group, label: y, seq };
                let p = m.predict(&inst.query());
                m.learn(&inst, &p).unwrap();
                let theta = m.theta();
                assert!((0.0..=1.0).contains(&theta));
                if let Boundary::Adjusted(t) = m.boundary() {
                    assert!(m.window.iter().any(|e| e.0 == t));
                }
            }
        }
    }
}
