//! Cumulative parity-based fairness.
//!
//! The ledger keeps per-group counters of arrivals, labels and predictions.
//! From them it derives three cumulative discrimination scores (non-protected
//! rate minus protected rate, each denominator smoothed by `l`) and the number
//! of protected decisions that would have to flip to restore parity.

use std::fmt;
use std::str::FromStr;

use crate::error::{ConfigError, UndefinedRate};
use crate::stream::{Group, Label};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FairnessNotion {
    /// Positive-prediction rate gap.
    StatisticalParity,
    /// True-positive rate gap.
    EqualOpportunity,
    /// True-negative rate gap.
    PredictiveEquality,
}

impl FairnessNotion {
    pub const ALL: [FairnessNotion; 3] = [
        FairnessNotion::StatisticalParity,
        FairnessNotion::EqualOpportunity,
        FairnessNotion::PredictiveEquality,
    ];

    /// The prediction this notion treats as the favorable outcome.
    pub fn favorable(self) -> Label {
        match self {
            FairnessNotion::PredictiveEquality => Label::Negative,
            _ => Label::Positive,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FairnessNotion::StatisticalParity => "sp",
            FairnessNotion::EqualOpportunity => "eqop",
            FairnessNotion::PredictiveEquality => "peq",
        }
    }
}

impl fmt::Display for FairnessNotion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FairnessNotion {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "sp" => Ok(FairnessNotion::StatisticalParity),
            "eqop" => Ok(FairnessNotion::EqualOpportunity),
            "peq" => Ok(FairnessNotion::PredictiveEquality),
            _ => Err(ConfigError::invalid("fairness", format!("unknown notion `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LedgerMode {
    /// Counters accumulate over the whole stream.
    Cumulative,
    /// Counters reset every `n` records.
    Chunked(u64),
}

/// Counters for one group.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GroupCounts {
    pub seen: u64,
    pub seen_pos: u64,
    pub seen_neg: u64,
    pub pred_pos: u64,
    /// Predicted positive among true positives.
    pub pred_pos_given_pos: u64,
    /// Predicted negative among true negatives.
    pub pred_neg_given_neg: u64,
}

impl GroupCounts {
    /// (conditioning count, favorable count) for `notion`.
    pub fn rate_terms(&self, notion: FairnessNotion) -> (u64, u64) {
        match notion {
            FairnessNotion::StatisticalParity => (self.seen, self.pred_pos),
            FairnessNotion::EqualOpportunity => (self.seen_pos, self.pred_pos_given_pos),
            FairnessNotion::PredictiveEquality => (self.seen_neg, self.pred_neg_given_neg),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FairnessValue {
    pub value: f64,
    pub notion: FairnessNotion,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FairnessLedger {
    groups: [GroupCounts; 2],
    smoothing: f64,
    mode: LedgerMode,
    in_chunk: u64,
}

impl FairnessLedger {
    pub fn new(smoothing: f64, mode: LedgerMode) -> Self {
        assert!(smoothing >= 0.0, "smoothing must be nonnegative");
        if let LedgerMode::Chunked(n) = mode {
            assert!(n > 0, "chunk size must be positive");
        }
        Self {
            groups: [GroupCounts::default(); 2],
            smoothing,
            mode,
            in_chunk: 0,
        }
    }

    pub fn cumulative(smoothing: f64) -> Self {
        Self::new(smoothing, LedgerMode::Cumulative)
    }

    /// Builds a cumulative ledger from explicit counters.
    pub fn from_counts(protected: GroupCounts, non_protected: GroupCounts, smoothing: f64) -> Self {
        let mut ledger = Self::cumulative(smoothing);
        ledger.groups[Group::Protected.index()] = protected;
        ledger.groups[Group::NonProtected.index()] = non_protected;
        ledger
    }

    pub fn counts(&self, group: Group) -> &GroupCounts {
        &self.groups[group.index()]
    }

    pub fn mode(&self) -> LedgerMode {
        self.mode
    }

    pub fn smoothing(&self) -> f64 {
        self.smoothing
    }

    pub fn record(&mut self, group: Group, truth: Label, predicted: Label) {
        if let LedgerMode::Chunked(size) = self.mode {
            if self.in_chunk == size {
                self.groups = [GroupCounts::default(); 2];
                self.in_chunk = 0;
            }
            self.in_chunk += 1;
        }
        let c = &mut self.groups[group.index()];
        c.seen += 1;
        match truth {
            Label::Positive => c.seen_pos += 1,
            Label::Negative => c.seen_neg += 1,
        }
        if predicted == Label::Positive {
            c.pred_pos += 1;
        }
        match (truth, predicted) {
            (Label::Positive, Label::Positive) => c.pred_pos_given_pos += 1,
            (Label::Negative, Label::Negative) => c.pred_neg_given_neg += 1,
            _ => {}
        }
    }

    /// Smoothed rate difference, non-protected minus protected. Positive
    /// values mean the protected group receives the favorable outcome less
    /// often.
    pub fn cumulative_fairness(&self, notion: FairnessNotion) -> FairnessValue {
        let rate = |g: Group| {
            let (base, fav) = self.counts(g).rate_terms(notion);
            let denom = base as f64 + self.smoothing;
            if denom > 0.0 {
                fav as f64 / denom
            } else {
                0.0
            }
        };
        FairnessValue {
            value: rate(Group::NonProtected) - rate(Group::Protected),
            notion,
        }
    }

    /// Number of additional favorable protected outcomes that would equalize
    /// the raw (unsmoothed) rates:
    /// `floor(base_z * fav_zbar / base_zbar - fav_z)`. Negative when the
    /// protected group is already favored.
    pub fn required_flips(&self, notion: FairnessNotion) -> Result<i64, UndefinedRate> {
        let (base_z, fav_z) = self.counts(Group::Protected).rate_terms(notion);
        let (base_zbar, fav_zbar) = self.counts(Group::NonProtected).rate_terms(notion);
        if base_zbar == 0 {
            return Err(UndefinedRate);
        }
        let numer = base_z as i128 * fav_zbar as i128 - fav_z as i128 * base_zbar as i128;
        Ok(numer.div_euclid(base_zbar as i128) as i64)
    }
}
