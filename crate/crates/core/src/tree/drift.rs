//! Decayed-error drift monitor attached to every tree node.

use super::DriftParams;

#[derive(Debug, Clone, Default, PartialEq)]
pub(crate) struct DriftMonitor {
    // Bias-corrected exponentially weighted error: num / den.
    num: f64,
    den: f64,
    // Long-run weighted error since the last reset.
    err_sum: f64,
    weight: f64,
}

impl DriftMonitor {
    /// Feeds one outcome carrying weight `w`. A weight-`w` update equals `w`
    /// unit updates with the same outcome.
    pub fn update(&mut self, error: bool, w: f64, decay: f64) {
        if w <= 0.0 {
            return;
        }
        let keep = decay.powf(w);
        let e = if error { 1.0 } else { 0.0 };
        self.num = keep * self.num + (1.0 - keep) * e;
        self.den = keep * self.den + (1.0 - keep);
        self.err_sum += w * e;
        self.weight += w;
    }

    pub fn recent_error(&self) -> f64 {
        if self.den > 0.0 {
            self.num / self.den
        } else {
            0.0
        }
    }

    /// Laplace-smoothed long-run error rate.
    pub fn baseline(&self) -> f64 {
        (self.err_sum + 1.0) / (self.weight + 2.0)
    }

    /// Recent error sits more than `warning_sigmas` standard deviations (of
    /// an exponentially weighted Bernoulli mean) above the baseline.
    pub fn warning(&self, params: &DriftParams) -> bool {
        if self.weight < params.min_eval_weight {
            return false;
        }
        let p = self.baseline();
        let sigma = (p * (1.0 - p) * (1.0 - params.decay) / (1.0 + params.decay)).sqrt();
        self.recent_error() > p + params.warning_sigmas * sigma
    }

    pub fn reset(&mut self) {
        *self = Self::default();
    }
}

/// A candidate replacement subtree trained in the shadow of the main one.
#[derive(Debug, Clone)]
pub(crate) struct Alternate<N> {
    pub tree: N,
    /// Weighted errors of the main subtree and the alternate since the
    /// alternate was created.
    pub main_errors: f64,
    pub alt_errors: f64,
    pub weight: f64,
}

impl<N> Alternate<N> {
    pub fn new(tree: N) -> Self {
        Self {
            tree,
            main_errors: 0.0,
            alt_errors: 0.0,
            weight: 0.0,
        }
    }

    pub fn record(&mut self, main_correct: bool, alt_correct: bool, w: f64) {
        if !main_correct {
            self.main_errors += w;
        }
        if !alt_correct {
            self.alt_errors += w;
        }
        self.weight += w;
    }

    pub fn beats_main(&self, params: &DriftParams) -> bool {
        self.weight >= params.min_eval_weight
            && self.alt_errors / self.weight + params.replace_margin <= self.main_errors / self.weight
    }

    pub fn expired(&self, params: &DriftParams) -> bool {
        self.weight >= params.alternate_budget
    }
}
