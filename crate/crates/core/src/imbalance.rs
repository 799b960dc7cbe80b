//! Online class-imbalance statistic (OCIS).
//!
//! Each class keeps an exponentially decayed mass
//! `w_y <- lambda * w_y + (1 - lambda) * [label == y]`, updated for both
//! classes on every arrival. OCIS is `w_pos - w_neg`: 0 for a balanced
//! stream, towards -1 / +1 when one class disappears.

use crate::stream::Label;

#[derive(Debug, Clone, PartialEq)]
pub struct ImbalanceMonitor {
    w_pos: f64,
    w_neg: f64,
    lambda: f64,
    updates_seen: u64,
}

impl ImbalanceMonitor {
    /// `lambda` must lie in `[0, 1)`.
    pub fn new(lambda: f64) -> Self {
        assert!(
            (0.0..1.0).contains(&lambda),
            "decay factor must lie in [0, 1), got {lambda}"
        );
        Self {
            w_pos: 0.0,
            w_neg: 0.0,
            lambda,
            updates_seen: 0,
        }
    }

    pub fn update(&mut self, label: Label) {
        let (pos, neg) = match label {
            Label::Positive => (1.0, 0.0),
            Label::Negative => (0.0, 1.0),
        };
        let keep = self.lambda;
        let add = 1.0 - self.lambda;
        self.w_pos = keep * self.w_pos + add * pos;
        self.w_neg = keep * self.w_neg + add * neg;
        self.updates_seen += 1;
    }

    pub fn ocis(&self) -> f64 {
        self.w_pos - self.w_neg
    }

    pub fn w_pos(&self) -> f64 {
        self.w_pos
    }

    pub fn w_neg(&self) -> f64 {
        self.w_neg
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn updates_seen(&self) -> u64 {
        self.updates_seen
    }
}
