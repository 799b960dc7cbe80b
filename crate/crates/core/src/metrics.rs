//! Streaming confusion counts and the imbalance-robust summary metrics.

use crate::stream::Label;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    pub fn_: u64,
}

/// Balanced accuracy, geometric mean of TPR/TNR, recall and Cohen's kappa,
/// all as fractions.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Metrics {
    pub bal_acc: f64,
    pub gmean: f64,
    pub recall: f64,
    pub kappa: f64,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl ConfusionCounts {
    pub fn update(&mut self, truth: Label, predicted: Label) {
        match (truth, predicted) {
            (Label::Positive, Label::Positive) => self.tp += 1,
            (Label::Negative, Label::Positive) => self.fp += 1,
            (Label::Negative, Label::Negative) => self.tn += 1,
            (Label::Positive, Label::Negative) => self.fn_ += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn accuracy(&self) -> f64 {
        ratio(self.tp + self.tn, self.total())
    }

    pub fn metrics(&self) -> Metrics {
        let recall = ratio(self.tp, self.tp + self.fn_);
        let tnr = ratio(self.tn, self.tn + self.fp);
        let total = self.total() as f64;
        let kappa = if total == 0.0 {
            0.0
        } else {
            let p_o = (self.tp + self.tn) as f64 / total;
            let pred_pos = (self.tp + self.fp) as f64;
            let pred_neg = (self.fn_ + self.tn) as f64;
            let true_pos = (self.tp + self.fn_) as f64;
            let true_neg = (self.fp + self.tn) as f64;
            let p_e = (pred_pos * true_pos + pred_neg * true_neg) / (total * total);
            if p_e == 1.0 {
                0.0
            } else {
                (p_o - p_e) / (1.0 - p_e)
            }
        };
        Metrics {
            bal_acc: (recall + tnr) / 2.0,
            gmean: (recall * tnr).sqrt(),
            recall,
            kappa,
        }
    }
}
