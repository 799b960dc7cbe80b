//! Per-leaf sufficient statistics and split evaluation.

use crate::stream::FeatureKind;

/// Weighted running mean / variance (West's weighted Welford update).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct Gaussian {
    pub weight: f64,
    pub mean: f64,
    pub m2: f64,
    pub min: f64,
    pub max: f64,
}

impl Gaussian {
    pub fn add(&mut self, x: f64, w: f64) {
        if w <= 0.0 {
            return;
        }
        if self.weight == 0.0 {
            self.min = x;
            self.max = x;
        } else {
            self.min = self.min.min(x);
            self.max = self.max.max(x);
        }
        let total = self.weight + w;
        let delta = x - self.mean;
        self.mean += delta * w / total;
        self.m2 += w * delta * (x - self.mean);
        self.weight = total;
    }

    pub fn std_dev(&self) -> f64 {
        if self.weight <= 0.0 {
            0.0
        } else {
            (self.m2.max(0.0) / self.weight).sqrt()
        }
    }

    /// Estimated weight at or below `t`.
    pub fn weight_below(&self, t: f64) -> f64 {
        if self.weight == 0.0 || t < self.min {
            return 0.0;
        }
        if t >= self.max {
            return self.weight;
        }
        let sd = self.std_dev();
        if sd == 0.0 {
            return if t >= self.mean { self.weight } else { 0.0 };
        }
        let z = (t - self.mean) / sd;
        self.weight * 0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Observer {
    /// One Gaussian per class, indexed by `Label::index`.
    Numeric([Gaussian; 2]),
    /// Class weights per category value.
    Categorical(Vec<[f64; 2]>),
}

impl Observer {
    pub fn new(kind: FeatureKind) -> Self {
        match kind {
            FeatureKind::Numeric => Observer::Numeric([Gaussian::default(); 2]),
            FeatureKind::Categorical { arity } => Observer::Categorical(vec![[0.0; 2]; arity as usize]),
        }
    }

    #[cfg(test)]
    pub fn class_totals(&self) -> [f64; 2] {
        match self {
            Observer::Numeric(g) => [g[0].weight, g[1].weight],
            Observer::Categorical(t) => t.iter().fold([0.0; 2], |acc, c| [acc[0] + c[0], acc[1] + c[1]]),
        }
    }
}

/// Binary entropy in bits of a weighted class distribution.
pub(crate) fn entropy(dist: [f64; 2]) -> f64 {
    let total = dist[0] + dist[1];
    if total <= 0.0 {
        return 0.0;
    }
    dist.iter()
        .filter(|&&w| w > 0.0)
        .map(|&w| {
            let p = w / total;
            -p * p.log2()
        })
        .sum()
}

/// Information gain of partitioning `parent` into `children`.
pub(crate) fn info_gain(parent: [f64; 2], children: &[[f64; 2]]) -> f64 {
    let total: f64 = children.iter().map(|c| c[0] + c[1]).sum();
    if total <= 0.0 {
        return 0.0;
    }
    let weighted: f64 = children
        .iter()
        .map(|c| (c[0] + c[1]) / total * entropy(*c))
        .sum();
    entropy(parent) - weighted
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum SplitTest {
    /// `x <= threshold` goes to child 0, otherwise child 1.
    Threshold { attribute: usize, threshold: f64 },
    /// One child per category value.
    Category { attribute: usize },
}

impl SplitTest {
    pub fn attribute(&self) -> usize {
        match *self {
            SplitTest::Threshold { attribute, .. } | SplitTest::Category { attribute } => attribute,
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Candidate {
    pub test: SplitTest,
    pub gain: f64,
    pub children: Vec<[f64; 2]>,
}

/// Best split proposed by one observer, if any.
pub(crate) fn best_split(
    attribute: usize,
    observer: &Observer,
    parent: [f64; 2],
    numeric_candidates: usize,
) -> Option<Candidate> {
    match observer {
        Observer::Numeric(g) => {
            let live: Vec<&Gaussian> = g.iter().filter(|c| c.weight > 0.0).collect();
            let lo = live.iter().map(|c| c.min).fold(f64::INFINITY, f64::min);
            let hi = live.iter().map(|c| c.max).fold(f64::NEG_INFINITY, f64::max);
            if !(lo < hi) {
                return None;
            }
            let step = (hi - lo) / (numeric_candidates as f64 + 1.0);
            let mut best: Option<Candidate> = None;
            for k in 1..=numeric_candidates {
                let threshold = lo + step * k as f64;
                let left = [g[0].weight_below(threshold), g[1].weight_below(threshold)];
                let right = [g[0].weight - left[0], g[1].weight - left[1]];
                let gain = info_gain(parent, &[left, right]);
                if best.as_ref().is_none_or(|b| gain > b.gain) {
                    best = Some(Candidate {
                        test: SplitTest::Threshold { attribute, threshold },
                        gain,
                        children: vec![left, right],
                    });
                }
            }
            best
        }
        Observer::Categorical(tallies) => {
            let branches = tallies.iter().filter(|c| c[0] + c[1] > 0.0).count();
            if branches < 2 {
                return None;
            }
            Some(Candidate {
                test: SplitTest::Category { attribute },
                gain: info_gain(parent, tallies),
                children: tallies.clone(),
            })
        }
    }
}
