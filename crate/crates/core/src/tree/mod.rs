//! Weight-aware incremental decision tree (Hoeffding tree) with blind drift
//! adaptation.
//!
//! Leaves keep per-class Gaussian estimators for numeric attributes and
//! per-(value, class) tallies for categorical ones. Every `grace_period`
//! units of weight a leaf tries to split on the attribute with the highest
//! information gain; the split happens when the gain margin over the
//! runner-up (or over not splitting) exceeds the Hoeffding bound
//! `sqrt(ln(1/delta) / (2 n))`, or the bound has shrunk below the tie
//! threshold.
//!
//! Each node also tracks an exponentially decayed error rate. When it rises
//! well above the node's long-run error an alternate subtree starts growing
//! beside it, and replaces it once it has been measurably more accurate on
//! the same instances.

mod drift;
mod observer;

use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{ConfigError, DataError};
use crate::stream::{check_features, FeatureKind, FeatureSpace, Label, Value};

use drift::{Alternate, DriftMonitor};
use observer::{best_split, Observer, SplitTest};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftParams {
    /// Per-unit-weight decay of the recent error estimate.
    pub decay: f64,
    /// Standard deviations above baseline that start an alternate subtree.
    pub warning_sigmas: f64,
    /// Error-rate advantage the alternate needs to take over.
    pub replace_margin: f64,
    /// Weight observed before a monitor may warn or an alternate may win.
    pub min_eval_weight: f64,
    /// Weight after which a losing alternate is discarded.
    pub alternate_budget: f64,
}

impl Default for DriftParams {
    fn default() -> Self {
        Self {
            decay: 0.995,
            warning_sigmas: 3.0,
            replace_margin: 0.01,
            min_eval_weight: 300.0,
            alternate_budget: 3000.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeParams {
    /// Hoeffding bound confidence `delta`.
    pub split_confidence: f64,
    /// Leaf weight between split attempts.
    pub grace_period: f64,
    pub tie_threshold: f64,
    pub numeric_candidates: usize,
    /// `None` disables subtree replacement.
    pub drift: Option<DriftParams>,
}

impl Default for TreeParams {
    fn default() -> Self {
        Self {
            split_confidence: 1e-7,
            grace_period: 200.0,
            tie_threshold: 0.05,
            numeric_candidates: 10,
            drift: Some(DriftParams::default()),
        }
    }
}

impl TreeParams {
    pub fn without_adaptation(mut self) -> Self {
        self.drift = None;
        self
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = |key: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(ConfigError::invalid(key, format!("must be strictly positive, got {v}")))
            }
        };
        positive("split_confidence", self.split_confidence)?;
        if self.split_confidence >= 1.0 {
            return Err(ConfigError::invalid("split_confidence", "must be below 1"));
        }
        positive("grace_period", self.grace_period)?;
        positive("tie_threshold", self.tie_threshold)?;
        if self.numeric_candidates == 0 {
            return Err(ConfigError::invalid("numeric_candidates", "must be at least 1"));
        }
        if let Some(d) = &self.drift {
            positive("drift.decay", d.decay)?;
            if d.decay >= 1.0 {
                return Err(ConfigError::invalid("drift.decay", "must be below 1"));
            }
            positive("drift.warning_sigmas", d.warning_sigmas)?;
            positive("drift.replace_margin", d.replace_margin)?;
            positive("drift.min_eval_weight", d.min_eval_weight)?;
            positive("drift.alternate_budget", d.alternate_budget)?;
        }
        Ok(())
    }
}

/// Structural counters, mostly for tests and diagnostics.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TreeStats {
    pub splits: u64,
    pub alternates_started: u64,
    pub replacements: u64,
}

#[derive(Debug, Clone)]
struct Leaf {
    /// `None` for categorical attributes already used on the path.
    observers: Vec<Option<Observer>>,
    weight_at_last_attempt: f64,
}

#[derive(Debug, Clone)]
enum NodeKind {
    Leaf(Leaf),
    Split { test: SplitTest, children: Vec<Node> },
}

#[derive(Debug, Clone)]
struct Node {
    /// Class weights observed at this node since it was created.
    class_weights: [f64; 2],
    /// Class distribution handed down by the split that created the node.
    inherited: [f64; 2],
    kind: NodeKind,
    monitor: Option<DriftMonitor>,
    alternate: Option<Box<Alternate<Node>>>,
    /// Categorical attributes used on the path to this node.
    blocked: Arc<[bool]>,
}

struct Ctx<'a> {
    space: &'a [FeatureKind],
    params: &'a TreeParams,
    stats: &'a mut TreeStats,
}

fn margin_of(w: [f64; 2]) -> f64 {
    2.0 * (w[1] + 1.0) / (w[0] + w[1] + 2.0) - 1.0
}

impl Node {
    fn new_leaf(space: &[FeatureKind], blocked: Arc<[bool]>, inherited: [f64; 2], adaptive: bool) -> Self {
        let observers = space
            .iter()
            .zip(blocked.iter())
            .map(|(&kind, &b)| (!b).then(|| Observer::new(kind)))
            .collect();
        Node {
            class_weights: [0.0; 2],
            inherited,
            kind: NodeKind::Leaf(Leaf {
                observers,
                weight_at_last_attempt: 0.0,
            }),
            monitor: adaptive.then(DriftMonitor::default),
            alternate: None,
            blocked,
        }
    }

    fn leaf_for(&self, x: &[Value]) -> &Node {
        let mut node = self;
        loop {
            match &node.kind {
                NodeKind::Leaf(_) => return node,
                NodeKind::Split { test, children } => node = &children[route(test, x)],
            }
        }
    }

    fn margin(&self, x: &[Value]) -> f64 {
        let leaf = self.leaf_for(x);
        margin_of([
            leaf.class_weights[0] + leaf.inherited[0],
            leaf.class_weights[1] + leaf.inherited[1],
        ])
    }

    fn predict(&self, x: &[Value]) -> Label {
        if self.margin(x) >= 0.0 {
            Label::Positive
        } else {
            Label::Negative
        }
    }

    fn learn(&mut self, x: &[Value], y: Label, w: f64, correct: bool, allow_alternates: bool, ctx: &mut Ctx<'_>) {
        if let (Some(monitor), Some(dp)) = (self.monitor.as_mut(), ctx.params.drift.as_ref()) {
            monitor.update(!correct, w, dp.decay);
            let warning = monitor.warning(dp);
            if allow_alternates && warning && self.alternate.is_none() {
                let fresh = Node::new_leaf(ctx.space, self.blocked.clone(), [0.0; 2], true);
                self.alternate = Some(Box::new(Alternate::new(fresh)));
                ctx.stats.alternates_started += 1;
            }
            if let Some(alt) = self.alternate.as_mut() {
                let alt_correct = alt.tree.predict(x) == y;
                alt.record(correct, alt_correct, w);
                alt.tree.learn(x, y, w, alt_correct, false, ctx);
                if warning && alt.beats_main(dp) {
                    let mut promoted = self.alternate.take().expect("alternate present").tree;
                    if let Some(m) = promoted.monitor.as_mut() {
                        m.reset();
                    }
                    *self = promoted;
                    ctx.stats.replacements += 1;
                    return;
                }
                if alt.expired(dp) {
                    self.alternate = None;
                }
            }
        }

        self.class_weights[y.index()] += w;
        match &mut self.kind {
            NodeKind::Split { test, children } => {
                let child = &mut children[route(test, x)];
                child.learn(x, y, w, correct, allow_alternates, ctx);
            }
            NodeKind::Leaf(leaf) => {
                for (obs, value) in leaf.observers.iter_mut().zip(x) {
                    match (obs, value) {
                        (Some(Observer::Numeric(g)), Value::Num(v)) => g[y.index()].add(*v, w),
                        (Some(Observer::Categorical(t)), Value::Cat(c)) => t[*c as usize][y.index()] += w,
                        _ => {}
                    }
                }
                let seen = self.class_weights[0] + self.class_weights[1];
                if seen - leaf.weight_at_last_attempt >= ctx.params.grace_period {
                    leaf.weight_at_last_attempt = seen;
                    if let Some((test, dists)) = try_split(leaf, self.class_weights, seen, ctx.params) {
                        self.split(test, dists, ctx);
                    }
                }
            }
        }
    }

    fn split(&mut self, test: SplitTest, dists: Vec<[f64; 2]>, ctx: &mut Ctx<'_>) {
        let blocked: Arc<[bool]> = match test {
            SplitTest::Category { attribute } => {
                let mut b = self.blocked.to_vec();
                b[attribute] = true;
                b.into()
            }
            SplitTest::Threshold { .. } => self.blocked.clone(),
        };
        let adaptive = self.monitor.is_some();
        let children = dists
            .into_iter()
            .map(|d| Node::new_leaf(ctx.space, blocked.clone(), d, adaptive))
            .collect();
        self.kind = NodeKind::Split { test, children };
        ctx.stats.splits += 1;
    }

    fn depth(&self) -> usize {
        match &self.kind {
            NodeKind::Leaf(_) => 0,
            NodeKind::Split { children, .. } => 1 + children.iter().map(Node::depth).max().unwrap_or(0),
        }
    }

    fn leaves(&self) -> usize {
        match &self.kind {
            NodeKind::Leaf(_) => 1,
            NodeKind::Split { children, .. } => children.iter().map(Node::leaves).sum(),
        }
    }

    fn dump(&self, out: &mut String, indent: usize, label: &str) {
        let pad = "  ".repeat(indent);
        let w = self.class_weights;
        match &self.kind {
            NodeKind::Leaf(_) => {
                let _ = writeln!(out, "{pad}{label}leaf neg={:.3} pos={:.3}", w[0], w[1]);
            }
            NodeKind::Split { test, children } => {
                let _ = writeln!(out, "{pad}{label}split neg={:.3} pos={:.3}", w[0], w[1]);
                for (i, child) in children.iter().enumerate() {
                    let branch = match *test {
                        SplitTest::Threshold { attribute, threshold } => {
                            let op = if i == 0 { "<=" } else { ">" };
                            format!("[a{attribute} {op} {threshold:.4}] ")
                        }
                        SplitTest::Category { attribute } => format!("[a{attribute} = {i}] "),
                    };
                    child.dump(out, indent + 1, &branch);
                }
            }
        }
    }
}

fn route(test: &SplitTest, x: &[Value]) -> usize {
    match (*test, &x[test.attribute()]) {
        (SplitTest::Threshold { threshold, .. }, Value::Num(v)) => usize::from(*v > threshold),
        (SplitTest::Category { .. }, Value::Cat(c)) => *c as usize,
        // Kinds are checked on entry.
        _ => 0,
    }
}

fn try_split(leaf: &Leaf, class_weights: [f64; 2], seen: f64, params: &TreeParams) -> Option<(SplitTest, Vec<[f64; 2]>)> {
    if class_weights[0] <= 0.0 || class_weights[1] <= 0.0 {
        return None;
    }
    let mut candidates: Vec<_> = leaf
        .observers
        .iter()
        .enumerate()
        .filter_map(|(i, o)| o.as_ref().and_then(|o| best_split(i, o, class_weights, params.numeric_candidates)))
        .collect();
    candidates.sort_by(|a, b| b.gain.total_cmp(&a.gain));
    let best = candidates.first()?;
    // Not splitting competes as a candidate with zero gain.
    let runner_up = candidates.get(1).map_or(0.0, |c| c.gain.max(0.0));
    let bound = ((1.0 / params.split_confidence).ln() / (2.0 * seen)).sqrt();
    if best.gain > 1e-10 && (best.gain - runner_up > bound || bound < params.tie_threshold) {
        let best = candidates.swap_remove(0);
        Some((best.test, best.children))
    } else {
        None
    }
}

/// Incremental decision tree over a fixed feature space.
#[derive(Debug, Clone)]
pub struct HoeffdingTree {
    root: Node,
    space: FeatureSpace,
    params: TreeParams,
    stats: TreeStats,
}

impl HoeffdingTree {
    pub fn new(space: FeatureSpace, params: TreeParams) -> Result<Self, ConfigError> {
        params.validate()?;
        let blocked: Arc<[bool]> = vec![false; space.len()].into();
        let root = Node::new_leaf(&space, blocked, [0.0; 2], params.drift.is_some());
        Ok(Self {
            root,
            space,
            params,
            stats: TreeStats::default(),
        })
    }

    pub fn params(&self) -> &TreeParams {
        &self.params
    }

    pub fn stats(&self) -> TreeStats {
        self.stats
    }

    /// Adds one instance with the given (nonnegative) weight.
    pub fn train_weighted(&mut self, features: &[Value], label: Label, weight: f64) -> Result<(), DataError> {
        check_features(&self.space, features)?;
        if !(weight > 0.0) {
            return Ok(());
        }
        let correct = self.root.predict(features) == label;
        let mut ctx = Ctx {
            space: &self.space,
            params: &self.params,
            stats: &mut self.stats,
        };
        self.root.learn(features, label, weight, correct, true, &mut ctx);
        Ok(())
    }

    /// `2 p(+|x) - 1` from the Laplace-smoothed class weights of the leaf
    /// reached by `features`. Features must match the tree's feature space.
    pub fn predict_margin(&self, features: &[Value]) -> f64 {
        self.root.margin(features)
    }

    pub fn predict(&self, features: &[Value]) -> Label {
        self.root.predict(features)
    }

    pub fn depth(&self) -> usize {
        self.root.depth()
    }

    pub fn leaves(&self) -> usize {
        self.root.leaves()
    }

    /// Indented text rendering of the tree structure.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        self.root.dump(&mut out, 0, "");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use Label::{Negative as N, Positive as P};

    fn numeric_space(d: usize) -> FeatureSpace {
        vec![FeatureKind::Numeric; d].into()
    }

    fn leaf_stats(tree: &HoeffdingTree) -> ([f64; 2], Vec<Option<Observer>>) {
        match &tree.root.kind {
            NodeKind::Leaf(l) => (tree.root.class_weights, l.observers.clone()),
            NodeKind::Split { .. } => panic!("expected a leaf"),
        }
    }

    #[test]
    fn empty_tree_is_uninformed() {
        let t = HoeffdingTree::new(numeric_space(2), TreeParams::default()).unwrap();
        assert_eq!(t.predict_margin(&[Value::Num(0.3), Value::Num(-2.0)]), 0.0);
    }

    #[test]
    fn laplace_margin() {
        let mut t = HoeffdingTree::new(numeric_space(1), TreeParams::default()).unwrap();
        let x = [Value::Num(1.0)];
        t.train_weighted(&x, P, 9.0).unwrap();
        t.train_weighted(&x, N, 1.0).unwrap();
        assert!((t.predict_margin(&x) - 2.0 / 3.0).abs() < 1e-15);

        let mut even = HoeffdingTree::new(numeric_space(1), TreeParams::default()).unwrap();
        even.train_weighted(&x, P, 4.0).unwrap();
        even.train_weighted(&x, N, 4.0).unwrap();
        assert_eq!(even.predict_margin(&x), 0.0);
    }

    #[test]
    fn zero_weight_is_a_no_op() {
        let mut t = HoeffdingTree::new(numeric_space(1), TreeParams::default()).unwrap();
        t.train_weighted(&[Value::Num(1.0)], P, 2.0).unwrap();
        let before = t.dump();
        let (cw, obs) = leaf_stats(&t);
        t.train_weighted(&[Value::Num(5.0)], N, 0.0).unwrap();
        assert_eq!(t.dump(), before);
        assert_eq!(leaf_stats(&t), (cw, obs));
    }

    #[test]
    fn arity_mismatch_is_rejected() {
        let mut t = HoeffdingTree::new(numeric_space(2), TreeParams::default()).unwrap();
        let err = t.train_weighted(&[Value::Num(1.0)], P, 1.0).unwrap_err();
        assert_eq!(err, DataError::Arity { expected: 2, got: 1 });
    }

    #[test]
    fn learns_a_threshold_concept() {
        for seed in 0..10 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut t = HoeffdingTree::new(numeric_space(1), TreeParams::default()).unwrap();
            for _ in 0..1000 {
                let x: f64 = rng.random_range(-1.0..1.0);
                t.train_weighted(&[Value::Num(x)], if x >= 0.0 { P } else { N }, 1.0).unwrap();
            }
            let mut correct = 0;
            for _ in 0..1000 {
                let x: f64 = rng.random_range(-1.0..1.0);
                if t.predict(&[Value::Num(x)]) == if x >= 0.0 { P } else { N } {
                    correct += 1;
                }
            }
            assert!(correct >= 950, "seed {seed}: {correct}/1000");
            match t.root.kind {
                NodeKind::Split { test: SplitTest::Threshold { threshold, .. }, .. } => {
                    assert!(threshold.abs() < 0.2, "root threshold {threshold}")
                }
                _ => panic!("seed {seed}: root did not split"),
            }
        }
    }

    #[test]
    fn identical_features_never_split() {
        let space: FeatureSpace = vec![FeatureKind::Numeric, FeatureKind::Categorical { arity: 3 }].into();
        let mut t = HoeffdingTree::new(space, TreeParams::default()).unwrap();
        let x = [Value::Num(0.5), Value::Cat(1)];
        for i in 0..5000 {
            t.train_weighted(&x, if i % 3 == 0 { P } else { N }, 1.0).unwrap();
        }
        assert_eq!(t.depth(), 0);
        assert_eq!(t.predict(&x), N);
    }

    #[test]
    fn weight_two_equals_two_unit_updates() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let space: FeatureSpace = vec![FeatureKind::Numeric, FeatureKind::Categorical { arity: 2 }].into();
        let mut once = HoeffdingTree::new(space.clone(), TreeParams::default()).unwrap();
        let mut twice = HoeffdingTree::new(space, TreeParams::default()).unwrap();
        for _ in 0..80 {
            let x = [Value::Num(rng.random_range(0.0..1.0)), Value::Cat(rng.random_range(0..2))];
            let y = if rng.random_bool(0.4) { P } else { N };
            once.train_weighted(&x, y, 2.0).unwrap();
            twice.train_weighted(&x, y, 1.0).unwrap();
            twice.train_weighted(&x, y, 1.0).unwrap();
        }
        let (cw1, o1) = leaf_stats(&once);
        let (cw2, o2) = leaf_stats(&twice);
        assert_eq!(cw1, cw2);
        for (a, b) in o1.iter().zip(&o2) {
            match (a, b) {
                (Some(Observer::Numeric(ga)), Some(Observer::Numeric(gb))) => {
                    for (x, y) in ga.iter().zip(gb) {
                        assert_eq!(x.weight, y.weight);
                        assert!((x.mean - y.mean).abs() < 1e-12);
                        assert!((x.m2 - y.m2).abs() < 1e-9);
                        assert_eq!((x.min, x.max), (y.min, y.max));
                    }
                }
                (Some(Observer::Categorical(ta)), Some(Observer::Categorical(tb))) => assert_eq!(ta, tb),
                _ => panic!("observer kinds differ"),
            }
        }
    }

    #[test]
    fn class_totals_agree_with_observers() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let space: FeatureSpace = vec![FeatureKind::Numeric, FeatureKind::Categorical { arity: 4 }].into();
        let mut t = HoeffdingTree::new(space, TreeParams::default()).unwrap();
        for _ in 0..150 {
            let x = [Value::Num(rng.random()), Value::Cat(rng.random_range(0..4))];
            t.train_weighted(&x, if rng.random() { P } else { N }, rng.random_range(0.1..3.0)).unwrap();
        }
        let (cw, obs) = leaf_stats(&t);
        for o in obs.iter().flatten() {
            let tot = o.class_totals();
            assert!((tot[0] - cw[0]).abs() < 1e-9 && (tot[1] - cw[1]).abs() < 1e-9);
        }
    }

    #[test]
    fn categorical_depth_bounded_by_attribute_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let space: FeatureSpace = vec![FeatureKind::Categorical { arity: 3 }; 3].into();
        let params = TreeParams {
            grace_period: 20.0,
            ..TreeParams::default()
        };
        let mut t = HoeffdingTree::new(space, params).unwrap();
        for _ in 0..30_000 {
            let x: Vec<Value> = (0..3).map(|_| Value::Cat(rng.random_range(0..3))).collect();
            let key = x.iter().map(|v| if let Value::Cat(c) = v { *c } else { 0 }).sum::<u32>();
            let y = if (key % 2 == 0) ^ rng.random_bool(0.1) { P } else { N };
            t.train_weighted(&x, y, 1.0).unwrap();
        }
        assert!(t.depth() >= 2);
        assert!(t.depth() <= 3);
    }

    #[test]
    fn prediction_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut t = HoeffdingTree::new(numeric_space(2), TreeParams::default()).unwrap();
        for _ in 0..3000 {
            let x = [Value::Num(rng.random()), Value::Num(rng.random())];
            let y = if let (Value::Num(a), Value::Num(b)) = (x[0], x[1]) { if a + b > 1.0 { P } else { N } } else { N };
            t.train_weighted(&x, y, 1.0).unwrap();
        }
        let probe = [Value::Num(0.7), Value::Num(0.6)];
        assert_eq!(t.predict_margin(&probe), t.clone().predict_margin(&probe));
    }

    #[test]
    fn rejects_bad_params() {
        let bad = TreeParams {
            split_confidence: 1.5,
            ..TreeParams::default()
        };
        assert!(HoeffdingTree::new(numeric_space(1), bad).is_err());
        let bad = TreeParams {
            grace_period: 0.0,
            ..TreeParams::default()
        };
        assert!(HoeffdingTree::new(numeric_space(1), bad).is_err());
    }

    fn noisy_diagonal(rng: &mut ChaCha8Rng, flipped: bool) -> ([Value; 2], Label) {
        let a: f64 = rng.random_range(-1.0..1.0);
        let b: f64 = rng.random_range(-1.0..1.0);
        let clean = (a + b > 0.0) ^ flipped;
        let y = if clean ^ rng.random_bool(0.1) { P } else { N };
        ([Value::Num(a), Value::Num(b)], y)
    }

    #[test]
    fn stationary_stream_rarely_replaces() {
        let mut runs_with_replacement = 0;
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
            let mut t = HoeffdingTree::new(numeric_space(2), TreeParams::default()).unwrap();
            for _ in 0..50_000 {
                let (x, y) = noisy_diagonal(&mut rng, false);
                t.train_weighted(&x, y, 1.0).unwrap();
            }
            if t.stats().replacements > 0 {
                runs_with_replacement += 1;
            }
        }
        assert!(runs_with_replacement <= 1, "{runs_with_replacement}/20 runs replaced a subtree");
    }

    #[test]
    fn concept_flip_triggers_replacement() {
        let mut detected = 0;
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(200 + seed);
            let mut t = HoeffdingTree::new(numeric_space(2), TreeParams::default()).unwrap();
            for _ in 0..25_000 {
                let (x, y) = noisy_diagonal(&mut rng, false);
                t.train_weighted(&x, y, 1.0).unwrap();
            }
            let before = t.stats().replacements;
            for _ in 0..10_000 {
                let (x, y) = noisy_diagonal(&mut rng, true);
                t.train_weighted(&x, y, 1.0).unwrap();
            }
            if t.stats().replacements > before {
                detected += 1;
            }
        }
        assert!(detected >= 18, "{detected}/20 runs adapted");
    }

    #[test]
    fn disabled_adaptation_keeps_growth_path() {
        let train = |params: TreeParams| {
            let mut rng = ChaCha8Rng::seed_from_u64(31);
            let mut t = HoeffdingTree::new(numeric_space(2), params).unwrap();
            let mut pre = String::new();
            for i in 0..30_000 {
                let (x, y) = noisy_diagonal(&mut rng, i >= 15_000);
                if i == 15_000 {
                    pre = t.dump();
                }
                t.train_weighted(&x, y, 1.0).unwrap();
            }
            (pre, t)
        };
        let (pre, off) = train(TreeParams::default().without_adaptation());
        assert_eq!(off.stats().replacements, 0);
        // Every split made before the drift is still in place afterwards.
        let splits = |d: &str| d.lines().filter(|l| l.contains("split")).map(|l| l.split(" neg=").next().unwrap().to_string()).collect::<Vec<_>>();
        let after = splits(&off.dump());
        for s in splits(&pre) {
            assert!(after.contains(&s), "lost split {s}");
        }
        // Monitoring that never fires changes nothing.
        let mut quiet = DriftParams::default();
        quiet.warning_sigmas = 1e9;
        let (_, silent) = train(TreeParams { drift: Some(quiet), ..TreeParams::default() });
        assert_eq!(silent.dump(), off.dump());
        let (_, on) = train(TreeParams::default());
        assert!(on.stats().replacements > 0);
    }
}
