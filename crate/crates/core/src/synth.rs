//! Synthetic evaluation streams: Gaussian class concepts, mean-shift drifts,
//! time-varying class ratios and label-conditioned group bias.
//!
//! At step `t` (1-based) the generator draws the label from the class-ratio
//! schedule `p(t)`, then the group, then the features from that class's
//! Gaussians with means shifted by every active drift event. The group is
//! drawn conditionally on the label so that
//! `P(+ | non-protected) - P(+ | protected) = b(t)` while the protected share
//! of the population stays at `protected_share`. Protected positives can
//! additionally have their means pulled toward the negative class by a
//! fraction `protected_shrink`, so that they are harder to recognize than
//! non-protected positives. The population shares below are unaffected:
//!
//! ```text
//! r_z    = p - (1 - pi) b        P(z | +) = pi r_z / p
//! r_zbar = p + pi b              P(z | -) = pi (1 - r_z) / (1 - p)
//! ```

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::ConfigError;
use crate::stream::{AttributeSpec, BinaryColumn, DatasetSchema, Group, Instance, Label, StreamSource, Value};

/// Piecewise-linear function of `t`, flat outside its knots.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    knots: Vec<(u64, f64)>,
}

impl Schedule {
    pub fn constant(value: f64) -> Self {
        Self { knots: vec![(1, value)] }
    }

    /// Knots must have strictly increasing `t`.
    pub fn piecewise(knots: Vec<(u64, f64)>) -> Result<Self, ConfigError> {
        if knots.is_empty() {
            return Err(ConfigError::invalid("schedule", "needs at least one knot"));
        }
        if knots.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(ConfigError::invalid("schedule", "knot times must strictly increase"));
        }
        if knots.iter().any(|k| !k.1.is_finite()) {
            return Err(ConfigError::invalid("schedule", "knot values must be finite"));
        }
        Ok(Self { knots })
    }

    /// Linear ramp from `from` at `t = 1` to `to` at `t = n`.
    pub fn linear(from: f64, to: f64, n: u64) -> Self {
        if n <= 1 {
            return Self::constant(to);
        }
        Self {
            knots: vec![(1, from), (n, to)],
        }
    }

    pub fn knots(&self) -> &[(u64, f64)] {
        &self.knots
    }

    pub fn at(&self, t: u64) -> f64 {
        let k = &self.knots;
        let i = k.partition_point(|&(kt, _)| kt <= t);
        if i == 0 {
            return k[0].1;
        }
        if i == k.len() {
            return k[i - 1].1;
        }
        let (t0, v0) = k[i - 1];
        let (t1, v1) = k[i];
        let f = (t - t0) as f64 / (t1 - t0) as f64;
        v0 + (v1 - v0) * f
    }

    fn scaled(&self, factor: f64) -> Self {
        Self {
            knots: dedup_times(self.knots.iter().map(|&(t, v)| (scale_time(t, factor), v)).collect()),
        }
    }
}

fn scale_time(t: u64, factor: f64) -> u64 {
    ((t as f64 * factor).round() as u64).max(1)
}

fn dedup_times(mut knots: Vec<(u64, f64)>) -> Vec<(u64, f64)> {
    knots.dedup_by(|b, a| a.0 >= b.0);
    knots
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DriftKind {
    /// Step change at `start`.
    Sudden,
    /// Linear ramp over `duration`.
    Gradual,
    /// Ramp out over `duration`, hold for `hold`, ramp back over `duration`.
    Recurrent { hold: u64 },
}

/// One mean-shift event. `shift[label.index()][j]` is the full displacement
/// of attribute `j` of that class once the event is complete.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftEvent {
    pub kind: DriftKind,
    pub start: u64,
    pub duration: u64,
    pub shift: [Vec<f64>; 2],
}

impl DriftEvent {
    /// Shifts every attribute of both classes by `magnitude`.
    pub fn uniform(kind: DriftKind, start: u64, duration: u64, magnitude: f64, d: usize) -> Self {
        Self {
            kind,
            start,
            duration,
            shift: [vec![magnitude; d], vec![magnitude; d]],
        }
    }

    /// Exchanges the class means of `attributes`, given the means in force
    /// just before the event.
    pub fn swap(kind: DriftKind, start: u64, duration: u64, means: &[Vec<f64>; 2], attributes: &[usize]) -> Self {
        let d = means[0].len();
        let mut shift = [vec![0.0; d], vec![0.0; d]];
        for &j in attributes {
            shift[0][j] = means[1][j] - means[0][j];
            shift[1][j] = means[0][j] - means[1][j];
        }
        Self {
            kind,
            start,
            duration,
            shift,
        }
    }

    /// Fraction of the shift in force at step `t`.
    pub fn intensity(&self, t: u64) -> f64 {
        let ramp = |from: u64| {
            if t < from {
                0.0
            } else if self.duration == 0 || t >= from + self.duration {
                1.0
            } else {
                (t - from) as f64 / self.duration as f64
            }
        };
        match self.kind {
            DriftKind::Sudden => ramp(self.start),
            DriftKind::Gradual => ramp(self.start),
            DriftKind::Recurrent { hold } => {
                let back = self.start + self.duration + hold;
                if t >= back + self.duration {
                    0.0
                } else {
                    ramp(self.start) - ramp(back)
                }
            }
        }
    }

    /// Last step at which the event is still changing.
    pub fn end(&self) -> u64 {
        match self.kind {
            DriftKind::Sudden => self.start,
            DriftKind::Gradual => self.start + self.duration,
            DriftKind::Recurrent { hold } => self.start + 2 * self.duration + hold,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    /// Base means per class (`[negative, positive]`), one entry per attribute.
    pub means: [Vec<f64>; 2],
    /// Standard deviations per class, same layout as `means`.
    pub std_devs: [Vec<f64>; 2],
    /// `P(positive)` as a function of `t`.
    pub ratio: Schedule,
    /// Target statistical-parity bias `b(t)`.
    pub bias: Schedule,
    /// Share of the population in the protected group.
    pub protected_share: f64,
    pub drifts: Vec<DriftEvent>,
    /// Fraction in `[0, 1)` by which the feature means of protected
    /// positives move toward the negative-class means.
    pub protected_shrink: f64,
    /// Expose the group as an extra categorical feature.
    pub group_feature: bool,
    pub length: u64,
    pub seed: u64,
}

impl GeneratorConfig {
    /// Balanced, unbiased, drift-free stream with unit-variance attributes
    /// whose class means differ by `gap`.
    pub fn basic(d: usize, gap: f64, length: u64, seed: u64) -> Self {
        Self {
            means: [vec![0.0; d], vec![gap; d]],
            std_devs: [vec![1.0; d], vec![1.0; d]],
            ratio: Schedule::constant(0.5),
            bias: Schedule::constant(0.0),
            protected_share: 0.5,
            drifts: Vec::new(),
            protected_shrink: 0.0,
            group_feature: false,
            length,
            seed,
        }
    }

    pub fn dimension(&self) -> usize {
        self.means[0].len()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let d = self.dimension();
        if d == 0 {
            return Err(ConfigError::invalid("generator.means", "need at least one attribute"));
        }
        let shapes = [&self.means[1], &self.std_devs[0], &self.std_devs[1]];
        if shapes.iter().any(|v| v.len() != d) {
            return Err(ConfigError::invalid("generator", "means and std_devs must have one entry per attribute"));
        }
        if self.means.iter().flatten().any(|m| !m.is_finite()) {
            return Err(ConfigError::invalid("generator.means", "must be finite"));
        }
        if self.std_devs.iter().flatten().any(|s| !(*s > 0.0 && s.is_finite())) {
            return Err(ConfigError::invalid("generator.std_devs", "must be strictly positive"));
        }
        if !(0.0..1.0).contains(&self.protected_shrink) {
            return Err(ConfigError::invalid("generator.protected_shrink", "must lie in [0, 1)"));
        }
        if !(self.protected_share > 0.0 && self.protected_share < 1.0) {
            return Err(ConfigError::invalid("generator.protected_share", "must lie strictly between 0 and 1"));
        }
        for (i, e) in self.drifts.iter().enumerate() {
            if e.shift.iter().any(|s| s.len() != d) {
                return Err(ConfigError::invalid(format!("generator.drift{i}"), "shift must have one entry per attribute"));
            }
            if e.start < 1 || e.end() > self.length.max(1) {
                return Err(ConfigError::invalid(format!("generator.drift{i}"), "drift interval must lie within the stream"));
            }
        }
        let mut times: Vec<u64> = self
            .ratio
            .knots()
            .iter()
            .chain(self.bias.knots())
            .map(|k| k.0)
            .chain([1, self.length.max(1)])
            .collect();
        times.sort_unstable();
        times.dedup();
        for t in times {
            let p = self.ratio.at(t);
            if !(0.0..=1.0).contains(&p) {
                return Err(ConfigError::invalid("generator.ratio", format!("P(+) = {p} at t={t} is not a probability")));
            }
            let b = self.bias.at(t);
            if !(-1.0..=1.0).contains(&b) {
                return Err(ConfigError::invalid("generator.bias", format!("bias {b} at t={t} is outside [-1, 1]")));
            }
            let (r_z, r_zbar) = group_rates(p, b, self.protected_share);
            let tol = 1e-12;
            if r_z < -tol || r_z > 1.0 + tol || r_zbar < -tol || r_zbar > 1.0 + tol {
                return Err(ConfigError::InfeasibleBias { t, bias: b, share: p });
            }
        }
        Ok(())
    }

    /// Class means in force at step `t`.
    pub fn means_at(&self, t: u64) -> [Vec<f64>; 2] {
        let mut means = self.means.clone();
        for e in &self.drifts {
            let k = e.intensity(t);
            if k != 0.0 {
                for c in 0..2 {
                    for (m, s) in means[c].iter_mut().zip(&e.shift[c]) {
                        *m += k * s;
                    }
                }
            }
        }
        means
    }

    /// Same stream shape stretched or squeezed to `length` steps.
    pub fn rescaled(&self, length: u64) -> Self {
        let factor = length as f64 / self.length.max(1) as f64;
        let mut out = self.clone();
        out.length = length;
        out.ratio = self.ratio.scaled(factor);
        out.bias = self.bias.scaled(factor);
        for e in &mut out.drifts {
            e.start = scale_time(e.start, factor);
            e.duration = (e.duration as f64 * factor).round() as u64;
            if let DriftKind::Recurrent { hold } = &mut e.kind {
                *hold = (*hold as f64 * factor).round() as u64;
            }
        }
        out
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Column layout of the generated stream: `a0..a{d-1}`, optionally the
    /// `group` feature, with `protected` as the protected value and `pos`
    /// as the positive label.
    pub fn schema(&self) -> DatasetSchema {
        let mut attributes: Vec<_> = (0..self.dimension()).map(|j| AttributeSpec::numeric(format!("a{j}"))).collect();
        let mut protected = BinaryColumn::new("group", "protected");
        if self.group_feature {
            attributes.push(AttributeSpec::categorical("group", GROUP_VALUES));
        } else {
            protected = protected.with_alphabet(GROUP_VALUES);
        }
        DatasetSchema {
            attributes,
            protected,
            label: BinaryColumn::new("label", "pos").with_alphabet(["neg", "pos"]),
        }
    }
}

const GROUP_VALUES: [&str; 2] = ["protected", "other"];

/// Positive rates of the protected and non-protected groups.
fn group_rates(p: f64, b: f64, share: f64) -> (f64, f64) {
    (p - (1.0 - share) * b, p + share * b)
}

/// Validates `config` and returns its stream.
pub fn generate(config: &GeneratorConfig) -> Result<StreamSource, ConfigError> {
    config.validate()?;
    Ok(StreamSource::synthetic(config.schema(), SyntheticStream::new(config.clone())))
}

/// Iterator behind [`generate`].
#[derive(Debug, Clone)]
pub struct SyntheticStream {
    config: GeneratorConfig,
    rng: ChaCha8Rng,
    t: u64,
}

impl SyntheticStream {
    fn new(config: GeneratorConfig) -> Self {
        let rng = ChaCha8Rng::seed_from_u64(config.seed);
        Self { config, rng, t: 0 }
    }
}

impl Iterator for SyntheticStream {
    type Item = Instance;

    fn next(&mut self) -> Option<Instance> {
        if self.t >= self.config.length {
            return None;
        }
        self.t += 1;
        let t = self.t;
        let cfg = &self.config;
        let p = cfg.ratio.at(t).clamp(0.0, 1.0);
        let label = if self.rng.random_bool(p) { Label::Positive } else { Label::Negative };
        let pi = cfg.protected_share;
        let (r_z, _) = group_rates(p, cfg.bias.at(t), pi);
        let p_protected = match label {
            Label::Positive if p > 0.0 => pi * r_z / p,
            Label::Negative if p < 1.0 => pi * (1.0 - r_z) / (1.0 - p),
            _ => pi,
        };
        let group = if self.rng.random_bool(p_protected.clamp(0.0, 1.0)) {
            Group::Protected
        } else {
            Group::NonProtected
        };

        let c = label.index();
        let means = cfg.means_at(t);
        let shrink = match (group, label) {
            (Group::Protected, Label::Positive) => cfg.protected_shrink,
            _ => 0.0,
        };
        let mut features: Vec<Value> = means[c]
            .iter()
            .zip(&means[0])
            .zip(&cfg.std_devs[c])
            .map(|((m, neg), s)| {
                let z: f64 = StandardNormal.sample(&mut self.rng);
                Value::Num(m + shrink * (neg - m) + s * z)
            })
            .collect();
        if cfg.group_feature {
            features.push(Value::Cat(group.index() as u32));
        }
        Some(Instance {
            features,
            group,
            label,
            seq: t,
        })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.config.length - self.t) as usize;
        (left, Some(left))
    }
}

pub const PRESETS: [&str; 8] = [
    "paper_synth",
    "ratio_fixed",
    "ratio_increasing",
    "ratio_decreasing",
    "ratio_fluctuating",
    "drift_sudden",
    "drift_gradual",
    "drift_recurrent",
];

const DESK_LENGTH: u64 = 50_000;

/// Pinned generator configurations. Desk presets are 50k steps; the
/// full-size synthetic benchmark is 150k steps with six attributes.
pub fn preset(name: &str) -> Result<GeneratorConfig, ConfigError> {
    let n = DESK_LENGTH;
    let cfg = match name {
        "paper_synth" => paper_synth(),
        "ratio_fixed" => ratio_stream(Schedule::constant(0.25)),
        // Minority share shrinks over the stream: imbalance grows.
        "ratio_increasing" => ratio_stream(Schedule::linear(0.5, 0.1, n)),
        "ratio_decreasing" => ratio_stream(Schedule::linear(0.1, 0.5, n)),
        "ratio_fluctuating" => ratio_stream(Schedule::piecewise(vec![(1, 0.2), (n / 2, 0.8), (n, 0.2)])?),
        "drift_sudden" => drift_stream(|m| DriftEvent::swap(DriftKind::Sudden, 25_000, 0, m, &[0, 1, 2, 3])),
        "drift_gradual" => drift_stream(|m| DriftEvent::swap(DriftKind::Gradual, 20_000, 10_000, m, &[0, 1, 2, 3])),
        "drift_recurrent" => {
            drift_stream(|m| DriftEvent::swap(DriftKind::Recurrent { hold: 10_000 }, 15_000, 5_000, m, &[0, 1, 2, 3]))
        }
        other => return Err(ConfigError::UnknownPreset(other.to_string())),
    };
    cfg.validate()?;
    Ok(cfg)
}

fn paper_synth() -> GeneratorConfig {
    const N: u64 = 150_000;
    let d = 6;
    let mut cfg = GeneratorConfig {
        ratio: Schedule::constant(1.0 / 4.13),
        bias: Schedule::constant(0.2),
        protected_share: 0.6,
        protected_shrink: 0.15,
        group_feature: true,
        ..GeneratorConfig::basic(d, 1.5, N, 1)
    };
    let subsets: [&[usize]; 5] = [&[0, 1], &[2, 3], &[4, 5], &[0, 2], &[1, 4]];
    for (k, attrs) in subsets.iter().enumerate() {
        let start = N * (k as u64 + 1) / 6;
        let means = cfg.means_at(start);
        cfg.drifts.push(DriftEvent::swap(DriftKind::Sudden, start, 0, &means, attrs));
    }
    cfg
}

fn ratio_stream(ratio: Schedule) -> GeneratorConfig {
    GeneratorConfig {
        ratio,
        group_feature: true,
        ..GeneratorConfig::basic(4, 1.0, DESK_LENGTH, 1)
    }
}

/// Fluctuating bias: 0.1 -> 0.3 -> 0.05 -> 0.25 over the stream.
fn fluctuating_bias() -> Schedule {
    let n = DESK_LENGTH;
    Schedule::piecewise(vec![(1, 0.1), (n / 4, 0.3), (n / 2, 0.05), (3 * n / 4, 0.25), (n, 0.1)])
        .expect("static knots")
}

fn drift_stream(event: impl FnOnce(&[Vec<f64>; 2]) -> DriftEvent) -> GeneratorConfig {
    let mut cfg = GeneratorConfig {
        bias: fluctuating_bias(),
        group_feature: true,
        ..GeneratorConfig::basic(4, 1.0, DESK_LENGTH, 1)
    };
    cfg.means[1] = vec![2.0, 0.5, 0.0, 0.0];
    let e = event(&cfg.means);
    cfg.drifts.push(e);
    cfg
}
