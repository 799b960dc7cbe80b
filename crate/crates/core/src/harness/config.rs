//! Experiment configuration files.
//!
//! Plain text, one `key = value` per line, grouped under `[section]`
//! headers. `#` starts a comment. Sections and keys:
//!
//! ```text
//! [source]
//! dataset = paper_synth        # a preset name, `generator`, or a CSV path
//! length = 50000               # optional, presets only
//!
//! [schema]                     # CSV sources only
//! attributes = age:numeric, sex:categorical
//! values.sex = F, M
//! protected = sex
//! protected_value = F
//! protected_values = F, M      # only if `protected` is not an attribute
//! label = y
//! label_value = good
//! label_values = good, bad
//!
//! [model]
//! method = fabboo              # fabboo | osboost | ofib | cfbb | imbalance_only
//! fairness = sp                # none | sp | eqop | peq
//! learners = 20
//! gamma = 0.1
//! lambda = 0.9
//! window = 2000
//! epsilon = 0.0001
//! smoothing = 1
//! chunk = 1000
//!
//! [run]
//! shuffles = 10
//! seed = 1
//! stride = 100
//! out = runs/example
//!
//! [generator]                  # dataset = generator only
//! means.neg = 0, 0
//! means.pos = 1, 1
//! std.neg = 1, 1
//! std.pos = 1, 1
//! ratio = 1:0.5                # knots `t:value`, linear in between
//! bias = 1:0.1, 50000:0.2
//! protected_share = 0.5
//! protected_shrink = 0.1       # pull protected positives toward the negatives
//! group_feature = true
//! length = 50000
//! drift.0 = sudden 25000 0 | 1, 1 | -1, -1
//! drift.1 = recurrent/10000 15000 5000 | 0.5, 0 | 0, 0
//! ```
//!
//! A drift line reads `kind start duration | negative shifts | positive
//! shifts`, with `kind` one of `sudden`, `gradual` or `recurrent/<hold>`.
//! Category values and paths cannot contain commas.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use crate::ensemble::{FabbooConfig, Method, DEFAULT_CHUNK};
use crate::error::ConfigError;
use crate::fairness::FairnessNotion;
use crate::stream::{AttributeKind, AttributeSpec, BinaryColumn, DatasetSchema};
use crate::synth::{self, DriftEvent, DriftKind, GeneratorConfig, Schedule};

#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Preset { name: String, length: Option<u64> },
    Csv { path: PathBuf, schema: DatasetSchema },
    /// The generator's own seed is ignored; runs seed it per shuffle.
    Generator(GeneratorConfig),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub source: Source,
    pub method: Method,
    pub notion: Option<FairnessNotion>,
    pub learners: usize,
    pub gamma: f64,
    pub lambda: f64,
    pub window: usize,
    pub epsilon: f64,
    pub smoothing: f64,
    pub chunk: u64,
    pub shuffles: u32,
    pub seed: u64,
    pub stride: u64,
    pub out: PathBuf,
}

impl ExperimentConfig {
    /// Paper-default hyperparameters on a preset.
    pub fn preset(name: &str) -> Self {
        let d = FabbooConfig::default();
        Self {
            source: Source::Preset {
                name: name.to_string(),
                length: None,
            },
            method: Method::Fabboo,
            notion: Some(FairnessNotion::StatisticalParity),
            learners: d.learners,
            gamma: d.gamma,
            lambda: d.lambda,
            window: d.window,
            epsilon: d.epsilon,
            smoothing: d.smoothing,
            chunk: DEFAULT_CHUNK,
            shuffles: 1,
            seed: 1,
            stride: 100,
            out: PathBuf::from("runs"),
        }
    }

    /// Model configuration for this experiment.
    pub fn model(&self) -> Result<FabbooConfig, ConfigError> {
        let mut m = FabbooConfig::for_method(self.method, self.notion, self.chunk)?;
        m.learners = self.learners;
        m.gamma = self.gamma;
        m.lambda = self.lambda;
        m.window = self.window;
        m.epsilon = self.epsilon;
        m.smoothing = self.smoothing;
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.shuffles == 0 {
            return Err(ConfigError::invalid("shuffles", "must be at least 1"));
        }
        if self.stride == 0 {
            return Err(ConfigError::invalid("stride", "must be at least 1"));
        }
        if self.chunk == 0 {
            return Err(ConfigError::invalid("chunk", "must be at least 1"));
        }
        match &self.source {
            Source::Preset { name, .. } => {
                synth::preset(name)?;
            }
            Source::Csv { schema, .. } => schema.validate()?,
            Source::Generator(g) => g.validate()?,
        }
        self.model().map(|_| ())
    }

    /// Parses a configuration file.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries = Entries::default();
        let mut section = String::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let syntax = |message: &str| ConfigError::Syntax {
                line: i + 1,
                message: message.to_string(),
            };
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest.strip_suffix(']').ok_or_else(|| syntax("unterminated section header"))?;
                section = name.trim().to_string();
                if !SECTIONS.contains(&section.as_str()) {
                    return Err(syntax(&format!("unknown section `{section}`")));
                }
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| syntax("expected `key = value`"))?;
            if section.is_empty() {
                return Err(syntax("key outside of a section"));
            }
            entries.0.insert(format!("{section}.{}", k.trim()), v.trim().to_string());
        }
        entries.build()
    }

    /// Applies a command-line override such as `("learners", "10")`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        self.set_all([(key, value)])
    }

    /// Applies several overrides at once; the result is validated only
    /// after all of them are in place.
    pub fn set_all<'a>(&mut self, overrides: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<(), ConfigError> {
        let mut entries = Entries::from_config(self);
        for (key, value) in overrides {
            let section = match key {
                "dataset" => "source",
                "method" | "fairness" | "learners" | "gamma" | "lambda" | "window" | "epsilon" | "smoothing"
                | "chunk" => "model",
                "shuffles" | "seed" | "stride" | "out" => "run",
                other => return Err(ConfigError::UnknownKey(other.to_string())),
            };
            if key == "dataset" {
                // Drop keys that belong to a different kind of source.
                let stale: &[&str] = if synth::PRESETS.contains(&value) {
                    &["source.", "schema.", "generator."]
                } else if value == "generator" {
                    &["source.", "schema."]
                } else {
                    &["source.", "generator."]
                };
                entries.0.retain(|k, _| !stale.iter().any(|p| k.starts_with(p)));
            }
            entries.0.insert(format!("{section}.{key}"), value.to_string());
        }
        *self = entries.build()?;
        Ok(())
    }

    /// Serializes to the configuration file format.
    pub fn to_text(&self) -> String {
        let entries = Entries::from_config(self);
        let mut out = String::new();
        for section in SECTIONS {
            let prefix = format!("{section}.");
            let keys: Vec<_> = entries.0.iter().filter(|(k, _)| k.starts_with(&prefix)).collect();
            if keys.is_empty() {
                continue;
            }
            let _ = writeln!(out, "[{section}]");
            for (k, v) in keys {
                let _ = writeln!(out, "{} = {v}", &k[prefix.len()..]);
            }
            out.push('\n');
        }
        out
    }
}

impl FromStr for ExperimentConfig {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

const SECTIONS: [&str; 5] = ["source", "schema", "model", "run", "generator"];

/// Flat `section.key -> value` view of a configuration.
#[derive(Debug, Default)]
struct Entries(BTreeMap<String, String>);

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

fn split_list(v: &str) -> Vec<String> {
    v.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
}

fn parse_num<T: FromStr>(key: &str, v: &str) -> Result<T, ConfigError> {
    v.trim()
        .parse()
        .map_err(|_| ConfigError::invalid(key, format!("cannot parse `{v}`")))
}

fn parse_floats(key: &str, v: &str) -> Result<Vec<f64>, ConfigError> {
    split_list(v).iter().map(|x| parse_num(key, x)).collect()
}

fn schedule_text(s: &Schedule) -> String {
    s.knots().iter().map(|(t, v)| format!("{t}:{v}")).collect::<Vec<_>>().join(", ")
}

fn parse_schedule(key: &str, v: &str) -> Result<Schedule, ConfigError> {
    let knots = split_list(v)
        .iter()
        .map(|k| {
            let (t, x) = k
                .split_once(':')
                .ok_or_else(|| ConfigError::invalid(key, format!("knot `{k}` is not `t:value`")))?;
            Ok((parse_num(key, t)?, parse_num(key, x)?))
        })
        .collect::<Result<Vec<_>, ConfigError>>()?;
    Schedule::piecewise(knots).map_err(|e| match e {
        ConfigError::Invalid { message, .. } => ConfigError::invalid(key, message),
        other => other,
    })
}

fn drift_text(e: &DriftEvent) -> String {
    let kind = match e.kind {
        DriftKind::Sudden => "sudden".to_string(),
        DriftKind::Gradual => "gradual".to_string(),
        DriftKind::Recurrent { hold } => format!("recurrent/{hold}"),
    };
    format!("{kind} {} {} | {} | {}", e.start, e.duration, join(&e.shift[0]), join(&e.shift[1]))
}

fn parse_drift(key: &str, v: &str) -> Result<DriftEvent, ConfigError> {
    let parts: Vec<&str> = v.split('|').collect();
    let bad = || ConfigError::invalid(key, "expected `kind start duration | neg shifts | pos shifts`");
    if parts.len() != 3 {
        return Err(bad());
    }
    let head: Vec<&str> = parts[0].split_whitespace().collect();
    if head.len() != 3 {
        return Err(bad());
    }
    let kind = match head[0] {
        "sudden" => DriftKind::Sudden,
        "gradual" => DriftKind::Gradual,
        k => match k.strip_prefix("recurrent/") {
            Some(h) => DriftKind::Recurrent {
                hold: parse_num(key, h)?,
            },
            None => return Err(ConfigError::invalid(key, format!("unknown drift kind `{k}`"))),
        },
    };
    Ok(DriftEvent {
        kind,
        start: parse_num(key, head[1])?,
        duration: parse_num(key, head[2])?,
        shift: [parse_floats(key, parts[1])?, parse_floats(key, parts[2])?],
    })
}

impl Entries {
    fn from_config(c: &ExperimentConfig) -> Self {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: String| {
            m.insert(k.to_string(), v);
        };
        match &c.source {
            Source::Preset { name, length } => {
                put("source.dataset", name.clone());
                if let Some(n) = length {
                    put("source.length", n.to_string());
                }
            }
            Source::Csv { path, schema } => {
                put("source.dataset", path.display().to_string());
                let attrs: Vec<String> = schema
                    .attributes
                    .iter()
                    .map(|a| match &a.kind {
                        AttributeKind::Numeric => format!("{}:numeric", a.name),
                        AttributeKind::Categorical(_) => format!("{}:categorical", a.name),
                    })
                    .collect();
                put("schema.attributes", attrs.join(", "));
                for a in &schema.attributes {
                    if let AttributeKind::Categorical(values) = &a.kind {
                        put(&format!("schema.values.{}", a.name), join(values));
                    }
                }
                put("schema.protected", schema.protected.column.clone());
                put("schema.protected_value", schema.protected.target.clone());
                if !schema.protected.alphabet.is_empty() {
                    put("schema.protected_values", join(&schema.protected.alphabet));
                }
                put("schema.label", schema.label.column.clone());
                put("schema.label_value", schema.label.target.clone());
                if !schema.label.alphabet.is_empty() {
                    put("schema.label_values", join(&schema.label.alphabet));
                }
            }
            Source::Generator(g) => {
                put("source.dataset", "generator".into());
                put("generator.means.neg", join(&g.means[0]));
                put("generator.means.pos", join(&g.means[1]));
                put("generator.std.neg", join(&g.std_devs[0]));
                put("generator.std.pos", join(&g.std_devs[1]));
                put("generator.ratio", schedule_text(&g.ratio));
                put("generator.bias", schedule_text(&g.bias));
                put("generator.protected_share", g.protected_share.to_string());
                if g.protected_shrink != 0.0 {
                    put("generator.protected_shrink", g.protected_shrink.to_string());
                }
                put("generator.group_feature", g.group_feature.to_string());
                put("generator.length", g.length.to_string());
                for (i, e) in g.drifts.iter().enumerate() {
                    put(&format!("generator.drift.{i}"), drift_text(e));
                }
            }
        }
        put("model.method", c.method.to_string());
        put("model.fairness", c.notion.map_or("none".to_string(), |n| n.to_string()));
        put("model.learners", c.learners.to_string());
        put("model.gamma", c.gamma.to_string());
        put("model.lambda", c.lambda.to_string());
        put("model.window", c.window.to_string());
        put("model.epsilon", c.epsilon.to_string());
        put("model.smoothing", c.smoothing.to_string());
        put("model.chunk", c.chunk.to_string());
        put("run.shuffles", c.shuffles.to_string());
        put("run.seed", c.seed.to_string());
        put("run.stride", c.stride.to_string());
        put("run.out", c.out.display().to_string());
        Entries(m)
    }

    fn take(&mut self, key: &str) -> Option<String> {
        self.0.remove(key)
    }

    fn require(&mut self, key: &str) -> Result<String, ConfigError> {
        self.take(key)
            .ok_or_else(|| ConfigError::invalid(key, "missing required key"))
    }

    fn build(mut self) -> Result<ExperimentConfig, ConfigError> {
        let dataset = self.require("source.dataset")?;
        let source = if dataset == "generator" {
            self.generator()?
        } else if synth::PRESETS.contains(&dataset.as_str()) {
            let length = self.take("source.length").map(|v| parse_num("length", &v)).transpose()?;
            Source::Preset { name: dataset, length }
        } else {
            Source::Csv {
                path: PathBuf::from(dataset),
                schema: self.schema()?,
            }
        };

        let mut c = ExperimentConfig {
            source,
            ..ExperimentConfig::preset("paper_synth")
        };
        if let Some(v) = self.take("model.method") {
            c.method = v.parse()?;
        }
        if let Some(v) = self.take("model.fairness") {
            c.notion = match v.as_str() {
                "none" => None,
                other => Some(other.parse()?),
            };
        }
        if let Some(v) = self.take("model.learners") {
            c.learners = parse_num("learners", &v)?;
        }
        if let Some(v) = self.take("model.gamma") {
            c.gamma = parse_num("gamma", &v)?;
        }
        if let Some(v) = self.take("model.lambda") {
            c.lambda = parse_num("lambda", &v)?;
        }
        if let Some(v) = self.take("model.window") {
            c.window = parse_num("window", &v)?;
        }
        if let Some(v) = self.take("model.epsilon") {
            c.epsilon = parse_num("epsilon", &v)?;
        }
        if let Some(v) = self.take("model.smoothing") {
            c.smoothing = parse_num("smoothing", &v)?;
        }
        if let Some(v) = self.take("model.chunk") {
            c.chunk = parse_num("chunk", &v)?;
        }
        if let Some(v) = self.take("run.shuffles") {
            c.shuffles = parse_num("shuffles", &v)?;
        }
        if let Some(v) = self.take("run.seed") {
            c.seed = parse_num("seed", &v)?;
        }
        if let Some(v) = self.take("run.stride") {
            c.stride = parse_num("stride", &v)?;
        }
        if let Some(v) = self.take("run.out") {
            c.out = PathBuf::from(v);
        }
        if let Some(k) = self.0.keys().next() {
            return Err(ConfigError::UnknownKey(k.clone()));
        }
        c.validate()?;
        Ok(c)
    }

    fn schema(&mut self) -> Result<DatasetSchema, ConfigError> {
        let attrs = self.require("schema.attributes")?;
        let mut attributes = Vec::new();
        for a in split_list(&attrs) {
            let (name, kind) = a
                .split_once(':')
                .ok_or_else(|| ConfigError::invalid("schema.attributes", format!("`{a}` is not `name:kind`")))?;
            let (name, kind) = (name.trim(), kind.trim());
            attributes.push(match kind {
                "numeric" => AttributeSpec::numeric(name),
                "categorical" => {
                    let key = format!("schema.values.{name}");
                    AttributeSpec::categorical(name, split_list(&self.require(&key)?))
                }
                other => {
                    return Err(ConfigError::invalid("schema.attributes", format!("unknown kind `{other}`")));
                }
            });
        }
        let mut column = |col: &str, val: &str, vals: &str| -> Result<BinaryColumn, ConfigError> {
            let mut c = BinaryColumn::new(self.require(col)?, self.require(val)?);
            if let Some(v) = self.take(vals) {
                c = c.with_alphabet(split_list(&v));
            }
            Ok(c)
        };
        let protected = column("schema.protected", "schema.protected_value", "schema.protected_values")?;
        let label = column("schema.label", "schema.label_value", "schema.label_values")?;
        let schema = DatasetSchema {
            attributes,
            protected,
            label,
        };
        schema.validate()?;
        Ok(schema)
    }

    fn generator(&mut self) -> Result<Source, ConfigError> {
        let floats = |s: &mut Self, key: &str| -> Result<Vec<f64>, ConfigError> {
            let v = s.require(key)?;
            parse_floats(key, &v)
        };
        let means = [floats(self, "generator.means.neg")?, floats(self, "generator.means.pos")?];
        let std_devs = [floats(self, "generator.std.neg")?, floats(self, "generator.std.pos")?];
        let length: u64 = parse_num("generator.length", &self.require("generator.length")?)?;
        let mut g = GeneratorConfig {
            means,
            std_devs,
            ..GeneratorConfig::basic(1, 1.0, length, 0)
        };
        if let Some(v) = self.take("generator.ratio") {
            g.ratio = parse_schedule("generator.ratio", &v)?;
        }
        if let Some(v) = self.take("generator.bias") {
            g.bias = parse_schedule("generator.bias", &v)?;
        }
        if let Some(v) = self.take("generator.protected_share") {
            g.protected_share = parse_num("generator.protected_share", &v)?;
        }
        if let Some(v) = self.take("generator.protected_shrink") {
            g.protected_shrink = parse_num("generator.protected_shrink", &v)?;
        }
        if let Some(v) = self.take("generator.group_feature") {
            g.group_feature = parse_num("generator.group_feature", &v)?;
        }
        let mut drifts: Vec<(usize, DriftEvent)> = Vec::new();
        let keys: Vec<String> = self.0.keys().filter(|k| k.starts_with("generator.drift.")).cloned().collect();
        for k in keys {
            let idx: usize = parse_num(&k, &k["generator.drift.".len()..])?;
            let v = self.take(&k).unwrap_or_default();
            drifts.push((idx, parse_drift(&k, &v)?));
        }
        drifts.sort_by_key(|d| d.0);
        g.drifts = drifts.into_iter().map(|d| d.1).collect();
        g.validate()?;
        Ok(Source::Generator(g))
    }
}
