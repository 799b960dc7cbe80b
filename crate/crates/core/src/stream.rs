//! Instances, dataset schemas, CSV ingestion and stream sources.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;
use std::sync::Arc;

use crate::error::DataError;
use crate::rng;
use crate::synth::SyntheticStream;

/// Protected-group membership: `z` (protected) or `z̄` (non-protected).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Group {
    Protected,
    NonProtected,
}

impl Group {
    pub fn index(self) -> usize {
        match self {
            Group::Protected => 0,
            Group::NonProtected => 1,
        }
    }
}

/// Binary class label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Positive,
    Negative,
}

impl Label {
    /// +1 for positive, -1 for negative.
    pub fn sign(self) -> f64 {
        match self {
            Label::Positive => 1.0,
            Label::Negative => -1.0,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Label::Negative => 0,
            Label::Positive => 1,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Label::Positive => Label::Negative,
            Label::Negative => Label::Positive,
        }
    }
}

/// A single attribute value. Categorical values are indices into the
/// attribute's alphabet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value {
    Num(f64),
    Cat(u32),
}

/// Kind of a feature as seen by the learners.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureKind {
    Numeric,
    Categorical { arity: u32 },
}

/// Per-feature kinds of a stream, shared between learners.
pub type FeatureSpace = Arc<[FeatureKind]>;

/// One stream arrival.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub features: Vec<Value>,
    pub group: Group,
    pub label: Label,
    pub seq: u64,
}

/// The label-free view of an instance handed to a model at prediction time.
#[derive(Debug, Clone, Copy)]
pub struct Query<'a> {
    pub features: &'a [Value],
    pub group: Group,
    pub seq: u64,
}

impl Instance {
    pub fn query(&self) -> Query<'_> {
        Query {
            features: &self.features,
            group: self.group,
            seq: self.seq,
        }
    }
}

/// Checks a feature vector against a feature space.
pub fn check_features(space: &[FeatureKind], features: &[Value]) -> Result<(), DataError> {
    if space.len() != features.len() {
        return Err(DataError::Arity {
            expected: space.len(),
            got: features.len(),
        });
    }
    for (index, (kind, value)) in space.iter().zip(features).enumerate() {
        match (kind, value) {
            (FeatureKind::Numeric, Value::Num(x)) if x.is_finite() => {}
            (FeatureKind::Numeric, _) => {
                return Err(DataError::ValueKind {
                    index,
                    expected: "finite numeric",
                })
            }
            (FeatureKind::Categorical { arity }, Value::Cat(c)) if c < arity => {}
            (FeatureKind::Categorical { .. }, _) => {
                return Err(DataError::ValueKind {
                    index,
                    expected: "categorical in-alphabet",
                })
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub enum AttributeKind {
    Numeric,
    Categorical(Vec<String>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttributeSpec {
    pub name: String,
    pub kind: AttributeKind,
}

impl AttributeSpec {
    pub fn numeric(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            kind: AttributeKind::Numeric,
        }
    }

    pub fn categorical<S: Into<String>>(name: impl Into<String>, values: impl IntoIterator<Item = S>) -> Self {
        Self {
            name: name.into(),
            kind: AttributeKind::Categorical(values.into_iter().map(Into::into).collect()),
        }
    }
}

/// Maps a string column onto a binary flag: `target` versus every other
/// value of `alphabet`. An empty alphabet means "use the alphabet of the
/// categorical attribute with the same name".
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryColumn {
    pub column: String,
    pub target: String,
    pub alphabet: Vec<String>,
}

impl BinaryColumn {
    pub fn new(column: impl Into<String>, target: impl Into<String>) -> Self {
        Self {
            column: column.into(),
            target: target.into(),
            alphabet: Vec::new(),
        }
    }

    pub fn with_alphabet<S: Into<String>>(mut self, values: impl IntoIterator<Item = S>) -> Self {
        self.alphabet = values.into_iter().map(Into::into).collect();
        self
    }
}

/// Column layout of a dataset: feature attributes plus the protected and
/// label columns. The protected column may double as a feature attribute.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSchema {
    pub attributes: Vec<AttributeSpec>,
    pub protected: BinaryColumn,
    pub label: BinaryColumn,
}

impl DatasetSchema {
    pub fn feature_space(&self) -> FeatureSpace {
        self.attributes
            .iter()
            .map(|a| match &a.kind {
                AttributeKind::Numeric => FeatureKind::Numeric,
                AttributeKind::Categorical(values) => FeatureKind::Categorical {
                    arity: values.len() as u32,
                },
            })
            .collect()
    }

    fn alphabet_of<'a>(&'a self, column: &'a BinaryColumn) -> &'a [String] {
        if !column.alphabet.is_empty() {
            return &column.alphabet;
        }
        self.attributes
            .iter()
            .find(|a| a.name == column.column)
            .and_then(|a| match &a.kind {
                AttributeKind::Categorical(values) => Some(values.as_slice()),
                AttributeKind::Numeric => None,
            })
            .unwrap_or(&[])
    }

    pub fn protected_alphabet(&self) -> &[String] {
        self.alphabet_of(&self.protected)
    }

    pub fn label_alphabet(&self) -> &[String] {
        self.alphabet_of(&self.label)
    }

    /// Checks the schema is internally consistent.
    pub fn validate(&self) -> Result<(), crate::error::ConfigError> {
        use crate::error::ConfigError;
        let mut names = std::collections::HashSet::new();
        for a in &self.attributes {
            if !names.insert(a.name.as_str()) {
                return Err(ConfigError::invalid("attribute", format!("duplicate attribute `{}`", a.name)));
            }
            if let AttributeKind::Categorical(values) = &a.kind {
                if values.is_empty() {
                    return Err(ConfigError::invalid("attribute", format!("`{}` has an empty alphabet", a.name)));
                }
            }
        }
        if self.attributes.iter().any(|a| a.name == self.label.column) {
            return Err(ConfigError::invalid("label", "label column cannot also be a feature"));
        }
        for (key, col) in [("protected", &self.protected), ("label", &self.label)] {
            let alphabet = self.alphabet_of(col);
            if !alphabet.contains(&col.target) {
                return Err(ConfigError::invalid(
                    key,
                    format!("value `{}` is not in the alphabet of `{}`", col.target, col.column),
                ));
            }
        }
        Ok(())
    }
}

/// A fully loaded dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub schema: DatasetSchema,
    pub instances: Vec<Instance>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    /// Replays the dataset in stored order.
    pub fn replay(&self) -> StreamSource {
        StreamSource::from_instances(self.schema.clone(), self.instances.clone())
    }

    /// Deterministically shuffled stream; sequence numbers are reassigned 1..=n.
    pub fn shuffle(&self, seed: u64) -> StreamSource {
        shuffle(self, seed)
    }
}

/// See [`Dataset::shuffle`].
pub fn shuffle(dataset: &Dataset, seed: u64) -> StreamSource {
    let order = rng::permutation(dataset.len(), seed);
    let instances = order
        .into_iter()
        .enumerate()
        .map(|(i, src)| {
            let mut inst = dataset.instances[src].clone();
            inst.seq = i as u64 + 1;
            inst
        })
        .collect();
    StreamSource::from_instances(dataset.schema.clone(), instances)
}

enum SourceInner {
    Memory(std::vec::IntoIter<Instance>),
    Synthetic(Box<SyntheticStream>),
}

/// An ordered, single-pass producer of instances.
pub struct StreamSource {
    schema: DatasetSchema,
    inner: SourceInner,
}

impl StreamSource {
    pub fn from_instances(schema: DatasetSchema, instances: Vec<Instance>) -> Self {
        Self {
            schema,
            inner: SourceInner::Memory(instances.into_iter()),
        }
    }

    pub(crate) fn synthetic(schema: DatasetSchema, stream: SyntheticStream) -> Self {
        Self {
            schema,
            inner: SourceInner::Synthetic(Box::new(stream)),
        }
    }

    pub fn schema(&self) -> &DatasetSchema {
        &self.schema
    }

    pub fn feature_space(&self) -> FeatureSpace {
        self.schema.feature_space()
    }
}

impl Iterator for StreamSource {
    type Item = Instance;

    fn next(&mut self) -> Option<Instance> {
        match &mut self.inner {
            SourceInner::Memory(it) => it.next(),
            SourceInner::Synthetic(s) => s.next(),
        }
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        match &self.inner {
            SourceInner::Memory(it) => it.size_hint(),
            SourceInner::Synthetic(s) => s.size_hint(),
        }
    }
}

/// Loads a CSV file (comma separated, UTF-8, header row) under `schema`.
pub fn load_csv(path: impl AsRef<Path>, schema: &DatasetSchema) -> Result<Dataset, DataError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| DataError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    read_csv(file, schema)
}

enum ColumnRole {
    Feature(usize),
    Protected,
    Label,
}

/// Parses CSV from any reader. Rows are numbered from 1 (first data row).
pub fn read_csv<R: Read>(reader: R, schema: &DatasetSchema) -> Result<Dataset, DataError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| csv_error(0, e))?
        .iter()
        .map(str::to_owned)
        .collect::<Vec<_>>();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| DataError::MissingColumn(name.to_owned()))
    };

    let feature_cols = schema
        .attributes
        .iter()
        .map(|a| find(&a.name))
        .collect::<Result<Vec<_>, _>>()?;
    let protected_col = find(&schema.protected.column)?;
    let label_col = find(&schema.label.column)?;
    let protected_alphabet = schema.protected_alphabet();
    let label_alphabet = schema.label_alphabet();

    // Protected and label columns first: when the protected column is also
    // a feature, its mapping error is the more useful one.
    let mut roles = vec![(protected_col, ColumnRole::Protected), (label_col, ColumnRole::Label)];
    roles.extend(feature_cols.iter().enumerate().map(|(i, &c)| (c, ColumnRole::Feature(i))));

    let mut instances = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| csv_error(row, e))?;
        let mut features = vec![Value::Num(0.0); schema.attributes.len()];
        let mut group = Group::NonProtected;
        let mut label = Label::Negative;
        for (col, role) in &roles {
            let column = &headers[*col];
            let token = record.get(*col).unwrap_or("");
            let err = |message: String| DataError::Parse {
                row,
                column: column.clone(),
                message,
            };
            if token.is_empty() || token == "?" {
                return Err(err("missing value".into()));
            }
            match role {
                ColumnRole::Feature(f) => {
                    features[*f] = match &schema.attributes[*f].kind {
                        AttributeKind::Numeric => match token.parse::<f64>() {
                            Ok(x) if x.is_finite() => Value::Num(x),
                            _ => return Err(err(format!("non-numeric token `{token}`"))),
                        },
                        AttributeKind::Categorical(values) => match values.iter().position(|v| v == token) {
                            Some(idx) => Value::Cat(idx as u32),
                            None => return Err(err(format!("category `{token}` outside the alphabet"))),
                        },
                    }
                }
                ColumnRole::Protected => {
                    if !protected_alphabet.iter().any(|v| v == token) {
                        return Err(err(format!("unmapped protected value `{token}`")));
                    }
                    group = if token == schema.protected.target {
                        Group::Protected
                    } else {
                        Group::NonProtected
                    };
                }
                ColumnRole::Label => {
                    if !label_alphabet.iter().any(|v| v == token) {
                        return Err(err(format!("unmapped label value `{token}`")));
                    }
                    label = if token == schema.label.target {
                        Label::Positive
                    } else {
                        Label::Negative
                    };
                }
            }
        }
        instances.push(Instance {
            features,
            group,
            label,
            seq: row as u64,
        });
    }
    Ok(Dataset {
        schema: schema.clone(),
        instances,
    })
}

fn csv_error(row: usize, e: csv::Error) -> DataError {
    DataError::Parse {
        row,
        column: String::new(),
        message: e.to_string(),
    }
}

/// Writes instances as CSV under `schema`, readable back by [`read_csv`].
pub fn write_csv<W: Write>(
    writer: W,
    schema: &DatasetSchema,
    instances: impl IntoIterator<Item = Instance>,
) -> Result<(), DataError> {
    let io = |e: csv::Error| DataError::Io {
        path: String::from("<csv writer>"),
        message: e.to_string(),
    };
    let protected_is_feature = schema.attributes.iter().any(|a| a.name == schema.protected.column);
    let other_value = |alphabet: &[String], target: &str| -> String {
        alphabet
            .iter()
            .find(|v| *v != target)
            .cloned()
            .unwrap_or_else(|| format!("not_{target}"))
    };
    let non_protected = other_value(schema.protected_alphabet(), &schema.protected.target);
    let negative = other_value(schema.label_alphabet(), &schema.label.target);

    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<&str> = schema.attributes.iter().map(|a| a.name.as_str()).collect();
    if !protected_is_feature {
        header.push(&schema.protected.column);
    }
    header.push(&schema.label.column);
    w.write_record(&header).map_err(io)?;

    for inst in instances {
        let mut row: Vec<String> = Vec::with_capacity(header.len());
        for (spec, value) in schema.attributes.iter().zip(&inst.features) {
            row.push(match (&spec.kind, value) {
                (AttributeKind::Categorical(values), Value::Cat(c)) => values[*c as usize].clone(),
                (_, Value::Num(x)) => x.to_string(),
                (AttributeKind::Numeric, Value::Cat(c)) => c.to_string(),
            });
        }
        if !protected_is_feature {
            row.push(match inst.group {
                Group::Protected => schema.protected.target.clone(),
                Group::NonProtected => non_protected.clone(),
            });
        }
        row.push(match inst.label {
            Label::Positive => schema.label.target.clone(),
            Label::Negative => negative.clone(),
        });
        w.write_record(&row).map_err(io)?;
    }
    w.flush().map_err(|e| DataError::Io {
        path: String::from("<csv writer>"),
        message: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn credit_schema() -> DatasetSchema {
        DatasetSchema {
            attributes: vec![
                AttributeSpec::numeric("age"),
                AttributeSpec::categorical("sex", ["F", "M"]),
            ],
            protected: BinaryColumn::new("sex", "F"),
            label: BinaryColumn::new("y", "good").with_alphabet(["good", "bad"]),
        }
    }

    #[test]
    fn parses_three_rows() {
        let csv = "age,sex,y\n31,F,good\n45,M,bad\n22,F,bad\n";
        let ds = read_csv(csv.as_bytes(), &credit_schema()).unwrap();
        assert_eq!(ds.len(), 3);
        assert_eq!(ds.instances[0].features, vec![Value::Num(31.0), Value::Cat(0)]);
        assert_eq!(ds.instances[0].group, Group::Protected);
        assert_eq!(ds.instances[0].label, Label::Positive);
        assert_eq!(ds.instances[1].group, Group::NonProtected);
        assert_eq!(ds.instances[1].label, Label::Negative);
        assert_eq!(ds.instances[2].group, Group::Protected);
        assert_eq!(ds.instances[2].label, Label::Negative);
        assert_eq!(ds.instances.iter().map(|i| i.seq).collect::<Vec<_>>(), vec![1, 2, 3]);
    }

    #[test]
    fn header_only_is_empty() {
        let ds = read_csv("age,sex,y\n".as_bytes(), &credit_schema()).unwrap();
        assert!(ds.is_empty());
    }

    #[test]
    fn unmapped_protected_value_names_row() {
        let csv = "age,sex,y\n31,F,good\n45,X,bad\n";
        let err = read_csv(csv.as_bytes(), &credit_schema()).unwrap_err();
        assert!(matches!(err, DataError::Parse { row: 2, ref column, .. } if column == "sex"));
        assert!(err.to_string().starts_with("unmapped protected value"));
        assert!(err.to_string().contains("at row 2"));
    }

    #[test]
    fn rejects_bad_tokens() {
        let schema = credit_schema();
        let e = read_csv("age,sex,y\nold,F,good\n".as_bytes(), &schema).unwrap_err();
        assert!(e.to_string().contains("non-numeric"));
        let e = read_csv("age,sex,y\n3,F,meh\n".as_bytes(), &schema).unwrap_err();
        assert!(e.to_string().contains("unmapped label"));
        let e = read_csv("age,sex,y\n,F,good\n".as_bytes(), &schema).unwrap_err();
        assert!(e.to_string().contains("missing value"));
        let e = read_csv("age,y\n3,good\n".as_bytes(), &schema).unwrap_err();
        assert_eq!(e, DataError::MissingColumn("sex".into()));
    }

    #[test]
    fn protected_column_outside_features() {
        let schema = DatasetSchema {
            attributes: vec![AttributeSpec::numeric("x")],
            protected: BinaryColumn::new("race", "b").with_alphabet(["b", "w"]),
            label: BinaryColumn::new("y", "1").with_alphabet(["0", "1"]),
        };
        schema.validate().unwrap();
        let ds = read_csv("x,race,y\n1.5,w,1\n".as_bytes(), &schema).unwrap();
        assert_eq!(ds.instances[0].features, vec![Value::Num(1.5)]);
        assert_eq!(ds.instances[0].group, Group::NonProtected);
        let mut out = Vec::new();
        write_csv(&mut out, &schema, ds.instances.clone()).unwrap();
        let back = read_csv(out.as_slice(), &schema).unwrap();
        assert_eq!(back.instances, ds.instances);
    }

    #[test]
    fn shuffle_single_is_identity() {
        let ds = read_csv("age,sex,y\n31,F,good\n".as_bytes(), &credit_schema()).unwrap();
        for seed in [0, 1, 42, u64::MAX] {
            let out: Vec<_> = ds.shuffle(seed).collect();
            assert_eq!(out, ds.instances);
        }
    }

    #[test]
    fn shuffle_is_deterministic() {
        let rows: String = (0..50).map(|i| format!("{i},F,good\n")).collect();
        let ds = read_csv(format!("age,sex,y\n{rows}").as_bytes(), &credit_schema()).unwrap();
        let a: Vec<_> = ds.shuffle(9).collect();
        let b: Vec<_> = ds.shuffle(9).collect();
        assert_eq!(a, b);
        assert_eq!(a.iter().map(|i| i.seq).collect::<Vec<_>>(), (1..=50).collect::<Vec<_>>());
    }

    #[test]
    fn shuffle_golden_permutations() {
        // Pinned output of the SplitMix64 + Fisher–Yates shuffler for n = 5.
        let rows: String = (0..5).map(|i| format!("{i},F,good\n")).collect();
        let ds = read_csv(format!("age,sex,y\n{rows}").as_bytes(), &credit_schema()).unwrap();
        let ages = |seed| -> Vec<f64> {
            ds.shuffle(seed)
                .map(|i| match i.features[0] {
                    Value::Num(x) => x,
                    _ => unreachable!(),
                })
                .collect()
        };
        let p1 = ages(1);
        let p2 = ages(2);
        assert_ne!(p1, p2);
        assert_eq!(p1, GOLDEN_SEED_1);
        assert_eq!(p2, GOLDEN_SEED_2);
    }

    const GOLDEN_SEED_1: [f64; 5] = [2.0, 1.0, 4.0, 3.0, 0.0];
    const GOLDEN_SEED_2: [f64; 5] = [1.0, 3.0, 4.0, 2.0, 0.0];
}
