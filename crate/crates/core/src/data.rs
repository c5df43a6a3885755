//! Stream data model shared by the learners, the evaluation engine and the
//! parsers.

use std::fmt;

use crate::error::{Error, Result};

/// A class identifier in `[0, L)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ClassLabel(pub u32);

impl ClassLabel {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for ClassLabel {
    fn from(i: usize) -> Self {
        ClassLabel(i as u32)
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One feature value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value {
    Missing,
    Numeric(f64),
    /// Index into the attribute's declared value domain.
    Nominal(u32),
}

impl Value {
    pub fn is_missing(&self) -> bool {
        matches!(self, Value::Missing)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AttributeKind {
    Numeric,
    Nominal(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Attribute {
    pub name: String,
    pub kind: AttributeKind,
}

impl Attribute {
    pub fn numeric(name: impl Into<String>) -> Self {
        Attribute {
            name: name.into(),
            kind: AttributeKind::Numeric,
        }
    }

    pub fn nominal<S: Into<String>>(
        name: impl Into<String>,
        values: impl IntoIterator<Item = S>,
    ) -> Self {
        Attribute {
            name: name.into(),
            kind: AttributeKind::Nominal(values.into_iter().map(Into::into).collect()),
        }
    }

    /// Domain size for nominal attributes, `None` for numeric ones.
    pub fn domain_size(&self) -> Option<usize> {
        match &self.kind {
            AttributeKind::Numeric => None,
            AttributeKind::Nominal(v) => Some(v.len()),
        }
    }
}

/// Shape of a feature as seen by a learner.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureKind {
    Numeric,
    Nominal { domain: usize },
}

/// Ordered attribute declarations plus the position of the class attribute.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetSchema {
    pub relation: String,
    pub attributes: Vec<Attribute>,
    pub class_index: usize,
}

impl DatasetSchema {
    /// Validates the class attribute: it must exist, be nominal, and declare
    /// at least two values.
    pub fn new(
        relation: impl Into<String>,
        attributes: Vec<Attribute>,
        class_index: usize,
    ) -> Result<Self> {
        let class = attributes
            .get(class_index)
            .ok_or_else(|| Error::config(format!("class index {class_index} out of range")))?;
        match &class.kind {
            AttributeKind::Nominal(values) if values.len() >= 2 => {}
            AttributeKind::Nominal(_) => {
                return Err(Error::config(format!(
                    "class attribute '{}' declares fewer than two values",
                    class.name
                )))
            }
            AttributeKind::Numeric => {
                return Err(Error::config(format!(
                    "class attribute '{}' is not nominal",
                    class.name
                )))
            }
        }
        for attr in &attributes {
            if let AttributeKind::Nominal(values) = &attr.kind {
                if values.is_empty() {
                    return Err(Error::config(format!(
                        "attribute '{}' has an empty domain",
                        attr.name
                    )));
                }
            }
        }
        Ok(DatasetSchema {
            relation: relation.into(),
            attributes,
            class_index,
        })
    }

    pub fn class_attribute(&self) -> &Attribute {
        &self.attributes[self.class_index]
    }

    pub fn class_values(&self) -> &[String] {
        match &self.class_attribute().kind {
            AttributeKind::Nominal(v) => v,
            AttributeKind::Numeric => unreachable!("validated at construction"),
        }
    }

    pub fn num_classes(&self) -> usize {
        self.class_values().len()
    }

    /// Non-class attributes in declaration order.
    pub fn feature_attributes(&self) -> impl Iterator<Item = &Attribute> {
        self.attributes
            .iter()
            .enumerate()
            .filter(move |(i, _)| *i != self.class_index)
            .map(|(_, a)| a)
    }

    pub fn num_features(&self) -> usize {
        self.attributes.len() - 1
    }

    pub fn feature_kinds(&self) -> Vec<FeatureKind> {
        self.feature_attributes()
            .map(|a| match &a.kind {
                AttributeKind::Numeric => FeatureKind::Numeric,
                AttributeKind::Nominal(v) => FeatureKind::Nominal { domain: v.len() },
            })
            .collect()
    }
}

/// Feature vector of one streamed example (class attribute excluded).
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub values: Vec<Value>,
}

impl Instance {
    pub fn new(values: Vec<Value>) -> Self {
        Instance { values }
    }

    pub fn has_missing(&self) -> bool {
        self.values.iter().any(Value::is_missing)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledInstance {
    pub instance: Instance,
    pub label: ClassLabel,
}

/// A parsed labeled stream together with its schema.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub schema: DatasetSchema,
    pub instances: Vec<LabeledInstance>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn name(&self) -> &str {
        &self.schema.relation
    }
}
