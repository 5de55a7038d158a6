//! Object Model: classes, attributes, structural relationships, services and
//! transactions.

use std::fmt;
use std::str::FromStr;

use serde::de::{self, Deserializer};
use serde::ser::{SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};

use crate::carm::model::{Cardinality, Max};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectModel {
    pub classes: Vec<Class>,
    pub relationships: Vec<Relationship>,
    pub transactions: Vec<Transaction>,
}

impl ObjectModel {
    pub fn class(&self, name: &str) -> Option<&Class> {
        self.classes.iter().find(|c| c.name == name)
    }

    pub fn class_mut(&mut self, name: &str) -> Option<&mut Class> {
        self.classes.iter_mut().find(|c| c.name == name)
    }

    pub fn transactions_of<'a>(&'a self, class: &'a str) -> impl Iterator<Item = &'a Transaction> {
        self.transactions.iter().filter(move |t| t.owner_class == class)
    }

    /// Services and transactions share one namespace per class.
    pub fn member_name_taken(&self, class: &str, name: &str) -> bool {
        self.class(class)
            .is_some_and(|c| c.services.iter().any(|s| s.name == name))
            || self.transactions_of(class).any(|t| t.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Class {
    pub name: String,
    pub attributes: Vec<Attribute>,
    pub services: Vec<Service>,
}

impl Class {
    pub fn new(name: impl Into<String>) -> Self {
        Class {
            name: name.into(),
            attributes: Vec::new(),
            services: Vec::new(),
        }
    }

    pub fn attribute(&self, name: &str) -> Option<&Attribute> {
        self.attributes.iter().find(|a| a.name == name)
    }

    pub fn service(&self, name: &str) -> Option<&Service> {
        self.services.iter().find(|s| s.name == name)
    }

    pub fn identifier(&self) -> impl Iterator<Item = &Attribute> {
        self.attributes.iter().filter(|a| a.id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttrType {
    Constant,
    Variable,
}

impl FromStr for AttrType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_lowercase().as_str() {
            "constant" => Ok(AttrType::Constant),
            "variable" => Ok(AttrType::Variable),
            other => Err(format!("attribute type must be `constant` or `variable`, found `{other}`")),
        }
    }
}

impl fmt::Display for AttrType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AttrType::Constant => "Constant",
            AttrType::Variable => "Variable",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DataType {
    Nat,
    Int,
    Real,
    Autonumeric,
    String,
    Text,
    Time,
    Date,
    DateTime,
    Bool,
    Image,
    Blob,
}

impl DataType {
    pub const ALL: [DataType; 12] = [
        DataType::Nat,
        DataType::Int,
        DataType::Real,
        DataType::Autonumeric,
        DataType::String,
        DataType::Text,
        DataType::Time,
        DataType::Date,
        DataType::DateTime,
        DataType::Bool,
        DataType::Image,
        DataType::Blob,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DataType::Nat => "Nat",
            DataType::Int => "Int",
            DataType::Real => "Real",
            DataType::Autonumeric => "Autonumeric",
            DataType::String => "String",
            DataType::Text => "Text",
            DataType::Time => "Time",
            DataType::Date => "Date",
            DataType::DateTime => "DateTime",
            DataType::Bool => "Bool",
            DataType::Image => "Image",
            DataType::Blob => "Blob",
        }
    }
}

impl FromStr for DataType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_lowercase();
        if key == "autonomic" {
            return Ok(DataType::Autonumeric);
        }
        DataType::ALL
            .into_iter()
            .find(|t| t.name().to_lowercase() == key)
            .ok_or_else(|| format!("unknown data type `{}`", s.trim()))
    }
}

impl fmt::Display for DataType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attribute {
    pub name: String,
    pub id: bool,
    pub attr_type: AttrType,
    pub data_type: DataType,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub size: Option<u32>,
    pub requested: bool,
    pub null_allowed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    Nesting,
    Reference,
    Extension,
}

/// `class_a card_a --- card_b class_b`: each cardinality constrains the
/// instances of its own side's class per instance of the other side.
/// `class_b` is the nested or referenced class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relationship {
    #[serde(rename = "classA")]
    pub class_a: String,
    #[serde(rename = "cardA", with = "card_serde")]
    pub card_a: Cardinality,
    #[serde(rename = "cardB", with = "card_serde")]
    pub card_b: Cardinality,
    #[serde(rename = "classB")]
    pub class_b: String,
    pub origin: Origin,
    /// Name of the reference field or nested substructure it came from.
    pub role: String,
}

impl Relationship {
    /// Trace key: `CLASS_A--CLASS_B[role]`.
    pub fn key(&self) -> String {
        format!("{}--{}[{}]", self.class_a, self.class_b, self.role)
    }
}

impl fmt::Display for Relationship {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} --- {} {}", self.class_a, self.card_a, self.card_b, self.class_b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ServiceKind {
    Creation,
    EndOfEditing,
    Edit,
    SharedInsert,
    SharedDelete,
}

impl ServiceKind {
    pub fn is_shared(self) -> bool {
        matches!(self, ServiceKind::SharedInsert | ServiceKind::SharedDelete)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Service {
    pub name: String,
    pub kind: ServiceKind,
    pub arguments: Vec<Argument>,
    pub agents: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub shared_with: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArgKind {
    DataValued,
    ObjectValued,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Argument {
    pub name: String,
    pub kind: ArgKind,
    /// Set for data-valued arguments.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub data_type: Option<DataType>,
    /// Set for object-valued arguments.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub class: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub size: Option<u32>,
    pub null_allowed: bool,
}

impl Argument {
    pub fn data(name: impl Into<String>, attr: &Attribute) -> Self {
        Argument {
            name: name.into(),
            kind: ArgKind::DataValued,
            data_type: Some(attr.data_type),
            class: None,
            size: attr.size,
            null_allowed: attr.null_allowed,
        }
    }

    pub fn object(name: impl Into<String>, class: impl Into<String>, null_allowed: bool) -> Self {
        Argument {
            name: name.into(),
            kind: ArgKind::ObjectValued,
            data_type: None,
            class: Some(class.into()),
            size: None,
            null_allowed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transaction {
    pub name: String,
    pub owner_class: String,
    pub components: Vec<String>,
}

/// Cardinalities serialize as `{"min": 0, "max": "M"}` or `{"min": 1, "max": 1}`.
mod card_serde {
    use super::*;

    pub fn serialize<S: Serializer>(card: &Cardinality, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Cardinality", 2)?;
        st.serialize_field("min", &card.min)?;
        match card.max {
            Max::One => st.serialize_field("max", &1)?,
            Max::Many => st.serialize_field("max", "M")?,
        }
        st.end()
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum RawMax {
        Num(u8),
        Text(String),
    }

    #[derive(Deserialize)]
    struct RawCard {
        min: u8,
        max: RawMax,
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Cardinality, D::Error> {
        let raw = RawCard::deserialize(d)?;
        let max = match raw.max {
            RawMax::Num(1) => Max::One,
            RawMax::Text(t) if t == "M" => Max::Many,
            _ => return Err(de::Error::custom("cardinality max must be 1 or \"M\"")),
        };
        if raw.min > 1 {
            return Err(de::Error::custom("cardinality min must be 0 or 1"));
        }
        Ok(Cardinality::new(raw.min, max))
    }
}
