use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::eventb::Ident;

/// A finite value. Relations are sets of pairs.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Int(i64),
    Bool(bool),
    Set(BTreeSet<Value>),
    Pair(Box<Value>, Box<Value>),
}

impl Value {
    pub fn pair(a: Value, b: Value) -> Value {
        Value::Pair(Box::new(a), Box::new(b))
    }

    pub fn set(items: impl IntoIterator<Item = Value>) -> Value {
        Value::Set(items.into_iter().collect())
    }

    pub fn empty_set() -> Value {
        Value::Set(BTreeSet::new())
    }

    /// Set of pairs built from integer tuples.
    pub fn relation(pairs: &[(i64, i64)]) -> Value {
        Value::set(
            pairs
                .iter()
                .map(|&(a, b)| Value::pair(Value::Int(a), Value::Int(b))),
        )
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(n) => Some(*n),
            _ => None,
        }
    }

    pub fn as_set(&self) -> Option<&BTreeSet<Value>> {
        match self {
            Value::Set(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_pair(&self) -> Option<(&Value, &Value)> {
        match self {
            Value::Pair(a, b) => Some((a, b)),
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(n) => write!(f, "{n}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Set(s) => {
                f.write_str("{")?;
                for (i, v) in s.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str("}")
            }
            Value::Pair(a, b) => match **a {
                Value::Pair(..) => write!(f, "({a}) |-> {b}"),
                _ => write!(f, "{a} |-> {b}"),
            },
        }
    }
}

impl Serialize for Value {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Values of the machine variables.
pub type State = BTreeMap<Ident, Value>;

/// Bindings of parameters, quantified and primed identifiers.
pub type Env = BTreeMap<Ident, Value>;

pub type Transition = (State, State);

pub type Relation = BTreeSet<Transition>;

/// `{v ↦ 0, w ↦ {1}}` style rendering of a state.
pub fn format_state(s: &State) -> String {
    let parts: Vec<String> = s.iter().map(|(k, v)| format!("{k} = {v}")).collect();
    format!("[{}]", parts.join(", "))
}

/// Builds a state from `(name, value)` pairs.
pub fn state<'a>(items: impl IntoIterator<Item = (&'a str, Value)>) -> State {
    items
        .into_iter()
        .map(|(k, v)| (Ident::new(k), v))
        .collect()
}
