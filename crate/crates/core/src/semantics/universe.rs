use std::collections::BTreeMap;

use serde::Serialize;

use super::value::{State, Value};
use crate::eventb::{EbType, Ident, Machine};
use crate::jml::JmlType;

pub const DEFAULT_CARRIER_SIZE: usize = 2;
pub const DEFAULT_CEILING: u64 = 1_000_000;
pub const DEFAULT_INT_RANGE: (i64, i64) = (0, 2);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SemanticsError {
    #[error("{what}: {count} exceeds the ceiling of {ceiling}")]
    Resource {
        what: String,
        count: u128,
        ceiling: u64,
    },
    #[error("variable `{0}` has no type")]
    UntypedVariable(Ident),
    #[error("no guard query named `{0}`")]
    MissingGuard(String),
}

/// Finite bounds that make the semantics enumerable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Universe {
    /// Inclusive integer range.
    pub int_range: (i64, i64),
    /// Carrier set sizes; unlisted carriers get `DEFAULT_CARRIER_SIZE`.
    pub carriers: BTreeMap<String, usize>,
    /// Largest cardinality of an enumerated set value, if bounded.
    pub max_set_card: Option<usize>,
    /// Upper bound on enumerated states and state pairs.
    pub ceiling: u64,
}

impl Default for Universe {
    fn default() -> Self {
        Universe {
            int_range: DEFAULT_INT_RANGE,
            carriers: BTreeMap::new(),
            max_set_card: None,
            ceiling: DEFAULT_CEILING,
        }
    }
}

impl Universe {
    pub fn with_int_range(lo: i64, hi: i64) -> Self {
        Universe {
            int_range: (lo, hi),
            ..Universe::default()
        }
    }

    pub fn carrier(mut self, name: &str, size: usize) -> Self {
        self.carriers.insert(name.to_string(), size);
        self
    }

    pub fn carrier_size(&self, name: &str) -> usize {
        self.carriers
            .get(name)
            .copied()
            .unwrap_or(DEFAULT_CARRIER_SIZE)
    }

    /// Elements of carrier `name`: `1..=size`.
    pub fn carrier_elements(&self, name: &str) -> Vec<Value> {
        (1..=self.carrier_size(name) as i64).map(Value::Int).collect()
    }

    pub fn integers(&self) -> Vec<Value> {
        (self.int_range.0..=self.int_range.1).map(Value::Int).collect()
    }

    /// The values a JML `Integer` quantifier ranges over: the integer
    /// range together with every carrier element.
    pub fn jml_integers(&self, carriers: &[Ident]) -> Vec<Value> {
        let max = carriers
            .iter()
            .map(|c| self.carrier_size(&c.name))
            .max()
            .unwrap_or(0) as i64;
        let (lo, hi) = self.int_range;
        (lo.min(1)..=hi.max(max))
            .filter(|n| (lo..=hi).contains(n) || (1..=max).contains(n))
            .map(Value::Int)
            .collect()
    }

    fn check(&self, what: impl FnOnce() -> String, count: u128) -> Result<(), SemanticsError> {
        if count > self.ceiling as u128 {
            Err(SemanticsError::Resource {
                what: what(),
                count,
                ceiling: self.ceiling,
            })
        } else {
            Ok(())
        }
    }

    /// Number of subsets of an `n`-element set within the cardinality bound.
    fn subset_count(&self, n: usize) -> u128 {
        let k = self.max_set_card.unwrap_or(n).min(n);
        let mut total: u128 = 0;
        let mut binom: u128 = 1;
        for i in 0..=k {
            total = total.saturating_add(binom);
            binom = binom.saturating_mul((n - i) as u128) / (i as u128 + 1);
        }
        total
    }

    fn powerset(&self, elems: &[Value], what: &str) -> Result<Vec<Value>, SemanticsError> {
        let count = if elems.len() >= 127 {
            u128::MAX
        } else {
            self.subset_count(elems.len())
        };
        self.check(|| format!("subsets of {what}"), count)?;
        let limit = self.max_set_card.unwrap_or(elems.len());
        let mut out = vec![Vec::new()];
        for e in elems {
            let extended: Vec<Vec<Value>> = out
                .iter()
                .filter(|s| s.len() < limit)
                .map(|s| {
                    let mut s = s.clone();
                    s.push(e.clone());
                    s
                })
                .collect();
            out.extend(extended);
        }
        let mut sets: Vec<Value> = out.into_iter().map(Value::set).collect();
        sets.sort();
        Ok(sets)
    }

    /// Every value of Event-B type `t`, in ascending order.
    pub fn domain(&self, t: &EbType) -> Result<Vec<Value>, SemanticsError> {
        match t {
            EbType::Integer => Ok(self.integers()),
            EbType::Carrier(c) => Ok(self.carrier_elements(c)),
            EbType::Pair(a, b) => self.product(self.domain(a)?, self.domain(b)?),
            EbType::SetOf(e) => self.powerset(&self.domain(e)?, &t.to_string()),
            EbType::Relation(a, b) => {
                let pairs = self.product(self.domain(a)?, self.domain(b)?)?;
                self.powerset(&pairs, &t.to_string())
            }
        }
    }

    /// Every value of JML type `t`; `Integer` is read through
    /// [`Universe::jml_integers`].
    pub fn jml_domain(&self, t: &JmlType, carriers: &[Ident]) -> Result<Vec<Value>, SemanticsError> {
        match t {
            JmlType::Integer => Ok(self.jml_integers(carriers)),
            JmlType::Pair(a, b) => {
                self.product(self.jml_domain(a, carriers)?, self.jml_domain(b, carriers)?)
            }
            JmlType::BSet(e) => self.powerset(&self.jml_domain(e, carriers)?, &t.to_string()),
            JmlType::BRelation(a, b) => {
                let pairs =
                    self.product(self.jml_domain(a, carriers)?, self.jml_domain(b, carriers)?)?;
                self.powerset(&pairs, &t.to_string())
            }
        }
    }

    fn product(&self, xs: Vec<Value>, ys: Vec<Value>) -> Result<Vec<Value>, SemanticsError> {
        self.check(|| "pairs".into(), xs.len() as u128 * ys.len() as u128)?;
        Ok(xs
            .iter()
            .flat_map(|x| ys.iter().map(move |y| Value::pair(x.clone(), y.clone())))
            .collect())
    }

    /// Fails when `count` (e.g. a number of state pairs) exceeds the ceiling.
    pub fn ensure_within(&self, what: &str, count: u128) -> Result<(), SemanticsError> {
        self.check(|| what.to_string(), count)
    }
}

/// Every total, type-respecting assignment to `vars`, in lexicographic
/// order of the per-variable domains.
pub fn enumerate_states(
    vars: &[(Ident, EbType)],
    u: &Universe,
) -> Result<Vec<State>, SemanticsError> {
    let domains = vars
        .iter()
        .map(|(_, t)| u.domain(t))
        .collect::<Result<Vec<_>, _>>()?;
    let count = domains
        .iter()
        .try_fold(1u128, |acc, d| acc.checked_mul(d.len() as u128))
        .unwrap_or(u128::MAX);
    u.ensure_within("states", count)?;
    let mut states = vec![State::new()];
    for ((name, _), dom) in vars.iter().zip(&domains) {
        let mut next = Vec::with_capacity(states.len() * dom.len());
        for s in &states {
            for v in dom {
                let mut s = s.clone();
                s.insert(name.clone(), v.clone());
                next.push(s);
            }
        }
        states = next;
    }
    Ok(states)
}

/// Typed variables of `m`.
pub fn machine_vars(m: &Machine) -> Result<Vec<(Ident, EbType)>, SemanticsError> {
    m.variables
        .iter()
        .map(|v| {
            v.ty
                .clone()
                .map(|t| (v.name.clone(), t))
                .ok_or_else(|| SemanticsError::UntypedVariable(v.name.clone()))
        })
        .collect()
}
