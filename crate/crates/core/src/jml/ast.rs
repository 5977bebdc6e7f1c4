//! Abstract syntax of the generated JML specifications.

use std::fmt;

use indexmap::IndexSet;

pub use crate::eventb::ast::{ArithOp, Ident};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum JmlType {
    Integer,
    BSet(Box<JmlType>),
    BRelation(Box<JmlType>, Box<JmlType>),
    /// Element type of a relation; only appears inside set constructors.
    Pair(Box<JmlType>, Box<JmlType>),
}

impl fmt::Display for JmlType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JmlType::Integer => f.write_str("Integer"),
            JmlType::BSet(e) => write!(f, "BSet<{e}>"),
            JmlType::BRelation(a, b) => write!(f, "BRelation<{a},{b}>"),
            JmlType::Pair(a, b) => write!(f, "JMLEqualsEqualsPair<{a},{b}>"),
        }
    }
}

/// How an equality is written: `==` for values of primitive type,
/// `.equals(..)` for objects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EqStyle {
    Value,
    Object,
}

impl EqStyle {
    pub fn for_type(t: &JmlType) -> EqStyle {
        match t {
            JmlType::Integer => EqStyle::Value,
            _ => EqStyle::Object,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Union,
    Intersection,
    Difference,
    DomainSubtraction,
    DomainRestriction,
    Image,
    Apply,
    Domain,
    Range,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Union => "union",
            Method::Intersection => "intersection",
            Method::Difference => "difference",
            Method::DomainSubtraction => "domainSubtraction",
            Method::DomainRestriction => "domainRestriction",
            Method::Image => "image",
            Method::Apply => "apply",
            Method::Domain => "domain",
            Method::Range => "range",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum JmlExpr {
    Int(i64),
    Var(Ident),
    /// `INT`
    Integers,
    /// `NAT`
    Naturals,
    /// `new BSet<T>(items..)` or `new BRelation<A,B>(items..)`; `set_type` is
    /// the type of the constructed set.
    NewSet { set_type: JmlType, items: Vec<JmlExpr> },
    /// `new JMLEqualsEqualsPair<A,B>(left, right)`
    NewPair {
        left_type: JmlType,
        right_type: JmlType,
        left: Box<JmlExpr>,
        right: Box<JmlExpr>,
    },
    Call {
        receiver: Box<JmlExpr>,
        method: Method,
        args: Vec<JmlExpr>,
    },
    /// `Utils.cross(a, b)`
    Cross(Box<JmlExpr>, Box<JmlExpr>),
    Arith(ArithOp, Box<JmlExpr>, Box<JmlExpr>),
    /// `\old(e)`
    Old(Box<JmlExpr>),
}

impl JmlExpr {
    pub fn var(name: &str) -> Self {
        JmlExpr::Var(Ident::new(name))
    }

    pub fn call(receiver: JmlExpr, method: Method, args: Vec<JmlExpr>) -> Self {
        JmlExpr::Call {
            receiver: Box::new(receiver),
            method,
            args,
        }
    }

    pub fn contains_old(&self) -> bool {
        match self {
            JmlExpr::Old(_) => true,
            JmlExpr::Int(_) | JmlExpr::Var(_) | JmlExpr::Integers | JmlExpr::Naturals => false,
            JmlExpr::NewSet { items, .. } => items.iter().any(JmlExpr::contains_old),
            JmlExpr::NewPair { left, right, .. } => left.contains_old() || right.contains_old(),
            JmlExpr::Call { receiver, args, .. } => {
                receiver.contains_old() || args.iter().any(JmlExpr::contains_old)
            }
            JmlExpr::Cross(a, b) | JmlExpr::Arith(_, a, b) => a.contains_old() || b.contains_old(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum JmlPredicate {
    True,
    False,
    And(Box<JmlPredicate>, Box<JmlPredicate>),
    Or(Box<JmlPredicate>, Box<JmlPredicate>),
    Not(Box<JmlPredicate>),
    /// `\old(p)`: `p` is evaluated in the pre-state.
    Old(Box<JmlPredicate>),
    /// `(\exists T x; body)`
    Exists {
        var: Ident,
        ty: JmlType,
        body: Box<JmlPredicate>,
    },
    /// The post-state value of `var` is the value bound to `primed`.
    Becomes {
        var: Ident,
        primed: Ident,
        style: EqStyle,
    },
    /// Explicit parentheses.
    Group(Box<JmlPredicate>),
    Eq(JmlExpr, JmlExpr, EqStyle),
    /// `set.has(elem)`
    Has { set: JmlExpr, elem: JmlExpr },
    IsSubset(JmlExpr, JmlExpr),
    Lt(JmlExpr, JmlExpr),
    Le(JmlExpr, JmlExpr),
    IsEmpty(JmlExpr),
    IsaFunction(JmlExpr),
    /// `\result <==> p`, the ensures clause of a guard query.
    ResultIff(Box<JmlPredicate>),
    /// Call of the pure guard query `name()`.
    GuardCall(String),
}

impl JmlPredicate {
    pub fn and(a: JmlPredicate, b: JmlPredicate) -> Self {
        JmlPredicate::And(Box::new(a), Box::new(b))
    }


    pub fn old(a: JmlPredicate) -> Self {
        JmlPredicate::Old(Box::new(a))
    }

    pub fn exists(var: Ident, ty: JmlType, body: JmlPredicate) -> Self {
        JmlPredicate::Exists {
            var,
            ty,
            body: Box::new(body),
        }
    }

    /// Left-nested conjunction, `true` when empty.
    pub fn conjoin(items: impl IntoIterator<Item = JmlPredicate>) -> Self {
        items
            .into_iter()
            .reduce(JmlPredicate::and)
            .unwrap_or(JmlPredicate::True)
    }

    /// Whether `\old` occurs anywhere, on predicates or expressions.
    pub fn contains_old(&self) -> bool {
        use JmlPredicate as P;
        match self {
            P::Old(_) => true,
            P::True | P::False | P::Becomes { .. } | P::GuardCall(_) => false,
            P::And(a, b) | P::Or(a, b) => a.contains_old() || b.contains_old(),
            P::Not(a) | P::Group(a) | P::ResultIff(a) => a.contains_old(),
            P::Exists { body, .. } => body.contains_old(),
            P::Eq(a, b, _) | P::IsSubset(a, b) | P::Lt(a, b) | P::Le(a, b) => {
                a.contains_old() || b.contains_old()
            }
            P::Has { set, elem } => set.contains_old() || elem.contains_old(),
            P::IsEmpty(a) | P::IsaFunction(a) => a.contains_old(),
        }
    }

    /// Whether an `\old` is nested inside another `\old`.
    pub fn has_nested_old(&self) -> bool {
        fn walk(p: &JmlPredicate, inside: bool) -> bool {
            use JmlPredicate as P;
            let e = |x: &JmlExpr| inside && x.contains_old() || expr_nested(x, inside);
            match p {
                P::Old(a) => inside || walk(a, true),
                P::True | P::False | P::Becomes { .. } | P::GuardCall(_) => false,
                P::And(a, b) | P::Or(a, b) => walk(a, inside) || walk(b, inside),
                P::Not(a) | P::Group(a) | P::ResultIff(a) => walk(a, inside),
                P::Exists { body, .. } => walk(body, inside),
                P::Eq(a, b, _) | P::IsSubset(a, b) | P::Lt(a, b) | P::Le(a, b) => e(a) || e(b),
                P::Has { set, elem } => e(set) || e(elem),
                P::IsEmpty(a) | P::IsaFunction(a) => e(a),
            }
        }
        fn expr_nested(x: &JmlExpr, inside: bool) -> bool {
            match x {
                JmlExpr::Old(inner) => inside || inner.contains_old(),
                JmlExpr::Int(_) | JmlExpr::Var(_) | JmlExpr::Integers | JmlExpr::Naturals => false,
                JmlExpr::NewSet { items, .. } => items.iter().any(|i| expr_nested(i, inside)),
                JmlExpr::NewPair { left, right, .. } => {
                    expr_nested(left, inside) || expr_nested(right, inside)
                }
                JmlExpr::Call { receiver, args, .. } => {
                    expr_nested(receiver, inside) || args.iter().any(|i| expr_nested(i, inside))
                }
                JmlExpr::Cross(a, b) | JmlExpr::Arith(_, a, b) => {
                    expr_nested(a, inside) || expr_nested(b, inside)
                }
            }
        }
        walk(self, false)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AssignableClause {
    Nothing,
    Everything,
    /// Listed in first-assignment order. Never empty.
    Vars(IndexSet<Ident>),
}

impl AssignableClause {
    /// `Vars` for a non-empty set, otherwise `Nothing`.
    pub fn of(vars: IndexSet<Ident>) -> Self {
        if vars.is_empty() {
            AssignableClause::Nothing
        } else {
            AssignableClause::Vars(vars)
        }
    }

    pub fn allows(&self, id: &Ident) -> bool {
        match self {
            AssignableClause::Nothing => false,
            AssignableClause::Everything => true,
            AssignableClause::Vars(v) => v.contains(id),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpecCase {
    pub requires: JmlPredicate,
    pub assignable: AssignableClause,
    pub ensures: JmlPredicate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodKind {
    /// `public abstract boolean guard_e();`
    GuardQuery,
    /// `public abstract void run_e();`
    Run,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JmlMethodSpec {
    pub name: String,
    pub kind: MethodKind,
    /// The case taken when the guard holds (or the only case of a query).
    pub normal: SpecCase,
    /// The guard-false case; present on run methods only.
    pub exceptional: Option<SpecCase>,
}

impl JmlMethodSpec {
    /// The predicate a guard query's result is equivalent to.
    pub fn guard_predicate(&self) -> Option<&JmlPredicate> {
        match (&self.kind, &self.normal.ensures) {
            (MethodKind::GuardQuery, JmlPredicate::ResultIff(p)) => Some(p),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JmlClass {
    pub name: String,
    /// Carrier sets, rendered as `BSet<Integer>` model fields.
    pub carrier_sets: Vec<Ident>,
    pub model_fields: Vec<(Ident, JmlType)>,
    pub class_invariant: JmlPredicate,
    pub initially: JmlPredicate,
    pub methods: Vec<JmlMethodSpec>,
}

impl JmlClass {
    pub fn method(&self, name: &str) -> Option<&JmlMethodSpec> {
        self.methods.iter().find(|m| m.name == name)
    }
}

impl std::ops::Not for JmlPredicate {
    type Output = JmlPredicate;

    fn not(self) -> JmlPredicate {
        JmlPredicate::Not(Box::new(self))
    }
}
