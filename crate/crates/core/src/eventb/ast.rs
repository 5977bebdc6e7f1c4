//! Abstract syntax for the supported Event-B machine subset.
//!
//! Every node carries a [`Span`]. Spans never take part in equality, so two
//! trees compare equal when they have the same structure regardless of where
//! they came from.

use std::fmt;

/// Location of a node in its source text.
///
/// `PartialEq` always returns `true`: structural comparisons of AST nodes
/// ignore positions.
#[derive(Debug, Clone, Copy, Default, Eq)]
pub struct Span {
    /// Byte offset of the first character.
    pub begin: usize,
    /// Byte offset one past the last character.
    pub end: usize,
    /// 1-based line of `begin`.
    pub line: usize,
    /// 1-based column of `begin`, counted in characters.
    pub column: usize,
}

impl Span {
    pub fn new(begin: usize, end: usize, line: usize, column: usize) -> Self {
        debug_assert!(begin <= end);
        Span {
            begin,
            end,
            line,
            column,
        }
    }

    /// Smallest span covering `self` and `other`.
    pub fn to(self, other: Span) -> Span {
        let first = if other.begin < self.begin { other } else { self };
        Span {
            end: self.end.max(other.end),
            ..first
        }
    }
}

impl PartialEq for Span {
    fn eq(&self, _: &Span) -> bool {
        true
    }
}

impl std::hash::Hash for Span {
    fn hash<H: std::hash::Hasher>(&self, _: &mut H) {}
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.column)
    }
}

/// An identifier, optionally primed (`v'`, the after-value of `v`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ident {
    pub name: String,
    pub primed: bool,
}

impl Ident {
    pub fn new(name: impl Into<String>) -> Self {
        Ident {
            name: name.into(),
            primed: false,
        }
    }

    pub fn primed(name: impl Into<String>) -> Self {
        Ident {
            name: name.into(),
            primed: true,
        }
    }

    /// The after-value identifier of this one.
    pub fn prime(&self) -> Ident {
        Ident::primed(self.name.clone())
    }

    pub fn unprimed(&self) -> Ident {
        Ident::new(self.name.clone())
    }

    /// True when `s` is a legal identifier token.
    pub fn is_valid_name(s: &str) -> bool {
        let mut chars = s.chars();
        match chars.next() {
            Some(c) if c.is_ascii_alphabetic() => {}
            _ => return false,
        }
        chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
    }
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.primed {
            write!(f, "{}'", self.name)
        } else {
            f.write_str(&self.name)
        }
    }
}

impl serde::Serialize for Ident {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Declared types of variables and parameters.
///
/// `Pair` never appears in a declaration; it is the type of a maplet
/// expression. A set of pairs is always represented as `Relation`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EbType {
    Integer,
    Carrier(String),
    SetOf(Box<EbType>),
    Relation(Box<EbType>, Box<EbType>),
    Pair(Box<EbType>, Box<EbType>),
}

impl EbType {
    /// The type of sets whose members have type `elem`.
    pub fn set_of(elem: EbType) -> EbType {
        match elem {
            EbType::Pair(a, b) => EbType::Relation(a, b),
            other => EbType::SetOf(Box::new(other)),
        }
    }

    pub fn relation(dom: EbType, ran: EbType) -> EbType {
        EbType::Relation(Box::new(dom), Box::new(ran))
    }

    /// Member type when `self` is a set or relation type.
    pub fn element(&self) -> Option<EbType> {
        match self {
            EbType::SetOf(e) => Some((**e).clone()),
            EbType::Relation(a, b) => Some(EbType::Pair(a.clone(), b.clone())),
            _ => None,
        }
    }

    pub fn is_set(&self) -> bool {
        matches!(self, EbType::SetOf(_) | EbType::Relation(..))
    }

    fn contains_relation(&self) -> bool {
        match self {
            EbType::Integer | EbType::Carrier(_) => false,
            EbType::Relation(..) => true,
            EbType::SetOf(e) => e.contains_relation(),
            EbType::Pair(a, b) => a.contains_relation() || b.contains_relation(),
        }
    }

    /// Whether the type may be declared for a variable or parameter.
    ///
    /// Relations are first order: their components hold no relations, and
    /// no set holds relations.
    pub fn is_declarable(&self) -> bool {
        match self {
            EbType::Integer | EbType::Carrier(_) => true,
            EbType::SetOf(e) => !e.contains_relation() && !matches!(**e, EbType::Pair(..)) && e.is_declarable(),
            EbType::Relation(a, b) => {
                !a.contains_relation()
                    && !b.contains_relation()
                    && !matches!(**a, EbType::Pair(..))
                    && !matches!(**b, EbType::Pair(..))
                    && a.is_declarable()
                    && b.is_declarable()
            }
            EbType::Pair(..) => false,
        }
    }
}

impl fmt::Display for EbType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EbType::Integer => f.write_str("INT"),
            EbType::Carrier(s) => f.write_str(s),
            EbType::SetOf(e) => write!(f, "POW({e})"),
            EbType::Relation(a, b) => write!(f, "{} <-> {}", Paren(a), Paren(b)),
            EbType::Pair(a, b) => write!(f, "{} ** {}", Paren(a), Paren(b)),
        }
    }
}

struct Paren<'a>(&'a EbType);

impl fmt::Display for Paren<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            EbType::Relation(..) | EbType::Pair(..) => write!(f, "({})", self.0),
            t => write!(f, "{t}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SetOp {
    Union,
    Inter,
    Diff,
    /// `S <<| R`
    DomSub,
    /// `S <| R`
    DomRes,
    /// `S ** T`
    Cross,
}

impl SetOp {
    pub fn token(self) -> &'static str {
        match self {
            SetOp::Union => "\\/",
            SetOp::Inter => "/\\",
            SetOp::Diff => "\\",
            SetOp::DomSub => "<<|",
            SetOp::DomRes => "<|",
            SetOp::Cross => "**",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

impl ArithOp {
    pub fn token(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
        }
    }
}

/// Relation-set constructors. They only occur as the right operand of a
/// membership predicate (`r : A <-> B`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RelKind {
    /// `<->` all relations
    Relation,
    /// `<<->` total relations
    Total,
    /// `<->>` surjective relations
    Surjective,
    /// `<<->>` total surjective relations
    TotalSurjective,
    /// `+->` partial functions
    PartialFun,
    /// `-->` total functions
    TotalFun,
    /// `->>` total surjections
    TotalSurjection,
}

impl RelKind {
    pub const ALL: [RelKind; 7] = [
        RelKind::Relation,
        RelKind::Total,
        RelKind::Surjective,
        RelKind::TotalSurjective,
        RelKind::PartialFun,
        RelKind::TotalFun,
        RelKind::TotalSurjection,
    ];

    pub fn token(self) -> &'static str {
        match self {
            RelKind::Relation => "<->",
            RelKind::Total => "<<->",
            RelKind::Surjective => "<->>",
            RelKind::TotalSurjective => "<<->>",
            RelKind::PartialFun => "+->",
            RelKind::TotalFun => "-->",
            RelKind::TotalSurjection => "->>",
        }
    }

    pub fn functional(self) -> bool {
        matches!(
            self,
            RelKind::PartialFun | RelKind::TotalFun | RelKind::TotalSurjection
        )
    }

    /// Domain must equal the source set.
    pub fn total(self) -> bool {
        matches!(
            self,
            RelKind::Total | RelKind::TotalSurjective | RelKind::TotalFun | RelKind::TotalSurjection
        )
    }

    /// Range must equal the target set.
    pub fn surjective(self) -> bool {
        matches!(
            self,
            RelKind::Surjective | RelKind::TotalSurjective | RelKind::TotalSurjection
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Int(i64),
    Var(Ident),
    /// `INT`
    Integers,
    /// `NAT`
    Naturals,
    EmptySet,
    SetEnum(Vec<Expr>),
    Set(SetOp, Box<Expr>, Box<Expr>),
    Maplet(Box<Expr>, Box<Expr>),
    Arith(ArithOp, Box<Expr>, Box<Expr>),
    /// `r[s]`
    Image(Box<Expr>, Box<Expr>),
    /// `f(e)`
    Apply(Box<Expr>, Box<Expr>),
    Dom(Box<Expr>),
    Ran(Box<Expr>),
    RelSet(RelKind, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Self {
        Expr { kind, span }
    }

    /// Builds a node with a default span; convenient for programmatic
    /// construction.
    pub fn bare(kind: ExprKind) -> Self {
        Expr::new(kind, Span::default())
    }

    pub fn int(n: i64) -> Self {
        Expr::bare(ExprKind::Int(n))
    }

    pub fn var(name: &str) -> Self {
        Expr::bare(ExprKind::Var(Ident::new(name)))
    }

    pub fn primed(name: &str) -> Self {
        Expr::bare(ExprKind::Var(Ident::primed(name)))
    }

    pub fn arith(op: ArithOp, a: Expr, b: Expr) -> Self {
        Expr::bare(ExprKind::Arith(op, Box::new(a), Box::new(b)))
    }

    pub fn set(op: SetOp, a: Expr, b: Expr) -> Self {
        Expr::bare(ExprKind::Set(op, Box::new(a), Box::new(b)))
    }

    /// Direct children, left to right.
    pub fn children(&self) -> Vec<&Expr> {
        match &self.kind {
            ExprKind::Int(_)
            | ExprKind::Var(_)
            | ExprKind::Integers
            | ExprKind::Naturals
            | ExprKind::EmptySet => vec![],
            ExprKind::SetEnum(items) => items.iter().collect(),
            ExprKind::Set(_, a, b)
            | ExprKind::Maplet(a, b)
            | ExprKind::Arith(_, a, b)
            | ExprKind::Image(a, b)
            | ExprKind::Apply(a, b)
            | ExprKind::RelSet(_, a, b) => vec![a, b],
            ExprKind::Dom(a) | ExprKind::Ran(a) => vec![a],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Neq,
    /// `:` membership
    In,
    /// `<:`
    Subset,
    Lt,
    Le,
}

impl CmpOp {
    pub fn token(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Neq => "/=",
            CmpOp::In => ":",
            CmpOp::Subset => "<:",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pred {
    pub kind: PredKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PredKind {
    True,
    False,
    Cmp(CmpOp, Expr, Expr),
    And(Box<Pred>, Box<Pred>),
    Or(Box<Pred>, Box<Pred>),
    Not(Box<Pred>),
}

impl Pred {
    pub fn new(kind: PredKind, span: Span) -> Self {
        Pred { kind, span }
    }

    pub fn bare(kind: PredKind) -> Self {
        Pred::new(kind, Span::default())
    }

    pub fn cmp(op: CmpOp, a: Expr, b: Expr) -> Self {
        Pred::bare(PredKind::Cmp(op, a, b))
    }

    pub fn and(a: Pred, b: Pred) -> Self {
        Pred::bare(PredKind::And(Box::new(a), Box::new(b)))
    }

    pub fn or(a: Pred, b: Pred) -> Self {
        Pred::bare(PredKind::Or(Box::new(a), Box::new(b)))
    }


    /// Top-level conjuncts, left to right.
    pub fn conjuncts(&self) -> Vec<&Pred> {
        match &self.kind {
            PredKind::And(a, b) => {
                let mut v = a.conjuncts();
                v.extend(b.conjuncts());
                v
            }
            _ => vec![self],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Labeled<T> {
    pub label: Ident,
    pub item: T,
    pub span: Span,
}

impl<T> Labeled<T> {
    pub fn new(label: &str, item: T) -> Self {
        Labeled {
            label: Ident::new(label),
            item,
            span: Span::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ActionKind {
    /// `v := E`
    Assign(Expr),
    /// `v :| P(v, v')`
    Becomes(Pred),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Action {
    pub target: Ident,
    pub target_span: Span,
    pub kind: ActionKind,
}

impl Action {
    pub fn assign(target: &str, rhs: Expr) -> Self {
        Action {
            target: Ident::new(target),
            target_span: Span::default(),
            kind: ActionKind::Assign(rhs),
        }
    }

    pub fn becomes(target: &str, bap: Pred) -> Self {
        Action {
            target: Ident::new(target),
            target_span: Span::default(),
            kind: ActionKind::Becomes(bap),
        }
    }

    pub fn is_deterministic(&self) -> bool {
        matches!(self.kind, ActionKind::Assign(_))
    }
}

pub type LabeledPred = Labeled<Pred>;
pub type LabeledAction = Labeled<Action>;

#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub name: Ident,
    pub ty: EbType,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub name: Ident,
    pub params: Vec<Param>,
    pub guards: Vec<LabeledPred>,
    pub actions: Vec<LabeledAction>,
    pub span: Span,
}

/// A machine variable. `ty` is inferred from the typing invariants and is
/// `None` when no invariant fixes it.
#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: Ident,
    pub ty: Option<EbType>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Machine {
    pub name: Ident,
    /// Context name after `sees`, kept for rendering only.
    pub sees: Option<Ident>,
    pub carrier_sets: Vec<Ident>,
    pub variables: Vec<Variable>,
    pub invariants: Vec<LabeledPred>,
    pub initialisation: Vec<LabeledAction>,
    pub events: Vec<Event>,
    pub span: Span,
}

impl Machine {
    pub fn event(&self, name: &str) -> Option<&Event> {
        self.events.iter().find(|e| e.name.name == name)
    }

    pub fn variable_type(&self, name: &str) -> Option<&EbType> {
        self.variables
            .iter()
            .find(|v| v.name.name == name)
            .and_then(|v| v.ty.as_ref())
    }

    /// Conjunction of all invariants in label order (`true` when empty).
    pub fn invariant(&self) -> Pred {
        conjoin(self.invariants.iter().map(|i| i.item.clone()))
    }
}

/// Left-nested conjunction; `true` for an empty sequence.
pub fn conjoin(preds: impl IntoIterator<Item = Pred>) -> Pred {
    preds
        .into_iter()
        .reduce(Pred::and)
        .unwrap_or_else(|| Pred::bare(PredKind::True))
}

/// The set of variables assigned by `actions`, in first-assignment order.
pub fn mod_set(actions: &[LabeledAction]) -> indexmap::IndexSet<Ident> {
    actions.iter().map(|a| a.item.target.clone()).collect()
}

impl std::ops::Not for Pred {
    type Output = Pred;

    fn not(self) -> Pred {
        Pred::bare(PredKind::Not(Box::new(self)))
    }
}
