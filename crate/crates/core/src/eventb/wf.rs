//! Static well-formedness of parsed machines.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::ast::*;
use super::types::{check, check_pred, Binding, Scope};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DiagnosticKind {
    UndeclaredIdentifier,
    DuplicateDeclaration,
    DuplicateLabel,
    DuplicateTarget,
    IllegalTarget,
    IllegalPrime,
    Initialisation,
    Type,
    Placement,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub span: Span,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.span, self.message)
    }
}

/// Every free identifier of `e`, primed ones included.
pub fn free_identifiers_expr(e: &Expr) -> BTreeSet<Ident> {
    let mut out = BTreeSet::new();
    collect_expr(e, &mut |id, _| {
        out.insert(id.clone());
    });
    out
}

pub fn free_identifiers(p: &Pred) -> BTreeSet<Ident> {
    let mut out = BTreeSet::new();
    collect_pred(p, &mut |id, _| {
        out.insert(id.clone());
    });
    out
}

fn collect_expr(e: &Expr, f: &mut impl FnMut(&Ident, Span)) {
    if let ExprKind::Var(id) = &e.kind {
        f(id, e.span);
    }
    for c in e.children() {
        collect_expr(c, f);
    }
}

fn collect_pred(p: &Pred, f: &mut impl FnMut(&Ident, Span)) {
    match &p.kind {
        PredKind::True | PredKind::False => {}
        PredKind::Cmp(_, a, b) => {
            collect_expr(a, f);
            collect_expr(b, f);
        }
        PredKind::And(a, b) | PredKind::Or(a, b) => {
            collect_pred(a, f);
            collect_pred(b, f);
        }
        PredKind::Not(a) => collect_pred(a, f),
    }
}

/// Relation-set constructors are only meaningful on the right of `:`.
fn misplaced_relsets(p: &Pred, out: &mut Vec<Span>) {
    fn in_expr(e: &Expr, out: &mut Vec<Span>) {
        if let ExprKind::RelSet(..) = e.kind {
            out.push(e.span);
        }
        for c in e.children() {
            in_expr(c, out);
        }
    }
    match &p.kind {
        PredKind::True | PredKind::False => {}
        PredKind::Cmp(op, a, b) => {
            in_expr(a, out);
            match (&b.kind, op) {
                (ExprKind::RelSet(_, x, y), CmpOp::In) => {
                    in_expr(x, out);
                    in_expr(y, out);
                }
                _ => in_expr(b, out),
            }
        }
        PredKind::And(a, b) | PredKind::Or(a, b) => {
            misplaced_relsets(a, out);
            misplaced_relsets(b, out);
        }
        PredKind::Not(a) => misplaced_relsets(a, out),
    }
}

struct Checker<'m> {
    m: &'m Machine,
    out: Vec<Diagnostic>,
}

impl Checker<'_> {
    fn push(&mut self, kind: DiagnosticKind, span: Span, message: String) {
        self.out.push(Diagnostic {
            kind,
            span,
            message,
        });
    }

    fn declare(&mut self, seen: &mut BTreeMap<String, &'static str>, id: &Ident, span: Span, what: &'static str) {
        if let Some(prev) = seen.insert(id.name.clone(), what) {
            self.push(
                DiagnosticKind::DuplicateDeclaration,
                span,
                format!("`{id}` is declared as both {prev} and {what}"),
            );
        }
    }

    fn declarations(&mut self) {
        let m = self.m;
        let mut machine_level = BTreeMap::new();
        for c in &m.carrier_sets {
            self.declare(&mut machine_level, c, m.span, "a carrier set");
        }
        for v in &m.variables {
            self.declare(&mut machine_level, &v.name, v.span, "a variable");
        }
        for e in &m.events {
            let mut local = machine_level.clone();
            for p in &e.params {
                self.declare(&mut local, &p.name, p.span, "a parameter");
            }
        }

        let mut names = BTreeSet::new();
        for e in &self.m.events {
            if !names.insert(&e.name.name) || e.name.name == "initialisation" {
                self.push(
                    DiagnosticKind::DuplicateDeclaration,
                    e.span,
                    format!("duplicate event `{}`", e.name),
                );
            }
        }

        for v in &self.m.variables {
            match &v.ty {
                None => self.push(
                    DiagnosticKind::Type,
                    v.span,
                    format!("cannot infer the type of variable `{}`; add a typing invariant such as `{} : INT`", v.name, v.name),
                ),
                Some(t) if !t.is_declarable() => self.push(
                    DiagnosticKind::Type,
                    v.span,
                    format!("variable `{}` has unsupported type {t} (relations must be first order)", v.name),
                ),
                _ => {}
            }
        }
        for e in &self.m.events {
            for p in &e.params {
                if !p.ty.is_declarable() {
                    self.push(
                        DiagnosticKind::Type,
                        p.span,
                        format!("parameter `{}` has unsupported type {}", p.name, p.ty),
                    );
                }
                if let EbType::Carrier(c) = carrier_of(&p.ty) {
                    if !self.m.carrier_sets.iter().any(|s| &s.name == c) {
                        self.push(
                            DiagnosticKind::UndeclaredIdentifier,
                            p.span,
                            format!("unknown carrier set `{c}` in the type of `{}`", p.name),
                        );
                    }
                }
            }
        }
    }

    fn labels<T>(&mut self, items: &[Labeled<T>], block: &str) {
        let mut seen = BTreeSet::new();
        for it in items {
            if !seen.insert(&it.label) {
                self.push(
                    DiagnosticKind::DuplicateLabel,
                    it.span,
                    format!("duplicate label `{}` in {block}", it.label),
                );
            }
        }
    }

    /// Scoping and typing of one predicate.
    fn pred(&mut self, p: &Pred, scope: &Scope, context: &str) {
        let mut scoped_ok = true;
        let mut problems = Vec::new();
        collect_pred(p, &mut |id, span| {
            if scope.lookup(id).is_none() {
                problems.push((id.clone(), span));
            }
        });
        for (id, span) in problems {
            scoped_ok = false;
            if id.primed {
                self.push(
                    DiagnosticKind::IllegalPrime,
                    span,
                    format!("primed identifier `{id}` is not allowed in {context}"),
                );
            } else {
                self.push(
                    DiagnosticKind::UndeclaredIdentifier,
                    span,
                    format!("undeclared identifier `{id}` in {context}"),
                );
            }
        }
        let mut misplaced = Vec::new();
        misplaced_relsets(p, &mut misplaced);
        for span in &misplaced {
            self.push(
                DiagnosticKind::Placement,
                *span,
                "relation-set constructors may only appear on the right of `:`".to_string(),
            );
        }
        if scoped_ok && misplaced.is_empty() {
            if let Err(e) = check_pred(p, scope) {
                self.push(DiagnosticKind::Type, e.span, e.message);
            }
        }
    }

    fn expr(&mut self, e: &Expr, expected: Option<&EbType>, scope: &Scope, context: &str) {
        let mut problems = Vec::new();
        collect_expr(e, &mut |id, span| {
            if scope.lookup(id).is_none() {
                problems.push((id.clone(), span));
            }
        });
        let ok = problems.is_empty();
        for (id, span) in problems {
            let kind = if id.primed {
                DiagnosticKind::IllegalPrime
            } else {
                DiagnosticKind::UndeclaredIdentifier
            };
            let msg = if id.primed {
                format!("primed identifier `{id}` is not allowed in {context}")
            } else {
                format!("undeclared identifier `{id}` in {context}")
            };
            self.push(kind, span, msg);
        }
        let mut misplaced = Vec::new();
        misplaced_relsets(
            &Pred::cmp(CmpOp::Eq, e.clone(), Expr::int(0)),
            &mut misplaced,
        );
        for span in &misplaced {
            self.push(
                DiagnosticKind::Placement,
                *span,
                "relation-set constructors may only appear on the right of `:`".to_string(),
            );
        }
        if ok && misplaced.is_empty() {
            if let Some(t) = expected {
                if let Err(err) = check(e, t, scope) {
                    self.push(DiagnosticKind::Type, err.span, err.message);
                }
            }
        }
    }

    fn actions(&mut self, actions: &[LabeledAction], scope: &Scope, block: &str) {
        self.labels(actions, block);
        let mut targets = BTreeSet::new();
        for a in actions {
            let act = &a.item;
            let binding = scope.lookup(&act.target).cloned();
            let target_ty = match binding {
                Some(Binding::Variable(t)) => t,
                Some(Binding::Parameter(_)) => {
                    self.push(
                        DiagnosticKind::IllegalTarget,
                        act.target_span,
                        format!("`{}` is a parameter of {block} and cannot be assigned", act.target),
                    );
                    None
                }
                Some(_) => {
                    self.push(
                        DiagnosticKind::IllegalTarget,
                        act.target_span,
                        format!("`{}` is not a machine variable", act.target),
                    );
                    None
                }
                None => {
                    self.push(
                        DiagnosticKind::UndeclaredIdentifier,
                        act.target_span,
                        format!("assignment to undeclared variable `{}` in {block}", act.target),
                    );
                    None
                }
            };
            if !targets.insert(act.target.clone()) {
                self.push(
                    DiagnosticKind::DuplicateTarget,
                    a.span,
                    format!("`{}` is assigned more than once in {block}", act.target),
                );
            }
            let ctx = format!("action `{}` of {block}", a.label);
            match &act.kind {
                ActionKind::Assign(rhs) => self.expr(rhs, target_ty.as_ref(), scope, &ctx),
                ActionKind::Becomes(bap) => {
                    let s = scope.clone().with_primed(&act.target);
                    self.pred(bap, &s, &ctx)
                }
            }
        }
    }

    fn run(mut self) -> Vec<Diagnostic> {
        let m = self.m;
        self.declarations();

        let machine_scope = Scope::machine(m);
        self.labels(&m.invariants, "the invariants");
        for inv in &m.invariants {
            self.pred(&inv.item, &machine_scope, &format!("invariant `{}`", inv.label));
        }

        self.initialisation(&machine_scope);

        for e in &m.events {
            let scope = Scope::event(m, e);
            let block = format!("event `{}`", e.name);
            self.labels(&e.guards, &format!("the guards of {block}"));
            for g in &e.guards {
                self.pred(&g.item, &scope, &format!("guard `{}` of {block}", g.label));
            }
            self.actions(&e.actions, &scope, &block);
        }

        self.out.sort_by_key(|d| (d.span.begin, d.span.end));
        self.out
    }

    fn initialisation(&mut self, machine_scope: &Scope) {
        let m = self.m;
        let block = "the initialisation";
        self.labels(&m.initialisation, block);
        let mut assigned = BTreeSet::new();
        for a in &m.initialisation {
            let act = &a.item;
            match machine_scope.lookup(&act.target) {
                Some(Binding::Variable(_)) => {}
                Some(_) => self.push(
                    DiagnosticKind::IllegalTarget,
                    act.target_span,
                    format!("`{}` is not a machine variable", act.target),
                ),
                None => self.push(
                    DiagnosticKind::UndeclaredIdentifier,
                    act.target_span,
                    format!("assignment to undeclared variable `{}` in {block}", act.target),
                ),
            }
            if !assigned.insert(act.target.clone()) {
                self.push(
                    DiagnosticKind::DuplicateTarget,
                    a.span,
                    format!("`{}` is assigned more than once in {block}", act.target),
                );
            }
            // The initialisation has no pre-state: unprimed machine variables
            // may not be read.
            let (reads, ctx) = match &act.kind {
                ActionKind::Assign(e) => (free_identifiers_expr(e), format!("action `{}`", a.label)),
                ActionKind::Becomes(p) => (free_identifiers(p), format!("action `{}`", a.label)),
            };
            let mut pre_state = false;
            for id in &reads {
                if !id.primed
                    && matches!(machine_scope.lookup(id), Some(Binding::Variable(_)))
                {
                    pre_state = true;
                    self.push(
                        DiagnosticKind::Initialisation,
                        a.span,
                        format!("{ctx} of {block} reads variable `{id}`, but the initialisation has no pre-state"),
                    );
                }
            }
            if pre_state {
                continue;
            }
            let target_ty = m.variable_type(&act.target.name).cloned();
            let ctx = format!("action `{}` of {block}", a.label);
            match &act.kind {
                ActionKind::Assign(rhs) => self.expr(rhs, target_ty.as_ref(), machine_scope, &ctx),
                ActionKind::Becomes(bap) => {
                    let s = machine_scope.clone().with_primed(&act.target);
                    self.pred(bap, &s, &ctx)
                }
            }
        }
        for v in &m.variables {
            if !assigned.contains(&v.name) {
                self.push(
                    DiagnosticKind::Initialisation,
                    v.span,
                    format!("variable `{}` is not assigned by the initialisation", v.name),
                );
            }
        }
    }
}

fn carrier_of(t: &EbType) -> &EbType {
    match t {
        EbType::SetOf(e) => carrier_of(e),
        _ => t,
    }
}

/// Every violation of the machine's static rules, ordered by position.
/// An empty result means the machine is well formed.
pub fn well_formedness_check(m: &Machine) -> Vec<Diagnostic> {
    Checker {
        m,
        out: Vec::new(),
    }
    .run()
}
