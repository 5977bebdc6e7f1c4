//! Bidirectional type inference for expressions and predicates.

use std::collections::BTreeMap;

use super::ast::*;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{span}: {message}")]
pub struct TypeError {
    pub span: Span,
    pub message: String,
    /// Set when the error is only a missing element type (an empty set
    /// without context) rather than a real mismatch.
    pub needs_context: bool,
}

impl TypeError {
    fn new(span: Span, message: impl Into<String>) -> Self {
        TypeError {
            span,
            message: message.into(),
            needs_context: false,
        }
    }
}

/// What an identifier denotes inside a scope.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Binding {
    Carrier,
    Variable(Option<EbType>),
    Parameter(EbType),
    /// After-value of a variable.
    Primed(EbType),
}

/// Identifier environment used for typing and translation.
#[derive(Debug, Clone, Default)]
pub struct Scope {
    names: BTreeMap<Ident, Binding>,
}

impl Scope {
    /// Carrier sets and variables of `m`.
    pub fn machine(m: &Machine) -> Self {
        let mut s = Scope::default();
        for c in &m.carrier_sets {
            s.names.insert(c.clone(), Binding::Carrier);
        }
        for v in &m.variables {
            s.names
                .insert(v.name.clone(), Binding::Variable(v.ty.clone()));
        }
        s
    }

    /// Machine scope extended with the parameters of `e`.
    pub fn event(m: &Machine, e: &Event) -> Self {
        let mut s = Scope::machine(m);
        for p in &e.params {
            s.names
                .insert(p.name.clone(), Binding::Parameter(p.ty.clone()));
        }
        s
    }

    /// Adds the after-value of variable `v`, if `v` has a known type.
    pub fn with_primed(mut self, v: &Ident) -> Self {
        if let Some(Binding::Variable(Some(t))) = self.names.get(v).cloned() {
            self.names.insert(v.prime(), Binding::Primed(t));
        }
        self
    }

    pub fn bind(&mut self, id: Ident, b: Binding) {
        self.names.insert(id, b);
    }

    pub fn lookup(&self, id: &Ident) -> Option<&Binding> {
        self.names.get(id)
    }

    pub fn type_of(&self, id: &Ident, span: Span) -> Result<EbType, TypeError> {
        match self.names.get(id) {
            Some(Binding::Carrier) => Ok(EbType::set_of(EbType::Carrier(id.name.clone()))),
            Some(Binding::Variable(Some(t))) | Some(Binding::Parameter(t)) | Some(Binding::Primed(t)) => {
                Ok(t.clone())
            }
            Some(Binding::Variable(None)) => Err(TypeError::new(
                span,
                format!("the type of variable `{id}` is unknown (no typing invariant)"),
            )),
            None => Err(TypeError::new(span, format!("undeclared identifier `{id}`"))),
        }
    }
}

fn needs_context(span: Span) -> TypeError {
    TypeError {
        span,
        message: "cannot determine the element type of an empty set here".to_string(),
        needs_context: true,
    }
}

fn mismatch(span: Span, expected: &EbType, found: &EbType) -> TypeError {
    TypeError::new(span, format!("expected type {expected}, found {found}"))
}

fn expect_set(span: Span, t: EbType) -> Result<EbType, TypeError> {
    if t.is_set() {
        Ok(t)
    } else {
        Err(TypeError::new(span, format!("expected a set, found {t}")))
    }
}

fn expect_relation(span: Span, t: EbType) -> Result<(EbType, EbType), TypeError> {
    match t {
        EbType::Relation(a, b) => Ok((*a, *b)),
        other => Err(TypeError::new(
            span,
            format!("expected a relation, found {other}"),
        )),
    }
}

/// Infers the type of `e`.
pub fn infer(e: &Expr, scope: &Scope) -> Result<EbType, TypeError> {
    match &e.kind {
        ExprKind::Int(_) => Ok(EbType::Integer),
        ExprKind::Var(id) => scope.type_of(id, e.span),
        ExprKind::Integers | ExprKind::Naturals => Ok(EbType::set_of(EbType::Integer)),
        ExprKind::EmptySet => Err(needs_context(e.span)),
        ExprKind::SetEnum(items) => {
            let elem = infer_any(items.iter(), scope)?;
            for it in items {
                check(it, &elem, scope)?;
            }
            Ok(EbType::set_of(elem))
        }
        ExprKind::Set(op, a, b) => match op {
            SetOp::Union | SetOp::Inter | SetOp::Diff => {
                let t = expect_set(e.span, infer_any([&**a, &**b].into_iter(), scope)?)?;
                check(a, &t, scope)?;
                check(b, &t, scope)?;
                Ok(t)
            }
            SetOp::DomSub | SetOp::DomRes => {
                let rt = infer(b, scope)?;
                let (dom, _) = expect_relation(b.span, rt.clone())?;
                check(a, &EbType::set_of(dom), scope)?;
                Ok(rt)
            }
            SetOp::Cross => {
                let ta = expect_set(a.span, infer(a, scope)?)?;
                let tb = expect_set(b.span, infer(b, scope)?)?;
                Ok(EbType::relation(
                    ta.element().expect("set"),
                    tb.element().expect("set"),
                ))
            }
        },
        ExprKind::Maplet(a, b) => Ok(EbType::Pair(
            Box::new(infer(a, scope)?),
            Box::new(infer(b, scope)?),
        )),
        ExprKind::Arith(_, a, b) => {
            check(a, &EbType::Integer, scope)?;
            check(b, &EbType::Integer, scope)?;
            Ok(EbType::Integer)
        }
        ExprKind::Image(r, s) => {
            let (dom, ran) = expect_relation(r.span, infer(r, scope)?)?;
            check(s, &EbType::set_of(dom), scope)?;
            Ok(EbType::set_of(ran))
        }
        ExprKind::Apply(f, x) => {
            let (dom, ran) = expect_relation(f.span, infer(f, scope)?)?;
            check(x, &dom, scope)?;
            Ok(ran)
        }
        ExprKind::Dom(r) => {
            let (dom, _) = expect_relation(r.span, infer(r, scope)?)?;
            Ok(EbType::set_of(dom))
        }
        ExprKind::Ran(r) => {
            let (_, ran) = expect_relation(r.span, infer(r, scope)?)?;
            Ok(EbType::set_of(ran))
        }
        ExprKind::RelSet(_, a, b) => {
            let ta = expect_set(a.span, infer(a, scope)?)?;
            let tb = expect_set(b.span, infer(b, scope)?)?;
            Ok(EbType::SetOf(Box::new(EbType::relation(
                ta.element().expect("set"),
                tb.element().expect("set"),
            ))))
        }
    }
}

/// Type of the first expression whose type does not depend on context.
fn infer_any<'a>(
    mut items: impl Iterator<Item = &'a Expr>,
    scope: &Scope,
) -> Result<EbType, TypeError> {
    let mut last = None;
    for it in items.by_ref() {
        match infer(it, scope) {
            Ok(t) => return Ok(t),
            Err(e) if e.needs_context => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one operand"))
}

/// Checks `e` against `expected`, resolving empty sets from context.
pub fn check(e: &Expr, expected: &EbType, scope: &Scope) -> Result<(), TypeError> {
    match &e.kind {
        ExprKind::EmptySet => {
            expect_set(e.span, expected.clone())?;
            Ok(())
        }
        ExprKind::SetEnum(items) => {
            let elem = expected
                .element()
                .ok_or_else(|| TypeError::new(e.span, format!("expected {expected}, found a set")))?;
            for it in items {
                check(it, &elem, scope)?;
            }
            Ok(())
        }
        ExprKind::Set(SetOp::Union | SetOp::Inter | SetOp::Diff, a, b) => {
            expect_set(e.span, expected.clone())?;
            check(a, expected, scope)?;
            check(b, expected, scope)
        }
        ExprKind::Set(op @ (SetOp::DomSub | SetOp::DomRes | SetOp::Cross), a, b) => {
            let (dom, ran) = expect_relation(e.span, expected.clone())?;
            check(a, &EbType::set_of(dom), scope)?;
            if *op == SetOp::Cross {
                check(b, &EbType::set_of(ran), scope)
            } else {
                check(b, expected, scope)
            }
        }
        ExprKind::Maplet(a, b) => match expected {
            EbType::Pair(ta, tb) => {
                check(a, ta, scope)?;
                check(b, tb, scope)
            }
            _ => Err(TypeError::new(e.span, format!("expected {expected}, found a pair"))),
        },
        _ => {
            let found = infer(e, scope)?;
            if &found == expected {
                Ok(())
            } else {
                Err(mismatch(e.span, expected, &found))
            }
        }
    }
}

/// Type-checks a predicate.
pub fn check_pred(p: &Pred, scope: &Scope) -> Result<(), TypeError> {
    match &p.kind {
        PredKind::True | PredKind::False => Ok(()),
        PredKind::And(a, b) | PredKind::Or(a, b) => {
            check_pred(a, scope)?;
            check_pred(b, scope)
        }
        PredKind::Not(a) => check_pred(a, scope),
        PredKind::Cmp(op, a, b) => match op {
            CmpOp::Eq | CmpOp::Neq | CmpOp::Subset => {
                let t = infer_any([a, b].into_iter(), scope)?;
                if *op == CmpOp::Subset {
                    expect_set(p.span, t.clone())?;
                }
                check(a, &t, scope)?;
                check(b, &t, scope)
            }
            CmpOp::In => {
                match infer(b, scope) {
                    Ok(st) => {
                        let st = expect_set(b.span, st)?;
                        check(a, &st.element().expect("set"), scope)
                    }
                    Err(err) if err.needs_context => {
                        let ta = infer(a, scope)?;
                        check(b, &EbType::set_of(ta), scope)
                    }
                    Err(err) => Err(err),
                }
            }
            CmpOp::Lt | CmpOp::Le => {
                check(a, &EbType::Integer, scope)?;
                check(b, &EbType::Integer, scope)
            }
        },
    }
}

/// Fills in variable types from typing invariants of the form `v : S` and
/// `v <: S`, iterating until nothing changes.
pub fn infer_variable_types(m: &mut Machine) {
    loop {
        let scope = Scope::machine(m);
        let mut changed = false;
        for inv in &m.invariants {
            for c in inv.item.conjuncts() {
                let PredKind::Cmp(op @ (CmpOp::In | CmpOp::Subset), lhs, rhs) = &c.kind else {
                    continue;
                };
                let ExprKind::Var(id) = &lhs.kind else { continue };
                let Some(var) = m.variables.iter_mut().find(|v| &v.name == id) else {
                    continue;
                };
                if var.ty.is_some() {
                    continue;
                }
                let Ok(set_ty) = infer(rhs, &scope) else { continue };
                var.ty = match op {
                    CmpOp::In => set_ty.element(),
                    _ => set_ty.is_set().then_some(set_ty),
                };
                changed |= var.ty.is_some();
            }
        }
        if !changed {
            return;
        }
    }
}
