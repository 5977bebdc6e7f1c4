//! Event-B to JML translation.
//!
//! Every event becomes a pure guard query `guard_<e>` and a run method
//! `run_<e>` with two specification cases; invariants become the class
//! invariant and the initialisation becomes the `initially` clause.

use std::fmt;

use indexmap::IndexSet;

use crate::eventb::types::{infer, Scope, TypeError};
use crate::eventb::{
    free_identifiers, free_identifiers_expr, mod_set, ActionKind, CmpOp, EbType, Event, Expr,
    ExprKind, Ident, LabeledAction, LabeledPred, Machine, Pred, PredKind, RelKind, SetOp, Span,
};
use crate::jml::{
    AssignableClause, EqStyle, JmlClass, JmlExpr, JmlMethodSpec, JmlPredicate, JmlType, Method,
    MethodKind, SpecCase,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TranslateError {
    #[error("{0}")]
    Type(#[from] TypeError),
    #[error("{span}: {what} cannot be translated here")]
    Unsupported { span: Span, what: String },
    #[error("{span}: initialisation reads variable `{var}`, but there is no pre-state")]
    PreStateReference { span: Span, var: Ident },
    #[error("variable `{0}` has no type")]
    UntypedVariable(Ident),
}

type TResult<T> = Result<T, TranslateError>;

/// Whether a translated predicate describes the pre-state (wrapped in
/// `\old`) or is read as written.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Pre,
    Post,
}

/// Links a source element (`inv1`, `edit_owned.grd3`, ...) to the JML
/// fragment produced for it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEntry {
    pub source: String,
    pub target: String,
}

impl fmt::Display for TraceEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.source, self.target)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TranslationUnit {
    pub source: Machine,
    pub result: JmlClass,
    pub trace: Vec<TraceEntry>,
}

pub fn guard_name(event: &str) -> String {
    format!("guard_{event}")
}

pub fn run_name(event: &str) -> String {
    format!("run_{event}")
}

pub fn jml_type_of(t: &EbType) -> JmlType {
    match t {
        EbType::Integer | EbType::Carrier(_) => JmlType::Integer,
        EbType::SetOf(e) => JmlType::BSet(Box::new(jml_type_of(e))),
        EbType::Relation(a, b) => {
            JmlType::BRelation(Box::new(jml_type_of(a)), Box::new(jml_type_of(b)))
        }
        EbType::Pair(a, b) => JmlType::Pair(Box::new(jml_type_of(a)), Box::new(jml_type_of(b))),
    }
}

fn style_of(t: &EbType) -> EqStyle {
    EqStyle::for_type(&jml_type_of(t))
}

fn type_with_context(e: &Expr, expected: Option<&EbType>, scope: &Scope) -> TResult<EbType> {
    match infer(e, scope) {
        Ok(t) => Ok(t),
        Err(err) if err.needs_context => expected.cloned().ok_or(TranslateError::Type(err)),
        Err(err) => Err(err.into()),
    }
}

fn relation_parts(t: &EbType) -> Option<(EbType, EbType)> {
    match t {
        EbType::Relation(a, b) => Some(((**a).clone(), (**b).clone())),
        _ => None,
    }
}

/// Translates `e`; `expected` resolves the element type of empty sets.
pub fn translate_expr(e: &Expr, expected: Option<&EbType>, scope: &Scope) -> TResult<JmlExpr> {
    let t = type_with_context(e, expected, scope)?;
    let sub = |x: &Expr, ty: Option<&EbType>| translate_expr(x, ty, scope);
    Ok(match &e.kind {
        ExprKind::Int(n) => JmlExpr::Int(*n),
        ExprKind::Var(id) => JmlExpr::Var(id.clone()),
        ExprKind::Integers => JmlExpr::Integers,
        ExprKind::Naturals => JmlExpr::Naturals,
        ExprKind::EmptySet => JmlExpr::NewSet {
            set_type: jml_type_of(&t),
            items: vec![],
        },
        ExprKind::SetEnum(items) => {
            let elem = t.element();
            JmlExpr::NewSet {
                set_type: jml_type_of(&t),
                items: items
                    .iter()
                    .map(|i| sub(i, elem.as_ref()))
                    .collect::<TResult<_>>()?,
            }
        }
        ExprKind::Set(op @ (SetOp::Union | SetOp::Inter | SetOp::Diff), a, b) => {
            let method = match op {
                SetOp::Union => Method::Union,
                SetOp::Inter => Method::Intersection,
                _ => Method::Difference,
            };
            JmlExpr::call(sub(a, Some(&t))?, method, vec![sub(b, Some(&t))?])
        }
        ExprKind::Set(op @ (SetOp::DomSub | SetOp::DomRes), s, r) => {
            let dom = relation_parts(&t).map(|(d, _)| EbType::set_of(d));
            let method = if *op == SetOp::DomSub {
                Method::DomainSubtraction
            } else {
                Method::DomainRestriction
            };
            JmlExpr::call(sub(r, Some(&t))?, method, vec![sub(s, dom.as_ref())?])
        }
        ExprKind::Set(SetOp::Cross, a, b) => {
            let (da, db) = match relation_parts(&t) {
                Some((x, y)) => (Some(EbType::set_of(x)), Some(EbType::set_of(y))),
                None => (None, None),
            };
            JmlExpr::Cross(Box::new(sub(a, da.as_ref())?), Box::new(sub(b, db.as_ref())?))
        }
        ExprKind::Maplet(a, b) => {
            let (ta, tb) = match &t {
                EbType::Pair(x, y) => ((**x).clone(), (**y).clone()),
                _ => {
                    return Err(TranslateError::Unsupported {
                        span: e.span,
                        what: "a maplet of non-pair type".into(),
                    })
                }
            };
            JmlExpr::NewPair {
                left_type: jml_type_of(&ta),
                right_type: jml_type_of(&tb),
                left: Box::new(sub(a, Some(&ta))?),
                right: Box::new(sub(b, Some(&tb))?),
            }
        }
        ExprKind::Arith(op, a, b) => JmlExpr::Arith(
            *op,
            Box::new(sub(a, Some(&EbType::Integer))?),
            Box::new(sub(b, Some(&EbType::Integer))?),
        ),
        ExprKind::Image(r, s) => {
            let rt = infer(r, scope)?;
            let dom = relation_parts(&rt).map(|(d, _)| EbType::set_of(d));
            JmlExpr::call(sub(r, None)?, Method::Image, vec![sub(s, dom.as_ref())?])
        }
        ExprKind::Apply(f, x) => {
            let ft = infer(f, scope)?;
            let dom = relation_parts(&ft).map(|(d, _)| d);
            JmlExpr::call(sub(f, None)?, Method::Apply, vec![sub(x, dom.as_ref())?])
        }
        ExprKind::Dom(r) => JmlExpr::call(sub(r, None)?, Method::Domain, vec![]),
        ExprKind::Ran(r) => JmlExpr::call(sub(r, None)?, Method::Range, vec![]),
        ExprKind::RelSet(k, ..) => {
            return Err(TranslateError::Unsupported {
                span: e.span,
                what: format!("the relation set `{}` outside a membership", k.token()),
            })
        }
    })
}

fn common_type(a: &Expr, b: &Expr, scope: &Scope) -> TResult<EbType> {
    match infer(a, scope) {
        Ok(t) => Ok(t),
        Err(err) if err.needs_context => Ok(infer(b, scope)?),
        Err(err) => Err(err.into()),
    }
}

fn relset_membership(
    r: &Expr,
    k: RelKind,
    src: &Expr,
    dst: &Expr,
    scope: &Scope,
) -> TResult<JmlPredicate> {
    let rt = infer(r, scope)?;
    let (d, g) = relation_parts(&rt).ok_or_else(|| TranslateError::Unsupported {
        span: r.span,
        what: "membership of a non-relation in a relation set".into(),
    })?;
    let rel = translate_expr(r, None, scope)?;
    let src = translate_expr(src, Some(&EbType::set_of(d)), scope)?;
    let dst = translate_expr(dst, Some(&EbType::set_of(g)), scope)?;
    let side = |m: Method, set: JmlExpr, exact: bool| {
        let lhs = JmlExpr::call(rel.clone(), m, vec![]);
        if exact {
            JmlPredicate::Eq(lhs, set, EqStyle::Object)
        } else {
            JmlPredicate::IsSubset(lhs, set)
        }
    };
    let mut parts = Vec::new();
    if k.functional() {
        parts.push(JmlPredicate::IsaFunction(rel.clone()));
    }
    parts.push(side(Method::Domain, src, k.total()));
    parts.push(side(Method::Range, dst, k.surjective()));
    Ok(JmlPredicate::conjoin(parts))
}

fn translate_pred_inner(p: &Pred, scope: &Scope) -> TResult<JmlPredicate> {
    Ok(match &p.kind {
        PredKind::True => JmlPredicate::True,
        PredKind::False => JmlPredicate::False,
        PredKind::And(a, b) => JmlPredicate::and(
            translate_pred_inner(a, scope)?,
            translate_pred_inner(b, scope)?,
        ),
        PredKind::Or(a, b) => JmlPredicate::Or(
            Box::new(translate_pred_inner(a, scope)?),
            Box::new(translate_pred_inner(b, scope)?),
        ),
        PredKind::Not(a) => !translate_pred_inner(a, scope)?,
        PredKind::Cmp(op, a, b) => match op {
            CmpOp::Eq | CmpOp::Neq => {
                let t = common_type(a, b, scope)?;
                let eq = JmlPredicate::Eq(
                    translate_expr(a, Some(&t), scope)?,
                    translate_expr(b, Some(&t), scope)?,
                    style_of(&t),
                );
                if *op == CmpOp::Eq {
                    eq
                } else {
                    !eq
                }
            }
            CmpOp::Subset => {
                let t = common_type(a, b, scope)?;
                JmlPredicate::IsSubset(
                    translate_expr(a, Some(&t), scope)?,
                    translate_expr(b, Some(&t), scope)?,
                )
            }
            CmpOp::In => match &b.kind {
                ExprKind::RelSet(k, src, dst) => relset_membership(a, *k, src, dst, scope)?,
                _ => {
                    let (set, elem) = match infer(b, scope) {
                        Ok(st) => {
                            let et = st.element();
                            (
                                translate_expr(b, Some(&st), scope)?,
                                translate_expr(a, et.as_ref(), scope)?,
                            )
                        }
                        Err(err) if err.needs_context => {
                            let et = infer(a, scope)?;
                            (
                                translate_expr(b, Some(&EbType::set_of(et.clone())), scope)?,
                                translate_expr(a, Some(&et), scope)?,
                            )
                        }
                        Err(err) => return Err(err.into()),
                    };
                    JmlPredicate::Has { set, elem }
                }
            },
            CmpOp::Lt | CmpOp::Le => {
                let x = translate_expr(a, Some(&EbType::Integer), scope)?;
                let y = translate_expr(b, Some(&EbType::Integer), scope)?;
                if *op == CmpOp::Lt {
                    JmlPredicate::Lt(x, y)
                } else {
                    JmlPredicate::Le(x, y)
                }
            }
        },
    })
}

/// Structural translation of a predicate; `Mode::Pre` wraps the result in
/// `\old`.
pub fn translate_predicate(p: &Pred, mode: Mode, scope: &Scope) -> TResult<JmlPredicate> {
    let q = translate_pred_inner(p, scope)?;
    Ok(match mode {
        Mode::Pre => JmlPredicate::old(q),
        Mode::Post => q,
    })
}

fn variable_type(scope: &Scope, v: &Ident, span: Span) -> TResult<EbType> {
    scope
        .type_of(v, span)
        .map_err(|_| TranslateError::UntypedVariable(v.clone()))
}

/// `v := E` becomes `v == \old(E)` or `v.equals(\old(E))`; `v :| P`
/// becomes `(\exists T v'; \old(P) && v == v')`.
pub fn translate_action(a: &crate::eventb::Action, scope: &Scope) -> TResult<JmlPredicate> {
    let t = variable_type(scope, &a.target, a.target_span)?;
    match &a.kind {
        ActionKind::Assign(e) => {
            let rhs = translate_expr(e, Some(&t), scope)?;
            Ok(JmlPredicate::Eq(
                JmlExpr::Var(a.target.clone()),
                JmlExpr::Old(Box::new(rhs)),
                style_of(&t),
            ))
        }
        ActionKind::Becomes(p) => {
            let inner = scope.clone().with_primed(&a.target);
            let body = JmlPredicate::and(
                translate_predicate(p, Mode::Pre, &inner)?,
                JmlPredicate::Becomes {
                    var: a.target.clone(),
                    primed: a.target.prime(),
                    style: style_of(&t),
                },
            );
            Ok(JmlPredicate::exists(a.target.prime(), jml_type_of(&t), body))
        }
    }
}

/// Left-to-right conjunction of the translated actions.
pub fn translate_actions(actions: &[LabeledAction], scope: &Scope) -> TResult<JmlPredicate> {
    Ok(JmlPredicate::conjoin(
        actions
            .iter()
            .map(|a| translate_action(&a.item, scope))
            .collect::<TResult<Vec<_>>>()?,
    ))
}

fn translate_guards(guards: &[LabeledPred], scope: &Scope) -> TResult<JmlPredicate> {
    Ok(JmlPredicate::conjoin(
        guards
            .iter()
            .map(|g| translate_predicate(&g.item, Mode::Post, scope))
            .collect::<TResult<Vec<_>>>()?,
    ))
}

/// Wraps `body` in one existential per parameter, first parameter outermost.
fn quantify(e: &Event, body: JmlPredicate) -> JmlPredicate {
    e.params.iter().rev().fold(body, |acc, p| {
        JmlPredicate::exists(p.name.clone(), jml_type_of(&p.ty), acc)
    })
}

/// The guard query and run method of `e`.
pub fn translate_event(m: &Machine, e: &Event) -> TResult<(JmlMethodSpec, JmlMethodSpec)> {
    let scope = Scope::event(m, e);
    let g = translate_guards(&e.guards, &scope)?;
    let acts = translate_actions(&e.actions, &scope)?;
    let name = e.name.name.as_str();

    let guard_body = if e.params.is_empty() {
        g.clone()
    } else {
        quantify(e, JmlPredicate::Group(Box::new(g.clone())))
    };
    let guard = JmlMethodSpec {
        name: guard_name(name),
        kind: MethodKind::GuardQuery,
        normal: SpecCase {
            requires: JmlPredicate::True,
            assignable: AssignableClause::Nothing,
            ensures: JmlPredicate::ResultIff(Box::new(guard_body)),
        },
        exceptional: None,
    };

    let call = JmlPredicate::GuardCall(guard_name(name));
    let run = JmlMethodSpec {
        name: run_name(name),
        kind: MethodKind::Run,
        normal: SpecCase {
            requires: call.clone(),
            assignable: AssignableClause::of(mod_set(&e.actions)),
            ensures: quantify(e, JmlPredicate::and(JmlPredicate::old(g), acts)),
        },
        exceptional: Some(SpecCase {
            requires: !call,
            assignable: AssignableClause::Nothing,
            ensures: JmlPredicate::True,
        }),
    };
    Ok((guard, run))
}

/// Conjunction of the invariants in label order.
pub fn translate_invariants(m: &Machine) -> TResult<JmlPredicate> {
    let scope = Scope::machine(m);
    Ok(JmlPredicate::conjoin(
        m.invariants
            .iter()
            .map(|i| translate_predicate(&i.item, Mode::Post, &scope))
            .collect::<TResult<Vec<_>>>()?,
    ))
}

fn reject_pre_state(ids: impl IntoIterator<Item = Ident>, m: &Machine, span: Span) -> TResult<()> {
    for id in ids {
        if !id.primed && m.variables.iter().any(|v| v.name == id) {
            return Err(TranslateError::PreStateReference { span, var: id });
        }
    }
    Ok(())
}

/// Post-state description of the initialisation: `v == E`,
/// `v.equals(E)`, or `v.isEmpty()` for `v := {}`.
pub fn translate_initialisation(m: &Machine) -> TResult<JmlPredicate> {
    let scope = Scope::machine(m);
    let mut parts = Vec::new();
    for a in &m.initialisation {
        let a = &a.item;
        let t = variable_type(&scope, &a.target, a.target_span)?;
        let target = JmlExpr::Var(a.target.clone());
        parts.push(match &a.kind {
            ActionKind::Assign(e) => {
                reject_pre_state(free_identifiers_expr(e), m, e.span)?;
                if matches!(e.kind, ExprKind::EmptySet) {
                    JmlPredicate::IsEmpty(target)
                } else {
                    JmlPredicate::Eq(target, translate_expr(e, Some(&t), &scope)?, style_of(&t))
                }
            }
            ActionKind::Becomes(p) => {
                reject_pre_state(free_identifiers(p), m, p.span)?;
                let inner = scope.clone().with_primed(&a.target);
                JmlPredicate::exists(
                    a.target.prime(),
                    jml_type_of(&t),
                    JmlPredicate::and(
                        translate_predicate(p, Mode::Post, &inner)?,
                        JmlPredicate::Becomes {
                            var: a.target.clone(),
                            primed: a.target.prime(),
                            style: style_of(&t),
                        },
                    ),
                )
            }
        });
    }
    Ok(JmlPredicate::conjoin(parts))
}

/// Translates a whole machine. Expects a machine without well-formedness
/// diagnostics.
pub fn translate_machine(m: &Machine) -> TResult<TranslationUnit> {
    let mut trace = Vec::new();
    let mut carrier_sets = m.carrier_sets.clone();
    carrier_sets.sort();
    let mut model_fields = m
        .variables
        .iter()
        .map(|v| {
            v.ty
                .as_ref()
                .map(|t| (v.name.clone(), jml_type_of(t)))
                .ok_or_else(|| TranslateError::UntypedVariable(v.name.clone()))
        })
        .collect::<TResult<Vec<_>>>()?;
    model_fields.sort_by(|a, b| a.0.cmp(&b.0));

    let class_invariant = translate_invariants(m)?;
    for (i, inv) in m.invariants.iter().enumerate() {
        trace.push(TraceEntry {
            source: inv.label.to_string(),
            target: format!("invariant[{i}]"),
        });
    }
    let initially = translate_initialisation(m)?;
    for (i, a) in m.initialisation.iter().enumerate() {
        trace.push(TraceEntry {
            source: format!("initialisation.{}", a.label),
            target: format!("initially[{i}]"),
        });
    }

    let mut methods = Vec::new();
    for e in &m.events {
        let (guard, run) = translate_event(m, e)?;
        for g in &e.guards {
            trace.push(TraceEntry {
                source: format!("{}.{}", e.name, g.label),
                target: format!("{}.ensures", guard.name),
            });
        }
        for a in &e.actions {
            trace.push(TraceEntry {
                source: format!("{}.{}", e.name, a.label),
                target: format!("{}.ensures", run.name),
            });
        }
        methods.push(guard);
        methods.push(run);
    }

    Ok(TranslationUnit {
        source: m.clone(),
        result: JmlClass {
            name: m.name.name.clone(),
            carrier_sets,
            model_fields,
            class_invariant,
            initially,
            methods,
        },
        trace,
    })
}

/// The assignable set of the first case of `run`, when it lists variables.
pub fn assignable_vars(run: &JmlMethodSpec) -> IndexSet<Ident> {
    match &run.normal.assignable {
        AssignableClause::Vars(v) => v.clone(),
        _ => IndexSet::new(),
    }
}
