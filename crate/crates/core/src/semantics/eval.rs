//! Evaluation of Event-B and JML expressions and predicates over finite
//! values.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, RwLock};

use super::universe::{SemanticsError, Universe};
use super::value::{Env, State, Value};
use crate::eventb::{ArithOp, CmpOp, Expr, ExprKind, Ident, Pred, PredKind, RelKind, SetOp};
use crate::jml::{flatten_and, JmlExpr, JmlPredicate, JmlType, Method};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("unbound identifier `{0}`")]
    Unbound(Ident),
    #[error("apply undefined at {0}")]
    ApplyUndefined(Value),
    #[error("type mismatch: expected {expected}, found {found}")]
    Mismatch { expected: &'static str, found: Value },
    #[error("integer overflow")]
    Overflow,
    #[error("{0} has no finite value")]
    Unbounded(&'static str),
    #[error("`{0}()` is not a known guard query")]
    UnknownGuard(String),
    #[error("`\\result` outside a guard query")]
    ResultOutsideQuery,
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

type EResult<T> = Result<T, EvalError>;

fn int(v: Value) -> EResult<i64> {
    match v {
        Value::Int(n) => Ok(n),
        other => Err(EvalError::Mismatch {
            expected: "an integer",
            found: other,
        }),
    }
}

fn set(v: Value) -> EResult<BTreeSet<Value>> {
    match v {
        Value::Set(s) => Ok(s),
        other => Err(EvalError::Mismatch {
            expected: "a set",
            found: other,
        }),
    }
}

fn pairs(s: &BTreeSet<Value>) -> EResult<Vec<(&Value, &Value)>> {
    s.iter()
        .map(|p| {
            p.as_pair().ok_or_else(|| EvalError::Mismatch {
                expected: "a pair",
                found: p.clone(),
            })
        })
        .collect()
}

fn arith(op: ArithOp, a: i64, b: i64) -> EResult<Value> {
    let r = match op {
        ArithOp::Add => a.checked_add(b),
        ArithOp::Sub => a.checked_sub(b),
        ArithOp::Mul => a.checked_mul(b),
    };
    r.map(Value::Int).ok_or(EvalError::Overflow)
}

fn domain_of(r: &BTreeSet<Value>) -> EResult<BTreeSet<Value>> {
    Ok(pairs(r)?.into_iter().map(|(a, _)| a.clone()).collect())
}

fn range_of(r: &BTreeSet<Value>) -> EResult<BTreeSet<Value>> {
    Ok(pairs(r)?.into_iter().map(|(_, b)| b.clone()).collect())
}

fn image(r: &BTreeSet<Value>, s: &BTreeSet<Value>) -> EResult<Value> {
    Ok(Value::Set(
        pairs(r)?
            .into_iter()
            .filter(|(a, _)| s.contains(a))
            .map(|(_, b)| b.clone())
            .collect(),
    ))
}

fn apply(f: &BTreeSet<Value>, x: &Value) -> EResult<Value> {
    let mut hits = pairs(f)?.into_iter().filter(|(a, _)| *a == x).map(|(_, b)| b);
    match (hits.next(), hits.next()) {
        (Some(y), None) => Ok(y.clone()),
        _ => Err(EvalError::ApplyUndefined(x.clone())),
    }
}

fn restrict(r: &BTreeSet<Value>, s: &BTreeSet<Value>, keep: bool) -> EResult<Value> {
    Ok(Value::Set(
        pairs(r)?
            .into_iter()
            .filter(|(a, _)| s.contains(*a) == keep)
            .map(|(a, b)| Value::pair(a.clone(), b.clone()))
            .collect(),
    ))
}

fn cross(a: &BTreeSet<Value>, b: &BTreeSet<Value>) -> Value {
    Value::Set(
        a.iter()
            .flat_map(|x| b.iter().map(move |y| Value::pair(x.clone(), y.clone())))
            .collect(),
    )
}

fn is_function(r: &BTreeSet<Value>) -> EResult<bool> {
    let ps = pairs(r)?;
    let dom: BTreeSet<&Value> = ps.iter().map(|(a, _)| *a).collect();
    Ok(dom.len() == ps.len())
}

/// Membership in `INT` / `NAT`, which are not enumerated.
fn in_builtin(e: &Value, naturals: bool) -> bool {
    matches!(e, Value::Int(n) if !naturals || *n >= 0)
}

/// Evaluator bound to a universe and the machine's carrier sets.
pub struct Evaluator<'u> {
    pub universe: &'u Universe,
    carrier_names: Vec<Ident>,
    carriers: BTreeMap<Ident, Value>,
    domains: RwLock<HashMap<JmlType, Arc<Vec<Value>>>>,
}

impl<'u> Evaluator<'u> {
    pub fn new(universe: &'u Universe, carrier_sets: &[Ident]) -> Self {
        let carriers = carrier_sets
            .iter()
            .map(|c| (c.clone(), Value::set(universe.carrier_elements(&c.name))))
            .collect();
        Evaluator {
            universe,
            carrier_names: carrier_sets.to_vec(),
            carriers,
            domains: RwLock::new(HashMap::new()),
        }
    }

    fn jml_domain(&self, t: &JmlType) -> EResult<Arc<Vec<Value>>> {
        if let Some(d) = self.domains.read().expect("domain cache").get(t) {
            return Ok(d.clone());
        }
        let d = Arc::new(self.universe.jml_domain(t, &self.carrier_names)?);
        self.domains
            .write()
            .expect("domain cache")
            .insert(t.clone(), d.clone());
        Ok(d)
    }

    fn lookup(&self, id: &Ident, state: &State, env: &Env) -> EResult<Value> {
        env.get(id)
            .or_else(|| state.get(id))
            .or_else(|| self.carriers.get(id))
            .cloned()
            .ok_or_else(|| EvalError::Unbound(id.clone()))
    }

    // ---- Event-B ----

    pub fn eval_expr(&self, e: &Expr, state: &State, env: &Env) -> EResult<Value> {
        let ev = |x: &Expr| self.eval_expr(x, state, env);
        let ev_set = |x: &Expr| ev(x).and_then(set);
        Ok(match &e.kind {
            ExprKind::Int(n) => Value::Int(*n),
            ExprKind::Var(id) => self.lookup(id, state, env)?,
            ExprKind::Integers => return Err(EvalError::Unbounded("INT")),
            ExprKind::Naturals => return Err(EvalError::Unbounded("NAT")),
            ExprKind::EmptySet => Value::empty_set(),
            ExprKind::SetEnum(items) => Value::Set(items.iter().map(ev).collect::<EResult<_>>()?),
            ExprKind::Set(op, a, b) => {
                let (x, y) = (ev_set(a)?, ev_set(b)?);
                match op {
                    SetOp::Union => Value::Set(x.union(&y).cloned().collect()),
                    SetOp::Inter => Value::Set(x.intersection(&y).cloned().collect()),
                    SetOp::Diff => Value::Set(x.difference(&y).cloned().collect()),
                    SetOp::DomSub => restrict(&y, &x, false)?,
                    SetOp::DomRes => restrict(&y, &x, true)?,
                    SetOp::Cross => cross(&x, &y),
                }
            }
            ExprKind::Maplet(a, b) => Value::pair(ev(a)?, ev(b)?),
            ExprKind::Arith(op, a, b) => arith(*op, int(ev(a)?)?, int(ev(b)?)?)?,
            ExprKind::Image(r, s) => image(&ev_set(r)?, &ev_set(s)?)?,
            ExprKind::Apply(f, x) => apply(&ev_set(f)?, &ev(x)?)?,
            ExprKind::Dom(r) => Value::Set(domain_of(&ev_set(r)?)?),
            ExprKind::Ran(r) => Value::Set(range_of(&ev_set(r)?)?),
            ExprKind::RelSet(..) => return Err(EvalError::Unbounded("a relation set")),
        })
    }

    fn relset_member(
        &self,
        r: &BTreeSet<Value>,
        k: RelKind,
        src: &BTreeSet<Value>,
        dst: &BTreeSet<Value>,
    ) -> EResult<bool> {
        let dom = domain_of(r)?;
        let ran = range_of(r)?;
        Ok(dom.is_subset(src)
            && ran.is_subset(dst)
            && (!k.functional() || is_function(r)?)
            && (!k.total() || dom == *src)
            && (!k.surjective() || ran == *dst))
    }

    pub fn eb_pred_holds(&self, p: &Pred, state: &State, env: &Env) -> EResult<bool> {
        Ok(match &p.kind {
            PredKind::True => true,
            PredKind::False => false,
            PredKind::And(a, b) => {
                self.eb_pred_holds(a, state, env)? && self.eb_pred_holds(b, state, env)?
            }
            PredKind::Or(a, b) => {
                self.eb_pred_holds(a, state, env)? || self.eb_pred_holds(b, state, env)?
            }
            PredKind::Not(a) => !self.eb_pred_holds(a, state, env)?,
            PredKind::Cmp(op, a, b) => {
                let ev = |x: &Expr| self.eval_expr(x, state, env);
                match (op, &b.kind) {
                    (CmpOp::In, ExprKind::Integers | ExprKind::Naturals) => {
                        in_builtin(&ev(a)?, matches!(b.kind, ExprKind::Naturals))
                    }
                    (CmpOp::Subset, ExprKind::Integers | ExprKind::Naturals) => set(ev(a)?)?
                        .iter()
                        .all(|x| in_builtin(x, matches!(b.kind, ExprKind::Naturals))),
                    (CmpOp::In, ExprKind::RelSet(k, src, dst)) => self.relset_member(
                        &set(ev(a)?)?,
                        *k,
                        &set(ev(src)?)?,
                        &set(ev(dst)?)?,
                    )?,
                    (CmpOp::Eq, _) => ev(a)? == ev(b)?,
                    (CmpOp::Neq, _) => ev(a)? != ev(b)?,
                    (CmpOp::In, _) => set(ev(b)?)?.contains(&ev(a)?),
                    (CmpOp::Subset, _) => set(ev(a)?)?.is_subset(&set(ev(b)?)?),
                    (CmpOp::Lt, _) => int(ev(a)?)? < int(ev(b)?)?,
                    (CmpOp::Le, _) => int(ev(a)?)? <= int(ev(b)?)?,
                }
            }
        })
    }

    // ---- JML ----

    /// Evaluates `e`; identifiers read `pre` inside `\old` and `post`
    /// elsewhere, after the bound names in `env`.
    pub fn eval_jml_expr(
        &self,
        e: &JmlExpr,
        pre: &State,
        post: &State,
        env: &Env,
        old: bool,
    ) -> EResult<Value> {
        let ev = |x: &JmlExpr| self.eval_jml_expr(x, pre, post, env, old);
        let ev_set = |x: &JmlExpr| ev(x).and_then(set);
        Ok(match e {
            JmlExpr::Int(n) => Value::Int(*n),
            JmlExpr::Var(id) => self.lookup(id, if old { pre } else { post }, env)?,
            JmlExpr::Integers => return Err(EvalError::Unbounded("INT")),
            JmlExpr::Naturals => return Err(EvalError::Unbounded("NAT")),
            JmlExpr::NewSet { items, .. } => Value::Set(items.iter().map(ev).collect::<EResult<_>>()?),
            JmlExpr::NewPair { left, right, .. } => Value::pair(ev(left)?, ev(right)?),
            JmlExpr::Cross(a, b) => cross(&ev_set(a)?, &ev_set(b)?),
            JmlExpr::Arith(op, a, b) => arith(*op, int(ev(a)?)?, int(ev(b)?)?)?,
            JmlExpr::Old(inner) => self.eval_jml_expr(inner, pre, post, env, true)?,
            JmlExpr::Call {
                receiver,
                method,
                args,
            } => {
                let r = ev_set(receiver)?;
                let arg = |i: usize| ev(&args[i]);
                match method {
                    Method::Union => Value::Set(r.union(&set(arg(0)?)?).cloned().collect()),
                    Method::Intersection => {
                        Value::Set(r.intersection(&set(arg(0)?)?).cloned().collect())
                    }
                    Method::Difference => {
                        Value::Set(r.difference(&set(arg(0)?)?).cloned().collect())
                    }
                    Method::DomainSubtraction => restrict(&r, &set(arg(0)?)?, false)?,
                    Method::DomainRestriction => restrict(&r, &set(arg(0)?)?, true)?,
                    Method::Image => image(&r, &set(arg(0)?)?)?,
                    Method::Apply => apply(&r, &arg(0)?)?,
                    Method::Domain => Value::Set(domain_of(&r)?),
                    Method::Range => Value::Set(range_of(&r)?),
                }
            }
        })
    }

    /// Truth of `p` over the state pair `(pre, post)`. Calls `g()` are
    /// resolved through `guards`, evaluated at the pre-state.
    pub fn jml_pred_holds(
        &self,
        p: &JmlPredicate,
        pre: &State,
        post: &State,
        env: &mut Env,
        guards: &BTreeMap<String, JmlPredicate>,
    ) -> EResult<bool> {
        self.jml_holds(p, pre, post, env, guards, false)
    }

    fn jml_holds(
        &self,
        p: &JmlPredicate,
        pre: &State,
        post: &State,
        env: &mut Env,
        guards: &BTreeMap<String, JmlPredicate>,
        old: bool,
    ) -> EResult<bool> {
        use JmlPredicate as P;
        macro_rules! ev {
            ($x:expr) => {
                self.eval_jml_expr($x, pre, post, env, old)?
            };
        }
        Ok(match p {
            P::True => true,
            P::False => false,
            P::And(a, b) => {
                self.jml_holds(a, pre, post, env, guards, old)?
                    && self.jml_holds(b, pre, post, env, guards, old)?
            }
            P::Or(a, b) => {
                self.jml_holds(a, pre, post, env, guards, old)?
                    || self.jml_holds(b, pre, post, env, guards, old)?
            }
            P::Not(a) => !self.jml_holds(a, pre, post, env, guards, old)?,
            P::Group(a) => self.jml_holds(a, pre, post, env, guards, old)?,
            P::Old(a) => self.jml_holds(a, pre, post, env, guards, true)?,
            P::Becomes { var, primed, .. } => {
                let target = if old { pre } else { post };
                let now = target.get(var).ok_or_else(|| EvalError::Unbound(var.clone()))?;
                let chosen = env.get(primed).ok_or_else(|| EvalError::Unbound(primed.clone()))?;
                now == chosen
            }
            P::Exists { var, ty, body } => {
                let domain = self.jml_domain(ty)?;
                let candidates: Vec<Value> = match witness_hint(var, body, if old { pre } else { post }) {
                    Some(v) => domain.iter().filter(|d| **d == v).cloned().collect(),
                    None => domain.to_vec(),
                };
                let saved = env.remove(var);
                let mut found = false;
                for c in candidates {
                    env.insert(var.clone(), c);
                    if self
                        .jml_holds(body, pre, post, env, guards, old)
                        .unwrap_or(false)
                    {
                        found = true;
                        break;
                    }
                }
                env.remove(var);
                if let Some(v) = saved {
                    env.insert(var.clone(), v);
                }
                found
            }
            P::Eq(a, b, _) => ev!(a) == ev!(b),
            P::Has { set: s, elem } => match s {
                JmlExpr::Integers => in_builtin(&ev!(elem), false),
                JmlExpr::Naturals => in_builtin(&ev!(elem), true),
                _ => set(ev!(s))?.contains(&ev!(elem)),
            },
            P::IsSubset(a, b) => match b {
                JmlExpr::Integers | JmlExpr::Naturals => {
                    let nat = matches!(b, JmlExpr::Naturals);
                    set(ev!(a))?.iter().all(|x| in_builtin(x, nat))
                }
                _ => set(ev!(a))?.is_subset(&set(ev!(b))?),
            },
            P::Lt(a, b) => int(ev!(a))? < int(ev!(b))?,
            P::Le(a, b) => int(ev!(a))? <= int(ev!(b))?,
            P::IsEmpty(a) => set(ev!(a))?.is_empty(),
            P::IsaFunction(a) => is_function(&set(ev!(a))?)?,
            P::ResultIff(_) => return Err(EvalError::ResultOutsideQuery),
            P::GuardCall(name) => {
                let g = guards
                    .get(name)
                    .ok_or_else(|| EvalError::UnknownGuard(name.clone()))?;
                self.jml_holds(g, pre, pre, &mut Env::new(), guards, false)?
            }
        })
    }
}

/// If `body` has a top-level conjunct tying `var` to a state variable
/// (`v == var`), the value that variable has in `state`.
fn witness_hint(var: &Ident, body: &JmlPredicate, state: &State) -> Option<Value> {
    flatten_and(body).into_iter().find_map(|c| match c {
        JmlPredicate::Becomes { var: v, primed, .. } if primed == var => state.get(v).cloned(),
        _ => None,
    })
}
