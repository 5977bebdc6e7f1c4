//! Shared helpers for integration tests: fixtures, a random generator of
//! well-formed machines, and a brute-force oracle for one-variable events.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use eb2jml::eventb::*;
use proptest::prelude::RngExt;
use proptest::test_runner::{RngAlgorithm, TestRng};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("fixtures")
        .join(name)
}

pub fn fixture(name: &str) -> Machine {
    let text = std::fs::read_to_string(fixture_path(name)).unwrap();
    let m = parse_machine(&text).unwrap();
    assert!(well_formedness_check(&m).is_empty(), "{name} is not well formed");
    m
}

pub fn rng_from_seed(seed: u64) -> TestRng {
    let mut bytes = [0u8; 32];
    bytes[..8].copy_from_slice(&seed.to_le_bytes());
    TestRng::from_seed(RngAlgorithm::ChaCha, &bytes)
}

fn pick<'a, T>(rng: &mut TestRng, items: &'a [T]) -> &'a T {
    &items[rng.random_range(0..items.len())]
}

// ---------------------------------------------------------------------------
// Random well-formed machines

/// Identifiers visible at some point, with their types.
#[derive(Clone, Default)]
struct Ctx {
    names: Vec<(Ident, EbType)>,
}

impl Ctx {
    fn of_type(&self, ty: &EbType) -> Vec<Ident> {
        self.names
            .iter()
            .filter(|(_, t)| t == ty)
            .map(|(n, _)| n.clone())
            .collect()
    }

    fn relations(&self) -> Vec<(Ident, EbType, EbType)> {
        self.names
            .iter()
            .filter_map(|(n, t)| match t {
                EbType::Relation(a, b) => Some((n.clone(), (**a).clone(), (**b).clone())),
                _ => None,
            })
            .collect()
    }

    fn with(&self, id: Ident, ty: EbType) -> Ctx {
        let mut c = self.clone();
        c.names.push((id, ty));
        c
    }
}

fn carrier(s: &str) -> EbType {
    EbType::Carrier(s.to_string())
}

fn bx(e: Expr) -> Box<Expr> {
    Box::new(e)
}

/// Relations `r` through which `r(x)` yields a `ty`, with `x` a variable.
fn appliers(ctx: &Ctx, ty: &EbType) -> Vec<(Ident, Ident)> {
    ctx.relations()
        .into_iter()
        .filter(|(_, _, b)| b == ty)
        .flat_map(|(r, a, _)| ctx.of_type(&a).into_iter().map(move |x| (r.clone(), x)))
        .collect()
}

/// Whether an element of type `ty` can be written from `ctx`.
fn element_available(ctx: &Ctx, ty: &EbType) -> bool {
    match ty {
        EbType::Integer => true,
        EbType::Carrier(_) => !ctx.of_type(ty).is_empty() || !appliers(ctx, ty).is_empty(),
        _ => false,
    }
}

fn gen_int(rng: &mut TestRng, ctx: &Ctx, depth: u32) -> Expr {
    let vars = ctx.of_type(&EbType::Integer);
    if depth == 0 || rng.random_bool(0.4) {
        if !vars.is_empty() && rng.random_bool(0.6) {
            return Expr::bare(ExprKind::Var(pick(rng, &vars).clone()));
        }
        return Expr::int(rng.random_range(-1..6));
    }
    let op = *pick(rng, &[ArithOp::Add, ArithOp::Sub, ArithOp::Mul]);
    Expr::arith(op, gen_int(rng, ctx, depth - 1), gen_int(rng, ctx, depth - 1))
}

/// An expression of element type `ty`; the caller checks availability.
fn gen_elem(rng: &mut TestRng, ctx: &Ctx, ty: &EbType, depth: u32) -> Expr {
    if *ty == EbType::Integer {
        return gen_int(rng, ctx, depth);
    }
    let direct = ctx.of_type(ty);
    let via = appliers(ctx, ty);
    if !direct.is_empty() && (via.is_empty() || depth == 0 || rng.random_bool(0.7)) {
        return Expr::bare(ExprKind::Var(pick(rng, &direct).clone()));
    }
    let (r, x) = pick(rng, &via).clone();
    Expr::bare(ExprKind::Apply(
        bx(Expr::bare(ExprKind::Var(r))),
        bx(Expr::bare(ExprKind::Var(x))),
    ))
}

/// A set of elements of type `elem` (a carrier).
fn gen_set(rng: &mut TestRng, ctx: &Ctx, elem: &EbType, depth: u32) -> Expr {
    let set_ty = EbType::set_of(elem.clone());
    let EbType::Carrier(cname) = elem else {
        unreachable!("only carrier-valued sets are generated")
    };
    if depth == 0 || rng.random_bool(0.35) {
        let mut leaves = vec![
            Expr::bare(ExprKind::EmptySet),
            Expr::var(cname),
        ];
        leaves.extend(ctx.of_type(&set_ty).into_iter().map(|v| Expr::bare(ExprKind::Var(v))));
        if element_available(ctx, elem) {
            let n = rng.random_range(1..3);
            let items = (0..n).map(|_| gen_elem(rng, ctx, elem, 0)).collect();
            leaves.push(Expr::bare(ExprKind::SetEnum(items)));
        }
        return pick(rng, &leaves).clone();
    }
    let rels = ctx.relations();
    match rng.random_range(0..4) {
        0 | 1 => {
            let op = *pick(rng, &[SetOp::Union, SetOp::Inter, SetOp::Diff]);
            Expr::set(op, gen_set(rng, ctx, elem, depth - 1), gen_set(rng, ctx, elem, depth - 1))
        }
        2 => {
            let doms: Vec<_> = rels.iter().filter(|(_, a, _)| a == elem).collect();
            let rans: Vec<_> = rels.iter().filter(|(_, _, b)| b == elem).collect();
            if !doms.is_empty() && rng.random_bool(0.5) {
                let (r, a, b) = (*pick(rng, &doms)).clone();
                let rel = anchored_rel(rng, ctx, &a, &b, depth - 1, r);
                Expr::bare(ExprKind::Dom(bx(rel)))
            } else if !rans.is_empty() {
                let (r, a, b) = (*pick(rng, &rans)).clone();
                let rel = anchored_rel(rng, ctx, &a, &b, depth - 1, r);
                Expr::bare(ExprKind::Ran(bx(rel)))
            } else {
                gen_set(rng, ctx, elem, depth - 1)
            }
        }
        _ => {
            let rans: Vec<_> = rels.iter().filter(|(_, _, b)| b == elem).collect();
            if rans.is_empty() {
                return gen_set(rng, ctx, elem, depth - 1);
            }
            let (r, a, _) = (*pick(rng, &rans)).clone();
            let arg = gen_set(rng, ctx, &a, depth - 1);
            Expr::bare(ExprKind::Image(bx(Expr::bare(ExprKind::Var(r))), bx(arg)))
        }
    }
}

/// A relation between carriers `a` and `b`. `prefer` is a variable of that
/// type to use as a leaf.
fn gen_rel(
    rng: &mut TestRng,
    ctx: &Ctx,
    a: &EbType,
    b: &EbType,
    depth: u32,
    prefer: Option<Ident>,
) -> Expr {
    let rel_ty = EbType::relation(a.clone(), b.clone());
    if depth == 0 || rng.random_bool(0.35) {
        if let Some(p) = prefer {
            if rng.random_bool(0.7) {
                return Expr::bare(ExprKind::Var(p));
            }
        }
        let mut leaves = vec![Expr::bare(ExprKind::EmptySet)];
        leaves.extend(ctx.of_type(&rel_ty).into_iter().map(|v| Expr::bare(ExprKind::Var(v))));
        if element_available(ctx, a) && element_available(ctx, b) {
            let l = gen_elem(rng, ctx, a, 0);
            let r = gen_elem(rng, ctx, b, 0);
            leaves.push(Expr::bare(ExprKind::SetEnum(vec![Expr::bare(ExprKind::Maplet(
                bx(l),
                bx(r),
            ))])));
        }
        return pick(rng, &leaves).clone();
    }
    match rng.random_range(0..3) {
        0 => {
            let op = *pick(rng, &[SetOp::Union, SetOp::Inter, SetOp::Diff]);
            Expr::set(
                op,
                gen_rel(rng, ctx, a, b, depth - 1, prefer.clone()),
                gen_rel(rng, ctx, a, b, depth - 1, prefer),
            )
        }
        1 => {
            let op = *pick(rng, &[SetOp::DomRes, SetOp::DomSub]);
            Expr::set(op, gen_set(rng, ctx, a, depth - 1), gen_rel(rng, ctx, a, b, depth - 1, prefer))
        }
        _ => Expr::set(
            SetOp::Cross,
            gen_set(rng, ctx, a, depth - 1),
            gen_set(rng, ctx, b, depth - 1),
        ),
    }
}

fn gen_of_type(rng: &mut TestRng, ctx: &Ctx, ty: &EbType, depth: u32) -> Expr {
    match ty {
        EbType::Integer | EbType::Carrier(_) => gen_elem(rng, ctx, ty, depth),
        EbType::SetOf(e) => gen_set(rng, ctx, e, depth),
        EbType::Relation(a, b) => gen_rel(rng, ctx, a, b, depth, None),
        EbType::Pair(..) => unreachable!(),
    }
}

/// Whether the type of `e` can be read off without context.
fn anchored(e: &Expr) -> bool {
    match &e.kind {
        ExprKind::EmptySet => false,
        ExprKind::Set(SetOp::Cross, a, b) => anchored(a) && anchored(b),
        ExprKind::Set(SetOp::DomRes | SetOp::DomSub, _, r) => anchored(r),
        ExprKind::Set(_, a, b) => anchored(a) || anchored(b),
        _ => true,
    }
}

fn anchored_rel(rng: &mut TestRng, ctx: &Ctx, a: &EbType, b: &EbType, depth: u32, r: Ident) -> Expr {
    let e = gen_rel(rng, ctx, a, b, depth, Some(r.clone()));
    if anchored(&e) {
        e
    } else {
        Expr::bare(ExprKind::Var(r))
    }
}

/// Like `gen_of_type`, but with a type that needs no context.
fn gen_anchored(rng: &mut TestRng, ctx: &Ctx, ty: &EbType, depth: u32) -> Expr {
    for _ in 0..8 {
        let e = gen_of_type(rng, ctx, ty, depth);
        if anchored(&e) {
            return e;
        }
    }
    match ty {
        EbType::SetOf(c) => match &**c {
            EbType::Carrier(n) => Expr::var(n),
            _ => unreachable!(),
        },
        EbType::Relation(a, b) => {
            let (EbType::Carrier(a), EbType::Carrier(b)) = (&**a, &**b) else { unreachable!() };
            Expr::set(SetOp::Cross, Expr::var(a), Expr::var(b))
        }
        _ => gen_of_type(rng, ctx, ty, 0),
    }
}

fn gen_pred(rng: &mut TestRng, ctx: &Ctx, carriers: &[String], depth: u32) -> Pred {
    if depth > 0 && rng.random_bool(0.35) {
        return match rng.random_range(0..3) {
            0 => Pred::and(gen_pred(rng, ctx, carriers, depth - 1), gen_pred(rng, ctx, carriers, depth - 1)),
            1 => Pred::or(gen_pred(rng, ctx, carriers, depth - 1), gen_pred(rng, ctx, carriers, depth - 1)),
            _ => !gen_pred(rng, ctx, carriers, depth - 1),
        };
    }
    let d = depth.min(2);
    match rng.random_range(0..10) {
        0 => Pred::bare(PredKind::True),
        1 => Pred::bare(PredKind::False),
        2..=4 => {
            let op = *pick(rng, &[CmpOp::Eq, CmpOp::Neq, CmpOp::Lt, CmpOp::Le]);
            Pred::cmp(op, gen_int(rng, ctx, d), gen_int(rng, ctx, d))
        }
        _ if carriers.is_empty() => Pred::cmp(CmpOp::Le, gen_int(rng, ctx, d), gen_int(rng, ctx, d)),
        5 | 6 => {
            let c = carrier(pick(rng, carriers));
            if element_available(ctx, &c) {
                Pred::cmp(CmpOp::In, gen_elem(rng, ctx, &c, d), gen_set(rng, ctx, &c, d))
            } else {
                Pred::cmp(CmpOp::Subset, gen_anchored(rng, ctx, &EbType::set_of(c.clone()), d), gen_set(rng, ctx, &c, d))
            }
        }
        7 => {
            let c = carrier(pick(rng, carriers));
            Pred::cmp(CmpOp::Subset, gen_anchored(rng, ctx, &EbType::set_of(c.clone()), d), gen_set(rng, ctx, &c, d))
        }
        _ => {
            let a = carrier(pick(rng, carriers));
            let b = carrier(pick(rng, carriers));
            let ty = EbType::relation(a, b);
            let op = *pick(rng, &[CmpOp::Eq, CmpOp::Neq]);
            Pred::cmp(op, gen_anchored(rng, ctx, &ty, d), gen_of_type(rng, ctx, &ty, d))
        }
    }
}

#[derive(Clone)]
enum VarKind {
    Int,
    Elem(String),
    Sub(String),
    Rel(String, String, RelKind),
}

impl VarKind {
    fn ty(&self) -> EbType {
        match self {
            VarKind::Int => EbType::Integer,
            VarKind::Elem(s) => carrier(s),
            VarKind::Sub(s) => EbType::set_of(carrier(s)),
            VarKind::Rel(a, b, _) => EbType::relation(carrier(a), carrier(b)),
        }
    }
}

fn labeled<T>(prefix: &str, i: usize, item: T) -> Labeled<T> {
    Labeled::new(&format!("{prefix}{}", i + 1), item)
}

/// A random machine that passes the well-formedness check.
pub fn gen_machine(rng: &mut TestRng) -> Machine {
    let carriers: Vec<String> = ["S", "T"][..rng.random_range(0..=2)]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let n_vars = rng.random_range(1..=4);
    let mut kinds = Vec::new();
    for _ in 0..n_vars {
        let k = if carriers.is_empty() {
            VarKind::Int
        } else {
            match rng.random_range(0..4) {
                0 => VarKind::Int,
                1 => VarKind::Elem(pick(rng, &carriers).clone()),
                2 => VarKind::Sub(pick(rng, &carriers).clone()),
                _ => VarKind::Rel(
                    pick(rng, &carriers).clone(),
                    pick(rng, &carriers).clone(),
                    *pick(rng, &RelKind::ALL),
                ),
            }
        };
        kinds.push(k);
    }
    let names: Vec<String> = (0..n_vars).map(|i| format!("v{i}")).collect();

    let mut invariants = Vec::new();
    for (n, k) in names.iter().zip(&kinds) {
        let p = match k {
            VarKind::Int => {
                let set = if rng.random_bool(0.5) { ExprKind::Integers } else { ExprKind::Naturals };
                Pred::cmp(CmpOp::In, Expr::var(n), Expr::bare(set))
            }
            VarKind::Elem(s) => Pred::cmp(CmpOp::In, Expr::var(n), Expr::var(s)),
            VarKind::Sub(s) => Pred::cmp(CmpOp::Subset, Expr::var(n), Expr::var(s)),
            VarKind::Rel(a, b, rk) => Pred::cmp(
                CmpOp::In,
                Expr::var(n),
                Expr::bare(ExprKind::RelSet(*rk, bx(Expr::var(a)), bx(Expr::var(b)))),
            ),
        };
        invariants.push(p);
    }
    let mut ctx = Ctx::default();
    for (n, k) in names.iter().zip(&kinds) {
        ctx.names.push((Ident::new(n.as_str()), k.ty()));
    }
    for _ in 0..rng.random_range(0..=2) {
        invariants.push(gen_pred(rng, &ctx, &carriers, 2));
    }

    let mut initialisation = Vec::new();
    for (i, (n, k)) in names.iter().zip(&kinds).enumerate() {
        let act = match k {
            VarKind::Int if rng.random_bool(0.7) => Action::assign(n, Expr::int(rng.random_range(0..3))),
            VarKind::Int => Action::becomes(n, Pred::cmp(CmpOp::In, Expr::primed(n), Expr::bare(ExprKind::Naturals))),
            VarKind::Elem(s) => Action::becomes(n, Pred::cmp(CmpOp::In, Expr::primed(n), Expr::var(s))),
            VarKind::Sub(s) if rng.random_bool(0.3) => {
                Action::becomes(n, Pred::cmp(CmpOp::Subset, Expr::primed(n), Expr::var(s)))
            }
            _ => Action::assign(n, Expr::bare(ExprKind::EmptySet)),
        };
        initialisation.push(labeled("act", i, act));
    }

    let mut events = Vec::new();
    for ei in 0..rng.random_range(0..=3) {
        let mut ectx = ctx.clone();
        let mut params = Vec::new();
        for pi in 0..rng.random_range(0..=2) {
            let ty = if carriers.is_empty() || rng.random_bool(0.4) {
                EbType::Integer
            } else {
                carrier(pick(rng, &carriers))
            };
            let name = Ident::new(format!("p{pi}"));
            ectx.names.push((name.clone(), ty.clone()));
            params.push(Param {
                name,
                ty,
                span: Span::default(),
            });
        }
        let guards = (0..rng.random_range(0..=2))
            .map(|gi| labeled("grd", gi, gen_pred(rng, &ectx, &carriers, 2)))
            .collect();
        let mut targets: Vec<usize> = (0..n_vars).filter(|_| rng.random_bool(0.5)).collect();
        if targets.len() > 1 && rng.random_bool(0.5) {
            targets.reverse();
        }
        let actions = targets
            .iter()
            .enumerate()
            .map(|(ai, &vi)| {
                let n = &names[vi];
                let ty = kinds[vi].ty();
                let act = if rng.random_bool(0.25) || (matches!(ty, EbType::Carrier(_)) && !element_available(&ectx, &ty)) {
                    let bctx = ectx.with(Ident::primed(n.as_str()), ty.clone());
                    let lhs = Expr::primed(n);
                    let p = match &ty {
                        EbType::Integer => Pred::cmp(*pick(rng, &[CmpOp::Lt, CmpOp::Le, CmpOp::Eq]), lhs, gen_int(rng, &bctx, 1)),
                        EbType::Carrier(_) => {
                            let EbType::Carrier(c) = &ty else { unreachable!() };
                            Pred::cmp(CmpOp::In, lhs, gen_set(rng, &bctx, &carrier(c), 1))
                        }
                        _ => Pred::cmp(CmpOp::Subset, lhs, gen_of_type(rng, &bctx, &ty, 1)),
                    };
                    Action::becomes(n, p)
                } else {
                    Action::assign(n, gen_of_type(rng, &ectx, &ty, 2))
                };
                labeled("act", ai, act)
            })
            .collect();
        events.push(Event {
            name: Ident::new(format!("ev{ei}")),
            params,
            guards,
            actions,
            span: Span::default(),
        });
    }

    Machine {
        name: Ident::new(format!("m{}", rng.random_range(0..100))),
        sees: rng.random_bool(0.3).then(|| Ident::new("ctx")),
        carrier_sets: carriers.iter().map(|c| Ident::new(c.as_str())).collect(),
        variables: names
            .iter()
            .zip(&kinds)
            .map(|(n, k)| Variable {
                name: Ident::new(n.as_str()),
                ty: Some(k.ty()),
                span: Span::default(),
            })
            .collect(),
        invariants: invariants
            .into_iter()
            .enumerate()
            .map(|(i, p)| labeled("inv", i, p))
            .collect(),
        initialisation,
        events,
        span: Span::default(),
    }
}

// ---------------------------------------------------------------------------
// One-variable events and their brute-force relation

/// Integer expressions over `v`, an optional parameter `p` and `v'`.
#[derive(Debug, Clone)]
pub enum OExpr {
    K(i64),
    V,
    P,
    VPrime,
    Add(Box<OExpr>, Box<OExpr>),
    Sub(Box<OExpr>, Box<OExpr>),
    Mul(Box<OExpr>, Box<OExpr>),
}

#[derive(Debug, Clone)]
pub enum OPred {
    True,
    False,
    Eq(OExpr, OExpr),
    Neq(OExpr, OExpr),
    Lt(OExpr, OExpr),
    Le(OExpr, OExpr),
    And(Box<OPred>, Box<OPred>),
    Or(Box<OPred>, Box<OPred>),
    Not(Box<OPred>),
}

#[derive(Debug, Clone)]
pub enum OAction {
    Assign(OExpr),
    Becomes(OPred),
}

#[derive(Debug, Clone)]
pub struct OEvent {
    pub has_param: bool,
    pub guards: Vec<OPred>,
    pub action: Option<OAction>,
}

impl OExpr {
    fn text(&self) -> String {
        match self {
            OExpr::K(k) => k.to_string(),
            OExpr::V => "v".into(),
            OExpr::P => "p".into(),
            OExpr::VPrime => "v'".into(),
            OExpr::Add(a, b) => format!("({} + {})", a.text(), b.text()),
            OExpr::Sub(a, b) => format!("({} - {})", a.text(), b.text()),
            OExpr::Mul(a, b) => format!("({} * {})", a.text(), b.text()),
        }
    }

    pub fn eval(&self, v: i64, p: i64, vp: i64) -> i64 {
        match self {
            OExpr::K(k) => *k,
            OExpr::V => v,
            OExpr::P => p,
            OExpr::VPrime => vp,
            OExpr::Add(a, b) => a.eval(v, p, vp) + b.eval(v, p, vp),
            OExpr::Sub(a, b) => a.eval(v, p, vp) - b.eval(v, p, vp),
            OExpr::Mul(a, b) => a.eval(v, p, vp) * b.eval(v, p, vp),
        }
    }
}

impl OPred {
    fn text(&self) -> String {
        match self {
            OPred::True => "true".into(),
            OPred::False => "false".into(),
            OPred::Eq(a, b) => format!("{} = {}", a.text(), b.text()),
            OPred::Neq(a, b) => format!("{} /= {}", a.text(), b.text()),
            OPred::Lt(a, b) => format!("{} < {}", a.text(), b.text()),
            OPred::Le(a, b) => format!("{} <= {}", a.text(), b.text()),
            OPred::And(a, b) => format!("({}) & ({})", a.text(), b.text()),
            OPred::Or(a, b) => format!("({}) or ({})", a.text(), b.text()),
            OPred::Not(a) => format!("not ({})", a.text()),
        }
    }

    pub fn holds(&self, v: i64, p: i64, vp: i64) -> bool {
        match self {
            OPred::True => true,
            OPred::False => false,
            OPred::Eq(a, b) => a.eval(v, p, vp) == b.eval(v, p, vp),
            OPred::Neq(a, b) => a.eval(v, p, vp) != b.eval(v, p, vp),
            OPred::Lt(a, b) => a.eval(v, p, vp) < b.eval(v, p, vp),
            OPred::Le(a, b) => a.eval(v, p, vp) <= b.eval(v, p, vp),
            OPred::And(a, b) => a.holds(v, p, vp) && b.holds(v, p, vp),
            OPred::Or(a, b) => a.holds(v, p, vp) || b.holds(v, p, vp),
            OPred::Not(a) => !a.holds(v, p, vp),
        }
    }
}

fn gen_oexpr(rng: &mut TestRng, param: bool, primed: bool, depth: u32) -> OExpr {
    if depth == 0 || rng.random_bool(0.45) {
        let mut leaves = vec![OExpr::K(rng.random_range(0..4)), OExpr::V];
        if param {
            leaves.push(OExpr::P);
        }
        if primed {
            leaves.push(OExpr::VPrime);
            leaves.push(OExpr::VPrime);
        }
        return pick(rng, &leaves).clone();
    }
    let a = Box::new(gen_oexpr(rng, param, primed, depth - 1));
    let b = Box::new(gen_oexpr(rng, param, primed, depth - 1));
    match rng.random_range(0..3) {
        0 => OExpr::Add(a, b),
        1 => OExpr::Sub(a, b),
        _ => OExpr::Mul(a, b),
    }
}

fn gen_opred(rng: &mut TestRng, param: bool, primed: bool, depth: u32) -> OPred {
    if depth > 0 && rng.random_bool(0.3) {
        let a = Box::new(gen_opred(rng, param, primed, depth - 1));
        return match rng.random_range(0..3) {
            0 => OPred::And(a, Box::new(gen_opred(rng, param, primed, depth - 1))),
            1 => OPred::Or(a, Box::new(gen_opred(rng, param, primed, depth - 1))),
            _ => OPred::Not(a),
        };
    }
    let x = gen_oexpr(rng, param, primed, 2);
    let y = gen_oexpr(rng, param, primed, 2);
    match rng.random_range(0..10) {
        0 => OPred::True,
        1 => OPred::False,
        2 | 3 => OPred::Eq(x, y),
        4 | 5 => OPred::Neq(x, y),
        6 | 7 => OPred::Lt(x, y),
        _ => OPred::Le(x, y),
    }
}

pub fn gen_oevent(rng: &mut TestRng) -> OEvent {
    let has_param = rng.random_bool(0.5);
    let guards = (0..rng.random_range(0..=2))
        .map(|_| gen_opred(rng, has_param, false, 2))
        .collect();
    let action = match rng.random_range(0..5) {
        0 => None,
        1 | 2 => Some(OAction::Assign(gen_oexpr(rng, has_param, false, 2))),
        _ => Some(OAction::Becomes(gen_opred(rng, has_param, true, 2))),
    };
    OEvent {
        has_param,
        guards,
        action,
    }
}

impl OEvent {
    /// The event inside a one-variable machine, as source text.
    pub fn machine_text(&self) -> String {
        let mut s = String::from(
            "machine one\n  variables v\n  invariants\n    inv1: v : INT\n  events\n    initialisation\n      begin\n        act1: v := 0\n      end\n    ev\n",
        );
        if self.has_param {
            s.push_str("      any p : INT where\n");
        } else if !self.guards.is_empty() {
            s.push_str("      when\n");
        }
        for (i, g) in self.guards.iter().enumerate() {
            s.push_str(&format!("        grd{}: {}\n", i + 1, g.text()));
        }
        if self.has_param && self.guards.is_empty() {
            s.push_str("        grd1: true\n");
        }
        s.push_str(if self.has_param || !self.guards.is_empty() { "      then\n" } else { "      begin\n" });
        match &self.action {
            Some(OAction::Assign(e)) => s.push_str(&format!("        act1: v := {}\n", e.text())),
            Some(OAction::Becomes(p)) => s.push_str(&format!("        act1: v :| {}\n", p.text())),
            None => {}
        }
        s.push_str("      end\nend\n");
        s
    }

    fn guard(&self, v: i64, p: i64) -> bool {
        self.guards.iter().all(|g| g.holds(v, p, 0))
    }

    fn effect(&self, v: i64, p: i64, vp: i64) -> bool {
        match &self.action {
            None => vp == v,
            Some(OAction::Assign(e)) => e.eval(v, p, 0) == vp,
            Some(OAction::Becomes(q)) => q.holds(v, p, vp),
        }
    }

    /// All `(v, v')` with both in `lo..=hi`: an enabling parameter value
    /// that reaches `v'`, or no enabling value at all and `v' = v`.
    pub fn oracle(&self, lo: i64, hi: i64) -> BTreeSet<(i64, i64)> {
        let params: Vec<i64> = if self.has_param { (lo..=hi).collect() } else { vec![0] };
        let mut out = BTreeSet::new();
        for a in lo..=hi {
            for b in lo..=hi {
                let fires = params.iter().any(|&p| self.guard(a, p) && self.effect(a, p, b));
                let enabled = params.iter().any(|&p| self.guard(a, p));
                if fires || (!enabled && a == b) {
                    out.insert((a, b));
                }
            }
        }
        out
    }
}
