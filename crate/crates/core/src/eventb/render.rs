//! Canonical text rendering of machines, predicates and expressions.
//!
//! Output re-parses to a structurally equal tree: parentheses are inserted
//! exactly where precedence or associativity would otherwise regroup.

use std::fmt::Write;

use super::ast::*;

const INDENT: &str = "  ";

fn expr_level(e: &Expr) -> u8 {
    match &e.kind {
        ExprKind::RelSet(..) => 1,
        ExprKind::Maplet(..) => 2,
        ExprKind::Set(..) => 3,
        ExprKind::Arith(ArithOp::Add | ArithOp::Sub, ..) => 4,
        ExprKind::Arith(ArithOp::Mul, ..) => 5,
        _ => 6,
    }
}

fn same_operator(a: &Expr, b: &Expr) -> bool {
    match (&a.kind, &b.kind) {
        (ExprKind::Set(x, ..), ExprKind::Set(y, ..)) => x == y,
        (ExprKind::Arith(x, ..), ExprKind::Arith(y, ..)) => x == y,
        (ExprKind::Maplet(..), ExprKind::Maplet(..)) => true,
        _ => false,
    }
}

fn write_expr_at(out: &mut String, e: &Expr, min: u8) {
    if expr_level(e) < min {
        out.push('(');
        write_expr(out, e);
        out.push(')');
    } else {
        write_expr(out, e);
    }
}

/// Left operand of a left-associative operator. A same-level operand with a
/// different operator is parenthesised for readability.
fn write_left(out: &mut String, parent: &Expr, child: &Expr) {
    let lvl = expr_level(parent);
    let min = if expr_level(child) == lvl && !same_operator(parent, child) {
        lvl + 1
    } else {
        lvl
    };
    write_expr_at(out, child, min);
}

pub fn write_expr(out: &mut String, e: &Expr) {
    match &e.kind {
        ExprKind::Int(n) => {
            let _ = write!(out, "{n}");
        }
        ExprKind::Var(id) => {
            let _ = write!(out, "{id}");
        }
        ExprKind::Integers => out.push_str("INT"),
        ExprKind::Naturals => out.push_str("NAT"),
        ExprKind::EmptySet => out.push_str("{}"),
        ExprKind::SetEnum(items) => {
            out.push('{');
            for (i, it) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_expr(out, it);
            }
            out.push('}');
        }
        ExprKind::Set(op, a, b) => {
            write_left(out, e, a);
            let _ = write!(out, " {} ", op.token());
            write_expr_at(out, b, expr_level(e) + 1);
        }
        ExprKind::Maplet(a, b) => {
            write_left(out, e, a);
            out.push_str(" |-> ");
            write_expr_at(out, b, 3);
        }
        ExprKind::Arith(op, a, b) => {
            write_left(out, e, a);
            let _ = write!(out, " {} ", op.token());
            write_expr_at(out, b, expr_level(e) + 1);
        }
        ExprKind::RelSet(k, a, b) => {
            write_expr_at(out, a, 2);
            let _ = write!(out, " {} ", k.token());
            write_expr_at(out, b, 2);
        }
        ExprKind::Image(r, s) => {
            write_expr_at(out, r, 6);
            out.push('[');
            write_expr(out, s);
            out.push(']');
        }
        ExprKind::Apply(f, x) => {
            write_expr_at(out, f, 6);
            out.push('(');
            write_expr(out, x);
            out.push(')');
        }
        ExprKind::Dom(r) | ExprKind::Ran(r) => {
            out.push_str(if matches!(e.kind, ExprKind::Dom(_)) {
                "dom("
            } else {
                "ran("
            });
            write_expr(out, r);
            out.push(')');
        }
    }
}

pub fn render_expr(e: &Expr) -> String {
    let mut s = String::new();
    write_expr(&mut s, e);
    s
}

fn pred_level(p: &Pred) -> u8 {
    match &p.kind {
        PredKind::Or(..) => 1,
        PredKind::And(..) => 2,
        PredKind::Not(..) => 3,
        _ => 4,
    }
}

fn write_pred_at(out: &mut String, p: &Pred, min: u8) {
    if pred_level(p) < min {
        out.push('(');
        write_pred(out, p);
        out.push(')');
    } else {
        write_pred(out, p);
    }
}

pub fn write_pred(out: &mut String, p: &Pred) {
    match &p.kind {
        PredKind::True => out.push_str("true"),
        PredKind::False => out.push_str("false"),
        PredKind::Cmp(op, a, b) => {
            write_expr(out, a);
            let _ = write!(out, " {} ", op.token());
            write_expr(out, b);
        }
        PredKind::And(a, b) => {
            write_pred_at(out, a, 2);
            out.push_str(" & ");
            write_pred_at(out, b, 3);
        }
        PredKind::Or(a, b) => {
            write_pred_at(out, a, 1);
            out.push_str(" or ");
            write_pred_at(out, b, 2);
        }
        PredKind::Not(a) => {
            out.push_str("not ");
            write_pred_at(out, a, 3);
        }
    }
}

pub fn render_pred(p: &Pred) -> String {
    let mut s = String::new();
    write_pred(&mut s, p);
    s
}

pub fn render_action(a: &Action) -> String {
    let mut s = a.target.to_string();
    match &a.kind {
        ActionKind::Assign(e) => {
            s.push_str(" := ");
            write_expr(&mut s, e);
        }
        ActionKind::Becomes(p) => {
            s.push_str(" :| ");
            write_pred(&mut s, p);
        }
    }
    s
}

fn line(out: &mut String, depth: usize, text: &str) {
    for _ in 0..depth {
        out.push_str(INDENT);
    }
    out.push_str(text);
    out.push('\n');
}

/// Canonical machine text with a fixed two-space indent.
pub fn render_machine(m: &Machine) -> String {
    let mut out = String::new();
    line(&mut out, 0, &format!("machine {}", m.name));
    if let Some(ctx) = &m.sees {
        line(&mut out, 1, &format!("sees {ctx}"));
    }
    if !m.carrier_sets.is_empty() {
        let names: Vec<_> = m.carrier_sets.iter().map(|s| s.to_string()).collect();
        line(&mut out, 1, &format!("sets {}", names.join(" ")));
    }
    if !m.variables.is_empty() {
        let names: Vec<_> = m.variables.iter().map(|v| v.name.to_string()).collect();
        line(&mut out, 1, &format!("variables {}", names.join(" ")));
    }
    if !m.invariants.is_empty() {
        line(&mut out, 1, "invariants");
        for inv in &m.invariants {
            line(&mut out, 2, &format!("{}: {}", inv.label, render_pred(&inv.item)));
        }
    }
    line(&mut out, 1, "events");
    line(&mut out, 2, "initialisation");
    line(&mut out, 3, "begin");
    for a in &m.initialisation {
        line(&mut out, 4, &format!("{}: {}", a.label, render_action(&a.item)));
    }
    line(&mut out, 3, "end");
    for e in &m.events {
        line(&mut out, 2, &e.name.to_string());
        if !e.params.is_empty() {
            let params: Vec<_> = e
                .params
                .iter()
                .map(|p| format!("{} : {}", p.name, p.ty))
                .collect();
            line(&mut out, 3, &format!("any {} where", params.join(" ")));
        } else if !e.guards.is_empty() {
            line(&mut out, 3, "when");
        } else {
            line(&mut out, 3, "begin");
        }
        if !e.params.is_empty() || !e.guards.is_empty() {
            for g in &e.guards {
                line(&mut out, 4, &format!("{}: {}", g.label, render_pred(&g.item)));
            }
            line(&mut out, 3, "then");
        }
        for a in &e.actions {
            line(&mut out, 4, &format!("{}: {}", a.label, render_action(&a.item)));
        }
        line(&mut out, 3, "end");
    }
    line(&mut out, 0, "end");
    out
}
