//! Java/JML source rendering.

use std::fmt::Write;

use super::ast::*;

pub const IMPORTS: &str =
    "import poporo.models.JML.*;\nimport org.jmlspecs.models.JMLEqualsEqualsPair;\n";

fn expr_level(e: &JmlExpr) -> u8 {
    match e {
        JmlExpr::Arith(ArithOp::Add | ArithOp::Sub, ..) => 1,
        JmlExpr::Arith(ArithOp::Mul, ..) => 2,
        JmlExpr::Int(n) if *n < 0 => 2,
        _ => 3,
    }
}

fn write_expr_at(out: &mut String, e: &JmlExpr, min: u8) {
    if expr_level(e) < min {
        out.push('(');
        write_expr(out, e);
        out.push(')');
    } else {
        write_expr(out, e);
    }
}

fn write_args(out: &mut String, args: &[JmlExpr]) {
    out.push('(');
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        write_expr(out, a);
    }
    out.push(')');
}

pub fn write_expr(out: &mut String, e: &JmlExpr) {
    match e {
        JmlExpr::Int(n) => {
            let _ = write!(out, "{n}");
        }
        JmlExpr::Var(id) => {
            let _ = write!(out, "{id}");
        }
        JmlExpr::Integers => out.push_str("INT"),
        JmlExpr::Naturals => out.push_str("NAT"),
        JmlExpr::NewSet { set_type, items } => {
            let _ = write!(out, "new {set_type}");
            write_args(out, items);
        }
        JmlExpr::NewPair {
            left_type,
            right_type,
            left,
            right,
        } => {
            let _ = write!(out, "new JMLEqualsEqualsPair<{left_type},{right_type}>(");
            write_expr(out, left);
            out.push(',');
            write_expr(out, right);
            out.push(')');
        }
        JmlExpr::Call {
            receiver,
            method,
            args,
        } => {
            write_expr_at(out, receiver, 3);
            out.push('.');
            out.push_str(method.name());
            write_args(out, args);
        }
        JmlExpr::Cross(a, b) => {
            out.push_str("Utils.cross(");
            write_expr(out, a);
            out.push(',');
            write_expr(out, b);
            out.push(')');
        }
        JmlExpr::Arith(op, a, b) => {
            let lvl = expr_level(e);
            write_expr_at(out, a, lvl);
            let _ = write!(out, " {} ", op.token());
            write_expr_at(out, b, lvl + 1);
        }
        JmlExpr::Old(inner) => {
            out.push_str("\\old(");
            write_expr(out, inner);
            out.push(')');
        }
    }
}

pub fn render_expr(e: &JmlExpr) -> String {
    let mut s = String::new();
    write_expr(&mut s, e);
    s
}

// Java precedence, loosest first: <==> 0, || 1, && 2, comparison 3, ! 4,
// primary 5.
fn pred_level(p: &JmlPredicate) -> u8 {
    use JmlPredicate as P;
    match p {
        P::ResultIff(_) => 0,
        P::Or(..) => 1,
        P::And(..) => 2,
        P::Eq(_, _, EqStyle::Value)
        | P::Becomes {
            style: EqStyle::Value,
            ..
        }
        | P::Lt(..)
        | P::Le(..) => 3,
        P::Not(_) => 4,
        _ => 5,
    }
}

fn write_pred_at(out: &mut String, p: &JmlPredicate, min: u8) {
    if pred_level(p) < min {
        out.push('(');
        write_pred(out, p);
        out.push(')');
    } else {
        write_pred(out, p);
    }
}

fn write_eq(out: &mut String, a: &JmlExpr, b: &JmlExpr, style: EqStyle) {
    match style {
        EqStyle::Value => {
            write_expr(out, a);
            out.push_str(" == ");
            write_expr(out, b);
        }
        EqStyle::Object => {
            write_expr_at(out, a, 3);
            out.push_str(".equals(");
            write_expr(out, b);
            out.push(')');
        }
    }
}

/// Conjuncts of a conjunction chain, flattened regardless of nesting.
pub fn flatten_and(p: &JmlPredicate) -> Vec<&JmlPredicate> {
    let mut out = Vec::new();
    fn go<'a>(p: &'a JmlPredicate, out: &mut Vec<&'a JmlPredicate>) {
        match p {
            JmlPredicate::And(a, b) => {
                go(a, out);
                go(b, out);
            }
            other => out.push(other),
        }
    }
    go(p, &mut out);
    out
}

fn flatten_or(p: &JmlPredicate) -> Vec<&JmlPredicate> {
    match p {
        JmlPredicate::Or(a, b) => {
            let mut v = flatten_or(a);
            v.extend(flatten_or(b));
            v
        }
        other => vec![other],
    }
}

pub fn write_pred(out: &mut String, p: &JmlPredicate) {
    use JmlPredicate as P;
    match p {
        P::True => out.push_str("true"),
        P::False => out.push_str("false"),
        P::And(..) => {
            for (i, c) in flatten_and(p).into_iter().enumerate() {
                if i > 0 {
                    out.push_str(" && ");
                }
                write_pred_at(out, c, 3);
            }
        }
        P::Or(..) => {
            for (i, c) in flatten_or(p).into_iter().enumerate() {
                if i > 0 {
                    out.push_str(" || ");
                }
                write_pred_at(out, c, 2);
            }
        }
        P::Not(a) => {
            out.push('!');
            write_pred_at(out, a, 4);
        }
        P::Old(a) => {
            out.push_str("\\old(");
            write_pred(out, a);
            out.push(')');
        }
        P::Exists { var, ty, body } => {
            let _ = write!(out, "(\\exists {ty} {var}; ");
            write_pred(out, body);
            out.push(')');
        }
        P::Becomes { var, primed, style } => {
            write_eq(out, &JmlExpr::Var(var.clone()), &JmlExpr::Var(primed.clone()), *style)
        }
        P::Group(a) => {
            out.push('(');
            write_pred(out, a);
            out.push(')');
        }
        P::Eq(a, b, style) => write_eq(out, a, b, *style),
        P::Has { set, elem } => {
            write_expr_at(out, set, 3);
            out.push_str(".has(");
            write_expr(out, elem);
            out.push(')');
        }
        P::IsSubset(a, b) => {
            write_expr_at(out, a, 3);
            out.push_str(".isSubset(");
            write_expr(out, b);
            out.push(')');
        }
        P::Lt(a, b) | P::Le(a, b) => {
            write_expr(out, a);
            out.push_str(if matches!(p, P::Lt(..)) { " < " } else { " <= " });
            write_expr(out, b);
        }
        P::IsEmpty(a) => {
            write_expr_at(out, a, 3);
            out.push_str(".isEmpty()");
        }
        P::IsaFunction(a) => {
            write_expr_at(out, a, 3);
            out.push_str(".isaFunction()");
        }
        P::ResultIff(a) => {
            out.push_str("\\result <==> ");
            write_pred_at(out, a, 1);
        }
        P::GuardCall(name) => {
            let _ = write!(out, "{name}()");
        }
    }
}

pub fn render_pred(p: &JmlPredicate) -> String {
    let mut s = String::new();
    write_pred(&mut s, p);
    s
}

fn render_assignable(a: &AssignableClause) -> String {
    match a {
        AssignableClause::Nothing => "\\nothing".to_string(),
        AssignableClause::Everything => "\\everything".to_string(),
        AssignableClause::Vars(vs) => vs
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(", "),
    }
}

/// A clause whose conjuncts are put one per line with a leading `&&`.
fn write_conjunct_block(out: &mut String, keyword: &str, p: &JmlPredicate) {
    let parts = flatten_and(p);
    if parts.len() == 1 {
        let _ = writeln!(out, "/*@ {keyword} {}; */", render_pred(p));
        return;
    }
    let _ = writeln!(out, "/*@ {keyword}");
    for (i, c) in parts.iter().enumerate() {
        let mut s = String::new();
        write_pred_at(&mut s, c, 3);
        let lead = if i == 0 { "      " } else { "   && " };
        let end = if i + 1 == parts.len() { "; */" } else { "" };
        let _ = writeln!(out, "{lead}{s}{end}");
    }
}

fn write_case(out: &mut String, c: &SpecCase, first: bool) {
    let lead = if first { "/*@ " } else { "    " };
    let mut lead = lead;
    if c.requires != JmlPredicate::True {
        let _ = writeln!(out, "{lead}requires {};", render_pred(&c.requires));
        lead = "    ";
    }
    let _ = writeln!(out, "{lead}assignable {};", render_assignable(&c.assignable));
    let _ = write!(out, "    ensures {};", render_pred(&c.ensures));
}

pub fn write_method(out: &mut String, m: &JmlMethodSpec) {
    write_case(out, &m.normal, true);
    if let Some(exc) = &m.exceptional {
        out.push_str("\nalso\n");
        write_case(out, exc, false);
    }
    out.push_str(" */\n");
    match m.kind {
        MethodKind::GuardQuery => {
            let _ = writeln!(out, "public abstract boolean {}();", m.name);
        }
        MethodKind::Run => {
            let _ = writeln!(out, "public abstract void {}();", m.name);
        }
    }
}

/// Render a class as Java source with JML annotation comments.
pub fn render_class(class: &JmlClass) -> String {
    let mut out = String::from(IMPORTS);
    out.push('\n');
    let _ = writeln!(out, "public abstract class {} {{", class.name);
    for s in &class.carrier_sets {
        let _ = writeln!(out, "/*@ public model BSet<Integer> {s}; */");
    }
    if !class.carrier_sets.is_empty() {
        out.push('\n');
    }
    for (i, (name, ty)) in class.model_fields.iter().enumerate() {
        let lead = if i == 0 { "/*@ " } else { "    " };
        let end = if i + 1 == class.model_fields.len() {
            " */"
        } else {
            ""
        };
        let _ = writeln!(out, "{lead}public model {ty} {name};{end}");
    }
    write_conjunct_block(&mut out, "public invariant", &class.class_invariant);
    out.push('\n');
    write_conjunct_block(&mut out, "initially", &class.initially);
    for m in &class.methods {
        out.push('\n');
        write_method(&mut out, m);
    }
    out.push_str("}\n");
    out
}
