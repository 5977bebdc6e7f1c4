//! Recursive-descent parser for `.ebm` machine files.
//!
//! Operator precedence, tightest first: application and image, `*`, `+`/`-`,
//! set operators, `|->`, relation-set constructors, comparisons, `not`, `&`,
//! `or`. Binary operators associate to the left; comparisons and
//! relation-set constructors do not associate.

use std::fmt;

use super::ast::*;
use super::lexer::{tokenize, Tok, Token};
use super::types::infer_variable_types;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    /// A recognised Event-B construct outside the supported subset.
    OutOfSubset { keyword: String },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    pub span: Span,
    pub expected: String,
    pub found: String,
    pub kind: ParseErrorKind,
}

impl ParseError {
    pub fn syntax(span: Span, expected: &str, found: &str) -> Self {
        ParseError {
            span,
            expected: expected.to_string(),
            found: found.to_string(),
            kind: ParseErrorKind::Syntax,
        }
    }

    fn out_of_subset(span: Span, keyword: &str) -> Self {
        ParseError {
            span,
            expected: "a construct of the supported Event-B subset".to_string(),
            found: format!("keyword `{keyword}`"),
            kind: ParseErrorKind::OutOfSubset {
                keyword: keyword.to_string(),
            },
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ParseErrorKind::Syntax => write!(
                f,
                "{}: expected {}, found {}",
                self.span, self.expected, self.found
            ),
            ParseErrorKind::OutOfSubset { keyword } => write!(
                f,
                "{}: `{}` is outside the supported Event-B subset",
                self.span, keyword
            ),
        }
    }
}

type PResult<T> = Result<T, ParseError>;

/// Parses a whole machine and infers variable types from its invariants.
pub fn parse_machine(text: &str) -> PResult<Machine> {
    let mut p = Parser::new(text)?;
    let mut m = p.machine()?;
    p.expect_eof()?;
    infer_variable_types(&mut m);
    Ok(m)
}

pub fn parse_predicate(text: &str) -> PResult<Pred> {
    let mut p = Parser::new(text)?;
    let pred = p.pred()?;
    p.expect_eof()?;
    Ok(pred)
}

pub fn parse_expression(text: &str) -> PResult<Expr> {
    let mut p = Parser::new(text)?;
    let e = p.expr()?;
    p.expect_eof()?;
    Ok(e)
}

pub fn parse_type(text: &str) -> PResult<EbType> {
    let mut p = Parser::new(text)?;
    let t = p.ty()?;
    p.expect_eof()?;
    Ok(t)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

const SET_OPS: &[(&str, SetOp)] = &[
    ("\\/", SetOp::Union),
    ("/\\", SetOp::Inter),
    ("\\", SetOp::Diff),
    ("<<|", SetOp::DomSub),
    ("<|", SetOp::DomRes),
    ("**", SetOp::Cross),
];

const CMP_OPS: &[(&str, CmpOp)] = &[
    ("=", CmpOp::Eq),
    ("/=", CmpOp::Neq),
    (":", CmpOp::In),
    ("<:", CmpOp::Subset),
    ("<", CmpOp::Lt),
    ("<=", CmpOp::Le),
];

impl Parser {
    fn new(text: &str) -> PResult<Self> {
        Ok(Parser {
            toks: tokenize(text)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn prev_span(&self) -> Span {
        self.toks[self.pos.saturating_sub(1)].span
    }

    fn error(&self, expected: &str) -> ParseError {
        let t = self.peek();
        if let Tok::Keyword(k) = t.tok {
            if super::lexer::OUT_OF_SUBSET.contains(&k) {
                return ParseError::out_of_subset(t.span, k);
            }
        }
        ParseError::syntax(t.span, expected, &t.tok.describe())
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek().tok, Tok::Keyword(k) if k == kw)
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek().tok, Tok::Sym(x) if x == s)
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.is_kw(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<Span> {
        if self.is_kw(kw) {
            Ok(self.bump().span)
        } else {
            Err(self.error(&format!("keyword `{kw}`")))
        }
    }

    fn expect_sym(&mut self, s: &str) -> PResult<Span> {
        if self.is_sym(s) {
            Ok(self.bump().span)
        } else {
            Err(self.error(&format!("`{s}`")))
        }
    }

    fn expect_eof(&mut self) -> PResult<()> {
        if matches!(self.peek().tok, Tok::Eof) {
            Ok(())
        } else {
            Err(self.error("end of input"))
        }
    }

    /// An unprimed identifier.
    fn name(&mut self, what: &str) -> PResult<(Ident, Span)> {
        match &self.peek().tok {
            Tok::Ident {
                name,
                primed: false,
            } => {
                let id = Ident::new(name.clone());
                Ok((id, self.bump().span))
            }
            _ => Err(self.error(what)),
        }
    }

    fn at_name(&self) -> bool {
        matches!(self.peek().tok, Tok::Ident { primed: false, .. })
    }

    fn at_label(&self) -> bool {
        self.at_name() && matches!(self.peek_at(1), Tok::Sym(":"))
    }

    // ----- machine structure -----

    fn machine(&mut self) -> PResult<Machine> {
        let start = self.expect_kw("machine")?;
        let (name, _) = self.name("a machine name")?;
        let sees = if self.eat_kw("sees") {
            Some(self.name("a context name")?.0)
        } else {
            None
        };
        let mut carrier_sets = Vec::new();
        if self.eat_kw("sets") {
            while self.at_name() {
                carrier_sets.push(self.name("a carrier set name")?.0);
            }
        }
        let mut variables = Vec::new();
        if self.eat_kw("variables") {
            while self.at_name() {
                let (name, span) = self.name("a variable name")?;
                variables.push(Variable {
                    name,
                    ty: None,
                    span,
                });
            }
        }
        let mut invariants = Vec::new();
        if self.eat_kw("invariants") || self.eat_kw("invariant") {
            while self.at_label() {
                invariants.push(self.labeled_pred()?);
            }
        }
        self.expect_kw("events")?;
        self.expect_kw("initialisation")?;
        self.expect_kw("begin")?;
        let initialisation = self.actions()?;
        self.expect_kw("end")?;
        let mut events = Vec::new();
        while self.at_name() {
            events.push(self.event()?);
        }
        let end = self.expect_kw("end")?;
        Ok(Machine {
            name,
            sees,
            carrier_sets,
            variables,
            invariants,
            initialisation,
            events,
            span: start.to(end),
        })
    }

    fn event(&mut self) -> PResult<Event> {
        let (name, start) = self.name("an event name")?;
        let mut params = Vec::new();
        let mut guards = Vec::new();
        if self.eat_kw("any") {
            while self.at_name() {
                let (pname, pspan) = self.name("a parameter name")?;
                self.expect_sym(":").map_err(|mut e| {
                    e.expected = "`:` followed by the parameter type".to_string();
                    e
                })?;
                let ty = self.ty()?;
                params.push(Param {
                    name: pname,
                    ty,
                    span: pspan.to(self.prev_span()),
                });
            }
            if params.is_empty() {
                return Err(self.error("a parameter name"));
            }
            self.expect_kw("where")?;
            guards = self.guards()?;
            self.expect_kw("then")?;
        } else if self.eat_kw("when") || self.eat_kw("where") {
            guards = self.guards()?;
            self.expect_kw("then")?;
        } else if !self.eat_kw("begin") {
            return Err(self.error("keyword `any`, `when` or `begin`"));
        }
        let actions = self.actions()?;
        let end = self.expect_kw("end")?;
        Ok(Event {
            name,
            params,
            guards,
            actions,
            span: start.to(end),
        })
    }

    fn guards(&mut self) -> PResult<Vec<LabeledPred>> {
        let mut out = Vec::new();
        while self.at_label() {
            out.push(self.labeled_pred()?);
        }
        Ok(out)
    }

    fn labeled_pred(&mut self) -> PResult<LabeledPred> {
        let (label, start) = self.name("a label")?;
        self.expect_sym(":")?;
        let item = self.pred()?;
        Ok(Labeled {
            label,
            span: start.to(item.span),
            item,
        })
    }

    fn actions(&mut self) -> PResult<Vec<LabeledAction>> {
        let mut out = Vec::new();
        while self.at_label() {
            let (label, start) = self.name("a label")?;
            self.expect_sym(":")?;
            let (target, target_span) = self.name("an assigned variable")?;
            let kind = if self.eat_sym(":=") {
                ActionKind::Assign(self.expr()?)
            } else if self.eat_sym(":|") {
                ActionKind::Becomes(self.pred()?)
            } else {
                return Err(self.error("`:=` or `:|`"));
            };
            out.push(Labeled {
                label,
                item: Action {
                    target,
                    target_span,
                    kind,
                },
                span: start.to(self.prev_span()),
            });
        }
        Ok(out)
    }

    fn ty(&mut self) -> PResult<EbType> {
        let a = self.ty_base()?;
        if self.eat_sym("<->") {
            let b = self.ty_base()?;
            return Ok(EbType::relation(a, b));
        }
        Ok(a)
    }

    fn ty_base(&mut self) -> PResult<EbType> {
        if self.eat_kw("INT") {
            return Ok(EbType::Integer);
        }
        if self.eat_kw("POW") {
            self.expect_sym("(")?;
            let inner = self.ty()?;
            self.expect_sym(")")?;
            return Ok(EbType::set_of(inner));
        }
        if self.eat_sym("(") {
            let t = self.ty()?;
            self.expect_sym(")")?;
            return Ok(t);
        }
        if self.at_name() {
            return Ok(EbType::Carrier(self.name("a type")?.0.name));
        }
        Err(self.error("a type (`INT`, a carrier set, `POW(..)` or `A <-> B`)"))
    }

    // ----- predicates -----

    fn pred(&mut self) -> PResult<Pred> {
        let mut lhs = self.and_pred()?;
        while self.eat_kw("or") {
            let rhs = self.and_pred()?;
            let span = lhs.span.to(rhs.span);
            lhs = Pred::new(PredKind::Or(Box::new(lhs), Box::new(rhs)), span);
        }
        Ok(lhs)
    }

    fn and_pred(&mut self) -> PResult<Pred> {
        let mut lhs = self.unary_pred()?;
        while self.eat_sym("&") {
            let rhs = self.unary_pred()?;
            let span = lhs.span.to(rhs.span);
            lhs = Pred::new(PredKind::And(Box::new(lhs), Box::new(rhs)), span);
        }
        Ok(lhs)
    }

    fn unary_pred(&mut self) -> PResult<Pred> {
        if self.is_kw("not") {
            let start = self.bump().span;
            let inner = self.unary_pred()?;
            let span = start.to(inner.span);
            return Ok(Pred::new(PredKind::Not(Box::new(inner)), span));
        }
        if self.is_kw("true") {
            return Ok(Pred::new(PredKind::True, self.bump().span));
        }
        if self.is_kw("false") {
            return Ok(Pred::new(PredKind::False, self.bump().span));
        }
        if self.is_sym("(") {
            // Either a parenthesised predicate or a comparison whose left
            // operand starts with a parenthesised expression.
            let save = self.pos;
            let grouped = (|| {
                let open = self.bump().span;
                let p = self.pred()?;
                let close = self.expect_sym(")")?;
                Ok::<_, ParseError>(Pred { span: open.to(close), ..p })
            })();
            match grouped {
                Ok(p) if !self.continues_expression() => return Ok(p),
                Ok(_) => {
                    self.pos = save;
                    return self.comparison();
                }
                Err(first) => {
                    self.pos = save;
                    // Report whichever attempt got further.
                    return self.comparison().map_err(|second| {
                        if second.span.begin >= first.span.begin {
                            second
                        } else {
                            first
                        }
                    });
                }
            }
        }
        self.comparison()
    }

    fn continues_expression(&self) -> bool {
        match self.peek().tok {
            Tok::Sym(s) => {
                CMP_OPS.iter().any(|(t, _)| *t == s)
                    || SET_OPS.iter().any(|(t, _)| *t == s)
                    || RelKind::ALL.iter().any(|k| k.token() == s)
                    || matches!(s, "|->" | "+" | "-" | "*" | "(" | "[")
            }
            _ => false,
        }
    }

    fn comparison(&mut self) -> PResult<Pred> {
        let lhs = self.expr()?;
        let op = match self.peek().tok {
            Tok::Sym(s) => CMP_OPS.iter().find(|(t, _)| *t == s).map(|(_, op)| *op),
            _ => None,
        };
        let Some(op) = op else {
            return Err(self.error("a comparison operator (`=`, `/=`, `:`, `<:`, `<`, `<=`)"));
        };
        self.bump();
        let rhs = self.expr()?;
        let span = lhs.span.to(rhs.span);
        Ok(Pred::new(PredKind::Cmp(op, lhs, rhs), span))
    }

    // ----- expressions -----

    fn expr(&mut self) -> PResult<Expr> {
        let lhs = self.maplet()?;
        let kind = match self.peek().tok {
            Tok::Sym(s) => RelKind::ALL.iter().copied().find(|k| k.token() == s),
            _ => None,
        };
        if let Some(kind) = kind {
            self.bump();
            let rhs = self.maplet()?;
            let span = lhs.span.to(rhs.span);
            return Ok(Expr::new(
                ExprKind::RelSet(kind, Box::new(lhs), Box::new(rhs)),
                span,
            ));
        }
        Ok(lhs)
    }

    fn maplet(&mut self) -> PResult<Expr> {
        let mut lhs = self.set_expr()?;
        while self.eat_sym("|->") {
            let rhs = self.set_expr()?;
            let span = lhs.span.to(rhs.span);
            lhs = Expr::new(ExprKind::Maplet(Box::new(lhs), Box::new(rhs)), span);
        }
        Ok(lhs)
    }

    fn set_expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.additive()?;
        loop {
            let op = match self.peek().tok {
                Tok::Sym(s) => SET_OPS.iter().find(|(t, _)| *t == s).map(|(_, op)| *op),
                _ => None,
            };
            let Some(op) = op else { break };
            self.bump();
            let rhs = self.additive()?;
            let span = lhs.span.to(rhs.span);
            lhs = Expr::new(ExprKind::Set(op, Box::new(lhs), Box::new(rhs)), span);
        }
        Ok(lhs)
    }

    fn additive(&mut self) -> PResult<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.is_sym("+") {
                ArithOp::Add
            } else if self.is_sym("-") {
                ArithOp::Sub
            } else {
                break;
            };
            self.bump();
            let rhs = self.term()?;
            let span = lhs.span.to(rhs.span);
            lhs = Expr::new(ExprKind::Arith(op, Box::new(lhs), Box::new(rhs)), span);
        }
        Ok(lhs)
    }

    fn term(&mut self) -> PResult<Expr> {
        let mut lhs = self.postfix()?;
        while self.eat_sym("*") {
            let rhs = self.postfix()?;
            let span = lhs.span.to(rhs.span);
            lhs = Expr::new(
                ExprKind::Arith(ArithOp::Mul, Box::new(lhs), Box::new(rhs)),
                span,
            );
        }
        Ok(lhs)
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let mut e = self.atom()?;
        loop {
            if self.eat_sym("(") {
                let arg = self.expr()?;
                let close = self.expect_sym(")")?;
                let span = e.span.to(close);
                e = Expr::new(ExprKind::Apply(Box::new(e), Box::new(arg)), span);
            } else if self.eat_sym("[") {
                let arg = self.expr()?;
                let close = self.expect_sym("]")?;
                let span = e.span.to(close);
                e = Expr::new(ExprKind::Image(Box::new(e), Box::new(arg)), span);
            } else {
                return Ok(e);
            }
        }
    }

    fn atom(&mut self) -> PResult<Expr> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Int(n) => {
                self.bump();
                Ok(Expr::new(ExprKind::Int(n), t.span))
            }
            Tok::Sym("-") if matches!(self.peek_at(1), Tok::Int(_)) => {
                self.bump();
                let lit = self.bump();
                let Tok::Int(n) = lit.tok else { unreachable!() };
                Ok(Expr::new(ExprKind::Int(-n), t.span.to(lit.span)))
            }
            Tok::Ident { name, primed } => {
                self.bump();
                Ok(Expr::new(ExprKind::Var(Ident { name, primed }), t.span))
            }
            Tok::Keyword("INT") => {
                self.bump();
                Ok(Expr::new(ExprKind::Integers, t.span))
            }
            Tok::Keyword("NAT") => {
                self.bump();
                Ok(Expr::new(ExprKind::Naturals, t.span))
            }
            Tok::Keyword(k @ ("dom" | "ran")) => {
                self.bump();
                self.expect_sym("(")?;
                let inner = Box::new(self.expr()?);
                let close = self.expect_sym(")")?;
                let kind = if k == "dom" {
                    ExprKind::Dom(inner)
                } else {
                    ExprKind::Ran(inner)
                };
                Ok(Expr::new(kind, t.span.to(close)))
            }
            Tok::Sym("{") => {
                self.bump();
                if self.is_sym("}") {
                    let close = self.bump().span;
                    return Ok(Expr::new(ExprKind::EmptySet, t.span.to(close)));
                }
                let mut items = vec![self.expr()?];
                while self.eat_sym(",") {
                    items.push(self.expr()?);
                }
                let close = self.expect_sym("}")?;
                Ok(Expr::new(ExprKind::SetEnum(items), t.span.to(close)))
            }
            Tok::Sym("(") => {
                self.bump();
                let e = self.expr()?;
                let close = self.expect_sym(")")?;
                Ok(Expr { span: t.span.to(close), ..e })
            }
            _ => Err(self.error("an expression")),
        }
    }
}
