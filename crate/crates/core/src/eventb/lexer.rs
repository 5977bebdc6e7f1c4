//! Tokenizer for the ASCII Event-B surface syntax.

use super::ast::Span;
use super::parser::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident { name: String, primed: bool },
    Int(i64),
    /// Reserved word, including the out-of-subset ones.
    Keyword(&'static str),
    Sym(&'static str),
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident { name, primed: false } => format!("identifier `{name}`"),
            Tok::Ident { name, primed: true } => format!("identifier `{name}'`"),
            Tok::Int(n) => format!("integer `{n}`"),
            Tok::Keyword(k) => format!("keyword `{k}`"),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::Eof => "end of input".to_string(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

pub const KEYWORDS: &[&str] = &[
    "machine",
    "sees",
    "sets",
    "variables",
    "invariants",
    "invariant",
    "events",
    "initialisation",
    "begin",
    "end",
    "any",
    "where",
    "when",
    "then",
    "dom",
    "ran",
    "INT",
    "NAT",
    "POW",
    "true",
    "false",
    "not",
    "or",
];

/// Event-B constructs the translator deliberately does not accept.
pub const OUT_OF_SUBSET: &[&str] = &[
    "refines",
    "extends",
    "context",
    "constants",
    "axioms",
    "theorem",
    "theorems",
    "variant",
    "witness",
    "with",
    "convergent",
    "anticipated",
    "status",
];

// Longest match wins, so longer spellings come first.
const SYMBOLS: &[&str] = &[
    "<<->>", "<<->", "<->>", "<<|", "<->", "|->", "+->", "-->", "->>", ":=", ":|", "<:", "<=",
    "/=", "\\/", "/\\", "<|", "**", ":", "=", "<", "&", "(", ")", "[", "]", "{", "}", ",", "+",
    "-", "*", "\\",
];

pub fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut pos = 0;
    let mut line = 1;
    let mut line_start = 0;
    let column = |pos: usize, line_start: usize| text[line_start..pos].chars().count() + 1;

    while pos < bytes.len() {
        let c = bytes[pos];
        if c == b'\n' {
            pos += 1;
            line += 1;
            line_start = pos;
            continue;
        }
        if c.is_ascii_whitespace() {
            pos += 1;
            continue;
        }
        if c == b'#' {
            while pos < bytes.len() && bytes[pos] != b'\n' {
                pos += 1;
            }
            continue;
        }
        let start = pos;
        let col = column(pos, line_start);
        if c.is_ascii_alphabetic() {
            while pos < bytes.len() && (bytes[pos].is_ascii_alphanumeric() || bytes[pos] == b'_') {
                pos += 1;
            }
            let word = &text[start..pos];
            let primed = pos < bytes.len() && bytes[pos] == b'\'';
            if primed {
                pos += 1;
            }
            let tok = match KEYWORDS
                .iter()
                .chain(OUT_OF_SUBSET)
                .find(|k| **k == word)
            {
                Some(k) if !primed => Tok::Keyword(k),
                _ => Tok::Ident {
                    name: word.to_string(),
                    primed,
                },
            };
            out.push(Token {
                tok,
                span: Span::new(start, pos, line, col),
            });
            continue;
        }
        if c.is_ascii_digit() {
            while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                pos += 1;
            }
            let span = Span::new(start, pos, line, col);
            let n: i64 = text[start..pos].parse().map_err(|_| ParseError::syntax(
                span,
                "an integer literal that fits in 64 bits",
                &text[start..pos],
            ))?;
            out.push(Token {
                tok: Tok::Int(n),
                span,
            });
            continue;
        }
        match SYMBOLS.iter().find(|s| text[pos..].starts_with(**s)) {
            Some(s) => {
                pos += s.len();
                out.push(Token {
                    tok: Tok::Sym(s),
                    span: Span::new(start, pos, line, col),
                });
            }
            None => {
                let ch = text[pos..].chars().next().unwrap_or('?');
                let span = Span::new(start, start + ch.len_utf8(), line, col);
                return Err(ParseError::syntax(span, "a token", &ch.to_string()));
            }
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        span: Span::new(text.len(), text.len(), line, column(text.len(), line_start)),
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        tokenize(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn longest_symbol_wins() {
        assert_eq!(
            toks("<<->> <<| <: <-> ->> -->"),
            vec![
                Tok::Sym("<<->>"),
                Tok::Sym("<<|"),
                Tok::Sym("<:"),
                Tok::Sym("<->"),
                Tok::Sym("->>"),
                Tok::Sym("-->"),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn primes_and_comments() {
        assert_eq!(
            toks("x' = x # trailing\n+ 1"),
            vec![
                Tok::Ident { name: "x".into(), primed: true },
                Tok::Sym("="),
                Tok::Ident { name: "x".into(), primed: false },
                Tok::Sym("+"),
                Tok::Int(1),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn positions_are_tracked() {
        let t = tokenize("a\n  bb").unwrap();
        assert_eq!((t[1].span.line, t[1].span.column), (2, 3));
        assert_eq!((t[1].span.begin, t[1].span.end), (4, 6));
    }

    #[test]
    fn stray_character_is_an_error() {
        let e = tokenize("a ? b").unwrap_err();
        assert_eq!(e.span.column, 3);
    }
}
