//! Whitespace- and comment-marker-insensitive normal form of Java/JML text.

const MARKERS: [&str; 3] = ["/*@", "//@", "*/"];
const OPERATORS: [&str; 9] = ["<==>", "==>", "<==", "==", "!=", "&&", "||", "<=", ">="];

fn is_word(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '$'
}

/// Split `text` into tokens, dropping annotation comment markers.
pub fn jml_tokens(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut rest = text;
    while let Some(c) = rest.chars().next() {
        if c.is_whitespace() {
            rest = &rest[c.len_utf8()..];
            continue;
        }
        if let Some(m) = MARKERS.iter().find(|m| rest.starts_with(**m)) {
            rest = &rest[m.len()..];
            continue;
        }
        let len = if is_word(c) || c == '\\' {
            let body = rest[1..].find(|ch: char| !is_word(ch)).map_or(rest.len(), |i| i + 1);
            let primes = rest[body..].chars().take_while(|&ch| ch == '\'').count();
            body + primes
        } else if let Some(op) = OPERATORS.iter().find(|op| rest.starts_with(**op)) {
            op.len()
        } else {
            c.len_utf8()
        };
        out.push(&rest[..len]);
        rest = &rest[len..];
    }
    out
}

/// Canonical form used for golden comparisons: tokens joined by single spaces.
pub fn normalize_jml(text: &str) -> String {
    jml_tokens(text).join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn collapses_whitespace() {
        assert_eq!(normalize_jml("a  &&\n b"), "a && b");
    }

    #[test]
    fn empty_input() {
        assert_eq!(normalize_jml(""), "");
        assert_eq!(normalize_jml("\n\n  \n"), "");
    }

    #[test]
    fn strips_markers_keeps_operators() {
        assert_eq!(
            normalize_jml("/*@ ensures \\result <==> x.has(y); */"),
            "ensures \\result <==> x . has ( y ) ;"
        );
        assert_eq!(normalize_jml("//@ a<=b"), "a <= b");
    }

    #[test]
    fn primes_stay_attached() {
        assert_eq!(normalize_jml("v==v'"), "v == v'");
    }

    #[test]
    fn layout_independent() {
        let a = "owner.equals(\\old(owner.union(\n   new BSet<Integer>(c1))))";
        let b = "owner.equals( \\old( owner.union(new BSet<Integer>( c1 ))))";
        assert_eq!(normalize_jml(a), normalize_jml(b));
    }

    #[test]
    fn idempotent_on_sample() {
        let s = "/*@ requires !guard_e();\n assignable \\nothing; */ x*/y a/ *@ b";
        let once = normalize_jml(s);
        assert_eq!(normalize_jml(&once), once);
    }
}
