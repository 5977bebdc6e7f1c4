//! The supported Event-B subset: syntax tree, parser, renderer, typing and
//! static checks.

pub mod ast;
mod lexer;
pub mod parser;
pub mod render;
pub mod types;
pub mod wf;

pub use ast::*;
pub use parser::{parse_expression, parse_machine, parse_predicate, parse_type, ParseError, ParseErrorKind};
pub use render::{render_action, render_expr, render_machine, render_pred};
pub use wf::{free_identifiers, free_identifiers_expr, well_formedness_check, Diagnostic, DiagnosticKind};
