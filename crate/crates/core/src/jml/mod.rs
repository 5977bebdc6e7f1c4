//! The JML side: specification AST, Java source rendering and the
//! normal form used for textual comparison.

pub mod ast;
mod normalize;
mod render;

pub use ast::*;
pub use normalize::{jml_tokens, normalize_jml};
pub use render::{flatten_and, render_class, render_expr, render_pred, IMPORTS};
