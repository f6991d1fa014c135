//! Expression language for curve components and invariant profiles, evaluated
//! to third-order (or higher) Taylor jets.

mod ast;
mod jet;
mod lexer;
mod parser;

pub use ast::{expr, BinOp, Expr, Func, Node};
pub use jet::{Jet, Jet3};
pub use lexer::{tokenize, Spanned, Token};
pub use parser::parse;
