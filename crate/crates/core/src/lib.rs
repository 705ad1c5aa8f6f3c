//! Untyped computational lambda-calculus.

pub mod convergence;
pub mod deriv_syntax;
pub mod error;
pub mod filter;
pub mod harness;
pub mod lexer;
pub mod moggi;
pub mod parse;
pub mod reduction;
pub mod term;
pub mod oracle;
pub mod type_parse;
pub mod types;
pub mod typing;

pub use error::{Error, Result, SyntaxError};
