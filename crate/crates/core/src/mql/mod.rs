//! The MQL language: lexer, parser, syntax tree and canonical printer.
//!
//! ```
//! use inquest::mql::{parse_statement, MlTask, IntExpr};
//!
//! let stmt = parse_statement(
//!     "GENERATE DISPLAY OF CLUSTER OF 3 ALGORITHM KMeans FEATURES headline FROM ProthomAlo;",
//! )
//! .unwrap();
//! let body = stmt.as_generate().unwrap();
//! assert_eq!(body.task, MlTask::Cluster { k: IntExpr::Literal(3) });
//! assert_eq!(stmt.to_string(), "GENERATE DISPLAY OF CLUSTER OF 3 ALGORITHM KMeans FEATURES headline FROM ProthomAlo;");
//! ```

mod ast;
mod error;
mod lexer;
mod parser;
mod printer;

pub use ast::*;
pub use error::{render_caret, LexError, ParseError};
pub use lexer::{tokenize, Keyword, Token, TokenKind};
pub use parser::{parse_script, parse_statement};
pub use printer::quote_ident;
