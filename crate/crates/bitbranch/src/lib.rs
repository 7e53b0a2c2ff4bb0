//! Bitwise branching: a source-to-source transformer that replaces
//! bitvector operations in a mini-C subset with guarded integer
//! over-approximations, plus the machinery to validate the rules
//! (exhaustive fixed-width oracle) and the whole-program transformation
//! (shadow replay).

pub mod ast;
pub mod cli;
pub mod interp;
pub mod oracle;
pub mod parser;
pub mod rules;
pub mod transform;

pub use ast::{Expr, Program, Stmt, StmtKind};
pub use parser::{parse, parse_with_options, print, print_expr, ParseOptions};
pub use rules::Catalog;
pub use transform::{
    normalize_three_address, transform_program, transform_program_with, Strategy, TransformConfig,
    TransformReport,
};
