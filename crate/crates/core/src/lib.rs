#![allow(clippy::result_large_err)]

pub mod api;
pub mod check;
pub mod diag;
pub mod error;
pub mod eval;
pub mod corpus;
pub mod csv_import;
pub mod datasheet;
pub mod lang;
pub mod model;

pub use error::{BenchError, ErrorKind, Outcome};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/checking.md")]
    mod checking {}
    #[doc = include_str!("../../../book/src/library.md")]
    mod library {}
    #[doc = include_str!("../../../book/src/corpus.md")]
    mod corpus {}
}
