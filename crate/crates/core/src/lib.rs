//! Density constants for S4 and D4 quartic extensions of quadratic fields.

pub mod arith;
pub mod constants;
pub mod dirichlet;
mod error;
pub mod quadfield;
pub mod relext;
pub mod stats;
mod special;

pub use error::{Error, Result};

/// Chapters of the guide in `book/`, compiled so their snippets run as doc-tests.
#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/fields.md")]
    pub mod fields {}
    #[doc = include_str!("../../../book/src/l_values.md")]
    pub mod l_values {}
    #[doc = include_str!("../../../book/src/extensions.md")]
    pub mod extensions {}
    #[doc = include_str!("../../../book/src/constants.md")]
    pub mod constants {}
    #[doc = include_str!("../../../book/src/statistics.md")]
    pub mod statistics {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}
