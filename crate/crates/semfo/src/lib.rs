//! Semiring semantics for first-order logic.

pub mod error;
pub mod eval;
pub mod formula;
pub mod interpretation;
pub mod preservation;
pub mod provenance;
pub mod semiring;
pub mod strategy;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/semirings.md")]
    mod semirings {}
    #[doc = include_str!("../../../book/src/formulas.md")]
    mod formulas {}
    #[doc = include_str!("../../../book/src/evaluation.md")]
    mod evaluation {}
    #[doc = include_str!("../../../book/src/strategies.md")]
    mod strategies {}
    #[doc = include_str!("../../../book/src/provenance.md")]
    mod provenance {}
    #[doc = include_str!("../../../book/src/preservation.md")]
    mod preservation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
