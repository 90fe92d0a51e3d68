//! Simulation of piecewise adiabatic population transfer driven by
//! phase-locked femtosecond pulse trains.

pub mod config;
pub mod error;
pub mod export;
pub mod fields;
pub mod model;
pub mod propagator;
pub mod protocols;
pub mod scan;
pub mod units;

pub use error::{ErrorCategory, PapError, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/levels.md")]
    mod levels {}
    #[doc = include_str!("../../../book/src/fields.md")]
    mod fields {}
    #[doc = include_str!("../../../book/src/propagation.md")]
    mod propagation {}
    #[doc = include_str!("../../../book/src/protocols.md")]
    mod protocols {}
    #[doc = include_str!("../../../book/src/scans.md")]
    mod scans {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
