//! Reduced-order models of a lithium-ion cell and the tooling around them.
//!
//! Two voltage models share one hysteresis submodel:
//!
//! * [`pbm`]: a single-particle model with electrolyte dynamics. Solid
//!   diffusion is reduced by a Padé approximant, electrolyte transport by a
//!   piecewise-quadratic profile.
//! * [`ecm`]: a second-order RC equivalent circuit with coulomb counting.
//!
//! Around them sit relaxation and hysteresis [`characterization`], swarm-based
//! parameter identification ([`identify`]), finite-volume reference solvers
//! ([`oracle`]) and data ingestion, synthesis and reporting ([`io`]).
//!
//! Current is positive on discharge everywhere.

pub mod characterization;
pub mod domain;
pub mod ecm;
pub mod error;
pub mod hysteresis;
pub mod identify;
pub mod io;
pub mod model;
pub mod oracle;
pub mod pbm;
pub mod reference;
pub mod units;

pub use error::{Error, Result, Violation};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/conventions.md")]
    mod conventions {}
    #[doc = include_str!("../../../book/src/physics-model.md")]
    mod physics_model {}
    #[doc = include_str!("../../../book/src/circuit-model.md")]
    mod circuit_model {}
    #[doc = include_str!("../../../book/src/hysteresis.md")]
    mod hysteresis {}
    #[doc = include_str!("../../../book/src/temperature.md")]
    mod temperature {}
    #[doc = include_str!("../../../book/src/characterization.md")]
    mod characterization {}
    #[doc = include_str!("../../../book/src/identification.md")]
    mod identification {}
    #[doc = include_str!("../../../book/src/reference-solvers.md")]
    mod reference_solvers {}
    #[doc = include_str!("../../../book/src/data-and-reports.md")]
    mod data_and_reports {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../book/src/formats.md")]
    mod formats {}
}
