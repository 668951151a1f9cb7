//! Exact-arithmetic engine relating hypergeometric series to genus-0
//! Gromov–Witten invariants of hypersurfaces in projective space.
//!
//! The crate builds the hypergeometric correlators, runs the mirror-map
//! change of variables, extracts quintic invariants `N_d` and virtual counts
//! `n_d`, verifies the localization recursions and polynomiality conditions,
//! and cross-checks low degrees against a torus-localization graph sum.

pub mod error;
pub mod formal_algebra;
pub mod hypergeom;
pub mod localization_oracle;
pub mod mirror_engine;
pub mod recursion_lab;
pub mod report;
pub mod cli;

pub use error::{Error, Result};
