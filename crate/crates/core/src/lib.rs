//! Exact certification of square-integrable residues of Eisenstein series
//! induced from the trivial representation of the Borel subgroup.

pub mod cfactor;
pub mod constantterm;
pub mod error;
pub(crate) mod modp;
pub mod orbits;
pub mod rootsys;
pub mod series;
pub mod zeta;

pub use error::{Error, Result};
pub use rootsys::{build_root_system, Region, RootSystem, TypeLabel, Weight};
pub use series::{Poly, Symbol, TruncatedSeries};
