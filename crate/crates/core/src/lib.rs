//! Exact-arithmetic workbench for point-line incidence structures in the
//! real projective plane.

pub mod error;
pub mod format;
pub mod canon;
pub mod catalog;
pub mod cli;
pub mod constructions;
pub mod embed;
pub mod enumerate;
pub mod kernel;
pub mod obstruction;
pub mod projmap;
pub mod realization;
pub mod render;
pub mod signature;
pub mod structure;

pub use error::{Error, Kind, Result};
pub use kernel::{ProjLine, ProjPoint, Rational};
pub use projmap::ProjMap;
pub use realization::{check_faithful, FaithfulnessReport, Realization};
pub use signature::Signature;
pub use structure::IncidenceStructure;
