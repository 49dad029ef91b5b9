//! Exact Weingarten calculus for word maps on surface groups, with the
//! matching enumeration, surface construction and Monte Carlo cross-checks
//! used to study expected traces under the Atiyah–Bott–Goldman measure.

mod dsu;
pub mod error;
pub mod exactnum;
pub mod matchenum;
pub mod mixedrep;
pub mod montecarlo;
pub mod oracle;
pub mod repdata;
pub mod surfacegeom;
pub mod symgroup;
pub mod weingarten;
pub mod wordintegral;
pub mod words;

pub use error::{Error, Result};
pub use exactnum::{PolyN, Rat, RatFuncN};
pub use symgroup::{GroupAlgebraElement, Partition, Permutation, YoungDiagram};
