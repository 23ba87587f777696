//! Generalized Morse theory for piecewise-linear scalar fields on finite
//! simplicial complexes: critical components, Morse neighbourhoods and
//! inequalities, gradient-flow quivers, multicomplexes and spectral sequences.

pub mod chains;
pub mod error;
pub mod util;

pub use error::{Error, Result};
pub mod fixtures;
pub mod flow;
pub mod io;
pub mod neighborhoods;
pub mod pipeline;
pub mod quiveralg;
pub mod report;
pub mod scalarfield;
pub mod spectral;
