//! Exact linear algebra, simplicial complexes and (relative) homology.

mod complex;
mod field;
mod homology;
mod matrix;
mod oracle;
mod poly;

pub use complex::{Simplex, SimplicialComplex, Subcomplex};
pub use field::{FieldElem, FieldTag, F2, Q};
pub use homology::{
    euler_check, homology, relative_homology, subcomplex_homology, validate_chain_complex, ChainComplex,
};
pub use matrix::{axpy, entry, rank_of, reduce, scale, Col, Reduction, SparseMatrix};
pub use oracle::oracle_relative_homology_f2;
pub use poly::{IntPoly, PoincarePolynomial};
