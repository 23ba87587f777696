//! Filtered complexes and their spectral sequences, double complexes, the
//! Mayer–Vietoris double complex of a Morse decomposition and levelling
//! functions.

mod double;
mod filtered;
mod levelling;

pub use double::{
    mv_double_complex, standard_filtrations, sublevel_filtration, total_of_double, DoubleComplex, Filtration,
    MvDoubleComplex,
};
pub use filtered::{
    abuts, page_dim_by_subspaces, pages, pages_of_barcode, Barcode, Essential, FilteredComplex, PageDifferential, Pair,
    SpectralPage,
};
pub use levelling::{
    condition_three, levelling_spectral, reduced_model, ConditionThree, LevellingFunction, LevellingRun,
    ModelGenerator, ReducedModel,
};
