//! Discrete gradient flow, strata, quivers, Morse decompositions and the
//! chain complexes built from flow lines.

mod gradient;
mod cobordism;
mod cover;
mod quiver;
mod witten;

pub use gradient::{build_flow, build_gradient, check_strata, strata, DiscreteGradient, FlowNode, Separatrix, Stratum, TIE_BREAK};
pub use cobordism::{cobordism_quiver, interior_critical, laudenbach_complex, CobordismQuiver, LaudenbachVariant, MorseCobordism};
pub use cover::{morse_cover, morse_decomposition, overlapping_pairs, MorseCover, MorseDecomposition};
pub use witten::{morse_witten_complex, FlowComplex};
pub use quiver::{
    all_connecting_components, build_quiver, build_refined_quiver, connecting_components, node_summary,
    ConnectingComponent, RefinedQuiver, RefinedVertex,
};
