//! End-to-end analysis of a scalar field on a closed surface.

use crate::chains::{homology, ChainComplex, FieldTag, PoincarePolynomial, SimplicialComplex, Subcomplex};
use crate::error::{Error, Result};
use crate::flow::{build_gradient, build_quiver, morse_decomposition, DiscreteGradient, MorseDecomposition};
use crate::neighborhoods::{build_neighborhood_system, NeighborhoodSystem};
use crate::quiveralg::RQuiver;
use crate::scalarfield::{classify_vertices, CriticalReport, ScalarField};
use crate::spectral::{
    levelling_spectral, mv_double_complex, pages, reduced_model, sublevel_filtration, LevellingFunction, LevellingRun,
    MvDoubleComplex, ReducedModel, SpectralPage,
};

/// Neighbourhood level used for the Morse decomposition.
pub const DECOMPOSITION_LEVEL: usize = 0;

/// Flow-dependent stages, available on closed surfaces.
pub struct FlowStage {
    pub gradient: DiscreteGradient,
    pub quiver: RQuiver,
    pub decomposition: MorseDecomposition,
}

/// Every stage of the analysis of one field.
pub struct Analysis {
    pub field: FieldTag,
    pub input: ScalarField,
    pub report: CriticalReport,
    pub system: NeighborhoodSystem,
    pub flow: Option<FlowStage>,
    pub betti: PoincarePolynomial,
}

/// True if every edge of the 2-dimensional complex has exactly two cofaces.
pub fn is_closed_surface(cx: &SimplicialComplex) -> bool {
    cx.dim() == 2 && (0..cx.count(1)).all(|e| cx.cofaces(1, e).len() == 2)
}

impl Analysis {
    pub fn new(input: ScalarField, field: FieldTag, n_max: usize) -> Result<Self> {
        let report = classify_vertices(&input)?;
        let system = build_neighborhood_system(&input, &report, n_max)?;
        let flow = if is_closed_surface(&input.complex) {
            let gradient = build_gradient(&input, &report)?;
            let quiver = build_quiver(&gradient)?;
            let levels = vec![DECOMPOSITION_LEVEL; report.components.len()];
            let decomposition = morse_decomposition(&gradient, &system, &levels)?;
            Some(FlowStage { gradient, quiver, decomposition })
        } else {
            None
        };
        let betti = homology(&ChainComplex::of_complex(&input.complex, field), field);
        Ok(Analysis { field, input, report, system, flow, betti })
    }

    /// The flow stages, or an error for surfaces with boundary.
    pub fn flow(&self) -> Result<&FlowStage> {
        self.flow
            .as_ref()
            .ok_or_else(|| Error::Unsupported("gradient flow needs a closed surface".into()))
    }

    /// Position of each component in the order by (value, id).
    pub fn vertex_rank(&self) -> Vec<usize> {
        let comps = &self.report.components;
        let mut order: Vec<usize> = (0..comps.len()).collect();
        order.sort_by(|&a, &b| (&comps[a].value, a).cmp(&(&comps[b].value, b)));
        let mut rank = vec![0; comps.len()];
        for (r, &c) in order.iter().enumerate() {
            rank[c] = r;
        }
        rank
    }

    /// Mayer–Vietoris double complex of the Morse decomposition.
    pub fn mv(&self) -> Result<MvDoubleComplex> {
        let keys = self.vertex_rank();
        mv_double_complex(self.system.complex(), &self.flow()?.decomposition.pieces, &keys, self.field)
    }

    /// Mayer–Vietoris complex of the decomposition, or of the one-piece cover
    /// when there is no flow.
    pub fn mv_or_trivial(&self) -> Result<MvDoubleComplex> {
        if self.flow.is_some() {
            return self.mv();
        }
        let cx = self.system.complex();
        mv_double_complex(cx, &[Subcomplex::full(cx)], &[0], self.field)
    }

    /// Pages of the sublevel filtration of the Mayer–Vietoris complex.
    pub fn sublevel_pages(&self, mv: &MvDoubleComplex) -> Result<Vec<SpectralPage>> {
        let fine = self.system.field();
        let fc = sublevel_filtration(mv, &fine.complex, &fine.values, &self.report.critical_values)?;
        Ok(pages(&fc))
    }

    pub fn model(&self, mv: &MvDoubleComplex) -> Result<ReducedModel> {
        reduced_model(mv, &self.vertex_rank())
    }

    pub fn morse_levelling(&self) -> LevellingFunction {
        LevellingFunction::morse(&self.report.components.iter().map(|c| c.value.clone()).collect::<Vec<_>>())
    }

    /// `φ(v, n) = n`.
    pub fn index_levelling(&self) -> LevellingFunction {
        LevellingFunction::index(self.report.components.len(), self.input.complex.dim())
    }

    pub fn levelling(&self, mv: &MvDoubleComplex, model: &ReducedModel, phi: &LevellingFunction) -> Result<LevellingRun> {
        levelling_spectral(mv, model, &self.flow()?.quiver.quiver, phi)
    }
}
