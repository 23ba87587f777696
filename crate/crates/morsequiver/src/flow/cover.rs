use rayon::prelude::*;

use super::gradient::DiscreteGradient;
use crate::chains::{relative_homology, FieldTag, PoincarePolynomial, SimplicialComplex, Subcomplex};
use crate::error::{Error, Result};
use crate::neighborhoods::NeighborhoodSystem;

/// Face-closed pieces of the refined complex, one per critical component,
/// whose top cells partition the top cells of the complex.
#[derive(Clone, Debug)]
pub struct MorseDecomposition {
    pub pieces: Vec<Subcomplex>,
    /// `∂₋V_C`: the part of `V_C` shared with pieces of lower value.
    pub lower_boundaries: Vec<Subcomplex>,
    /// Neighbourhood level used for each component.
    pub levels: Vec<usize>,
}

impl MorseDecomposition {
    /// `P(V_C, ∂₋V_C)`.
    pub fn relative_poincare(&self, cx: &SimplicialComplex, c: usize, field: FieldTag) -> PoincarePolynomial {
        relative_homology(cx, &self.pieces[c], &self.lower_boundaries[c], field)
            .expect("lower boundary is a subcomplex of its piece")
    }
}

/// Saturated neighbourhoods: `U_C` is the piece `V_C` together with every
/// cell whose carrier flows down into `C`. The added cells form an open set,
/// so `U_C` need not be face-closed.
#[derive(Clone, Debug)]
pub struct MorseCover {
    pub pieces: Vec<Subcomplex>,
}

impl MorseCover {
    /// Pairs of components whose pieces intersect.
    pub fn overlaps(&self) -> Vec<(usize, usize)> {
        overlapping_pairs(&self.pieces)
    }
}

/// Pairs `(i, j)`, `i < j`, with nonempty intersection.
pub fn overlapping_pairs(pieces: &[Subcomplex]) -> Vec<(usize, usize)> {
    let n = pieces.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    pairs
        .into_par_iter()
        .filter(|&(i, j)| !pieces[i].intersection(&pieces[j]).is_empty())
        .collect()
}

/// Original cell carrying each cell of the refined complex, as a cell id.
fn carrier_cells(dg: &DiscreteGradient, system: &NeighborhoodSystem) -> Result<Vec<usize>> {
    let k = &dg.field.complex;
    let fine = system.complex();
    if k.vertex_count() > fine.vertex_count() || system.layered.carriers.len() != fine.vertex_count() {
        return Err(Error::Invalid("neighbourhood system does not refine the gradient's complex".into()));
    }
    (0..fine.num_cells())
        .map(|id| {
            let carrier = system.layered.cell_carrier(fine.cell_vertices(id));
            let i = k
                .index_of(&carrier)
                .ok_or_else(|| Error::Invalid(format!("carrier {carrier:?} is not a cell of the original complex")))?;
            Ok(k.cell_id(carrier.len() - 1, i))
        })
        .collect()
}

/// For each original top cell, the highest saddle-type node whose thickened
/// ascending separatrix contains it.
fn strip_owners(dg: &DiscreteGradient) -> Vec<Option<usize>> {
    let k = &dg.field.complex;
    let top = k.dim();
    let mut owner: Vec<Option<usize>> = vec![None; k.num_cells()];
    let mut order: Vec<usize> = (0..dg.nodes.len()).filter(|&n| dg.nodes[n].saddle_type).collect();
    order.sort_by(|&a, &b| (&dg.nodes[a].value, a).cmp(&(&dg.nodes[b].value, b)));
    for &c in &order {
        for sep in dg.ascending.iter().filter(|s| s.node == c) {
            let mut path = sep.path.as_slice();
            if let Some(&last) = path.last() {
                if path.len() > 1 && dg.node_of[last as usize].is_some() {
                    path = &path[..path.len() - 1];
                }
            }
            for &v in path {
                for cell in k.open_star(v) {
                    if k.cell_of(cell).0 == top {
                        owner[cell] = Some(c);
                    }
                }
            }
        }
    }
    owner
}

/// Morse decomposition of the refined complex of `system`, using level
/// `levels[C]` of each neighbourhood.
///
/// A top cell belongs to `V_C` if it lies in the neighbourhood of `C`;
/// otherwise to the highest saddle-type component whose thickened ascending
/// separatrix covers its carrier; otherwise to the component its carrier
/// flows down to.
pub fn morse_decomposition(
    dg: &DiscreteGradient,
    system: &NeighborhoodSystem,
    levels: &[usize],
) -> Result<MorseDecomposition> {
    let n = dg.nodes.len();
    if levels.len() != n || system.neighborhoods.len() != n {
        return Err(Error::Invalid("one neighbourhood level per component is required".into()));
    }
    if let Some(&l) = levels.iter().find(|&&l| l > system.n_max) {
        return Err(Error::Invalid(format!("level {l} exceeds the system's maximum {}", system.n_max)));
    }
    let fine = system.complex();
    let top = fine.dim();
    let carriers = carrier_cells(dg, system)?;
    let strips = strip_owners(dg);
    let mut owner = vec![usize::MAX; fine.count(top)];
    for (c, &l) in levels.iter().enumerate() {
        let nb = system.get(c, l);
        for (i, o) in owner.iter_mut().enumerate() {
            if nb.cells.contains(top, i) {
                *o = c;
            }
        }
    }
    for (i, o) in owner.iter_mut().enumerate() {
        if *o == usize::MAX {
            let carrier = carriers[fine.cell_id(top, i)];
            *o = strips[carrier].unwrap_or(dg.plus_cell[carrier]);
        }
    }
    let pieces: Vec<Subcomplex> = (0..n)
        .map(|c| {
            let cells = (0..owner.len()).filter(|&i| owner[i] == c).map(|i| fine.cell_id(top, i));
            Subcomplex::closure_of(fine, cells)
        })
        .collect();
    let lower_boundaries = (0..n)
        .map(|c| {
            let mut lower = Subcomplex::empty(fine);
            for d in (0..n).filter(|&d| dg.nodes[d].value < dg.nodes[c].value) {
                lower = lower.union(&pieces[d]);
            }
            pieces[c].intersection(&lower)
        })
        .collect();
    Ok(MorseDecomposition { pieces, lower_boundaries, levels: levels.to_vec() })
}

/// Morse cover built on top of [`morse_decomposition`].
pub fn morse_cover(dg: &DiscreteGradient, system: &NeighborhoodSystem, levels: &[usize]) -> Result<MorseCover> {
    let decomposition = morse_decomposition(dg, system, levels)?;
    let fine = system.complex();
    let carriers = carrier_cells(dg, system)?;
    let pieces = decomposition
        .pieces
        .into_iter()
        .enumerate()
        .map(|(c, v)| {
            let flowing = (0..fine.num_cells()).filter(|&id| dg.plus_cell[carriers[id]] == c);
            v.union(&Subcomplex::from_cells(fine, flowing))
        })
        .collect();
    Ok(MorseCover { pieces })
}
