use super::gradient::DiscreteGradient;
use super::quiver::all_connecting_components;
use crate::chains::{ChainComplex, FieldTag, SparseMatrix};
use crate::error::{Error, Result};

/// Chain complex on critical points with its generators.
#[derive(Clone, Debug)]
pub struct FlowComplex {
    pub complex: ChainComplex,
    /// Generator labels per degree.
    pub generators: Vec<Vec<String>>,
}

/// Morse–Witten complex: generators are the nondegenerate critical points
/// graded by index, and the differential counts flow lines mod 2.
///
/// Rejects degenerate or Morse–Bott components and flow lines between
/// critical points of equal index.
pub fn morse_witten_complex(dg: &DiscreteGradient, field: FieldTag) -> Result<FlowComplex> {
    if field != FieldTag::F2 {
        return Err(Error::Unsupported("flow-line signs are not modelled; use F2".into()));
    }
    let mut index = Vec::with_capacity(dg.nodes.len());
    for node in &dg.nodes {
        let kind = node
            .kind
            .ok_or_else(|| Error::Unsupported(format!("{} is not a critical point", node.label)))?;
        let k = kind
            .morse_index()
            .ok_or_else(|| Error::Unsupported(format!("{} is {kind}, not nondegenerate", node.label)))?;
        index.push(k);
    }
    let top = index.iter().copied().max().unwrap_or(0);
    let mut position = vec![0u32; dg.nodes.len()];
    let mut generators: Vec<Vec<String>> = vec![Vec::new(); top + 1];
    for (n, &k) in index.iter().enumerate() {
        position[n] = generators[k].len() as u32;
        generators[k].push(dg.nodes[n].label.clone());
    }
    let mut columns: Vec<Vec<Vec<(u32, i64)>>> = generators.iter().map(|g| vec![Vec::new(); g.len()]).collect();
    for cc in all_connecting_components(dg).into_iter().filter(|c| c.closed_in_band) {
        let (p, q) = (cc.upper, cc.lower);
        if index[p] <= index[q] {
            return Err(Error::Unsupported(format!(
                "flow line from {} to {} is not Morse–Smale",
                dg.nodes[p].label, dg.nodes[q].label
            )));
        }
        if index[p] == index[q] + 1 {
            columns[index[p]][position[p] as usize].push((position[q], 1));
        }
    }
    let ranks: Vec<usize> = generators.iter().map(Vec::len).collect();
    let maps = (1..=top)
        .map(|k| {
            let cols = std::mem::take(&mut columns[k])
                .into_iter()
                .map(|c| reduce_mod2(c))
                .collect();
            SparseMatrix::from_columns(ranks[k - 1], cols)
        })
        .collect();
    let complex = ChainComplex::new(field, &ranks, maps)?;
    Ok(FlowComplex { complex, generators })
}

/// Drops entries with even multiplicity.
pub(crate) fn reduce_mod2(mut col: Vec<(u32, i64)>) -> Vec<(u32, i64)> {
    col.sort_unstable();
    let mut out: Vec<(u32, i64)> = Vec::new();
    for (r, _) in col {
        if out.last().is_some_and(|l| l.0 == r) {
            out.pop();
        } else {
            out.push((r, 1));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::{homology, validate_chain_complex, ChainComplex};
    use crate::fixtures::{build, Resolution};
    use crate::flow::build_gradient;
    use crate::scalarfield::classify_vertices;

    fn witten(name: &str) -> Result<FlowComplex> {
        let sf = build(name, Resolution::default()).unwrap();
        let report = classify_vertices(&sf).unwrap();
        let dg = build_gradient(&sf, &report).unwrap();
        morse_witten_complex(&dg, FieldTag::F2)
    }

    #[test]
    fn torus_differential_vanishes() {
        let w = witten("torus_standard").unwrap();
        assert!(w.complex.boundaries.iter().all(|b| b.is_zero_in(FieldTag::F2)));
        assert_eq!(homology(&w.complex, FieldTag::F2).coefficients(), &[1, 2, 1]);
        let sf = build("torus_standard", Resolution::default()).unwrap();
        let ambient = homology(&ChainComplex::of_complex(&sf.complex, FieldTag::F2), FieldTag::F2);
        assert_eq!(homology(&w.complex, FieldTag::F2), ambient);
    }

    #[test]
    fn sphere_homology() {
        let w = witten("sphere").unwrap();
        assert!(validate_chain_complex(&w.complex).unwrap());
        assert_eq!(homology(&w.complex, FieldTag::F2).coefficients(), &[1, 0, 1]);
    }

    #[test]
    fn non_morse_smale_inputs_are_rejected() {
        assert!(matches!(witten("torus_degenerate"), Err(Error::Unsupported(_))));
        assert!(matches!(witten("torus_bott"), Err(Error::Unsupported(_))));
        assert!(matches!(witten("torus_axisymmetric"), Err(Error::Unsupported(_))));
    }

    #[test]
    fn mod2_reduction() {
        assert_eq!(reduce_mod2(vec![(2, 1), (0, 1), (2, 1), (2, 1)]), vec![(0, 1), (2, 1)]);
    }
}
