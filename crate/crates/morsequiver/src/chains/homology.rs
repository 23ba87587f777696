use rayon::prelude::*;

use super::complex::{SimplicialComplex, Subcomplex};
use super::field::FieldTag;
use super::matrix::SparseMatrix;
use super::poly::PoincarePolynomial;
use crate::error::{Error, Result};

/// Free chain complex given by boundary matrices.
///
/// `boundaries[k]` maps degree-k chains to degree-(k-1) chains; entry 0 is
/// the zero map to nothing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComplex {
    pub field: FieldTag,
    pub boundaries: Vec<SparseMatrix>,
}

impl ChainComplex {
    /// Complex with the given generator counts and boundary maps ∂_1..∂_n.
    pub fn new(field: FieldTag, ranks: &[usize], maps: Vec<SparseMatrix>) -> Result<Self> {
        if ranks.is_empty() {
            return Ok(ChainComplex {
                field,
                boundaries: Vec::new(),
            });
        }
        if maps.len() + 1 != ranks.len() {
            return Err(Error::Invalid(format!(
                "{} boundary maps for {} degrees",
                maps.len(),
                ranks.len()
            )));
        }
        let mut boundaries = vec![SparseMatrix::zeros(0, ranks[0])];
        for (k, m) in maps.into_iter().enumerate() {
            if m.rows != ranks[k] || m.cols != ranks[k + 1] {
                return Err(Error::Invalid(format!(
                    "boundary map in degree {} has shape {}x{}, expected {}x{}",
                    k + 1,
                    m.rows,
                    m.cols,
                    ranks[k],
                    ranks[k + 1]
                )));
            }
            boundaries.push(m);
        }
        Ok(ChainComplex { field, boundaries })
    }

    /// Chains of `x` modulo chains of `a` (the quotient complex).
    pub fn relative(cx: &SimplicialComplex, x: &Subcomplex, a: &Subcomplex, field: FieldTag) -> Self {
        let keep: Vec<Vec<Option<u32>>> = (0..=cx.dim())
            .map(|d| {
                let mut next = 0u32;
                (0..cx.count(d))
                    .map(|i| {
                        if x.contains(d, i) && !a.contains(d, i) {
                            next += 1;
                            Some(next - 1)
                        } else {
                            None
                        }
                    })
                    .collect()
            })
            .collect();
        let ranks: Vec<usize> = keep.iter().map(|k| k.iter().flatten().count()).collect();
        let mut boundaries = vec![SparseMatrix::zeros(0, ranks[0])];
        for d in 1..=cx.dim() {
            let mut cols = Vec::with_capacity(ranks[d]);
            for i in 0..cx.count(d) {
                if keep[d][i].is_some() {
                    cols.push(
                        cx.boundary(d, i)
                            .into_iter()
                            .filter_map(|(f, s)| keep[d - 1][f].map(|r| (r, s)))
                            .collect(),
                    );
                }
            }
            boundaries.push(SparseMatrix::from_columns(ranks[d - 1], cols));
        }
        ChainComplex { field, boundaries }
    }

    /// Simplicial chains of the whole complex.
    pub fn of_complex(cx: &SimplicialComplex, field: FieldTag) -> Self {
        Self::relative(cx, &Subcomplex::full(cx), &Subcomplex::empty(cx), field)
    }

    /// Number of generators in each degree.
    pub fn ranks(&self) -> Vec<usize> {
        self.boundaries.iter().map(|m| m.cols).collect()
    }

    pub fn top_degree(&self) -> Option<usize> {
        self.boundaries.len().checked_sub(1)
    }

    pub fn rank_in(&self, k: usize) -> usize {
        self.boundaries.get(k).map_or(0, |m| m.cols)
    }

    /// The map ∂_k, or a zero map of the right shape.
    pub fn boundary(&self, k: usize) -> SparseMatrix {
        match self.boundaries.get(k) {
            Some(m) => m.clone(),
            None => SparseMatrix::zeros(self.rank_in(k.wrapping_sub(1)), 0),
        }
    }
}

/// True iff every composite ∂_{k-1} ∂_k vanishes in the complex's field.
pub fn validate_chain_complex(cc: &ChainComplex) -> Result<bool> {
    for k in 2..cc.boundaries.len() {
        let (a, b) = (&cc.boundaries[k - 1], &cc.boundaries[k]);
        if a.cols != b.rows {
            return Err(Error::Invalid(format!(
                "boundary maps in degrees {} and {} are not composable",
                k - 1,
                k
            )));
        }
        if !a.mul(b).is_zero_in(cc.field) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Betti numbers dim ker ∂_k − rank ∂_{k+1} over `field`.
pub fn homology(cc: &ChainComplex, field: FieldTag) -> PoincarePolynomial {
    let n = cc.boundaries.len();
    let ranks: Vec<usize> = (0..n)
        .into_par_iter()
        .map(|k| cc.boundaries[k].rank(field))
        .collect();
    PoincarePolynomial::new(
        (0..n)
            .map(|k| {
                let kernel = cc.boundaries[k].cols - ranks[k];
                let image = ranks.get(k + 1).copied().unwrap_or(0);
                (kernel - image) as u64
            })
            .collect(),
    )
}

/// Homology of the pair (X, A) via the quotient complex.
pub fn relative_homology(
    cx: &SimplicialComplex,
    x: &Subcomplex,
    a: &Subcomplex,
    field: FieldTag,
) -> Result<PoincarePolynomial> {
    if !x.is_face_closed(cx) {
        return Err(Error::Invalid("X is not face-closed".into()));
    }
    if !a.is_face_closed(cx) {
        return Err(Error::Invalid("A is not face-closed".into()));
    }
    if !a.is_subset(x) {
        return Err(Error::Invalid("A is not contained in X".into()));
    }
    Ok(homology(&ChainComplex::relative(cx, x, a, field), field))
}

/// Homology of a face-closed subcomplex.
pub fn subcomplex_homology(cx: &SimplicialComplex, x: &Subcomplex, field: FieldTag) -> Result<PoincarePolynomial> {
    relative_homology(cx, x, &Subcomplex::empty(cx), field)
}

/// Euler characteristic from cell counts equals the one from Betti numbers.
pub fn euler_check(cx: &SimplicialComplex, x: &Subcomplex, field: FieldTag) -> Result<bool> {
    let p = subcomplex_homology(cx, x, field)?;
    Ok(p.euler() == x.euler_characteristic())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn boundary_of_tetrahedron() -> SimplicialComplex {
        SimplicialComplex::from_facets(
            4,
            vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]],
        )
        .unwrap()
    }

    #[test]
    fn sphere_homology_both_fields() {
        let cx = boundary_of_tetrahedron();
        for field in [FieldTag::F2, FieldTag::Rational] {
            let cc = ChainComplex::of_complex(&cx, field);
            assert!(validate_chain_complex(&cc).unwrap());
            assert_eq!(homology(&cc, field).coefficients(), &[1, 0, 1]);
        }
    }

    #[test]
    fn forced_nonzero_composite_is_detected() {
        let d1 = SparseMatrix::from_columns(1, vec![vec![(0, 1)], vec![(0, 1)]]);
        let d2 = SparseMatrix::from_columns(2, vec![vec![(0, 1)]]);
        let cc = ChainComplex::new(FieldTag::F2, &[1, 2, 1], vec![d1, d2]).unwrap();
        assert!(!validate_chain_complex(&cc).unwrap());
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let d1 = SparseMatrix::zeros(1, 2);
        assert!(ChainComplex::new(FieldTag::F2, &[1, 3], vec![d1]).is_err());
    }

    #[test]
    fn disk_relative_to_boundary() {
        let cx = SimplicialComplex::from_facets(3, vec![vec![0, 1, 2]]).unwrap();
        let x = Subcomplex::full(&cx);
        let a = Subcomplex::from_cells(&cx, (0..6).collect::<Vec<_>>());
        let p = relative_homology(&cx, &x, &a, FieldTag::F2).unwrap();
        assert_eq!(p.coefficients(), &[0, 0, 1]);
        assert!(relative_homology(&cx, &a, &x, FieldTag::F2).is_err());
    }

    #[test]
    fn euler_consistency() {
        let cx = boundary_of_tetrahedron();
        assert!(euler_check(&cx, &Subcomplex::full(&cx), FieldTag::F2).unwrap());
    }
}
