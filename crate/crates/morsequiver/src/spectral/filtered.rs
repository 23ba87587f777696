use std::collections::BTreeMap;

use serde::Serialize;

use crate::chains::{reduce, rank_of, ChainComplex, FieldElem, FieldTag, SparseMatrix, F2, Q};
use crate::error::{Error, Result};

/// A chain complex with an increasing filtration spanned by generators:
/// generator `i` in degree `k` lies in `F_p` for every `p ≥ levels[k][i]`.
#[derive(Clone, Debug)]
pub struct FilteredComplex {
    pub complex: ChainComplex,
    pub levels: Vec<Vec<i64>>,
}

impl FilteredComplex {
    /// Checks that the differential preserves every filtration step.
    pub fn new(complex: ChainComplex, levels: Vec<Vec<i64>>) -> Result<Self> {
        let ranks = complex.ranks();
        if levels.len() != ranks.len() || levels.iter().zip(&ranks).any(|(l, &r)| l.len() != r) {
            return Err(Error::Invalid("one filtration level per generator is required".into()));
        }
        for k in 1..ranks.len() {
            for (j, col) in complex.boundaries[k].columns.iter().enumerate() {
                for &(i, v) in col {
                    if nonzero_in(complex.field, v) && levels[k - 1][i as usize] > levels[k][j] {
                        return Err(Error::Invariant(format!(
                            "differential maps generator {j} of degree {k} at level {} to level {}",
                            levels[k][j],
                            levels[k - 1][i as usize]
                        )));
                    }
                }
            }
        }
        Ok(FilteredComplex { complex, levels })
    }

    /// The one-step filtration with everything at level 0.
    pub fn trivial(complex: ChainComplex) -> Self {
        let levels = complex.ranks().iter().map(|&r| vec![0; r]).collect();
        FilteredComplex { complex, levels }
    }

    pub fn field(&self) -> FieldTag {
        self.complex.field
    }

    /// Generators in filtration order: by level, then degree, then index.
    fn order(&self) -> Vec<(usize, usize)> {
        let mut gens: Vec<(usize, usize)> =
            (0..self.levels.len()).flat_map(|k| (0..self.levels[k].len()).map(move |i| (k, i))).collect();
        gens.sort_by_key(|&(k, i)| (self.levels[k][i], k, i));
        gens
    }

    /// Persistence pairing of the filtration.
    pub fn barcode(&self) -> Barcode {
        match self.field() {
            FieldTag::F2 => self.barcode_in::<F2>(),
            FieldTag::Rational => self.barcode_in::<Q>(),
        }
    }

    fn barcode_in<F: FieldElem>(&self) -> Barcode {
        let order = self.order();
        let mut position: Vec<Vec<u32>> = self.levels.iter().map(|l| vec![0; l.len()]).collect();
        for (pos, &(k, i)) in order.iter().enumerate() {
            position[k][i] = pos as u32;
        }
        let n = order.len();
        let columns: Vec<Vec<(u32, i64)>> = order
            .iter()
            .map(|&(k, i)| {
                if k == 0 {
                    return Vec::new();
                }
                self.complex.boundaries[k].columns[i].iter().map(|&(r, v)| (position[k - 1][r as usize], v)).collect()
            })
            .collect();
        let cols = SparseMatrix::from_columns(n, columns).to_field::<F>();
        let red = reduce(cols, n, false);
        let mut paired = vec![false; n];
        let mut pairs = Vec::new();
        for j in 0..n {
            if let Some(i) = red.pivot(j) {
                let i = i as usize;
                paired[i] = true;
                paired[j] = true;
                let (bk, bi) = order[i];
                let (dk, di) = order[j];
                pairs.push(Pair {
                    degree: bk,
                    birth: self.levels[bk][bi],
                    death: self.levels[dk][di],
                    birth_generator: bi,
                    death_generator: di,
                });
            }
        }
        let essential = (0..n)
            .filter(|&p| !paired[p])
            .map(|p| {
                let (k, i) = order[p];
                Essential { degree: k, level: self.levels[k][i], generator: i }
            })
            .collect();
        Barcode { pairs, essential }
    }
}

fn nonzero_in(field: FieldTag, v: i64) -> bool {
    match field {
        FieldTag::F2 => v % 2 != 0,
        FieldTag::Rational => v != 0,
    }
}

/// A cancelling pair: a generator of degree `degree + 1` at level `death`
/// whose reduced boundary has lowest term a generator of degree `degree` at
/// level `birth`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Pair {
    pub degree: usize,
    pub birth: i64,
    pub death: i64,
    pub birth_generator: usize,
    pub death_generator: usize,
}

impl Pair {
    pub fn gap(&self) -> i64 {
        self.death - self.birth
    }
}

/// An unpaired generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Essential {
    pub degree: usize,
    pub level: i64,
    pub generator: usize,
}

/// Persistence pairing of a filtered complex.
#[derive(Clone, Debug, Default)]
pub struct Barcode {
    pub pairs: Vec<Pair>,
    pub essential: Vec<Essential>,
}

/// One differential component `d_r : E^r_{p,q} → E^r_{p−r,q+r−1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PageDifferential {
    pub source: (i64, i64),
    pub target: (i64, i64),
    pub rank: usize,
}

/// The page `E^r`, indexed by filtration degree `p` and complementary
/// degree `q` (total degree `p + q`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpectralPage {
    pub r: usize,
    /// True for the final page, which equals `E^∞`.
    pub infinity: bool,
    pub terms: BTreeMap<(i64, i64), usize>,
    pub differentials: Vec<PageDifferential>,
}

impl SpectralPage {
    /// `Σ_{p+q=n} dim E_{p,q}` for `n = 0, 1, …`.
    pub fn total_dims(&self) -> Vec<usize> {
        let mut out: Vec<usize> = Vec::new();
        for (&(p, q), &d) in &self.terms {
            let n = (p + q) as usize;
            if out.len() <= n {
                out.resize(n + 1, 0);
            }
            out[n] += d;
        }
        while out.last() == Some(&0) {
            out.pop();
        }
        out
    }

    pub fn dim(&self, p: i64, q: i64) -> usize {
        self.terms.get(&(p, q)).copied().unwrap_or(0)
    }

    /// Sum of the ranks of all components of `d_r`.
    pub fn total_rank(&self) -> usize {
        self.differentials.iter().map(|d| d.rank).sum()
    }
}

fn add(map: &mut BTreeMap<(i64, i64), usize>, p: i64, k: usize, count: usize) {
    if count > 0 {
        *map.entry((p, k as i64 - p)).or_default() += count;
    }
}

/// Pages `E^1, E^2, …` of the spectral sequence of `fc`, up to and including
/// the first page after which every differential vanishes.
///
/// A pair with gap `g` contributes both of its generators to every page
/// `E^r` with `r ≤ g` and is cancelled by `d_g`; unpaired generators survive
/// to `E^∞`.
pub fn pages(fc: &FilteredComplex) -> Vec<SpectralPage> {
    pages_of_barcode(&fc.barcode())
}

/// Pages determined by a persistence pairing.
pub fn pages_of_barcode(bc: &Barcode) -> Vec<SpectralPage> {
    let max_gap = bc.pairs.iter().map(Pair::gap).max().unwrap_or(0).max(0) as usize;
    let last = max_gap + 1;
    (1..=last)
        .map(|r| {
            let mut terms = BTreeMap::new();
            for e in &bc.essential {
                add(&mut terms, e.level, e.degree, 1);
            }
            let mut ranks: BTreeMap<((i64, i64), (i64, i64)), usize> = BTreeMap::new();
            for pair in bc.pairs.iter().filter(|p| p.gap() >= r as i64) {
                add(&mut terms, pair.birth, pair.degree, 1);
                add(&mut terms, pair.death, pair.degree + 1, 1);
                if pair.gap() == r as i64 {
                    let source = (pair.death, pair.degree as i64 + 1 - pair.death);
                    let target = (pair.birth, pair.degree as i64 - pair.birth);
                    *ranks.entry((source, target)).or_default() += 1;
                }
            }
            let differentials =
                ranks.into_iter().map(|((source, target), rank)| PageDifferential { source, target, rank }).collect();
            SpectralPage { r, infinity: r == last, terms, differentials }
        })
        .collect()
}

/// Rank of the part of `∂_k` with columns at level `≤ col_max` and rows at
/// level `> row_min` (all rows when `row_min` is `None`).
fn block_rank(fc: &FilteredComplex, k: usize, col_max: i64, row_min: Option<i64>) -> usize {
    if k == 0 || k >= fc.levels.len() {
        return 0;
    }
    let d = &fc.complex.boundaries[k];
    let rows = &fc.levels[k - 1];
    let cols: Vec<Vec<(u32, i64)>> = (0..d.cols)
        .filter(|&j| fc.levels[k][j] <= col_max)
        .map(|j| {
            d.columns[j].iter().copied().filter(|&(i, _)| row_min.map_or(true, |m| rows[i as usize] > m)).collect()
        })
        .collect();
    let m = SparseMatrix::from_columns(d.rows, cols);
    match fc.field() {
        FieldTag::F2 => rank_of(m.to_field::<F2>(), m.rows),
        FieldTag::Rational => rank_of(m.to_field::<Q>(), m.rows),
    }
}

/// `dim E^r_{p,k}` from the subspace formula
/// `E^r_p = Z^r_p / (Z^{r−1}_{p−1} + B^{r−1}_p)` with
/// `Z^r_p = F_p ∩ ∂⁻¹F_{p−r}` and `B^r_p = F_p ∩ ∂F_{p+r}`.
///
/// Independent of the pairing; used to cross-check [`pages`].
pub fn page_dim_by_subspaces(fc: &FilteredComplex, r: usize, p: i64, k: usize) -> usize {
    let r = r as i64;
    let size = |level: i64| fc.levels.get(k).map_or(0, |l| l.iter().filter(|&&x| x <= level).count());
    let z = |s: i64, j: i64| size(j) - block_rank(fc, k, j, Some(j - s));
    let b = |s: i64, j: i64| block_rank(fc, k + 1, j + s, None) - block_rank(fc, k + 1, j + s, Some(j));
    z(r, p) - (z(r - 1, p - 1) + b(r - 1, p) - b(r, p - 1))
}

/// `Σ dim E^∞` per total degree matches the homology of the complex.
pub fn abuts(pages: &[SpectralPage], betti: &[u64]) -> bool {
    let Some(last) = pages.last() else { return betti.iter().all(|&b| b == 0) };
    let dims = last.total_dims();
    let n = dims.len().max(betti.len());
    (0..n).all(|i| dims.get(i).copied().unwrap_or(0) as u64 == betti.get(i).copied().unwrap_or(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::{homology, SimplicialComplex};

    fn triangle_boundary(field: FieldTag) -> ChainComplex {
        let cx = SimplicialComplex::from_facets(3, vec![vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap();
        ChainComplex::of_complex(&cx, field)
    }

    #[test]
    fn trivial_filtration_gives_homology() {
        let fc = FilteredComplex::trivial(triangle_boundary(FieldTag::F2));
        let ps = pages(&fc);
        assert_eq!(ps.len(), 1);
        assert!(ps[0].infinity);
        assert_eq!(ps[0].total_dims(), vec![1, 1]);
    }

    #[test]
    fn filtration_must_be_preserved() {
        let cc = triangle_boundary(FieldTag::F2);
        // edge 0 at level 0 but its vertices at level 1
        let bad = vec![vec![1, 1, 1], vec![0, 1, 1]];
        assert!(FilteredComplex::new(cc, bad).is_err());
    }

    #[test]
    fn vertex_by_vertex_filtration() {
        for field in [FieldTag::F2, FieldTag::Rational] {
            let cc = triangle_boundary(field);
            // vertices at 0,1,2 and every edge at 2
            let levels = vec![vec![0, 1, 2], vec![2, 2, 2]];
            let fc = FilteredComplex::new(cc.clone(), levels).unwrap();
            let ps = pages(&fc);
            let betti = homology(&cc, field);
            assert!(abuts(&ps, betti.coefficients()));
            for page in &ps {
                for p in -1..4 {
                    for k in 0..2 {
                        let want = page_dim_by_subspaces(&fc, page.r, p, k);
                        assert_eq!(page.dim(p, k as i64 - p), want, "r={} p={p} k={k}", page.r);
                    }
                }
            }
            assert_eq!(ps[0].total_dims(), vec![2, 2]);
            assert_eq!(ps[0].total_rank(), 1);
            assert_eq!(ps[1].total_dims(), vec![1, 1]);
        }
    }

    #[test]
    fn long_differential_appears_on_later_page() {
        // a single edge whose endpoints sit three levels below it
        let d1 = SparseMatrix::from_columns(1, vec![vec![(0, 1)]]);
        let cc = ChainComplex::new(FieldTag::F2, &[1, 1], vec![d1]).unwrap();
        let fc = FilteredComplex::new(cc, vec![vec![0], vec![3]]).unwrap();
        let ps = pages(&fc);
        assert_eq!(ps.len(), 4);
        assert_eq!(ps[2].r, 3);
        assert_eq!(ps[2].differentials, vec![PageDifferential { source: (3, -2), target: (0, 0), rank: 1 }]);
        assert!(ps[3].terms.is_empty());
        for page in &ps {
            assert_eq!(page.dim(0, 0), page_dim_by_subspaces(&fc, page.r, 0, 0));
            assert_eq!(page.dim(3, -2), page_dim_by_subspaces(&fc, page.r, 3, 1));
        }
    }
}
