use std::collections::HashMap;

use super::filtered::FilteredComplex;
use crate::chains::{ChainComplex, FieldTag, SimplicialComplex, SparseMatrix, Subcomplex};
use crate::error::{Error, Result};
use crate::scalarfield::Rat;

/// Bigraded spaces `N_{p,q}` with anticommuting differentials
/// `∂′: N_{p,q} → N_{p−1,q}` and `∂″: N_{p,q} → N_{p,q−1}`.
#[derive(Clone, Debug)]
pub struct DoubleComplex {
    pub field: FieldTag,
    /// `dims[p][q]`; every row has the same length.
    pub dims: Vec<Vec<usize>>,
    /// `horizontal[p][q]` is `∂′` out of `N_{p,q}` (zero rows when `p = 0`).
    pub horizontal: Vec<Vec<SparseMatrix>>,
    /// `vertical[p][q]` is `∂″` out of `N_{p,q}` (zero rows when `q = 0`).
    pub vertical: Vec<Vec<SparseMatrix>>,
}

/// Which of the two standard filtrations of the total complex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Filtration {
    /// By column index `p`.
    First,
    /// By row index `q`.
    Second,
}

impl DoubleComplex {
    /// Checks shapes and the identities `∂′² = 0`, `∂″² = 0`,
    /// `∂′∂″ + ∂″∂′ = 0`.
    pub fn new(
        field: FieldTag,
        dims: Vec<Vec<usize>>,
        horizontal: Vec<Vec<SparseMatrix>>,
        vertical: Vec<Vec<SparseMatrix>>,
    ) -> Result<Self> {
        let dc = DoubleComplex { field, dims, horizontal, vertical };
        dc.validate()?;
        Ok(dc)
    }

    /// The double complex with the single column `N_{0,·} = cc`.
    pub fn column(cc: &ChainComplex) -> Self {
        let ranks = cc.ranks();
        DoubleComplex {
            field: cc.field,
            dims: vec![ranks.clone()],
            horizontal: vec![ranks.iter().map(|&r| SparseMatrix::zeros(0, r)).collect()],
            vertical: vec![(0..ranks.len()).map(|q| cc.boundary(q)).collect()],
        }
    }

    /// The double complex with the single row `N_{·,0} = cc`.
    pub fn row(cc: &ChainComplex) -> Self {
        let ranks = cc.ranks();
        DoubleComplex {
            field: cc.field,
            dims: ranks.iter().map(|&r| vec![r]).collect(),
            horizontal: (0..ranks.len()).map(|p| vec![cc.boundary(p)]).collect(),
            vertical: ranks.iter().map(|&r| vec![SparseMatrix::zeros(0, r)]).collect(),
        }
    }

    pub fn width(&self) -> usize {
        self.dims.len()
    }

    pub fn height(&self) -> usize {
        self.dims.first().map_or(0, Vec::len)
    }

    pub fn dim(&self, p: usize, q: usize) -> usize {
        self.dims.get(p).and_then(|r| r.get(q)).copied().unwrap_or(0)
    }

    pub fn validate(&self) -> Result<()> {
        let (w, h) = (self.width(), self.height());
        if self.dims.iter().any(|r| r.len() != h)
            || self.horizontal.len() != w
            || self.vertical.len() != w
            || self.horizontal.iter().chain(&self.vertical).any(|r| r.len() != h)
        {
            return Err(Error::Invalid("double complex tables have inconsistent sizes".into()));
        }
        for p in 0..w {
            for q in 0..h {
                let hm = &self.horizontal[p][q];
                let vm = &self.vertical[p][q];
                let hrows = if p == 0 { 0 } else { self.dim(p - 1, q) };
                let vrows = if q == 0 { 0 } else { self.dim(p, q - 1) };
                if hm.cols != self.dim(p, q) || hm.rows != hrows || vm.cols != self.dim(p, q) || vm.rows != vrows {
                    return Err(Error::Invalid(format!("map shapes at ({p}, {q}) do not match the spaces")));
                }
            }
        }
        let zero = |m: SparseMatrix| m.is_zero_in(self.field);
        for p in 0..w {
            for q in 0..h {
                if p >= 2 && !zero(self.horizontal[p - 1][q].mul(&self.horizontal[p][q])) {
                    return Err(Error::Invariant(format!("∂′∂′ ≠ 0 at ({p}, {q})")));
                }
                if q >= 2 && !zero(self.vertical[p][q - 1].mul(&self.vertical[p][q])) {
                    return Err(Error::Invariant(format!("∂″∂″ ≠ 0 at ({p}, {q})")));
                }
                if p >= 1 && q >= 1 {
                    let a = self.horizontal[p][q - 1].mul(&self.vertical[p][q]);
                    let b = self.vertical[p - 1][q].mul(&self.horizontal[p][q]);
                    let sum = SparseMatrix::from_columns(
                        a.rows,
                        a.columns.iter().zip(&b.columns).map(|(x, y)| x.iter().chain(y).copied().collect()).collect(),
                    );
                    if !zero(sum) {
                        return Err(Error::Invariant(format!("∂′∂″ + ∂″∂′ ≠ 0 at ({p}, {q})")));
                    }
                }
            }
        }
        Ok(())
    }

    /// Generators of `Tot_k` in order: by `p`, then index within `N_{p,k−p}`.
    pub fn total_generators(&self, k: usize) -> Vec<(usize, usize, usize)> {
        (0..=k.min(self.width().saturating_sub(1)))
            .filter(|&p| k - p < self.height())
            .flat_map(|p| (0..self.dim(p, k - p)).map(move |i| (p, k - p, i)))
            .collect()
    }

    fn total_offsets(&self, k: usize) -> HashMap<usize, usize> {
        let mut offsets = HashMap::new();
        let mut acc = 0;
        for p in 0..=k.min(self.width().saturating_sub(1)) {
            if k - p < self.height() {
                offsets.insert(p, acc);
                acc += self.dim(p, k - p);
            }
        }
        offsets
    }

    /// Top total degree with possibly nonzero terms.
    pub fn total_top(&self) -> usize {
        (self.width() + self.height()).saturating_sub(2)
    }
}

/// The total complex `Tot_k = ⊕_{p+q=k} N_{p,q}` with differential `∂′ + ∂″`.
pub fn total_of_double(dc: &DoubleComplex) -> Result<ChainComplex> {
    dc.validate()?;
    if dc.width() == 0 || dc.height() == 0 {
        return ChainComplex::new(dc.field, &[], Vec::new());
    }
    let top = dc.total_top();
    let ranks: Vec<usize> = (0..=top).map(|k| dc.total_generators(k).len()).collect();
    let mut maps = Vec::with_capacity(top);
    for k in 1..=top {
        let below = dc.total_offsets(k - 1);
        let columns = dc
            .total_generators(k)
            .into_iter()
            .map(|(p, q, i)| {
                let mut col = Vec::new();
                if p > 0 {
                    let off = below[&(p - 1)] as u32;
                    col.extend(dc.horizontal[p][q].columns[i].iter().map(|&(r, v)| (off + r, v)));
                }
                if q > 0 {
                    let off = below[&p] as u32;
                    col.extend(dc.vertical[p][q].columns[i].iter().map(|&(r, v)| (off + r, v)));
                }
                col
            })
            .collect();
        maps.push(SparseMatrix::from_columns(ranks[k - 1], columns));
    }
    ChainComplex::new(dc.field, &ranks, maps)
}

/// The filtration of `Tot` by columns (`First`) or rows (`Second`).
pub fn standard_filtrations(dc: &DoubleComplex, which: Filtration) -> Result<FilteredComplex> {
    let tot = total_of_double(dc)?;
    let levels = (0..tot.ranks().len())
        .map(|k| {
            dc.total_generators(k)
                .into_iter()
                .map(|(p, q, _)| match which {
                    Filtration::First => p as i64,
                    Filtration::Second => q as i64,
                })
                .collect()
        })
        .collect();
    FilteredComplex::new(tot, levels)
}

/// Mayer–Vietoris double complex of a cover by face-closed pieces:
/// `N_{p,q} = ⊕_σ C_q(∩σ)` over nerve simplices `σ` of dimension `p`.
#[derive(Clone, Debug)]
pub struct MvDoubleComplex {
    pub double: DoubleComplex,
    /// Nerve simplices per dimension, each listing piece indices in
    /// increasing order of the ordering key.
    pub nerve: Vec<Vec<Vec<usize>>>,
    /// `generators[p][q][i] = (simplex index in nerve[p], cell index in dimension q)`.
    pub generators: Vec<Vec<Vec<(usize, usize)>>>,
}

impl MvDoubleComplex {
    /// For each generator of `Tot_k`, the nerve simplex it belongs to.
    pub fn total_simplices(&self, k: usize) -> Vec<&[usize]> {
        self.double
            .total_generators(k)
            .into_iter()
            .map(|(p, q, i)| self.nerve[p][self.generators[p][q][i].0].as_slice())
            .collect()
    }

    /// For each generator of `Tot_k`, its cell as `(dimension, index)`.
    pub fn total_cells(&self, k: usize) -> Vec<(usize, usize)> {
        self.double.total_generators(k).into_iter().map(|(p, q, i)| (q, self.generators[p][q][i].1)).collect()
    }
}

/// Builds the Mayer–Vietoris double complex of `pieces`, ordering pieces by
/// `keys` (ties by index). Signs of `∂′` follow that order and
/// `∂″ = (−1)^p ∂` on column `p`.
pub fn mv_double_complex<K: Ord>(
    cx: &SimplicialComplex,
    pieces: &[Subcomplex],
    keys: &[K],
    field: FieldTag,
) -> Result<MvDoubleComplex> {
    if keys.len() != pieces.len() {
        return Err(Error::Invalid("one ordering key per piece is required".into()));
    }
    let mut union = Subcomplex::empty(cx);
    for (i, piece) in pieces.iter().enumerate() {
        if !piece.is_face_closed(cx) {
            return Err(Error::Invalid(format!("piece {i} is not face-closed")));
        }
        union = union.union(piece);
    }
    if union.total() != cx.num_cells() {
        return Err(Error::Invalid("pieces do not cover the complex".into()));
    }
    let mut order: Vec<usize> = (0..pieces.len()).collect();
    order.sort_by(|&a, &b| (&keys[a], a).cmp(&(&keys[b], b)));

    let mut nerve: Vec<Vec<(Vec<usize>, Subcomplex)>> = Vec::new();
    fn extend(
        order: &[usize],
        pieces: &[Subcomplex],
        start: usize,
        simplex: &mut Vec<usize>,
        inter: &Subcomplex,
        nerve: &mut Vec<Vec<(Vec<usize>, Subcomplex)>>,
    ) {
        for pos in start..order.len() {
            let next = inter.intersection(&pieces[order[pos]]);
            if next.is_empty() {
                continue;
            }
            simplex.push(order[pos]);
            let p = simplex.len() - 1;
            if nerve.len() <= p {
                nerve.resize(p + 1, Vec::new());
            }
            nerve[p].push((simplex.clone(), next.clone()));
            extend(order, pieces, pos + 1, simplex, &next, nerve);
            simplex.pop();
        }
    }
    extend(&order, pieces, 0, &mut Vec::new(), &Subcomplex::full(cx), &mut nerve);
    for level in nerve.iter_mut() {
        let rank = |s: &Vec<usize>| s.iter().map(|v| order.iter().position(|o| o == v).unwrap()).collect::<Vec<_>>();
        level.sort_by_cached_key(|(s, _)| rank(s));
    }

    let width = nerve.len();
    let height = cx.dim() + 1;
    let mut generators: Vec<Vec<Vec<(usize, usize)>>> = vec![vec![Vec::new(); height]; width];
    // local[p][s][q][cell] = index of the cell within N_{p,q}
    let mut local: Vec<Vec<Vec<HashMap<usize, u32>>>> = Vec::with_capacity(width);
    for p in 0..width {
        let mut per_simplex = Vec::with_capacity(nerve[p].len());
        for (s, (_, inter)) in nerve[p].iter().enumerate() {
            let mut maps = Vec::with_capacity(height);
            for q in 0..height {
                let mut m = HashMap::new();
                for c in (0..cx.count(q)).filter(|&c| inter.contains(q, c)) {
                    m.insert(c, generators[p][q].len() as u32);
                    generators[p][q].push((s, c));
                }
                maps.push(m);
            }
            per_simplex.push(maps);
        }
        local.push(per_simplex);
    }
    let index: Vec<HashMap<&[usize], usize>> = nerve
        .iter()
        .map(|level| level.iter().enumerate().map(|(i, (s, _))| (s.as_slice(), i)).collect())
        .collect();

    let dims: Vec<Vec<usize>> = generators.iter().map(|row| row.iter().map(Vec::len).collect()).collect();
    let mut horizontal = Vec::with_capacity(width);
    let mut vertical = Vec::with_capacity(width);
    for p in 0..width {
        let sign_p = if p % 2 == 0 { 1 } else { -1 };
        let mut hrow = Vec::with_capacity(height);
        let mut vrow = Vec::with_capacity(height);
        for q in 0..height {
            let gens = &generators[p][q];
            let vcols = gens
                .iter()
                .map(|&(s, c)| {
                    if q == 0 {
                        return Vec::new();
                    }
                    cx.boundary(q, c).into_iter().map(|(f, v)| (local[p][s][q - 1][&f], sign_p * v)).collect()
                })
                .collect();
            vrow.push(SparseMatrix::from_columns(if q == 0 { 0 } else { dims[p][q - 1] }, vcols));
            let hcols = gens
                .iter()
                .map(|&(s, c)| {
                    if p == 0 {
                        return Vec::new();
                    }
                    let simplex = &nerve[p][s].0;
                    (0..=p)
                        .map(|i| {
                            let face: Vec<usize> =
                                simplex.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &v)| v).collect();
                            let t = index[p - 1][face.as_slice()];
                            (local[p - 1][t][q][&c], if i % 2 == 0 { 1 } else { -1 })
                        })
                        .collect()
                })
                .collect();
            hrow.push(SparseMatrix::from_columns(if p == 0 { 0 } else { dims[p - 1][q] }, hcols));
        }
        horizontal.push(hrow);
        vertical.push(vrow);
    }
    let double = DoubleComplex::new(field, dims, horizontal, vertical)?;
    let nerve = nerve.into_iter().map(|level| level.into_iter().map(|(s, _)| s).collect()).collect();
    Ok(MvDoubleComplex { double, nerve, generators })
}

/// Filtration of `Tot` by sublevel sets: a generator on cell `σ` has level
/// `ℓ` when the highest value on `σ` lies in the `ℓ`-th band cut out by the
/// midpoints between consecutive `critical_values`.
pub fn sublevel_filtration(
    mv: &MvDoubleComplex,
    cx: &SimplicialComplex,
    values: &[Rat],
    critical_values: &[Rat],
) -> Result<FilteredComplex> {
    if values.len() != cx.vertex_count() {
        return Err(Error::Invalid("one value per vertex is required".into()));
    }
    let mut cv = critical_values.to_vec();
    cv.sort();
    cv.dedup();
    let two = Rat::from_integer(2.into());
    let midpoints: Vec<Rat> = cv.windows(2).map(|w| (&w[0] + &w[1]) / &two).collect();
    let tot = total_of_double(&mv.double)?;
    let levels = (0..tot.ranks().len())
        .map(|k| {
            mv.total_cells(k)
                .into_iter()
                .map(|(q, c)| {
                    let top = cx.simplex(q, c).iter().map(|&v| &values[v as usize]).max().expect("nonempty simplex");
                    midpoints.iter().filter(|b| *b < top).count() as i64
                })
                .collect()
        })
        .collect();
    FilteredComplex::new(tot, levels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::homology;
    use crate::spectral::pages;

    fn sphere() -> SimplicialComplex {
        SimplicialComplex::from_facets(4, vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]]).unwrap()
    }

    #[test]
    fn single_column_total_is_the_column() {
        let cx = sphere();
        let cc = ChainComplex::of_complex(&cx, FieldTag::F2);
        let dc = DoubleComplex::column(&cc);
        let tot = total_of_double(&dc).unwrap();
        assert_eq!(homology(&tot, FieldTag::F2), homology(&cc, FieldTag::F2));
        let row = DoubleComplex::row(&cc);
        let ps = pages(&standard_filtrations(&row, Filtration::Second).unwrap());
        assert_eq!(ps.len(), 1);
        assert_eq!(ps[0].total_dims(), vec![1, 0, 1]);
    }

    #[test]
    fn two_hemispheres() {
        let cx = sphere();
        let lower = Subcomplex::closure_of(&cx, [cx.cell_id(2, 0), cx.cell_id(2, 1)]);
        let upper = Subcomplex::closure_of(&cx, [cx.cell_id(2, 2), cx.cell_id(2, 3)]);
        for field in [FieldTag::F2, FieldTag::Rational] {
            let mv = mv_double_complex(&cx, &[lower.clone(), upper.clone()], &[0, 1], field).unwrap();
            assert_eq!(mv.nerve.len(), 2);
            assert_eq!(mv.nerve[1], vec![vec![0, 1]]);
            let tot = total_of_double(&mv.double).unwrap();
            assert_eq!(homology(&tot, field).coefficients(), &[1, 0, 1]);
            for which in [Filtration::First, Filtration::Second] {
                let ps = pages(&standard_filtrations(&mv.double, which).unwrap());
                assert_eq!(ps.last().unwrap().total_dims(), vec![1, 0, 1]);
            }
        }
    }

    #[test]
    fn broken_identities_are_rejected() {
        let one = SparseMatrix::from_columns(1, vec![vec![(0, 1)]]);
        let dims = vec![vec![1, 1], vec![1, 1]];
        let horizontal = vec![vec![SparseMatrix::zeros(0, 1), SparseMatrix::zeros(0, 1)], vec![one.clone(), one.clone()]];
        let vertical = vec![vec![SparseMatrix::zeros(0, 1), one.clone()], vec![SparseMatrix::zeros(0, 1), one]];
        // ∂′∂″ + ∂″∂′ = 2 is zero over F2 only
        assert!(DoubleComplex::new(FieldTag::F2, dims.clone(), horizontal.clone(), vertical.clone()).is_ok());
        assert!(DoubleComplex::new(FieldTag::Rational, dims, horizontal, vertical).is_err());
    }

    #[test]
    fn cover_must_be_closed_and_complete() {
        let cx = sphere();
        let half = Subcomplex::closure_of(&cx, [cx.cell_id(2, 0)]);
        assert!(mv_double_complex(&cx, &[half.clone()], &[0], FieldTag::F2).is_err());
        let open = Subcomplex::from_cells(&cx, [cx.cell_id(2, 0)]);
        assert!(mv_double_complex(&cx, &[Subcomplex::full(&cx), open], &[0, 1], FieldTag::F2).is_err());
    }
}
