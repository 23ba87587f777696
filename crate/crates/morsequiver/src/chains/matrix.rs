use super::field::{FieldElem, FieldTag, F2, Q};

/// Sparse column over a field: strictly increasing row indices, nonzero values.
pub type Col<F> = Vec<(u32, F)>;

/// Sparse integer matrix stored by columns.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SparseMatrix {
    pub rows: usize,
    pub cols: usize,
    pub columns: Vec<Vec<(u32, i64)>>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix {
            rows,
            cols,
            columns: vec![Vec::new(); cols],
        }
    }

    /// Builds from per-column entries; entries are sorted and duplicates summed.
    pub fn from_columns(rows: usize, columns: Vec<Vec<(u32, i64)>>) -> Self {
        let cols = columns.len();
        let columns = columns
            .into_iter()
            .map(|mut c| {
                c.sort_unstable_by_key(|e| e.0);
                let mut out: Vec<(u32, i64)> = Vec::with_capacity(c.len());
                for (r, v) in c {
                    match out.last_mut() {
                        Some(last) if last.0 == r => last.1 += v,
                        _ => out.push((r, v)),
                    }
                }
                out.retain(|e| e.1 != 0);
                out
            })
            .collect();
        SparseMatrix { rows, cols, columns }
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(|c| c.len()).sum()
    }

    /// Integer product `self * other`.
    pub fn mul(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.cols, other.rows, "shape mismatch in product");
        let columns = other
            .columns
            .iter()
            .map(|oc| {
                let mut acc: Vec<(u32, i64)> = Vec::new();
                for &(k, w) in oc {
                    for &(r, v) in &self.columns[k as usize] {
                        acc.push((r, v * w));
                    }
                }
                acc
            })
            .collect();
        SparseMatrix::from_columns(self.rows, columns)
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(|c| c.is_empty())
    }

    /// True when every entry vanishes in the given field.
    pub fn is_zero_in(&self, field: FieldTag) -> bool {
        match field {
            FieldTag::F2 => self.columns.iter().all(|c| c.iter().all(|e| e.1 % 2 == 0)),
            FieldTag::Rational => self.is_zero(),
        }
    }

    pub fn to_field<F: FieldElem>(&self) -> Vec<Col<F>> {
        self.columns
            .iter()
            .map(|c| {
                c.iter()
                    .map(|&(r, v)| (r, F::from_i64(v)))
                    .filter(|e| !e.1.is_zero())
                    .collect()
            })
            .collect()
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut cols: Vec<Vec<(u32, i64)>> = vec![Vec::new(); self.rows];
        for (j, c) in self.columns.iter().enumerate() {
            for &(r, v) in c {
                cols[r as usize].push((j as u32, v));
            }
        }
        SparseMatrix {
            rows: self.cols,
            cols: self.rows,
            columns: cols,
        }
    }

    /// Rank over the given field.
    pub fn rank(&self, field: FieldTag) -> usize {
        match field {
            FieldTag::F2 => rank_of(self.to_field::<F2>(), self.rows),
            FieldTag::Rational => rank_of(self.to_field::<Q>(), self.rows),
        }
    }
}

/// Returns `a + factor * b`.
pub fn axpy<F: FieldElem>(a: &Col<F>, factor: &F, b: &Col<F>) -> Col<F> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i].clone());
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            out.push((b[j].0, factor.mul(&b[j].1)));
            j += 1;
        } else {
            let v = a[i].1.add(&factor.mul(&b[j].1));
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

pub fn scale<F: FieldElem>(a: &Col<F>, factor: &F) -> Col<F> {
    if factor.is_zero() {
        return Vec::new();
    }
    a.iter().map(|(r, v)| (*r, v.mul(factor))).collect()
}

pub fn entry<F: FieldElem>(a: &Col<F>, row: u32) -> F {
    match a.binary_search_by_key(&row, |e| e.0) {
        Ok(p) => a[p].1.clone(),
        Err(_) => F::zero(),
    }
}

/// Result of a left-to-right column reduction `R = D V`.
#[derive(Clone, Debug)]
pub struct Reduction<F: FieldElem> {
    /// Reduced columns; nonzero columns have distinct pivots (lowest rows).
    pub reduced: Vec<Col<F>>,
    /// Column operations applied, when tracked.
    pub ops: Option<Vec<Col<F>>>,
    /// For each row, the column whose pivot it is.
    pub pivot_col: Vec<Option<u32>>,
}

impl<F: FieldElem> Reduction<F> {
    pub fn rank(&self) -> usize {
        self.reduced.iter().filter(|c| !c.is_empty()).count()
    }

    pub fn pivot(&self, col: usize) -> Option<u32> {
        self.reduced[col].last().map(|e| e.0)
    }
}

/// Persistence-style reduction: each column is reduced against earlier
/// columns until its lowest nonzero row is unique.
pub fn reduce<F: FieldElem>(cols: Vec<Col<F>>, rows: usize, track: bool) -> Reduction<F> {
    let n = cols.len();
    let mut reduced = cols;
    let mut ops: Option<Vec<Col<F>>> =
        track.then(|| (0..n).map(|j| vec![(j as u32, F::one())]).collect());
    let mut pivot_col: Vec<Option<u32>> = vec![None; rows];
    for j in 0..n {
        while let Some((low, val)) = reduced[j].last().cloned() {
            match pivot_col[low as usize] {
                Some(i) => {
                    let i = i as usize;
                    let piv = reduced[i].last().unwrap().1.clone();
                    let factor = val.mul(&piv.inv()).neg();
                    reduced[j] = axpy(&reduced[j], &factor, &reduced[i]);
                    if let Some(v) = ops.as_mut() {
                        v[j] = axpy(&v[j], &factor, &v[i]);
                    }
                }
                None => {
                    pivot_col[low as usize] = Some(j as u32);
                    break;
                }
            }
        }
    }
    Reduction {
        reduced,
        ops,
        pivot_col,
    }
}

pub fn rank_of<F: FieldElem>(cols: Vec<Col<F>>, rows: usize) -> usize {
    reduce(cols, rows, false).rank()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_transpose() {
        let a = SparseMatrix::from_columns(2, vec![vec![(0, 1), (1, 1)], vec![(1, 2)]]);
        let b = SparseMatrix::from_columns(2, vec![vec![(0, 1), (1, -1)]]);
        let p = a.mul(&b);
        assert_eq!(p.columns, vec![vec![(0, 1), (1, -1)]]);
        assert_eq!(a.transpose().transpose(), a);
    }

    #[test]
    fn rank_depends_on_field() {
        // [[1,1],[1,-1]] has rank 2 over Q and 1 over F2
        let m = SparseMatrix::from_columns(2, vec![vec![(0, 1), (1, 1)], vec![(0, 1), (1, -1)]]);
        assert_eq!(m.rank(FieldTag::Rational), 2);
        assert_eq!(m.rank(FieldTag::F2), 1);
    }

    #[test]
    fn tracked_reduction_satisfies_r_eq_dv() {
        let m = SparseMatrix::from_columns(
            3,
            vec![vec![(0, 1), (1, 1)], vec![(1, 1), (2, 1)], vec![(0, 1), (2, -1)]],
        );
        let d = m.to_field::<Q>();
        let red = reduce(d.clone(), 3, true);
        assert_eq!(red.rank(), 2);
        let ops = red.ops.as_ref().unwrap();
        for j in 0..3 {
            let mut acc: Col<Q> = Vec::new();
            for (k, v) in &ops[j] {
                acc = axpy(&acc, v, &d[*k as usize]);
            }
            assert_eq!(acc, red.reduced[j]);
        }
    }

    #[test]
    fn duplicate_entries_sum() {
        let m = SparseMatrix::from_columns(1, vec![vec![(0, 1), (0, -1)]]);
        assert!(m.is_zero());
    }
}
