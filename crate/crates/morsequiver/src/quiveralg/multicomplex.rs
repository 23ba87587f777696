use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use super::Quiver;
use crate::chains::{ChainComplex, FieldTag, SparseMatrix};
use crate::error::{Error, Result};
use crate::scalarfield::Rat;

/// Dense row-major matrix with rational entries, read in the working field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Rat>,
}

impl Block {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Block {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Block {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    /// Matrix with integer entries given row by row.
    pub fn from_ints(rows: usize, cols: usize, entries: &[i64]) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count");
        Block {
            rows,
            cols,
            data: entries.iter().map(|&x| Rat::from_integer(x.into())).collect(),
        }
    }

    pub fn get(&self, r: usize, c: usize) -> &Rat {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rat) {
        self.data[r * self.cols + c] = v;
    }

    pub fn mul(&self, o: &Block) -> Block {
        assert_eq!(self.cols, o.rows, "shape mismatch in block product");
        let mut out = Block::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if !b.is_zero() {
                        let v = out.get(i, j) + a * b;
                        out.set(i, j, v);
                    }
                }
            }
        }
        out
    }

    /// Adds `o` into the sub-block at (`r0`, `c0`).
    pub fn add_at(&mut self, r0: usize, c0: usize, o: &Block) {
        for i in 0..o.rows {
            for j in 0..o.cols {
                let v = self.get(r0 + i, c0 + j) + o.get(i, j);
                self.set(r0 + i, c0 + j, v);
            }
        }
    }

    /// True iff every entry vanishes in `field`.
    pub fn is_zero_in(&self, field: FieldTag) -> Result<bool> {
        for x in &self.data {
            if !reduce_entry(x, field)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Image of a rational in the field, as a rational (0/1 for F2).
fn reduce_entry(x: &Rat, field: FieldTag) -> Result<Rat> {
    match field {
        FieldTag::Rational => Ok(x.clone()),
        FieldTag::F2 => {
            if x.denom().is_even() {
                return Err(Error::Invalid(format!("entry {x} has no image in F2")));
            }
            Ok(if x.numer().is_odd() { Rat::one() } else { Rat::zero() })
        }
    }
}

/// Component of the structure map along one path, from degree `degree` at
/// `source` to degree `degree - 1` at `target`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathMap {
    /// Arrow indices `a₁…a_r`; empty for a map internal to one vertex.
    pub path: Vec<usize>,
    pub source: usize,
    pub target: usize,
    pub degree: usize,
    pub matrix: Block,
}

/// Graded vector spaces on the vertices of a quiver with degree-lowering
/// maps along paths.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuiverMulticomplex {
    pub quiver: Quiver,
    pub field: FieldTag,
    /// `dims[v][n]` is the dimension of the space at vertex `v`, degree `n`.
    pub dims: Vec<Vec<usize>>,
    pub maps: Vec<PathMap>,
}

impl QuiverMulticomplex {
    pub fn new(quiver: Quiver, field: FieldTag, dims: Vec<Vec<usize>>) -> Result<Self> {
        if dims.len() != quiver.vertex_count() {
            return Err(Error::Invalid("one dimension list per vertex is required".into()));
        }
        Ok(QuiverMulticomplex {
            quiver,
            field,
            dims,
            maps: Vec::new(),
        })
    }

    pub fn dim(&self, v: usize, n: usize) -> usize {
        self.dims[v].get(n).copied().unwrap_or(0)
    }

    pub fn top_degree(&self) -> usize {
        self.dims.iter().map(|d| d.len()).max().unwrap_or(0).saturating_sub(1)
    }

    /// Adds the component along a nonempty path.
    pub fn add_map(&mut self, path: Vec<usize>, degree: usize, matrix: Block) -> Result<()> {
        if path.is_empty() {
            return Err(Error::Invalid("use add_internal for maps along the empty path".into()));
        }
        for w in path.windows(2) {
            if self.quiver.arrows[w[0]].tail != self.quiver.arrows[w[1]].head {
                return Err(Error::Invalid(format!("arrows {} and {} do not compose", w[0], w[1])));
            }
        }
        let (source, target) = self.quiver.path_ends(&path);
        self.push(PathMap {
            path,
            source,
            target,
            degree,
            matrix,
        })
    }

    /// Adds a map internal to vertex `v`.
    pub fn add_internal(&mut self, v: usize, degree: usize, matrix: Block) -> Result<()> {
        self.push(PathMap {
            path: Vec::new(),
            source: v,
            target: v,
            degree,
            matrix,
        })
    }

    fn push(&mut self, m: PathMap) -> Result<()> {
        if m.degree == 0 {
            return Err(Error::Invalid("maps lower the degree, so the source degree must be positive".into()));
        }
        let (r, c) = (self.dim(m.target, m.degree - 1), self.dim(m.source, m.degree));
        if m.matrix.rows != r || m.matrix.cols != c {
            return Err(Error::Invalid(format!(
                "map along {:?} in degree {} is {}x{}, expected {r}x{c}",
                m.path, m.degree, m.matrix.rows, m.matrix.cols
            )));
        }
        self.maps.push(m);
        Ok(())
    }

    /// Offset of each vertex in the total space of degree `n`.
    fn offsets(&self, n: usize) -> (Vec<usize>, usize) {
        let mut offs = Vec::with_capacity(self.dims.len());
        let mut acc = 0;
        for v in 0..self.dims.len() {
            offs.push(acc);
            acc += self.dim(v, n);
        }
        (offs, acc)
    }

    /// Total differential `D_n`, restricted to maps accepted by `keep`.
    fn total_map(&self, n: usize, keep: impl Fn(&PathMap) -> bool) -> Block {
        let (src, cols) = self.offsets(n);
        let (dst, rows) = self.offsets(n.wrapping_sub(1).min(n));
        let mut out = Block::zeros(if n == 0 { 0 } else { rows }, cols);
        if n == 0 {
            return out;
        }
        for m in self.maps.iter().filter(|m| m.degree == n && keep(m)) {
            out.add_at(dst[m.target], src[m.source], &m.matrix);
        }
        out
    }

    /// The total differential in degree `n`.
    pub fn differential(&self, n: usize) -> Block {
        self.total_map(n, |_| true)
    }

    /// Longest path length among the maps.
    fn max_length(&self) -> usize {
        self.maps.iter().map(|m| m.path.len()).max().unwrap_or(0)
    }
}

/// Outcome of [`validate_multicomplex`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MulticomplexReport {
    /// The total map squares to zero.
    pub square_zero: bool,
    /// Each path-length-homogeneous part of the square vanishes.
    pub strict: bool,
}

/// Checks `D² = 0` and the strict (length-homogeneous) version.
pub fn validate_multicomplex(mc: &QuiverMulticomplex) -> Result<MulticomplexReport> {
    let top = mc.top_degree();
    let mut square_zero = true;
    for n in 2..=top {
        if !mc.differential(n - 1).mul(&mc.differential(n)).is_zero_in(mc.field)? {
            square_zero = false;
        }
    }
    let mut strict = true;
    let lmax = mc.max_length();
    for n in 2..=top {
        for j in 0..=2 * lmax {
            let (_, rows) = mc.offsets(n - 2);
            let (_, cols) = mc.offsets(n);
            let mut acc = Block::zeros(rows, cols);
            for m in 0..=j.min(lmax) {
                let k = j - m;
                if k > lmax {
                    continue;
                }
                let outer = mc.total_map(n - 1, |p| p.path.len() == m);
                let inner = mc.total_map(n, |p| p.path.len() == k);
                acc.add_at(0, 0, &outer.mul(&inner));
            }
            if !acc.is_zero_in(mc.field)? {
                strict = false;
            }
        }
    }
    Ok(MulticomplexReport { square_zero, strict })
}

/// The total complex `⊕_v V_{v,n}` with differential `D`.
///
/// Over the rationals, generators are rescaled degree by degree so that all
/// entries become integers; this is an isomorphism of chain complexes.
pub fn total_complex(mc: &QuiverMulticomplex) -> Result<ChainComplex> {
    if !validate_multicomplex(mc)?.square_zero {
        return Err(Error::Invariant("multicomplex differential does not square to zero".into()));
    }
    let top = mc.top_degree();
    let ranks: Vec<usize> = (0..=top).map(|n| mc.offsets(n).1).collect();
    let mut scale_prev: Vec<BigInt> = vec![BigInt::one(); ranks[0]];
    let mut maps = Vec::new();
    for n in 1..=top {
        let d = mc.differential(n);
        let mut scale_cur = Vec::with_capacity(d.cols);
        let mut columns = Vec::with_capacity(d.cols);
        for j in 0..d.cols {
            let entries: Vec<(usize, Rat)> = (0..d.rows)
                .map(|i| (i, reduce_entry(d.get(i, j), mc.field)))
                .map(|(i, x)| x.map(|x| (i, x / Rat::from_integer(scale_prev[i].clone()))))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .filter(|(_, x)| !x.is_zero())
                .collect();
            let lambda = match mc.field {
                FieldTag::F2 => BigInt::one(),
                FieldTag::Rational => entries.iter().fold(BigInt::one(), |l, (_, x)| l.lcm(x.denom())),
            };
            let col: Vec<(u32, i64)> = entries
                .iter()
                .map(|(i, x)| {
                    let v = (x * Rat::from_integer(lambda.clone())).to_integer();
                    v.to_i64()
                        .map(|v| (*i as u32, v))
                        .ok_or_else(|| Error::Unsupported("entry exceeds 64-bit range after rescaling".into()))
                })
                .collect::<Result<Vec<_>>>()?;
            columns.push(col);
            scale_cur.push(lambda);
        }
        maps.push(SparseMatrix::from_columns(d.rows, columns));
        scale_prev = scale_cur;
    }
    ChainComplex::new(mc.field, &ranks, maps)
}

/// A multicomplex with an additional internal differential per vertex that
/// anticommutes with the path maps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DoubleMulticomplex {
    /// Maps along nonempty paths.
    pub horizontal: QuiverMulticomplex,
    /// Internal maps only (empty paths), on the same spaces.
    pub vertical: QuiverMulticomplex,
}

impl DoubleMulticomplex {
    /// True iff both parts square to zero and they anticommute.
    pub fn validate(&self) -> Result<bool> {
        if self.horizontal.dims != self.vertical.dims || self.horizontal.quiver != self.vertical.quiver {
            return Err(Error::Invalid("the two parts live on different spaces".into()));
        }
        if self.vertical.maps.iter().any(|m| !m.path.is_empty()) || self.horizontal.maps.iter().any(|m| m.path.is_empty()) {
            return Err(Error::Invalid("vertical maps must be internal and horizontal maps must follow arrows".into()));
        }
        let mut both = self.horizontal.clone();
        both.maps.extend(self.vertical.maps.iter().cloned());
        Ok(validate_multicomplex(&self.horizontal)?.square_zero
            && validate_multicomplex(&self.vertical)?.square_zero
            && validate_multicomplex(&both)?.square_zero)
    }
}
