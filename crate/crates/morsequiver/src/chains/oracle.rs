use super::complex::{SimplicialComplex, Subcomplex};
use super::poly::PoincarePolynomial;

/// Dense F2 matrix with bit-packed rows.
#[derive(Clone, Debug)]
struct BitMatrix {
    cols: usize,
    rows: Vec<Vec<u64>>,
}

impl BitMatrix {
    fn new(rows: usize, cols: usize) -> Self {
        BitMatrix {
            cols,
            rows: vec![vec![0; cols.div_ceil(64)]; rows],
        }
    }

    fn flip(&mut self, r: usize, c: usize) {
        self.rows[r][c / 64] ^= 1 << (c % 64);
    }

    fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r][c / 64] >> (c % 64) & 1 == 1
    }

    /// Rank by full row echelon reduction.
    fn rank(mut self) -> usize {
        let mut rank = 0;
        for c in 0..self.cols {
            let Some(p) = (rank..self.rows.len()).find(|&r| self.get(r, c)) else {
                continue;
            };
            self.rows.swap(rank, p);
            let pivot = self.rows[rank].clone();
            for r in 0..self.rows.len() {
                if r != rank && self.get(r, c) {
                    for (w, pw) in self.rows[r].iter_mut().zip(&pivot) {
                        *w ^= pw;
                    }
                }
            }
            rank += 1;
        }
        rank
    }
}

/// Brute-force F2 relative homology by dense elimination, independent of the
/// sparse pipeline. Intended for small complexes only.
pub fn oracle_relative_homology_f2(cx: &SimplicialComplex, x: &Subcomplex, a: &Subcomplex) -> PoincarePolynomial {
    let gens: Vec<Vec<usize>> = (0..=cx.dim())
        .map(|d| {
            (0..cx.count(d))
                .filter(|&i| x.contains(d, i) && !a.contains(d, i))
                .collect()
        })
        .collect();
    let mut ranks = vec![0usize; gens.len() + 1];
    for d in 1..gens.len() {
        let pos: std::collections::HashMap<&[u32], usize> = gens[d - 1]
            .iter()
            .enumerate()
            .map(|(r, &i)| (cx.simplex(d - 1, i), r))
            .collect();
        let mut m = BitMatrix::new(gens[d - 1].len(), gens[d].len());
        for (c, &i) in gens[d].iter().enumerate() {
            let s = cx.simplex(d, i);
            for skip in 0..s.len() {
                let face: Vec<u32> = s
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != skip)
                    .map(|(_, &v)| v)
                    .collect();
                if let Some(&r) = pos.get(face.as_slice()) {
                    m.flip(r, c);
                }
            }
        }
        ranks[d] = m.rank();
    }
    PoincarePolynomial::new(
        (0..gens.len())
            .map(|d| (gens[d].len() - ranks[d] - ranks[d + 1]) as u64)
            .collect(),
    )
}
