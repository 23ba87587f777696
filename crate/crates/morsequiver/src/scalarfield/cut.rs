use std::collections::{BTreeMap, BTreeSet};

use super::{Rat, ScalarField};
use crate::chains::SimplicialComplex;
use crate::error::{Error, Result};

/// A complex carrying several PL functions, with each vertex remembering the
/// simplex of the original complex that contains it (its carrier).
#[derive(Clone, Debug)]
pub struct Layered {
    pub complex: SimplicialComplex,
    /// `fields[j][v]` is the value of function `j` at vertex `v`.
    pub fields: Vec<Vec<Rat>>,
    /// Sorted vertex set of the original carrier simplex, per vertex.
    pub carriers: Vec<Vec<u32>>,
}

impl Layered {
    /// Wraps a complex; every vertex is its own carrier.
    pub fn new(complex: SimplicialComplex, fields: Vec<Vec<Rat>>) -> Result<Self> {
        let n = complex.vertex_count();
        if fields.iter().any(|f| f.len() != n) {
            return Err(Error::Invalid("field length differs from vertex count".into()));
        }
        if complex.dim() > 2 {
            return Err(Error::Unsupported("cut subdivision supports dimension at most 2".into()));
        }
        Ok(Layered {
            complex,
            fields,
            carriers: (0..n as u32).map(|v| vec![v]).collect(),
        })
    }

    pub fn from_field(sf: &ScalarField) -> Self {
        Self::new(sf.complex.clone(), vec![sf.values.clone()]).expect("consistent scalar field")
    }

    /// Scalar field for function `j` on the current complex.
    pub fn scalar_field(&self, j: usize) -> ScalarField {
        ScalarField {
            complex: self.complex.clone(),
            values: self.fields[j].clone(),
        }
    }

    /// Carrier of a cell: union of its vertices' carriers.
    pub fn cell_carrier(&self, vertices: &[u32]) -> Vec<u32> {
        let mut set = BTreeSet::new();
        for &v in vertices {
            set.extend(self.carriers[v as usize].iter().copied());
        }
        set.into_iter().collect()
    }

    /// Splits every edge crossing `level` of function `j` at the exact
    /// interpolated point and retriangulates.
    pub fn cut(&self, j: usize, level: &Rat) -> Layered {
        self.cut_where(j, level, |_, _| true)
    }

    /// Like [`Layered::cut`], but only splits crossing edges accepted by
    /// `keep`; the level set is a subcomplex only where every crossing edge
    /// is accepted.
    pub fn cut_where(&self, j: usize, level: &Rat, keep: impl Fn(u32, u32) -> bool) -> Layered {
        let cx = &self.complex;
        let f = &self.fields[j];
        let n = cx.vertex_count();
        let mut fields: Vec<Vec<Rat>> = self.fields.clone();
        let mut carriers = self.carriers.clone();
        let mut split: BTreeMap<(u32, u32), u32> = BTreeMap::new();
        for e in cx.simplices(1) {
            let (a, b) = (e[0], e[1]);
            let (fa, fb) = (&f[a as usize], &f[b as usize]);
            if ((fa < level && level < fb) || (fb < level && level < fa)) && keep(a, b) {
                let t = (level - fa) / (fb - fa);
                let id = (n + split.len()) as u32;
                for g in fields.iter_mut() {
                    let (ga, gb) = (g[a as usize].clone(), g[b as usize].clone());
                    g.push(&ga + &t * (&gb - &ga));
                }
                let mut car: BTreeSet<u32> = carriers[a as usize].iter().copied().collect();
                car.extend(carriers[b as usize].iter().copied());
                carriers.push(car.into_iter().collect());
                split.insert((a, b), id);
            }
        }
        if split.is_empty() {
            return self.clone();
        }
        let mid = |a: u32, b: u32| split.get(&(a.min(b), a.max(b))).copied();
        let mut facets: Vec<Vec<u32>> = Vec::new();
        for s in cx.facets() {
            match s.len() {
                1 => facets.push(s),
                2 => match mid(s[0], s[1]) {
                    Some(m) => {
                        facets.push(vec![s[0], m]);
                        facets.push(vec![m, s[1]]);
                    }
                    None => facets.push(s),
                },
                3 => facets.extend(split_triangle(&s, &mid)),
                _ => unreachable!("dimension checked at construction"),
            }
        }
        let complex = SimplicialComplex::from_facets(fields[0].len(), facets).expect("valid subdivision");
        Layered {
            complex,
            fields,
            carriers,
        }
    }

    /// Cuts successively at each level.
    pub fn cut_all(&self, j: usize, levels: &[Rat]) -> Layered {
        let mut out = self.clone();
        for l in levels {
            out = out.cut(j, l);
        }
        out
    }
}

fn split_triangle(s: &[u32], mid: &impl Fn(u32, u32) -> Option<u32>) -> Vec<Vec<u32>> {
    let cuts: Vec<(usize, u32)> = (0..3)
        .filter_map(|k| {
            let (a, b) = (s[(k + 1) % 3], s[(k + 2) % 3]);
            mid(a, b).map(|m| (k, m))
        })
        .collect();
    match cuts.as_slice() {
        [] => vec![s.to_vec()],
        [(k, m)] => {
            let p = s[*k];
            let (a, b) = (s[(k + 1) % 3], s[(k + 2) % 3]);
            vec![vec![p, a, *m], vec![p, *m, b]]
        }
        [(k1, m1), (k2, m2)] => {
            // the lone vertex is the one shared by both cut edges
            let lone = 3 - k1 - k2;
            let p = s[lone];
            let (q, r) = (s[*k2], s[*k1]);
            // m1 lies on edge opposite k1, i.e. edge (p, q); m2 on (p, r)
            let (m_pq, m_pr) = (*m1, *m2);
            let mut out = vec![vec![p, m_pq, m_pr]];
            if q < r {
                out.push(vec![q, r, m_pr]);
                out.push(vec![q, m_pr, m_pq]);
            } else {
                out.push(vec![r, q, m_pq]);
                out.push(vec![r, m_pq, m_pr]);
            }
            out
        }
        _ => unreachable!("a plane crosses at most two edges of a triangle"),
    }
}

/// Subdivides so that each level set `f = level` is a subcomplex.
pub fn cut_subdivide(sf: &ScalarField, levels: &[Rat]) -> ScalarField {
    Layered::from_field(sf).cut_all(0, levels).scalar_field(0)
}
