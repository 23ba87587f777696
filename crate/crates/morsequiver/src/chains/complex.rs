use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};

/// A simplex given by its strictly increasing vertex list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex {
    vertices: Vec<u32>,
}

impl Simplex {
    pub fn new(mut vertices: Vec<u32>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::Invalid("empty simplex".into()));
        }
        vertices.sort_unstable();
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Invalid(format!("repeated vertex in simplex {vertices:?}")));
        }
        Ok(Simplex { vertices })
    }

    pub fn vertices(&self) -> &[u32] {
        &self.vertices
    }

    pub fn dimension(&self) -> usize {
        self.vertices.len() - 1
    }
}

/// A finite simplicial complex with simplices indexed per dimension.
///
/// Simplices of each dimension are stored in lexicographic order of their
/// sorted vertex lists, so indices are canonical for a given simplex set.
#[derive(Clone, Debug)]
pub struct SimplicialComplex {
    vertex_count: usize,
    simplices: Vec<Vec<Simplex>>,
    index: Vec<HashMap<Vec<u32>, usize>>,
    cofaces: Vec<Vec<Vec<u32>>>,
    offsets: Vec<usize>,
}

impl SimplicialComplex {
    /// Builds the face closure of the given simplices. Every vertex id in
    /// `0..vertex_count` becomes a 0-simplex.
    pub fn from_facets<I>(vertex_count: usize, facets: I) -> Result<Self>
    where
        I: IntoIterator<Item = Vec<u32>>,
    {
        let mut sets: Vec<BTreeSet<Vec<u32>>> = vec![BTreeSet::new()];
        for v in 0..vertex_count as u32 {
            sets[0].insert(vec![v]);
        }
        for facet in facets {
            let s = Simplex::new(facet)?;
            if let Some(&v) = s.vertices.iter().find(|&&v| v as usize >= vertex_count) {
                return Err(Error::Invalid(format!("vertex {v} out of range")));
            }
            let d = s.dimension();
            while sets.len() <= d {
                sets.push(BTreeSet::new());
            }
            if sets[d].contains(&s.vertices) {
                continue;
            }
            // enumerate all nonempty faces via bitmasks
            let n = s.vertices.len();
            for mask in 1u32..(1u32 << n) {
                let face: Vec<u32> = (0..n)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| s.vertices[i])
                    .collect();
                sets[face.len() - 1].insert(face);
            }
        }
        while sets.len() > 1 && sets.last().is_some_and(|s| s.is_empty()) {
            sets.pop();
        }
        let simplices: Vec<Vec<Simplex>> = sets
            .into_iter()
            .map(|s| s.into_iter().map(|vertices| Simplex { vertices }).collect())
            .collect();
        Ok(Self::assemble(vertex_count, simplices))
    }

    fn assemble(vertex_count: usize, simplices: Vec<Vec<Simplex>>) -> Self {
        let index: Vec<HashMap<Vec<u32>, usize>> = simplices
            .iter()
            .map(|level| {
                level
                    .iter()
                    .enumerate()
                    .map(|(i, s)| (s.vertices.clone(), i))
                    .collect()
            })
            .collect();
        let mut cofaces: Vec<Vec<Vec<u32>>> =
            simplices.iter().map(|l| vec![Vec::new(); l.len()]).collect();
        for d in 1..simplices.len() {
            for (i, s) in simplices[d].iter().enumerate() {
                for skip in 0..s.vertices.len() {
                    let face = face_without(&s.vertices, skip);
                    let fi = index[d - 1][&face];
                    cofaces[d - 1][fi].push(i as u32);
                }
            }
        }
        let mut offsets = Vec::with_capacity(simplices.len() + 1);
        let mut acc = 0;
        for level in &simplices {
            offsets.push(acc);
            acc += level.len();
        }
        offsets.push(acc);
        SimplicialComplex {
            vertex_count,
            simplices,
            index,
            cofaces,
            offsets,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// Top dimension (0 for a complex with only vertices).
    pub fn dim(&self) -> usize {
        self.simplices.len().saturating_sub(1)
    }

    pub fn count(&self, d: usize) -> usize {
        self.simplices.get(d).map_or(0, |l| l.len())
    }

    pub fn num_cells(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn simplex(&self, d: usize, i: usize) -> &[u32] {
        &self.simplices[d][i].vertices
    }

    pub fn simplices(&self, d: usize) -> impl Iterator<Item = &[u32]> {
        self.simplices
            .get(d)
            .into_iter()
            .flat_map(|l| l.iter().map(|s| s.vertices.as_slice()))
    }

    pub fn index_of(&self, vertices: &[u32]) -> Option<usize> {
        let d = vertices.len().checked_sub(1)?;
        self.index.get(d)?.get(vertices).copied()
    }

    /// Faces of codimension one with their incidence signs `(-1)^position`.
    pub fn boundary(&self, d: usize, i: usize) -> Vec<(usize, i64)> {
        if d == 0 {
            return Vec::new();
        }
        let s = &self.simplices[d][i].vertices;
        (0..s.len())
            .map(|skip| {
                let face = face_without(s, skip);
                let sign = if skip % 2 == 0 { 1 } else { -1 };
                (self.index[d - 1][&face], sign)
            })
            .collect()
    }

    /// Indices of the (d+1)-simplices having simplex (d, i) as a face.
    pub fn cofaces(&self, d: usize, i: usize) -> &[u32] {
        self.cofaces
            .get(d)
            .and_then(|l| l.get(i))
            .map_or(&[], |v| v.as_slice())
    }

    /// Global cell id of simplex (d, i).
    pub fn cell_id(&self, d: usize, i: usize) -> usize {
        self.offsets[d] + i
    }

    /// Inverse of [`cell_id`](Self::cell_id).
    pub fn cell_of(&self, id: usize) -> (usize, usize) {
        let d = self.offsets.partition_point(|&o| o <= id) - 1;
        (d, id - self.offsets[d])
    }

    pub fn cell_vertices(&self, id: usize) -> &[u32] {
        let (d, i) = self.cell_of(id);
        self.simplex(d, i)
    }

    /// Neighbouring vertices of `v` (vertices sharing an edge).
    pub fn neighbors(&self, v: u32) -> Vec<u32> {
        let mut out: Vec<u32> = self
            .cofaces(0, v as usize)
            .iter()
            .map(|&e| {
                let s = self.simplex(1, e as usize);
                if s[0] == v {
                    s[1]
                } else {
                    s[0]
                }
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// All cells (global ids) containing vertex `v`, i.e. the open star.
    pub fn open_star(&self, v: u32) -> Vec<usize> {
        let mut out = vec![self.cell_id(0, v as usize)];
        let mut frontier = vec![v as usize];
        for d in 0..self.dim() {
            let mut next: BTreeSet<usize> = BTreeSet::new();
            for &i in &frontier {
                next.extend(self.cofaces(d, i).iter().map(|&c| c as usize));
            }
            out.extend(next.iter().map(|&i| self.cell_id(d + 1, i)));
            frontier = next.into_iter().collect();
        }
        out
    }

    /// Euler characteristic of the whole complex.
    pub fn euler_characteristic(&self) -> i64 {
        (0..=self.dim())
            .map(|d| {
                let c = self.count(d) as i64;
                if d % 2 == 0 {
                    c
                } else {
                    -c
                }
            })
            .sum()
    }

    /// Maximal simplices (those without cofaces), by dimension then index.
    pub fn facets(&self) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        for d in 0..=self.dim() {
            for (i, s) in self.simplices[d].iter().enumerate() {
                if self.cofaces(d, i).is_empty() {
                    out.push(s.vertices.clone());
                }
            }
        }
        out
    }
}

pub(crate) fn face_without(s: &[u32], skip: usize) -> Vec<u32> {
    s.iter()
        .enumerate()
        .filter(|&(j, _)| j != skip)
        .map(|(_, &v)| v)
        .collect()
}

/// A subset of cells of a parent complex, stored as per-dimension masks.
///
/// The parent complex is not stored; callers pass it explicitly.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subcomplex {
    masks: Vec<Vec<bool>>,
}

impl Subcomplex {
    pub fn empty(cx: &SimplicialComplex) -> Self {
        Subcomplex {
            masks: (0..=cx.dim()).map(|d| vec![false; cx.count(d)]).collect(),
        }
    }

    pub fn full(cx: &SimplicialComplex) -> Self {
        Subcomplex {
            masks: (0..=cx.dim()).map(|d| vec![true; cx.count(d)]).collect(),
        }
    }

    /// Largest subcomplex whose vertices all satisfy `pred`.
    pub fn from_vertex_predicate<P: Fn(u32) -> bool>(cx: &SimplicialComplex, pred: P) -> Self {
        let vmask: Vec<bool> = (0..cx.vertex_count() as u32).map(&pred).collect();
        Subcomplex {
            masks: (0..=cx.dim())
                .map(|d| {
                    cx.simplices(d)
                        .map(|s| s.iter().all(|&v| vmask[v as usize]))
                        .collect()
                })
                .collect(),
        }
    }

    /// Set of cells given by global ids, without closing.
    pub fn from_cells<I: IntoIterator<Item = usize>>(cx: &SimplicialComplex, cells: I) -> Self {
        let mut s = Self::empty(cx);
        for id in cells {
            let (d, i) = cx.cell_of(id);
            s.masks[d][i] = true;
        }
        s
    }

    /// Face closure of the given global cells.
    pub fn closure_of<I: IntoIterator<Item = usize>>(cx: &SimplicialComplex, cells: I) -> Self {
        let mut s = Self::from_cells(cx, cells);
        s.close(cx);
        s
    }

    /// Adds all faces of member cells.
    pub fn close(&mut self, cx: &SimplicialComplex) {
        for d in (1..self.masks.len()).rev() {
            for i in 0..self.masks[d].len() {
                if self.masks[d][i] {
                    for (f, _) in cx.boundary(d, i) {
                        self.masks[d - 1][f] = true;
                    }
                }
            }
        }
    }

    pub fn contains(&self, d: usize, i: usize) -> bool {
        self.masks.get(d).and_then(|m| m.get(i)).copied().unwrap_or(false)
    }

    pub fn contains_cell(&self, cx: &SimplicialComplex, id: usize) -> bool {
        let (d, i) = cx.cell_of(id);
        self.contains(d, i)
    }

    pub fn contains_vertex(&self, v: u32) -> bool {
        self.contains(0, v as usize)
    }

    pub fn insert(&mut self, d: usize, i: usize) {
        self.masks[d][i] = true;
    }

    pub fn remove(&mut self, d: usize, i: usize) {
        self.masks[d][i] = false;
    }

    pub fn mask(&self, d: usize) -> &[bool] {
        self.masks.get(d).map_or(&[], |m| m.as_slice())
    }

    pub fn count(&self, d: usize) -> usize {
        self.mask(d).iter().filter(|&&b| b).count()
    }

    pub fn total(&self) -> usize {
        self.masks.iter().map(|m| m.iter().filter(|&&b| b).count()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.total() == 0
    }

    /// Member cells as global ids in increasing order.
    pub fn cells(&self, cx: &SimplicialComplex) -> Vec<usize> {
        let mut out = Vec::new();
        for (d, m) in self.masks.iter().enumerate() {
            for (i, &b) in m.iter().enumerate() {
                if b {
                    out.push(cx.cell_id(d, i));
                }
            }
        }
        out
    }

    pub fn vertices(&self) -> Vec<u32> {
        self.mask(0)
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| i as u32)
            .collect()
    }

    pub fn is_face_closed(&self, cx: &SimplicialComplex) -> bool {
        (1..self.masks.len()).all(|d| {
            (0..self.masks[d].len())
                .all(|i| !self.masks[d][i] || cx.boundary(d, i).iter().all(|&(f, _)| self.masks[d - 1][f]))
        })
    }

    pub fn is_subset(&self, other: &Subcomplex) -> bool {
        self.masks.iter().enumerate().all(|(d, m)| {
            m.iter()
                .enumerate()
                .all(|(i, &b)| !b || other.contains(d, i))
        })
    }

    pub fn union(&self, other: &Subcomplex) -> Subcomplex {
        self.zip(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &Subcomplex) -> Subcomplex {
        self.zip(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &Subcomplex) -> Subcomplex {
        self.zip(other, |a, b| a && !b)
    }

    fn zip(&self, other: &Subcomplex, op: impl Fn(bool, bool) -> bool) -> Subcomplex {
        Subcomplex {
            masks: self
                .masks
                .iter()
                .enumerate()
                .map(|(d, m)| {
                    m.iter()
                        .enumerate()
                        .map(|(i, &b)| op(b, other.contains(d, i)))
                        .collect()
                })
                .collect(),
        }
    }

    /// Alternating sum of member counts per dimension.
    pub fn euler_characteristic(&self) -> i64 {
        (0..self.masks.len())
            .map(|d| {
                let c = self.count(d) as i64;
                if d % 2 == 0 {
                    c
                } else {
                    -c
                }
            })
            .sum()
    }

    /// Connected components (through shared vertices) of a face-closed set,
    /// each returned as a subcomplex. Ordered by smallest vertex.
    pub fn connected_components(&self, cx: &SimplicialComplex) -> Vec<Subcomplex> {
        let verts = self.vertices();
        let mut uf = crate::util::UnionFind::new(cx.vertex_count());
        for (i, &b) in self.mask(1).iter().enumerate() {
            if b {
                let e = cx.simplex(1, i);
                uf.union(e[0] as usize, e[1] as usize);
            }
        }
        let mut roots: Vec<usize> = Vec::new();
        let mut root_of = HashMap::new();
        for &v in &verts {
            let r = uf.find(v as usize);
            if !root_of.contains_key(&r) {
                root_of.insert(r, roots.len());
                roots.push(r);
            }
        }
        let mut out = vec![Subcomplex::empty(cx); roots.len()];
        for d in 0..self.masks.len() {
            for i in 0..self.masks[d].len() {
                if self.masks[d][i] {
                    let v = cx.simplex(d, i)[0];
                    let c = root_of[&uf.find(v as usize)];
                    out[c].masks[d][i] = true;
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> SimplicialComplex {
        SimplicialComplex::from_facets(3, vec![vec![0, 1, 2]]).unwrap()
    }

    #[test]
    fn closure_counts() {
        let cx = triangle();
        assert_eq!((cx.count(0), cx.count(1), cx.count(2)), (3, 3, 1));
        assert_eq!(cx.euler_characteristic(), 1);
        assert_eq!(cx.num_cells(), 7);
    }

    #[test]
    fn boundary_signs_follow_sorted_order() {
        let cx = triangle();
        let b = cx.boundary(2, 0);
        let faces: Vec<(Vec<u32>, i64)> = b
            .iter()
            .map(|&(f, s)| (cx.simplex(1, f).to_vec(), s))
            .collect();
        assert_eq!(
            faces,
            vec![(vec![1, 2], 1), (vec![0, 2], -1), (vec![0, 1], 1)]
        );
    }

    #[test]
    fn cell_ids_round_trip() {
        let cx = triangle();
        for id in 0..cx.num_cells() {
            let (d, i) = cx.cell_of(id);
            assert_eq!(cx.cell_id(d, i), id);
        }
    }

    #[test]
    fn rejects_bad_simplices() {
        assert!(SimplicialComplex::from_facets(2, vec![vec![0, 0]]).is_err());
        assert!(SimplicialComplex::from_facets(2, vec![vec![0, 5]]).is_err());
    }

    #[test]
    fn subcomplex_ops() {
        let cx = triangle();
        let a = Subcomplex::from_vertex_predicate(&cx, |v| v < 2);
        assert_eq!(a.total(), 3);
        assert!(a.is_face_closed(&cx));
        let full = Subcomplex::full(&cx);
        assert!(a.is_subset(&full));
        assert_eq!(full.difference(&a).total(), 4);
        let open = Subcomplex::from_cells(&cx, [cx.cell_id(2, 0)]);
        assert!(!open.is_face_closed(&cx));
        assert_eq!(Subcomplex::closure_of(&cx, [cx.cell_id(2, 0)]), full);
    }

    #[test]
    fn components_and_stars() {
        let cx = SimplicialComplex::from_facets(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        let comps = Subcomplex::full(&cx).connected_components(&cx);
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[1].vertices(), vec![2, 3]);
        assert_eq!(cx.open_star(0).len(), 2);
        assert_eq!(cx.neighbors(1), vec![0]);
    }
}
