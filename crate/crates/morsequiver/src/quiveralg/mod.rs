//! Acyclic quivers, ℝ-quivers, path counts, powers, final subquivers and
//! multicomplexes supported on quivers.
//!
//! An arrow runs from its tail `t(a)` to its head `h(a)`. A path `a₁…a_d`
//! satisfies `t(a_k) = h(a_{k+1})`: it is traversed from `a_d` to `a₁`, so
//! it starts at `t(a_d)` and ends at `h(a₁)`.

mod multicomplex;

pub use multicomplex::{
    total_complex, validate_multicomplex, Block, DoubleMulticomplex, MulticomplexReport, PathMap, QuiverMulticomplex,
};

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalarfield::{fmt_rat, Rat};

/// One arrow, from `tail` to `head`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Arrow {
    pub tail: usize,
    pub head: usize,
}

/// A finite quiver with labelled vertices; parallel arrows allowed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quiver {
    pub labels: Vec<String>,
    pub arrows: Vec<Arrow>,
}

impl Quiver {
    pub fn new(labels: Vec<String>) -> Self {
        Quiver {
            labels,
            arrows: Vec::new(),
        }
    }

    /// Quiver on `n` vertices labelled by index.
    pub fn with_vertices(n: usize) -> Self {
        Self::new((0..n).map(|i| i.to_string()).collect())
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn add_vertex(&mut self, label: impl Into<String>) -> usize {
        self.labels.push(label.into());
        self.labels.len() - 1
    }

    pub fn add_arrow(&mut self, tail: usize, head: usize) -> usize {
        assert!(tail < self.vertex_count() && head < self.vertex_count(), "arrow endpoint out of range");
        self.arrows.push(Arrow { tail, head });
        self.arrows.len() - 1
    }

    /// Adds `count` parallel arrows.
    pub fn add_arrows(&mut self, tail: usize, head: usize, count: usize) {
        for _ in 0..count {
            self.add_arrow(tail, head);
        }
    }

    /// Number of arrows from `tail` to `head`.
    pub fn multiplicity(&self, tail: usize, head: usize) -> usize {
        self.arrows.iter().filter(|a| a.tail == tail && a.head == head).count()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.arrows.iter().filter(|a| a.head == v).count()
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.arrows.iter().filter(|a| a.tail == v).count()
    }

    /// Arrow multiplicities as a dense matrix `m[tail][head]`.
    pub fn adjacency(&self) -> Vec<Vec<u128>> {
        let n = self.vertex_count();
        let mut m = vec![vec![0u128; n]; n];
        for a in &self.arrows {
            m[a.tail][a.head] += 1;
        }
        m
    }

    /// Vertices in an order where every arrow goes forward, if acyclic.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.vertex_count();
        let mut indeg = vec![0usize; n];
        for a in &self.arrows {
            indeg[a.head] += 1;
        }
        let mut ready: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).rev().collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = ready.pop() {
            order.push(v);
            for a in self.arrows.iter().filter(|a| a.tail == v) {
                indeg[a.head] -= 1;
                if indeg[a.head] == 0 {
                    ready.push(a.head);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    /// Length of the longest directed path; `None` for cyclic quivers.
    pub fn longest_path(&self) -> Option<usize> {
        let order = self.topological_order()?;
        let mut best = vec![0usize; self.vertex_count()];
        for &v in order.iter().rev() {
            best[v] = self
                .arrows
                .iter()
                .filter(|a| a.tail == v)
                .map(|a| best[a.head] + 1)
                .max()
                .unwrap_or(0);
        }
        Some(best.into_iter().max().unwrap_or(0))
    }

    /// All paths of length `r`, each as arrow indices `a₁…a_r` in path order.
    pub fn paths(&self, r: usize) -> Vec<Vec<usize>> {
        assert!(r >= 1, "paths have length at least 1");
        // extend by prepending arrows: a new a₁ must satisfy t(a₁) = h(old a₁)
        let mut current: Vec<Vec<usize>> = (0..self.arrows.len()).map(|a| vec![a]).collect();
        for _ in 1..r {
            let mut next = Vec::new();
            for p in &current {
                let end = self.arrows[p[0]].head;
                for (b, arr) in self.arrows.iter().enumerate() {
                    if arr.tail == end {
                        let mut q = Vec::with_capacity(p.len() + 1);
                        q.push(b);
                        q.extend_from_slice(p);
                        next.push(q);
                    }
                }
            }
            current = next;
        }
        current.sort_by_key(|p| {
            let (s, t) = self.path_ends(p);
            (s, t, p.clone())
        });
        current
    }

    /// (start, end) vertices of a path `a₁…a_d`.
    pub fn path_ends(&self, path: &[usize]) -> (usize, usize) {
        (self.arrows[*path.last().unwrap()].tail, self.arrows[path[0]].head)
    }

    /// A shortest path from `from` to `to` in path order `a₁…a_d`, taking
    /// the lowest arrow index at each step; `None` if `to` is unreachable or
    /// equals `from`.
    pub fn shortest_path(&self, from: usize, to: usize) -> Option<Vec<usize>> {
        let mut via: Vec<Option<usize>> = vec![None; self.vertex_count()];
        let mut seen = vec![false; self.vertex_count()];
        seen[from] = true;
        let mut queue = std::collections::VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            for (i, a) in self.arrows.iter().enumerate() {
                if a.tail == v && !seen[a.head] {
                    seen[a.head] = true;
                    via[a.head] = Some(i);
                    queue.push_back(a.head);
                }
            }
        }
        if from == to || !seen[to] {
            return None;
        }
        // walking back from `to` lists a₁ first
        let mut path = Vec::new();
        let mut v = to;
        while let Some(a) = via[v] {
            path.push(a);
            v = self.arrows[a].tail;
        }
        Some(path)
    }

    /// Restriction to a vertex subset (arrows between kept vertices).
    pub fn induced(&self, vertices: &[usize]) -> Quiver {
        let mut index = vec![None; self.vertex_count()];
        let mut q = Quiver::default();
        for &v in vertices {
            index[v] = Some(q.add_vertex(self.labels[v].clone()));
        }
        for a in &self.arrows {
            if let (Some(t), Some(h)) = (index[a.tail], index[a.head]) {
                q.add_arrow(t, h);
            }
        }
        q
    }

    /// Graphviz text; parallel arrows are emitted as parallel edges.
    pub fn to_dot(&self, name: &str) -> String {
        let mut out = format!("digraph {name} {{\n");
        for (i, l) in self.labels.iter().enumerate() {
            let _ = writeln!(out, "  n{i} [label=\"{}\"];", l.replace('"', "\\\""));
        }
        let mut arrows = self.arrows.clone();
        arrows.sort();
        for a in arrows {
            let _ = writeln!(out, "  n{} -> n{};", a.tail, a.head);
        }
        out.push_str("}\n");
        out
    }
}

/// True iff the quiver has no oriented cycle.
pub fn validate_acyclic(q: &Quiver) -> bool {
    q.topological_order().is_some()
}

fn mat_mul(a: &[Vec<u128>], b: &[Vec<u128>]) -> Vec<Vec<u128>> {
    let n = a.len();
    let mut c = vec![vec![0u128; n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] == 0 {
                continue;
            }
            for j in 0..n {
                c[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    c
}

/// Matrix of path counts of length exactly `r`.
pub fn path_count_matrix(q: &Quiver, r: usize) -> Vec<Vec<u128>> {
    assert!(r >= 1, "path length must be positive");
    let adj = q.adjacency();
    let mut m = adj.clone();
    for _ in 1..r {
        m = mat_mul(&m, &adj);
    }
    m
}

/// Number of directed paths of length exactly `r` from `from` to `to`.
pub fn path_count(q: &Quiver, from: usize, to: usize, r: usize) -> u128 {
    path_count_matrix(q, r)[from][to]
}

/// Same vertices, one arrow per path of length `r`.
pub fn power_quiver(q: &Quiver, r: usize) -> Quiver {
    let m = path_count_matrix(q, r);
    let mut out = Quiver::new(q.labels.clone());
    for (t, row) in m.iter().enumerate() {
        for (h, &c) in row.iter().enumerate() {
            out.add_arrows(t, h, c as usize);
        }
    }
    out
}

/// A quiver graded by rationals, strictly decreasing along arrows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RQuiver {
    pub quiver: Quiver,
    pub grading: Vec<Rat>,
}

impl RQuiver {
    pub fn new(quiver: Quiver, grading: Vec<Rat>) -> Result<Self> {
        if grading.len() != quiver.vertex_count() {
            return Err(Error::Invalid("grading length differs from vertex count".into()));
        }
        for a in &quiver.arrows {
            if grading[a.tail] <= grading[a.head] {
                return Err(Error::Invalid(format!(
                    "arrow {} -> {} does not decrease the grading ({} to {})",
                    a.tail,
                    a.head,
                    fmt_rat(&grading[a.tail]),
                    fmt_rat(&grading[a.head])
                )));
            }
        }
        Ok(RQuiver { quiver, grading })
    }
}

/// Vertex subset closed under following arrows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinalSubquiver {
    pub vertices: Vec<usize>,
}

/// True iff every arrow leaving the set lands in it.
pub fn is_final(q: &Quiver, vertices: &[usize]) -> bool {
    let mut inside = vec![false; q.vertex_count()];
    for &v in vertices {
        inside[v] = true;
    }
    q.arrows.iter().all(|a| !inside[a.tail] || inside[a.head])
}

/// Vertices graded strictly below `threshold`.
pub fn final_subquiver(rq: &RQuiver, threshold: &Rat) -> FinalSubquiver {
    let vertices: Vec<usize> = (0..rq.quiver.vertex_count()).filter(|&v| &rq.grading[v] < threshold).collect();
    debug_assert!(is_final(&rq.quiver, &vertices));
    FinalSubquiver { vertices }
}

/// A vertex map from a finer quiver onto a coarser one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuiverFibering {
    pub vertex_map: Vec<usize>,
}

impl QuiverFibering {
    /// Checks surjectivity and that each arrow maps to an arrow or collapses
    /// within a fibre.
    pub fn validate(&self, fine: &Quiver, coarse: &Quiver) -> bool {
        if self.vertex_map.len() != fine.vertex_count() || self.vertex_map.iter().any(|&v| v >= coarse.vertex_count()) {
            return false;
        }
        let mut hit = vec![false; coarse.vertex_count()];
        for &v in &self.vertex_map {
            hit[v] = true;
        }
        hit.into_iter().all(|h| h)
            && fine.arrows.iter().all(|a| {
                let (t, h) = (self.vertex_map[a.tail], self.vertex_map[a.head]);
                t == h || coarse.multiplicity(t, h) > 0
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalarfield::int;

    fn chain(n: usize) -> Quiver {
        let mut q = Quiver::with_vertices(n);
        for i in 0..n - 1 {
            q.add_arrow(i, i + 1);
        }
        q
    }

    #[test]
    fn acyclicity() {
        let mut q = Quiver::with_vertices(2);
        q.add_arrow(0, 1);
        assert!(validate_acyclic(&q));
        let mut loop1 = Quiver::with_vertices(1);
        loop1.add_arrow(0, 0);
        assert!(!validate_acyclic(&loop1));
        assert_eq!(loop1.longest_path(), None);
    }

    #[test]
    fn path_counts_multiply() {
        let mut q = Quiver::with_vertices(3);
        q.add_arrows(0, 1, 2);
        q.add_arrows(1, 2, 3);
        assert_eq!(path_count(&q, 0, 2, 2), 6);
        assert_eq!(q.paths(2).len(), 6);
        for p in q.paths(2) {
            assert_eq!(q.path_ends(&p), (0, 2));
            // a₂ is traversed first
            assert_eq!(q.arrows[p[1]].tail, 0);
        }
    }

    #[test]
    fn chain_powers() {
        let q = chain(4);
        assert_eq!(power_quiver(&q, 3).arrows.len(), 1);
        assert!(power_quiver(&q, 4).arrows.is_empty());
        assert_eq!(q.longest_path(), Some(3));
    }

    #[test]
    fn final_subquivers() {
        let q = chain(3);
        let rq = RQuiver::new(q, vec![int(2), int(1), int(0)]).unwrap();
        assert_eq!(final_subquiver(&rq, &int(-1)).vertices, Vec::<usize>::new());
        assert_eq!(final_subquiver(&rq, &int(3)).vertices, vec![0, 1, 2]);
        assert_eq!(final_subquiver(&rq, &crate::scalarfield::rat(3, 2)).vertices, vec![1, 2]);
        assert!(RQuiver::new(chain(2), vec![int(0), int(1)]).is_err());
    }

    #[test]
    fn dot_output() {
        let mut q = Quiver::new(vec!["C0@1".into(), "C1@0".into()]);
        q.add_arrows(0, 1, 2);
        let dot = q.to_dot("g");
        assert_eq!(dot.matches("n0 -> n1").count(), 2);
        assert!(dot.contains("label=\"C0@1\""));
    }

    #[test]
    fn fibering() {
        let fine = chain(3);
        let coarse = chain(2);
        assert!(QuiverFibering { vertex_map: vec![0, 0, 1] }.validate(&fine, &coarse));
        assert!(!QuiverFibering { vertex_map: vec![1, 0, 0] }.validate(&fine, &coarse));
    }
}
