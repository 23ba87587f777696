use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Rat, ScalarField};
use crate::chains::{relative_homology, subcomplex_homology, FieldTag, PoincarePolynomial, SimplicialComplex, Subcomplex};
use crate::error::{Error, Result};
use crate::util::UnionFind;

/// Local type of a critical component.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CriticalKind {
    Min,
    Max,
    /// Lower link with `m + 1` arcs, `m = 1`.
    Saddle(u32),
    /// Lower link with `m + 1 ≥ 3` arcs.
    Degenerate(u32),
    BottCircleMin,
    BottCircleMax,
    Other,
}

impl CriticalKind {
    /// Kinds whose downward flow lines come from two or more directions.
    pub fn is_saddle_type(self) -> bool {
        matches!(self, CriticalKind::Saddle(_) | CriticalKind::Degenerate(_) | CriticalKind::Other)
    }

    pub fn is_min_type(self) -> bool {
        matches!(self, CriticalKind::Min | CriticalKind::BottCircleMin)
    }

    pub fn is_max_type(self) -> bool {
        matches!(self, CriticalKind::Max | CriticalKind::BottCircleMax)
    }

    /// Morse index for nondegenerate points.
    pub fn morse_index(self) -> Option<usize> {
        match self {
            CriticalKind::Min => Some(0),
            CriticalKind::Saddle(1) => Some(1),
            CriticalKind::Max => Some(2),
            _ => None,
        }
    }

    fn from_saddle_multiplicity(m: u32) -> Self {
        if m == 1 {
            CriticalKind::Saddle(1)
        } else {
            CriticalKind::Degenerate(m)
        }
    }
}

impl fmt::Display for CriticalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CriticalKind::Min => write!(f, "Min"),
            CriticalKind::Max => write!(f, "Max"),
            CriticalKind::Saddle(m) => write!(f, "Saddle({m})"),
            CriticalKind::Degenerate(m) => write!(f, "Degenerate({m})"),
            CriticalKind::BottCircleMin => write!(f, "BottCircleMin"),
            CriticalKind::BottCircleMax => write!(f, "BottCircleMax"),
            CriticalKind::Other => write!(f, "Other"),
        }
    }
}

/// A connected cluster of critical vertices at one value.
#[derive(Clone, Debug)]
pub struct CriticalComponent {
    pub id: usize,
    /// Full subcomplex spanned by the component's vertices.
    pub cells: Subcomplex,
    pub vertices: Vec<u32>,
    pub value: Rat,
    pub kind: CriticalKind,
}

/// All critical components with the sorted critical values and midpoints.
#[derive(Clone, Debug)]
pub struct CriticalReport {
    pub components: Vec<CriticalComponent>,
    pub critical_values: Vec<Rat>,
    pub midpoints: Vec<Rat>,
    /// Component id per vertex, `None` for regular vertices.
    pub component_of: Vec<Option<usize>>,
}

impl CriticalReport {
    pub fn component(&self, id: usize) -> &CriticalComponent {
        &self.components[id]
    }

    /// Index k (0-based) of a critical value in `critical_values`.
    pub fn level_index(&self, value: &Rat) -> Option<usize> {
        self.critical_values.binary_search(value).ok()
    }

    /// Components ordered by (value, id).
    pub fn value_order(&self) -> Vec<usize> {
        let mut ids: Vec<usize> = (0..self.components.len()).collect();
        ids.sort_by(|&a, &b| (&self.components[a].value, a).cmp(&(&self.components[b].value, b)));
        ids
    }

    /// Gap from component `id`'s value to the nearest other critical value.
    pub fn gap(&self, id: usize) -> Option<Rat> {
        let c = &self.components[id].value;
        self.critical_values
            .iter()
            .filter(|v| *v != c)
            .map(|v| if v > c { v - c } else { c - v })
            .min()
    }
}

/// Link of a vertex in a 2-dimensional complex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Link {
    /// Interior vertex: the link is a cycle, listed in cyclic order.
    Cycle(Vec<u32>),
    /// Boundary vertex: the link is a path, listed end to end.
    Path(Vec<u32>),
}

impl Link {
    pub fn vertices(&self) -> &[u32] {
        match self {
            Link::Cycle(v) | Link::Path(v) => v,
        }
    }
}

/// Link of `v`, ordered; errors when it is neither a cycle nor a path.
pub fn vertex_link(cx: &SimplicialComplex, v: u32) -> Result<Link> {
    let bad = |msg: &str| Error::NonManifold {
        vertex: v,
        msg: msg.to_string(),
    };
    let mut adj: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for &e in cx.cofaces(0, v as usize) {
        let edge = cx.simplex(1, e as usize);
        let w = if edge[0] == v { edge[1] } else { edge[0] };
        adj.entry(w).or_default();
        for &t in cx.cofaces(1, e as usize) {
            let tri = cx.simplex(2, t as usize);
            let u = *tri.iter().find(|&&x| x != v && x != w).unwrap();
            adj.entry(w).or_default().push(u);
        }
    }
    if adj.is_empty() {
        return Err(bad("isolated vertex"));
    }
    for (w, n) in &adj {
        if n.is_empty() {
            return Err(bad(&format!("edge to {w} lies in no triangle")));
        }
        if n.len() > 2 {
            return Err(bad(&format!("edge to {w} lies in {} triangles", n.len())));
        }
    }
    let ends: Vec<u32> = adj.iter().filter(|(_, n)| n.len() == 1).map(|(&w, _)| w).collect();
    let start = match ends.len() {
        0 => *adj.keys().next().unwrap(),
        2 => ends[0],
        _ => return Err(bad("link is not a path or a cycle")),
    };
    let mut order = vec![start];
    let mut prev: Option<u32> = None;
    let mut cur = start;
    while let Some(next) = adj[&cur].iter().copied().find(|&x| Some(x) != prev) {
        if next == start {
            break;
        }
        if order.contains(&next) {
            return Err(bad("link revisits a vertex"));
        }
        order.push(next);
        prev = Some(cur);
        cur = next;
    }
    if order.len() != adj.len() {
        return Err(bad("link is disconnected"));
    }
    Ok(if ends.is_empty() {
        Link::Cycle(order)
    } else {
        Link::Path(order)
    })
}

/// Number of maximal runs of `true` in a cyclic sequence (all-true counts 1).
pub(crate) fn cyclic_runs(flags: &[bool]) -> usize {
    if flags.iter().all(|&b| b) {
        return 1;
    }
    (0..flags.len())
        .filter(|&i| flags[i] && !flags[(i + flags.len() - 1) % flags.len()])
        .count()
}

/// Closed star of a vertex set: closure of every cell touching it.
pub(crate) fn closed_star(cx: &SimplicialComplex, verts: &[u32]) -> Subcomplex {
    let mut cells = Vec::new();
    for &v in verts {
        cells.extend(cx.open_star(v));
    }
    Subcomplex::closure_of(cx, cells)
}

/// Classifies every vertex of a closed (or bounded) PL surface.
///
/// Equal-valued vertices joined by edges are clustered first. Single vertices
/// are classified by counting arcs of their lower link; clusters by the
/// homology of their closed star relative to the lower link. Clusters that
/// touch the boundary are treated as regular.
pub fn classify_vertices(sf: &ScalarField) -> Result<CriticalReport> {
    let cx = &sf.complex;
    if cx.dim() != 2 {
        return Err(Error::Unsupported(format!(
            "critical classification needs a 2-dimensional complex, got dimension {}",
            cx.dim()
        )));
    }
    let n = cx.vertex_count();
    let links: Vec<Link> = (0..n as u32)
        .into_par_iter()
        .map(|v| vertex_link(cx, v))
        .collect::<Result<_>>()?;

    let mut uf = UnionFind::new(n);
    for e in cx.simplices(1) {
        if sf.value(e[0]) == sf.value(e[1]) {
            uf.union(e[0] as usize, e[1] as usize);
        }
    }
    let mut clusters: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
    let mut root_first: HashMap<usize, u32> = HashMap::new();
    for v in 0..n as u32 {
        let r = uf.find(v as usize);
        root_first.entry(r).or_insert(v);
        clusters.entry(root_first[&r] as usize).or_default().push(v);
    }

    let found: Vec<Option<(Vec<u32>, CriticalKind)>> = clusters
        .into_values()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|verts| classify_cluster(sf, &links, verts))
        .collect::<Result<_>>()?;

    let mut components = Vec::new();
    let mut component_of = vec![None; n];
    for (verts, kind) in found.into_iter().flatten() {
        let id = components.len();
        for &v in &verts {
            component_of[v as usize] = Some(id);
        }
        let vset: Vec<bool> = {
            let mut m = vec![false; n];
            for &v in &verts {
                m[v as usize] = true;
            }
            m
        };
        components.push(CriticalComponent {
            id,
            cells: Subcomplex::from_vertex_predicate(cx, |v| vset[v as usize]),
            value: sf.value(verts[0]).clone(),
            vertices: verts,
            kind,
        });
    }
    let mut critical_values: Vec<Rat> = components.iter().map(|c| c.value.clone()).collect();
    critical_values.sort();
    critical_values.dedup();
    let midpoints = midpoints(&critical_values);
    Ok(CriticalReport {
        components,
        critical_values,
        midpoints,
        component_of,
    })
}

/// b_0 = c_1 − 1, b_k = (c_k + c_{k+1})/2, b_ρ = c_ρ + 1.
pub(crate) fn midpoints(cvals: &[Rat]) -> Vec<Rat> {
    if cvals.is_empty() {
        return Vec::new();
    }
    let one = super::int(1);
    let two = super::int(2);
    let mut out = vec![&cvals[0] - &one];
    for w in cvals.windows(2) {
        out.push((&w[0] + &w[1]) / &two);
    }
    out.push(cvals.last().unwrap() + &one);
    out
}

fn classify_cluster(sf: &ScalarField, links: &[Link], verts: Vec<u32>) -> Result<Option<(Vec<u32>, CriticalKind)>> {
    if verts.iter().any(|&v| matches!(links[v as usize], Link::Path(_))) {
        if verts.len() == sf.complex.vertex_count() {
            return Ok(Some((verts, CriticalKind::Other)));
        }
        return Ok(None);
    }
    let c = sf.value(verts[0]);
    if verts.len() == 1 {
        let Link::Cycle(cycle) = &links[verts[0] as usize] else {
            unreachable!()
        };
        let lower: Vec<bool> = cycle.iter().map(|&w| sf.value(w) < c).collect();
        let kind = if lower.iter().all(|&b| !b) {
            CriticalKind::Min
        } else if lower.iter().all(|&b| b) {
            CriticalKind::Max
        } else {
            match cyclic_runs(&lower) {
                1 => return Ok(None),
                k => CriticalKind::from_saddle_multiplicity(k as u32 - 1),
            }
        };
        return Ok(Some((verts, kind)));
    }
    let cx = &sf.complex;
    let star = closed_star(cx, &verts);
    let in_cluster = |v: u32| verts.binary_search(&v).is_ok();
    let side = |upper: bool| {
        let mut s = Subcomplex::from_vertex_predicate(cx, |v| {
            !in_cluster(v) && if upper { sf.value(v) > c } else { sf.value(v) < c }
        });
        s = s.intersection(&star);
        s
    };
    let (lk_minus, lk_plus) = (side(false), side(true));
    let rel = relative_homology(cx, &star, &lk_minus, FieldTag::F2)?;
    if rel.is_zero() {
        return Ok(None);
    }
    let own = Subcomplex::from_vertex_predicate(cx, in_cluster);
    let h = subcomplex_homology(cx, &own, FieldTag::F2)?;
    let circle = PoincarePolynomial::new(vec![1, 1]);
    let point = PoincarePolynomial::new(vec![1]);
    let kind = if h == circle && lk_minus.is_empty() {
        CriticalKind::BottCircleMin
    } else if h == circle && lk_plus.is_empty() {
        CriticalKind::BottCircleMax
    } else if h == point {
        match rel.coefficients() {
            [1] => CriticalKind::Min,
            [0, 0, 1] => CriticalKind::Max,
            [0, m] => CriticalKind::from_saddle_multiplicity(*m as u32),
            _ => CriticalKind::Other,
        }
    } else {
        CriticalKind::Other
    };
    Ok(Some((verts, kind)))
}
