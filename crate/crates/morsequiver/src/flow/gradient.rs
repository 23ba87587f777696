use std::cmp::Ordering;
use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::neighborhoods::Side;
use crate::scalarfield::{cell_components, fmt_rat, vertex_link, CriticalKind, CriticalReport, Link, Rat, ScalarField};

/// A component the discrete flow starts or ends at.
#[derive(Clone, Debug)]
pub struct FlowNode {
    pub vertices: Vec<u32>,
    pub value: Rat,
    /// Critical kind, or `None` for boundary pieces of a cobordism.
    pub kind: Option<CriticalKind>,
    /// Separatrices are traced from this node.
    pub saddle_type: bool,
    /// Preferred end point of descending flow.
    pub sink: bool,
    /// Preferred end point of ascending flow.
    pub source: bool,
    pub label: String,
}

impl FlowNode {
    /// Node for a critical component.
    pub fn from_component(id: usize, vertices: Vec<u32>, value: Rat, kind: CriticalKind) -> Self {
        FlowNode {
            label: format!("C{id}@{}", fmt_rat(&value)),
            vertices,
            value,
            kind: Some(kind),
            saddle_type: kind.is_saddle_type(),
            sink: kind.is_min_type(),
            source: kind.is_max_type(),
        }
    }
}

/// A traced flow line leaving a saddle-type node.
#[derive(Clone, Debug, Serialize)]
pub struct Separatrix {
    pub node: usize,
    /// Starts at a vertex of `node`; ends at a node vertex or where it
    /// merged into an earlier separatrix.
    pub path: Vec<u32>,
    /// Node the flow line reaches.
    pub end: usize,
}

/// Cell routing of the discrete gradient flow.
///
/// Each vertex outside the nodes has a descending successor `down` and an
/// ascending successor `up`; following them ends in a node. `plus_cell[c]`
/// is the node the downward flow from cell `c` reaches (its W⁺ stratum) and
/// `minus_cell[c]` the node the upward flow reaches (its W⁻ stratum).
#[derive(Clone, Debug)]
pub struct DiscreteGradient {
    pub field: ScalarField,
    pub nodes: Vec<FlowNode>,
    pub node_of: Vec<Option<usize>>,
    pub down: Vec<Option<u32>>,
    pub up: Vec<Option<u32>>,
    pub plus_vertex: Vec<usize>,
    pub minus_vertex: Vec<usize>,
    pub plus_cell: Vec<usize>,
    pub minus_cell: Vec<usize>,
    /// Node containing every vertex of the cell, if any.
    pub critical_cell: Vec<Option<usize>>,
    pub descending: Vec<Separatrix>,
    pub ascending: Vec<Separatrix>,
    /// Name of the tie-breaking rule.
    pub tie_break: &'static str,
}

/// Tie-breaking rule used by [`build_gradient`].
pub const TIE_BREAK: &str = "steepest-by-value-then-index";

impl DiscreteGradient {
    pub fn value(&self, v: u32) -> &Rat {
        self.field.value(v)
    }

    /// Minimal and maximal vertex value of a cell.
    pub fn cell_range(&self, id: usize) -> (&Rat, &Rat) {
        let vs = self.field.complex.cell_vertices(id);
        let lo = vs.iter().map(|&v| self.value(v)).min().unwrap();
        let hi = vs.iter().map(|&v| self.value(v)).max().unwrap();
        (lo, hi)
    }

    /// Whether the cell meets the open band `a < f < b`.
    pub fn in_open_band(&self, id: usize, a: &Rat, b: &Rat) -> bool {
        let (lo, hi) = self.cell_range(id);
        if lo == hi {
            a < lo && lo < b
        } else {
            lo < b && hi > a
        }
    }

    /// Cells of the W⁺ (`plus = true`) or W⁻ stratum of `node`.
    pub fn stratum_cells(&self, node: usize, plus: bool) -> Vec<usize> {
        let owner = if plus { &self.plus_cell } else { &self.minus_cell };
        (0..owner.len()).filter(|&c| owner[c] == node).collect()
    }

    /// Face-adjacency components of W± of `node` with the node itself removed.
    pub fn stratum_pieces(&self, node: usize, plus: bool) -> Vec<Vec<usize>> {
        let owner = if plus { &self.plus_cell } else { &self.minus_cell };
        let member: Vec<bool> = (0..owner.len())
            .map(|c| owner[c] == node && self.critical_cell[c] != Some(node))
            .collect();
        cell_components(&self.field.complex, &member)
    }
}

/// Cells whose downward (`Side::Plus`) or upward (`Side::Minus`) flow ends
/// in one node.
#[derive(Clone, Debug, Serialize)]
pub struct Stratum {
    pub component: usize,
    pub sign: Side,
    pub cells: Vec<usize>,
}

/// W⁺ strata (`Side::Plus`) or W⁻ strata (`Side::Minus`), one per node.
pub fn strata(dg: &DiscreteGradient, sign: Side) -> Vec<Stratum> {
    let owner = match sign {
        Side::Plus => &dg.plus_cell,
        Side::Minus => &dg.minus_cell,
    };
    let mut cells: Vec<Vec<usize>> = vec![Vec::new(); dg.nodes.len()];
    for (c, &n) in owner.iter().enumerate() {
        cells[n].push(c);
    }
    cells
        .into_iter()
        .enumerate()
        .map(|(component, cells)| Stratum { component, sign, cells })
        .collect()
}

/// Checks that W⁺ and W⁻ each partition the cells, that W⁺_C ∩ W⁻_C is the
/// node itself and that flow strictly increases from W⁺ to W⁻.
pub fn check_strata(dg: &DiscreteGradient) -> Result<()> {
    let ncells = dg.field.complex.num_cells();
    for sign in [Side::Plus, Side::Minus] {
        let total: usize = strata(dg, sign).iter().map(|s| s.cells.len()).sum();
        if total != ncells {
            return Err(Error::Invariant(format!("{sign:?} strata cover {total} of {ncells} cells")));
        }
    }
    for c in 0..ncells {
        let (p, m) = (dg.plus_cell[c], dg.minus_cell[c]);
        if p == m && dg.critical_cell[c] != Some(p) {
            return Err(Error::Invariant(format!("cell {c} lies in W⁺ and W⁻ of {}", dg.nodes[p].label)));
        }
        if p != m && dg.nodes[m].value <= dg.nodes[p].value {
            return Err(Error::Invariant(format!("cell {c} flows up to a lower node")));
        }
    }
    Ok(())
}

/// Discrete gradient of a classified scalar field; node `i` is critical
/// component `i`.
pub fn build_gradient(sf: &ScalarField, report: &CriticalReport) -> Result<DiscreteGradient> {
    let nodes = report
        .components
        .iter()
        .map(|c| FlowNode::from_component(c.id, c.vertices.clone(), c.value.clone(), c.kind))
        .collect();
    build_flow(sf, nodes)
}

/// Discrete gradient flow between arbitrary nodes.
pub fn build_flow(sf: &ScalarField, nodes: Vec<FlowNode>) -> Result<DiscreteGradient> {
    let cx = &sf.complex;
    let nv = cx.vertex_count();
    let mut node_of: Vec<Option<usize>> = vec![None; nv];
    for (i, n) in nodes.iter().enumerate() {
        for &v in &n.vertices {
            if node_of[v as usize].replace(i).is_some() {
                return Err(Error::Invalid(format!("vertex {v} lies in two flow nodes")));
            }
        }
    }
    let key = |v: u32| (sf.value(v), v);
    let neighbors: Vec<Vec<u32>> = (0..nv as u32).map(|v| cx.neighbors(v)).collect();
    let steepest = |v: u32, descend: bool| -> Option<u32> {
        let nb = &neighbors[v as usize];
        if descend {
            nb.iter().copied().filter(|&w| key(w) < key(v)).min_by(|&a, &b| key(a).cmp(&key(b)))
        } else {
            nb.iter()
                .copied()
                .filter(|&w| key(w) > key(v))
                .max_by(|&a, &b| sf.value(a).cmp(sf.value(b)).then(b.cmp(&a)))
        }
    };

    let mut order: Vec<usize> = (0..nodes.len()).collect();
    order.sort_by(|&a, &b| (&nodes[a].value, a).cmp(&(&nodes[b].value, b)));

    // descending separatrices, higher nodes first
    let mut desc_prev: Vec<Option<u32>> = vec![None; nv];
    let mut desc_next: Vec<Option<u32>> = vec![None; nv];
    let mut descending: Vec<Separatrix> = Vec::new();
    for &n in order.iter().rev().filter(|&&n| nodes[n].saddle_type) {
        for arc in link_arcs(sf, &nodes[n].vertices, &node_of, n, true)? {
            let start = trace_start(&arc, |w| {
                neighbors[w as usize].iter().any(|&x| node_of[x as usize] != Some(n) && key(x) > key(w))
            })
            .unwrap_or_else(|| *arc.iter().min_by(|&&a, &&b| key(a).cmp(&key(b))).unwrap());
            let anchor = anchor_of(cx, &nodes[n].vertices, start);
            let mut path = vec![anchor, start];
            let (mut prev, mut cur) = (anchor, start);
            while node_of[cur as usize].is_none() && desc_prev[cur as usize].is_none() {
                desc_prev[cur as usize] = Some(prev);
                let next = steepest(cur, true).ok_or_else(|| stuck(cur))?;
                desc_next[cur as usize] = Some(next);
                path.push(next);
                prev = cur;
                cur = next;
            }
            descending.push(Separatrix { node: n, path, end: usize::MAX });
        }
    }
    // descending separatrices ending at a saddle, keyed by (node, last vertex)
    let mut arrivals: HashMap<(usize, u32), usize> = HashMap::new();
    for (i, s) in descending.iter().enumerate() {
        let last = *s.path.last().unwrap();
        if let Some(m) = node_of[last as usize] {
            if nodes[m].saddle_type && s.path.len() >= 2 && m != s.node {
                let p = s.path[s.path.len() - 2];
                arrivals.entry((m, p)).or_insert(i);
            }
        }
    }

    // ascending separatrices, lower nodes first
    let mut asc_prev: Vec<Option<u32>> = vec![None; nv];
    let mut asc_next: Vec<Option<u32>> = vec![None; nv];
    let mut ascending: Vec<Separatrix> = Vec::new();
    for &n in order.iter().filter(|&&n| nodes[n].saddle_type) {
        for arc in link_arcs(sf, &nodes[n].vertices, &node_of, n, false)? {
            if let Some(&i) = arc.iter().find_map(|&p| arrivals.get(&(n, p))) {
                let mut path = descending[i].path.clone();
                path.reverse();
                ascending.push(Separatrix { node: n, path, end: usize::MAX });
                continue;
            }
            let start = trace_start(&arc, |w| {
                neighbors[w as usize].iter().any(|&x| node_of[x as usize] != Some(n) && key(x) < key(w))
            })
            .unwrap_or_else(|| *arc.iter().max_by(|&&a, &&b| sf.value(a).cmp(sf.value(b)).then(b.cmp(&a))).unwrap());
            let anchor = anchor_of(cx, &nodes[n].vertices, start);
            let mut path = vec![anchor, start];
            let (mut prev, mut cur) = (anchor, start);
            while node_of[cur as usize].is_none() && asc_prev[cur as usize].is_none() && desc_prev[cur as usize].is_none() {
                asc_prev[cur as usize] = Some(prev);
                let next = steepest(cur, false).ok_or_else(|| stuck(cur))?;
                asc_next[cur as usize] = Some(next);
                path.push(next);
                prev = cur;
                cur = next;
            }
            ascending.push(Separatrix { node: n, path, end: usize::MAX });
        }
    }

    // vertex routing, W⁺ bottom-up and W⁻ top-down
    let mut vorder: Vec<u32> = (0..nv as u32).collect();
    vorder.sort_by(|&a, &b| key(a).cmp(&key(b)));
    let mut down: Vec<Option<u32>> = vec![None; nv];
    let mut plus_vertex = vec![usize::MAX; nv];
    for &v in &vorder {
        let vi = v as usize;
        if let Some(n) = node_of[vi] {
            plus_vertex[vi] = n;
            continue;
        }
        let target = asc_prev[vi].or(desc_next[vi]).or_else(|| {
            let lower: Vec<u32> = neighbors[vi].iter().copied().filter(|&w| key(w) < key(v)).collect();
            let pick = |ws: &mut dyn Iterator<Item = u32>| ws.min_by(|&a, &b| key(a).cmp(&key(b)));
            pick(&mut lower.iter().copied().filter(|&w| nodes[plus_vertex[w as usize]].sink))
                .or_else(|| pick(&mut lower.iter().copied()))
        });
        let t = target.ok_or_else(|| stuck(v))?;
        down[vi] = Some(t);
        plus_vertex[vi] = plus_vertex[t as usize];
    }
    let mut up: Vec<Option<u32>> = vec![None; nv];
    let mut minus_vertex = vec![usize::MAX; nv];
    for &v in vorder.iter().rev() {
        let vi = v as usize;
        if let Some(n) = node_of[vi] {
            minus_vertex[vi] = n;
            continue;
        }
        let target = desc_prev[vi].or(asc_next[vi]).or_else(|| {
            let upper: Vec<u32> = neighbors[vi].iter().copied().filter(|&w| key(w) > key(v)).collect();
            let pick = |ws: &mut dyn Iterator<Item = u32>| {
                ws.max_by(|&a, &b| sf.value(a).cmp(sf.value(b)).then(b.cmp(&a)))
            };
            pick(&mut upper.iter().copied().filter(|&w| nodes[minus_vertex[w as usize]].source))
                .or_else(|| pick(&mut upper.iter().copied()))
        });
        let t = target.ok_or_else(|| stuck(v))?;
        up[vi] = Some(t);
        minus_vertex[vi] = minus_vertex[t as usize];
    }
    // sink reachable by any strictly descending route, ignoring separatrices
    let mut basin: Vec<Option<usize>> = vec![None; nv];
    for &v in &vorder {
        let vi = v as usize;
        basin[vi] = match node_of[vi] {
            Some(n) => nodes[n].sink.then_some(n),
            None => neighbors[vi]
                .iter()
                .filter(|&&w| key(w) < key(v))
                .filter_map(|&w| basin[w as usize])
                .min_by(|&a, &b| (&nodes[a].value, a).cmp(&(&nodes[b].value, b))),
        };
    }
    let mut peak: Vec<Option<usize>> = vec![None; nv];
    for &v in vorder.iter().rev() {
        let vi = v as usize;
        peak[vi] = match node_of[vi] {
            Some(n) => nodes[n].source.then_some(n),
            None => neighbors[vi]
                .iter()
                .filter(|&&w| key(w) > key(v))
                .filter_map(|&w| peak[w as usize])
                .max_by(|&a, &b| nodes[a].value.cmp(&nodes[b].value).then(b.cmp(&a))),
        };
    }
    for s in descending.iter_mut() {
        s.end = plus_vertex[*s.path.last().unwrap() as usize];
    }
    for s in ascending.iter_mut() {
        s.end = minus_vertex[*s.path.last().unwrap() as usize];
    }

    // cells
    let ncells = cx.num_cells();
    let mut plus_cell = vec![0usize; ncells];
    let mut minus_cell = vec![0usize; ncells];
    let mut critical_cell = vec![None; ncells];
    let lowest = |cands: &mut dyn Iterator<Item = usize>| {
        cands.min_by(|&a, &b| (&nodes[a].value, a).cmp(&(&nodes[b].value, b)))
    };
    let highest = |cands: &mut dyn Iterator<Item = usize>| {
        cands.max_by(|&a, &b| nodes[a].value.cmp(&nodes[b].value).then(b.cmp(&a)))
    };
    for id in 0..ncells {
        let vs = cx.cell_vertices(id);
        let first = node_of[vs[0] as usize];
        if first.is_some() && vs.iter().all(|&v| node_of[v as usize] == first) {
            let n = first.unwrap();
            critical_cell[id] = Some(n);
            plus_cell[id] = n;
            minus_cell[id] = n;
            continue;
        }
        let routed = |step: &Vec<Option<u32>>| -> Option<u32> {
            if vs.len() != 2 {
                return None;
            }
            let (a, b) = (vs[0], vs[1]);
            if step[a as usize] == Some(b) {
                Some(a)
            } else if step[b as usize] == Some(a) {
                Some(b)
            } else {
                None
            }
        };
        plus_cell[id] = match routed(&down) {
            Some(v) => plus_vertex[v as usize],
            None => {
                let ds: Vec<usize> = vs.iter().map(|&v| plus_vertex[v as usize]).collect();
                let basins = || vs.iter().filter_map(|&v| basin[v as usize]);
                lowest(&mut ds.iter().copied().filter(|&d| nodes[d].sink))
                    .or_else(|| if vs.len() > 2 { lowest(&mut basins()) } else { None })
                    .or_else(|| lowest(&mut ds.iter().copied()))
                    .unwrap()
            }
        };
        minus_cell[id] = match routed(&up) {
            Some(v) => minus_vertex[v as usize],
            None => {
                let ds: Vec<usize> = vs.iter().map(|&v| minus_vertex[v as usize]).collect();
                let peaks = || vs.iter().filter_map(|&v| peak[v as usize]);
                highest(&mut ds.iter().copied().filter(|&d| nodes[d].source))
                    .or_else(|| if vs.len() > 2 { highest(&mut peaks()) } else { None })
                    .or_else(|| highest(&mut ds.iter().copied()))
                    .unwrap()
            }
        };
    }

    Ok(DiscreteGradient {
        field: sf.clone(),
        nodes,
        node_of,
        down,
        up,
        plus_vertex,
        minus_vertex,
        plus_cell,
        minus_cell,
        critical_cell,
        descending,
        ascending,
        tie_break: TIE_BREAK,
    })
}

/// Arc vertex whose only monotone neighbours on the far side lie in the
/// node, if any; such a vertex can only flow back into the node.
fn trace_start(arc: &[u32], escapes: impl Fn(u32) -> bool) -> Option<u32> {
    arc.iter().copied().filter(|&w| !escapes(w)).min()
}

fn stuck(v: u32) -> Error {
    Error::Invariant(format!("regular vertex {v} has no strictly monotone neighbour"))
}

/// Node vertex adjacent to `w` with the smallest index.
fn anchor_of(cx: &crate::chains::SimplicialComplex, node: &[u32], w: u32) -> u32 {
    let nb = cx.neighbors(w);
    node.iter().copied().filter(|v| nb.contains(v)).min().unwrap_or(node[0])
}

/// Connected arcs of the lower (`lower = true`) or upper link of a node.
fn link_arcs(
    sf: &ScalarField,
    node: &[u32],
    node_of: &[Option<usize>],
    id: usize,
    lower: bool,
) -> Result<Vec<Vec<u32>>> {
    let cx = &sf.complex;
    let key = |v: u32| (sf.value(v), v);
    if let [v] = node {
        let side = |w: u32| match key(w).cmp(&key(*v)) {
            Ordering::Less => lower,
            _ => !lower,
        };
        let (verts, cyclic) = match vertex_link(cx, *v)? {
            Link::Cycle(vs) => (vs, true),
            Link::Path(vs) => (vs, false),
        };
        return Ok(runs(&verts, cyclic, side));
    }
    // clusters: components of the lower (upper) neighbours
    let value = sf.value(node[0]);
    let mut set: Vec<u32> = Vec::new();
    for &v in node {
        for w in cx.neighbors(v) {
            if node_of[w as usize] != Some(id) && ((sf.value(w) < value) == lower) && !set.contains(&w) {
                set.push(w);
            }
        }
    }
    set.sort_unstable();
    let mut uf = crate::util::UnionFind::new(set.len());
    for (i, &a) in set.iter().enumerate() {
        for b in cx.neighbors(a) {
            if let Ok(j) = set.binary_search(&b) {
                uf.union(i, j);
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<u32>> = std::collections::BTreeMap::new();
    for (i, &a) in set.iter().enumerate() {
        groups.entry(uf.find(i)).or_default().push(a);
    }
    let mut out: Vec<Vec<u32>> = groups.into_values().collect();
    out.sort();
    Ok(out)
}

/// Maximal runs of vertices satisfying `keep`, cyclically or linearly.
fn runs(verts: &[u32], cyclic: bool, keep: impl Fn(u32) -> bool) -> Vec<Vec<u32>> {
    let n = verts.len();
    let flags: Vec<bool> = verts.iter().map(|&v| keep(v)).collect();
    if flags.iter().all(|&f| f) {
        return vec![verts.to_vec()];
    }
    let start = if cyclic { flags.iter().position(|&f| !f).unwrap() } else { 0 };
    let mut out = Vec::new();
    let mut cur: Vec<u32> = Vec::new();
    for k in 0..n {
        let i = (start + k) % n;
        if flags[i] {
            cur.push(verts[i]);
        } else if !cur.is_empty() {
            out.push(std::mem::take(&mut cur));
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::SimplicialComplex;
    use crate::fixtures::{build, Resolution};
    use crate::scalarfield::{classify_vertices, int};

    fn gradient(name: &str) -> DiscreteGradient {
        let sf = build(name, Resolution::default()).unwrap();
        let report = classify_vertices(&sf).unwrap();
        build_gradient(&sf, &report).unwrap()
    }

    #[test]
    fn runs_split_cyclically() {
        let r = runs(&[1, 2, 3, 4, 5, 6], true, |v| v != 3 && v != 5);
        assert_eq!(r, vec![vec![4], vec![6, 1, 2]]);
        assert_eq!(runs(&[1, 2, 3], false, |v| v != 2), vec![vec![1], vec![3]]);
    }

    #[test]
    fn constant_triangle_has_empty_routing() {
        let cx = SimplicialComplex::from_facets(3, vec![vec![0, 1, 2]]).unwrap();
        let sf = ScalarField::new(cx, vec![int(0), int(0), int(0)]).unwrap();
        let node = FlowNode::from_component(0, vec![0, 1, 2], int(0), CriticalKind::Other);
        let dg = build_flow(&sf, vec![node]).unwrap();
        assert!(dg.down.iter().all(|d| d.is_none()));
        assert!(dg.critical_cell.iter().all(|c| *c == Some(0)));
    }

    #[test]
    fn strata_partition_and_are_graded() {
        for name in ["sphere", "torus_standard", "torus_axisymmetric", "torus_degenerate", "torus_bott", "genus2"] {
            let dg = gradient(name);
            check_strata(&dg).unwrap();
            let cx = &dg.field.complex;
            for n in (0..dg.nodes.len()).filter(|&n| dg.nodes[n].saddle_type) {
                for plus in [true, false] {
                    assert!(
                        dg.stratum_cells(n, plus).iter().all(|&c| cx.cell_of(c).0 <= 1),
                        "{name}: 2-cells in a stratum of node {n}"
                    );
                }
            }
            let total: usize = (0..dg.nodes.len()).map(|n| dg.stratum_cells(n, true).len()).sum();
            assert_eq!(total, dg.field.complex.num_cells());
        }
    }

    #[test]
    fn standard_torus_strata_dimensions() {
        let dg = gradient("torus_standard");
        let cx = &dg.field.complex;
        let dim = |cells: Vec<usize>| cells.iter().map(|&c| cx.cell_of(c).0).max().unwrap();
        assert_eq!(dim(dg.stratum_cells(0, true)), 2);
        assert_eq!(dim(dg.stratum_cells(1, true)), 1);
        assert_eq!(dim(dg.stratum_cells(2, true)), 1);
        assert_eq!(dg.stratum_cells(3, true).len(), 1);
        assert_eq!(dg.descending.len(), 4);
        assert_eq!(dg.ascending.len(), 4);
        assert!(dg.descending.iter().all(|s| s.end == 0));
        assert!(dg.ascending.iter().all(|s| s.end == 3));
    }

    #[test]
    fn degenerate_saddle_stratum_is_a_tripod() {
        let dg = gradient("torus_degenerate");
        assert_eq!(dg.stratum_pieces(1, true).len(), 3);
        assert_eq!(dg.stratum_pieces(1, false).len(), 3);
        let cx = &dg.field.complex;
        assert!(dg.stratum_cells(1, true).iter().all(|&c| cx.cell_of(c).0 <= 1));
    }
}
