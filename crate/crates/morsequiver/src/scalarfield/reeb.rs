use std::collections::BTreeMap;

use serde::Serialize;

use super::{classify_vertices, cut_subdivide, CriticalReport, Rat, ScalarField};
use crate::chains::{SimplicialComplex, Subcomplex};
use crate::error::Result;
use crate::util::UnionFind;

/// Quotient of the surface by connected components of level sets.
#[derive(Clone, Debug, Serialize)]
pub struct ReebGraph {
    /// Critical value of each node.
    #[serde(serialize_with = "crate::io::ser_rats")]
    pub node_values: Vec<Rat>,
    /// Critical component ids contained in each node.
    pub node_components: Vec<Vec<usize>>,
    /// Edges as (lower node, upper node), sorted; parallel edges repeated.
    pub edges: Vec<(usize, usize)>,
}

impl ReebGraph {
    pub fn node_count(&self) -> usize {
        self.node_values.len()
    }

    /// First Betti number E − V + (number of connected components).
    pub fn first_betti(&self) -> usize {
        let mut uf = UnionFind::new(self.node_count());
        let mut comps = self.node_count();
        for &(a, b) in &self.edges {
            if uf.union(a, b) {
                comps -= 1;
            }
        }
        self.edges.len() + comps - self.node_count()
    }
}

/// Face-adjacency components of an arbitrary cell set (global ids).
pub(crate) fn cell_components(cx: &SimplicialComplex, member: &[bool]) -> Vec<Vec<usize>> {
    let n = cx.num_cells();
    let mut uf = UnionFind::new(n);
    for id in 0..n {
        if !member[id] {
            continue;
        }
        let (d, i) = cx.cell_of(id);
        for (f, _) in cx.boundary(d, i) {
            let fid = cx.cell_id(d - 1, f);
            if member[fid] {
                uf.union(id, fid);
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut first: BTreeMap<usize, usize> = BTreeMap::new();
    for id in 0..n {
        if member[id] {
            let r = uf.find(id);
            let key = *first.entry(r).or_insert(id);
            groups.entry(key).or_default().push(id);
        }
    }
    groups.into_values().collect()
}

/// Reeb graph of a PL function on a closed surface.
pub fn reeb_graph(sf: &ScalarField) -> Result<ReebGraph> {
    let report = classify_vertices(sf)?;
    Ok(reeb_graph_with(sf, &report))
}

/// Reeb graph using an existing critical report for `sf`.
pub fn reeb_graph_with(sf: &ScalarField, report: &CriticalReport) -> ReebGraph {
    let cut = cut_subdivide(sf, &report.critical_values);
    let cx = &cut.complex;
    let n = cx.num_cells();
    // level-set components at each critical value
    let mut level_of_cell: Vec<Option<usize>> = vec![None; n];
    let mut nodes: Vec<(Rat, Vec<usize>)> = Vec::new();
    for c in &report.critical_values {
        let lv = Subcomplex::from_vertex_predicate(cx, |v| cut.value(v) == c);
        for comp in lv.connected_components(cx) {
            let id = nodes.len();
            for cell in comp.cells(cx) {
                level_of_cell[cell] = Some(id);
            }
            let mut comps: Vec<usize> = comp
                .vertices()
                .into_iter()
                .filter(|&v| (v as usize) < sf.complex.vertex_count())
                .filter_map(|v| report.component_of[v as usize])
                .collect();
            comps.sort_unstable();
            comps.dedup();
            nodes.push((c.clone(), comps));
        }
    }
    let rest: Vec<bool> = level_of_cell.iter().map(|l| l.is_none()).collect();
    let mut raw_edges: Vec<(usize, usize)> = Vec::new();
    for sheet in cell_components(cx, &rest) {
        let closure = Subcomplex::closure_of(cx, sheet.iter().copied());
        let mut ends: Vec<usize> = closure
            .cells(cx)
            .into_iter()
            .filter_map(|id| level_of_cell[id])
            .collect();
        ends.sort_unstable();
        ends.dedup();
        if let [a, b] = ends[..] {
            let (lo, hi) = if nodes[a].0 <= nodes[b].0 { (a, b) } else { (b, a) };
            raw_edges.push((lo, hi));
        }
    }
    // splice out level components that contain no critical cell
    let mut alive: Vec<bool> = nodes.iter().map(|(_, c)| !c.is_empty()).collect();
    for dead in 0..nodes.len() {
        if alive[dead] {
            continue;
        }
        let below: Vec<usize> = (0..raw_edges.len()).filter(|&e| raw_edges[e].1 == dead).collect();
        let above: Vec<usize> = (0..raw_edges.len()).filter(|&e| raw_edges[e].0 == dead).collect();
        if let ([b], [a]) = (&below[..], &above[..]) {
            raw_edges[*b].1 = raw_edges[*a].1;
            raw_edges.remove(*a);
        } else {
            alive[dead] = true;
        }
    }
    let mut renum = vec![usize::MAX; nodes.len()];
    let mut node_values = Vec::new();
    let mut node_components = Vec::new();
    for (i, (v, c)) in nodes.into_iter().enumerate() {
        if alive[i] {
            renum[i] = node_values.len();
            node_values.push(v);
            node_components.push(c);
        }
    }
    let mut edges: Vec<(usize, usize)> = raw_edges.into_iter().map(|(a, b)| (renum[a], renum[b])).collect();
    edges.sort_unstable();
    ReebGraph {
        node_values,
        node_components,
        edges,
    }
}
