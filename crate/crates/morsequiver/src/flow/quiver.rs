use serde::Serialize;

use super::gradient::DiscreteGradient;
use crate::error::Result;
use crate::quiveralg::{Quiver, RQuiver};
use crate::scalarfield::{cell_components, fmt_rat};

/// A face-connected set of cells flowing down to `lower` and up to `upper`.
#[derive(Clone, Debug, Serialize)]
pub struct ConnectingComponent {
    pub upper: usize,
    pub lower: usize,
    pub cells: Vec<usize>,
    /// Every face of the set lying in the open band between the two values
    /// belongs to the set.
    pub closed_in_band: bool,
}

/// Components of W⁻(upper) ∩ W⁺(lower) inside the open band between their values.
pub fn connecting_components(dg: &DiscreteGradient, upper: usize, lower: usize) -> Vec<ConnectingComponent> {
    let (a, b) = (&dg.nodes[lower].value, &dg.nodes[upper].value);
    if a >= b {
        return Vec::new();
    }
    let cx = &dg.field.complex;
    let member: Vec<bool> = (0..cx.num_cells())
        .map(|c| dg.minus_cell[c] == upper && dg.plus_cell[c] == lower && dg.in_open_band(c, a, b))
        .collect();
    cell_components(cx, &member)
        .into_iter()
        .map(|cells| {
            let closed_in_band = cells.iter().all(|&c| {
                let (d, i) = cx.cell_of(c);
                d == 0
                    || cx.boundary(d, i).iter().all(|&(j, _)| {
                        let f = cx.cell_id(d - 1, j);
                        member[f] || !dg.in_open_band(f, a, b)
                    })
            });
            ConnectingComponent { upper, lower, cells, closed_in_band }
        })
        .collect()
}

/// Connecting components for all ordered pairs of nodes, by (upper, lower).
pub fn all_connecting_components(dg: &DiscreteGradient) -> Vec<ConnectingComponent> {
    let n = dg.nodes.len();
    let mut out = Vec::new();
    for upper in 0..n {
        for lower in 0..n {
            out.extend(connecting_components(dg, upper, lower));
        }
    }
    out
}

/// Quiver with one vertex per node and one arrow upper → lower per closed
/// connecting component, graded by the node values.
pub fn build_quiver(dg: &DiscreteGradient) -> Result<RQuiver> {
    let mut q = Quiver::new(dg.nodes.iter().map(|n| n.label.clone()).collect());
    for cc in all_connecting_components(dg) {
        if cc.closed_in_band {
            q.add_arrow(cc.upper, cc.lower);
        }
    }
    RQuiver::new(q, dg.nodes.iter().map(|n| n.value.clone()).collect())
}

/// Vertex of the refined quiver.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum RefinedVertex {
    /// The node itself.
    Node(usize),
    /// A component of W⁺ of the node with the node removed.
    Descending { node: usize, piece: usize },
    /// A component of W⁻ of the node with the node removed.
    Ascending { node: usize, piece: usize },
}

/// Quiver resolving each stratum into its connected pieces.
#[derive(Clone, Debug)]
pub struct RefinedQuiver {
    pub quiver: Quiver,
    pub vertices: Vec<RefinedVertex>,
}

impl RefinedQuiver {
    pub fn node_vertex(&self, node: usize) -> usize {
        self.vertices.iter().position(|v| *v == RefinedVertex::Node(node)).unwrap()
    }
}

/// Refined quiver: `u → v_C` for each piece `u` of W⁺_C∖C, `v_C → w` for
/// each piece `w` of W⁻_C∖C, and `w → u` for each closed connecting component
/// lying in both pieces.
pub fn build_refined_quiver(dg: &DiscreteGradient) -> RefinedQuiver {
    let n = dg.nodes.len();
    let ncells = dg.field.complex.num_cells();
    let mut q = Quiver::new(Vec::new());
    let mut vertices = Vec::new();
    let mut plus_piece = vec![usize::MAX; ncells];
    let mut minus_piece = vec![usize::MAX; ncells];
    for c in 0..n {
        let label = &dg.nodes[c].label;
        let vc = q.add_vertex(label.clone());
        vertices.push(RefinedVertex::Node(c));
        for (k, piece) in dg.stratum_pieces(c, true).into_iter().enumerate() {
            let u = q.add_vertex(format!("u{k}:{label}"));
            vertices.push(RefinedVertex::Descending { node: c, piece: k });
            q.add_arrow(u, vc);
            for cell in piece {
                plus_piece[cell] = u;
            }
        }
        for (k, piece) in dg.stratum_pieces(c, false).into_iter().enumerate() {
            let w = q.add_vertex(format!("w{k}:{label}"));
            vertices.push(RefinedVertex::Ascending { node: c, piece: k });
            q.add_arrow(vc, w);
            for cell in piece {
                minus_piece[cell] = w;
            }
        }
    }
    for cc in all_connecting_components(dg) {
        if cc.closed_in_band {
            let cell = cc.cells[0];
            q.add_arrow(minus_piece[cell], plus_piece[cell]);
        }
    }
    RefinedQuiver { quiver: q, vertices }
}

/// Human-readable summary line for a node.
pub fn node_summary(dg: &DiscreteGradient, node: usize) -> String {
    let n = &dg.nodes[node];
    match n.kind {
        Some(k) => format!("{} {} at {}", n.label, k, fmt_rat(&n.value)),
        None => format!("{} boundary at {}", n.label, fmt_rat(&n.value)),
    }
}
