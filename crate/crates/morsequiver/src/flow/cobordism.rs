use std::collections::HashMap;

use serde::Serialize;

use super::gradient::{build_flow, DiscreteGradient, FlowNode};
use super::quiver::build_quiver;
use super::witten::{reduce_mod2, FlowComplex};
use crate::chains::{validate_chain_complex, ChainComplex, FieldTag, SimplicialComplex, SparseMatrix, Subcomplex};
use crate::error::{Error, Result};
use crate::fixtures::SurfaceBuilder;
use crate::neighborhoods::NeighborhoodSystem;
use crate::quiveralg::RQuiver;
use crate::scalarfield::{fmt_rat, int, vertex_link, CriticalKind, Link, Rat, ScalarField};

/// A compact surface piece whose boundary splits into a top `∂₊` and a
/// bottom `∂₋` on which the function is constant, and a side `∂⊥` along
/// which it is strictly monotone.
#[derive(Clone, Debug)]
pub struct MorseCobordism {
    pub field: ScalarField,
    pub plus: Subcomplex,
    pub minus: Subcomplex,
    pub perp: Subcomplex,
}

/// Which homology a Laudenbach complex computes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LaudenbachVariant {
    /// `H(ℳ)`: interior critical points and inflowing boundary points.
    Absolute,
    /// `H(ℳ, ∂₋ℳ)`.
    RelativeMinus,
    /// `H(ℳ, ∂ℳ)`: interior critical points and outflowing boundary points.
    RelativeBoundary,
}

impl MorseCobordism {
    pub fn new(field: ScalarField, plus: Subcomplex, minus: Subcomplex, perp: Subcomplex) -> Result<Self> {
        let cob = MorseCobordism { field, plus, minus, perp };
        cob.validate()?;
        Ok(cob)
    }

    pub fn complex(&self) -> &SimplicialComplex {
        &self.field.complex
    }

    fn constant_value(&self, part: &Subcomplex, name: &str) -> Result<Option<Rat>> {
        let vs = part.vertices();
        let Some(&first) = vs.first() else { return Ok(None) };
        let c = self.field.value(first);
        if vs.iter().any(|&v| self.field.value(v) != c) {
            return Err(Error::Invalid(format!("function is not constant on {name}")));
        }
        Ok(Some(c.clone()))
    }

    /// Value on `∂₋` and on `∂₊`, when nonempty.
    pub fn boundary_values(&self) -> Result<(Option<Rat>, Option<Rat>)> {
        Ok((self.constant_value(&self.minus, "∂₋")?, self.constant_value(&self.plus, "∂₊")?))
    }

    /// Checks the boundary structure.
    pub fn validate(&self) -> Result<()> {
        let cx = self.complex();
        if cx.dim() != 2 {
            return Err(Error::Unsupported("cobordisms are supported for surfaces only".into()));
        }
        for (part, name) in [(&self.plus, "∂₊"), (&self.minus, "∂₋"), (&self.perp, "∂⊥")] {
            if !part.is_face_closed(cx) {
                return Err(Error::Invalid(format!("{name} is not face-closed")));
            }
        }
        if !self.plus.intersection(&self.minus).is_empty() {
            return Err(Error::Invalid("∂₊ and ∂₋ meet".into()));
        }
        let (lo, hi) = self.boundary_values()?;
        if let (Some(lo), Some(hi)) = (&lo, &hi) {
            if lo >= hi {
                return Err(Error::Invalid("∂₋ value is not below ∂₊ value".into()));
            }
        }
        let ends = self.plus.union(&self.minus);
        for v in 0..cx.vertex_count() as u32 {
            if ends.contains_vertex(v) {
                continue;
            }
            let f = self.field.value(v);
            if lo.as_ref().is_some_and(|lo| f <= lo) || hi.as_ref().is_some_and(|hi| f >= hi) {
                return Err(Error::Invalid(format!("vertex {v} lies outside the open range of the boundary values")));
            }
        }
        let sides = ends.union(&self.perp);
        for i in 0..cx.count(1) {
            if cx.cofaces(1, i).len() == 1 && !sides.contains(1, i) {
                return Err(Error::Invalid(format!("boundary edge {:?} is not in ∂±∪∂⊥", cx.simplex(1, i))));
            }
        }
        for v in self.perp.vertices() {
            if ends.contains_vertex(v) {
                continue;
            }
            let f = self.field.value(v);
            let along: Vec<u32> = cx
                .neighbors(v)
                .into_iter()
                .filter(|&w| {
                    let mut e = vec![v, w];
                    e.sort_unstable();
                    cx.index_of(&e).is_some_and(|i| self.perp.contains(1, i))
                })
                .collect();
            let lower = along.iter().filter(|&&w| self.field.value(w) < f).count();
            let upper = along.iter().filter(|&&w| self.field.value(w) > f).count();
            if along.len() != 2 || lower != 1 || upper != 1 {
                return Err(Error::Invalid(format!("∂⊥ is not monotone at vertex {v}")));
            }
        }
        Ok(())
    }

    /// The same piece for `−f`, with `∂₊` and `∂₋` exchanged.
    pub fn negated(&self) -> MorseCobordism {
        MorseCobordism {
            field: self.field.negated(),
            plus: self.minus.clone(),
            minus: self.plus.clone(),
            perp: self.perp.clone(),
        }
    }

    /// Neighbourhood `n` of a critical component, as a standalone cobordism.
    pub fn from_neighborhood(system: &NeighborhoodSystem, component: usize, n: usize) -> Result<Self> {
        if component >= system.neighborhoods.len() || n > system.n_max {
            return Err(Error::Invalid(format!("no neighbourhood {n} for component {component}")));
        }
        let fine = system.complex();
        let nb = system.get(component, n);
        let verts = nb.cells.vertices();
        let index: HashMap<u32, u32> = verts.iter().enumerate().map(|(i, &v)| (v, i as u32)).collect();
        let facets = nb
            .cells
            .cells(fine)
            .into_iter()
            .map(|id| fine.cell_vertices(id).iter().map(|v| index[v]).collect::<Vec<u32>>());
        let cx = SimplicialComplex::from_facets(verts.len(), facets)?;
        let values = verts.iter().map(|&v| system.layered.fields[0][v as usize].clone()).collect();
        let field = ScalarField::new(cx, values)?;
        let cx = &field.complex;
        let map = |s: &Subcomplex| {
            Subcomplex::from_cells(
                cx,
                s.cells(fine).into_iter().map(|id| {
                    let vs: Vec<u32> = fine.cell_vertices(id).iter().map(|v| index[v]).collect();
                    let mut sorted = vs.clone();
                    sorted.sort_unstable();
                    cx.cell_id(sorted.len() - 1, cx.index_of(&sorted).expect("cell of the neighbourhood"))
                }),
            )
        };
        let plus = map(&nb.boundary_plus);
        let minus = map(&nb.boundary_minus);
        let perp = map(&nb.boundary_perp);
        MorseCobordism::new(field, plus, minus, perp)
    }

    /// Square grid of `k × k` cells with `f` the row height: `∂₋` is the
    /// bottom row, `∂₊` the top row and `∂⊥` the two side columns.
    pub fn square(k: usize) -> Self {
        assert!(k >= 1, "square needs at least one cell");
        let mut b = SurfaceBuilder::new();
        let grid: Vec<Vec<u32>> = (0..=k).map(|j| (0..=k).map(|_| b.vertex(int(j as i64))).collect()).collect();
        for j in 0..k {
            for i in 0..k {
                b.triangle(grid[j][i], grid[j][i + 1], grid[j + 1][i + 1]);
                b.triangle(grid[j][i], grid[j + 1][i + 1], grid[j + 1][i]);
            }
        }
        let field = b.finish();
        let cx = &field.complex;
        let row = |j: usize| Subcomplex::from_vertex_predicate(cx, |v| grid[j].contains(&v));
        let col = |i: usize| Subcomplex::from_vertex_predicate(cx, |v| grid.iter().any(|r| r[i] == v));
        let (plus, minus, perp) = (row(k), row(0), col(0).union(&col(k)));
        MorseCobordism::new(field, plus, minus, perp).expect("square is a valid cobordism")
    }

    /// Cylinder over a circle of `m` vertices with `k` bands and no interior
    /// critical points.
    pub fn cylinder(m: usize, k: usize) -> Self {
        assert!(m >= 3 && k >= 1, "cylinder needs a 3-cycle and one band");
        let mut b = SurfaceBuilder::new();
        let rings: Vec<Vec<u32>> = (0..=k).map(|j| b.flat_ring(m, &int(j as i64))).collect();
        b.tube(&rings);
        let field = b.finish();
        let cx = &field.complex;
        let ring = |j: usize| Subcomplex::from_vertex_predicate(cx, |v| rings[j].contains(&v));
        let (plus, minus, perp) = (ring(k), ring(0), Subcomplex::empty(cx));
        MorseCobordism::new(field, plus, minus, perp).expect("cylinder is a valid cobordism")
    }
}

/// Quiver of a cobordism: interior critical components, `∂₊` components and
/// `∂₋` components, with one arrow per closed connecting component.
#[derive(Clone, Debug)]
pub struct CobordismQuiver {
    pub quiver: RQuiver,
    pub gradient: DiscreteGradient,
    /// Node indices of the interior components.
    pub interior: Vec<usize>,
    /// Node indices of the `∂₊` components.
    pub plus: Vec<usize>,
    /// Node indices of the `∂₋` components.
    pub minus: Vec<usize>,
}

pub fn cobordism_quiver(cob: &MorseCobordism) -> Result<CobordismQuiver> {
    cob.validate()?;
    let sf = &cob.field;
    let cx = sf.complex.clone();
    let mut nodes: Vec<FlowNode> = interior_critical(cob)?
        .into_iter()
        .enumerate()
        .map(|(k, (v, kind))| FlowNode::from_component(k, vec![v], sf.value(v).clone(), kind))
        .collect();
    let interior: Vec<usize> = (0..nodes.len()).collect();
    let mut ends = |part: &Subcomplex, prefix: &str, top: bool| -> Vec<usize> {
        part.connected_components(&cx)
            .into_iter()
            .enumerate()
            .map(|(k, comp)| {
                let vertices = comp.vertices();
                let value = sf.value(vertices[0]).clone();
                nodes.push(FlowNode {
                    label: format!("{prefix}{k}@{}", fmt_rat(&value)),
                    vertices,
                    value,
                    kind: None,
                    saddle_type: false,
                    sink: !top,
                    source: top,
                });
                nodes.len() - 1
            })
            .collect()
    };
    let plus = ends(&cob.plus, "u", true);
    let minus = ends(&cob.minus, "w", false);
    let gradient = build_flow(sf, nodes)?;
    let quiver = build_quiver(&gradient)?;
    Ok(CobordismQuiver { quiver, gradient, interior, plus, minus })
}

/// Interior vertices whose lower link (ties broken by vertex index) is not a
/// single proper arc, with their kinds.
pub fn interior_critical(cob: &MorseCobordism) -> Result<Vec<(u32, CriticalKind)>> {
    let sf = &cob.field;
    let cx = &sf.complex;
    let key = |v: u32| (sf.value(v), v);
    let mut out = Vec::new();
    for v in 0..cx.vertex_count() as u32 {
        let Link::Cycle(verts) = vertex_link(cx, v)? else { continue };
        let runs = alternating_runs(&verts, true, |w| key(w) < key(v));
        let lower = runs.iter().filter(|r| r.0).count();
        let kind = match (lower, runs.len()) {
            (0, _) => CriticalKind::Min,
            (_, 1) => CriticalKind::Max,
            (1, _) => continue,
            (2, _) => CriticalKind::Saddle(1),
            (m, _) => CriticalKind::Degenerate(m as u32 - 1),
        };
        out.push((v, kind));
    }
    Ok(out)
}

/// A generator of the Laudenbach complex and the flow data of its differential.
struct Generator {
    label: String,
    degree: usize,
    /// Degree 1: the first vertices of the two lower arcs whose difference it is.
    arcs: Vec<u32>,
    /// Degree 1: first vertices of the upper arcs separating those lower arcs.
    uppers: Vec<u32>,
}

/// Laudenbach complex of a cobordism over F2.
///
/// Each piece, a vertex outside `∂±` or a component of `∂₋`, contributes the
/// local homology of its star relative to its lower link (ties broken by
/// vertex index). The differential counts descending flow lines from the
/// lower arcs of index-1 pieces and ascending flow lines into the maxima,
/// mod 2. `RelativeBoundary` is the transpose of the absolute complex of
/// `−f`, regraded by `j ↦ 2 − j`.
pub fn laudenbach_complex(cob: &MorseCobordism, variant: LaudenbachVariant, field: FieldTag) -> Result<FlowComplex> {
    if field != FieldTag::F2 {
        return Err(Error::Unsupported("flow-line signs are not modelled; use F2".into()));
    }
    cob.validate()?;
    match variant {
        LaudenbachVariant::Absolute => lower_star_complex(cob, true),
        LaudenbachVariant::RelativeMinus => lower_star_complex(cob, false),
        LaudenbachVariant::RelativeBoundary => {
            let dual = lower_star_complex(&cob.negated(), true)?;
            let top = 2;
            let mut generators: Vec<Vec<String>> = vec![Vec::new(); top + 1];
            for (k, g) in dual.generators.into_iter().enumerate() {
                generators[top - k] = g;
            }
            let ranks: Vec<usize> = generators.iter().map(Vec::len).collect();
            let maps = (1..=top).map(|j| dual.complex.boundaries[top - j + 1].transpose()).collect();
            let complex = ChainComplex::new(FieldTag::F2, &ranks, maps)?;
            Ok(FlowComplex { complex, generators })
        }
    }
}

fn lower_star_complex(cob: &MorseCobordism, with_minus: bool) -> Result<FlowComplex> {
    let sf = &cob.field;
    let cx = &sf.complex;
    let nv = cx.vertex_count();
    let key = |v: u32| (sf.value(v), v);
    let neighbors: Vec<Vec<u32>> = (0..nv as u32).map(|v| cx.neighbors(v)).collect();
    let in_plus = |v: u32| cob.plus.contains_vertex(v);
    let mut cluster: Vec<Option<usize>> = vec![None; nv];
    let minus_parts = cob.minus.connected_components(cx);
    for (k, part) in minus_parts.iter().enumerate() {
        for v in part.vertices() {
            cluster[v as usize] = Some(k);
        }
    }

    let mut gens: Vec<Generator> = Vec::new();
    // degree-0 generator index per ∂₋ component and per minimum vertex
    let mut bottom: HashMap<(bool, usize), usize> = HashMap::new();
    for (k, part) in minus_parts.iter().enumerate() {
        let b1 = part.count(1) as i64 - part.count(0) as i64 + 1;
        if !with_minus {
            continue;
        }
        bottom.insert((true, k), gens.len());
        gens.push(Generator { label: format!("w{k}"), degree: 0, arcs: vec![], uppers: vec![] });
        match b1 {
            0 => {}
            1 => {
                let verts = part.vertices();
                let above: Vec<u32> = verts
                    .iter()
                    .flat_map(|&v| neighbors[v as usize].iter().copied())
                    .filter(|&w| cluster[w as usize] != Some(k))
                    .collect();
                let mut groups = crate::util::UnionFind::new(above.len());
                for i in 0..above.len() {
                    for j in 0..i {
                        if above[i] == above[j] || neighbors[above[i] as usize].contains(&above[j]) {
                            groups.union(i, j);
                        }
                    }
                }
                let mut firsts: HashMap<usize, u32> = HashMap::new();
                for (i, &w) in above.iter().enumerate() {
                    let e = firsts.entry(groups.find(i)).or_insert(w);
                    if key(w) > key(*e) {
                        *e = w;
                    }
                }
                let mut uppers: Vec<u32> = firsts.into_values().collect();
                uppers.sort_unstable();
                gens.push(Generator { label: format!("w{k}'"), degree: 1, arcs: vec![], uppers });
            }
            _ => return Err(Error::Unsupported("∂₋ components must be arcs or circles".into())),
        }
    }
    for v in 0..nv as u32 {
        if cluster[v as usize].is_some() || in_plus(v) {
            continue;
        }
        let (verts, cyclic) = match vertex_link(cx, v)? {
            Link::Cycle(vs) => (vs, true),
            Link::Path(vs) => (vs, false),
        };
        let runs = alternating_runs(&verts, cyclic, |w| key(w) < key(v));
        let lower: Vec<usize> = (0..runs.len()).filter(|&i| runs[i].0).collect();
        if lower.is_empty() {
            bottom.insert((false, v as usize), gens.len());
            gens.push(Generator { label: format!("min{v}"), degree: 0, arcs: vec![], uppers: vec![] });
            continue;
        }
        if lower.len() == runs.len() {
            if cyclic {
                gens.push(Generator { label: format!("max{v}"), degree: 2, arcs: vec![], uppers: vec![] });
            }
            continue;
        }
        if lower.len() < 2 {
            continue;
        }
        if cyclic && lower.len() > 2 {
            return Err(Error::Unsupported(format!("interior vertex {v} is a degenerate saddle")));
        }
        let lowest = |run: &[u32]| *run.iter().min_by(|&&a, &&b| key(a).cmp(&key(b))).unwrap();
        let highest = |run: &[u32]| *run.iter().max_by(|&&a, &&b| key(a).cmp(&key(b))).unwrap();
        let a0 = lowest(&runs[lower[0]].1);
        for (i, &li) in lower.iter().enumerate().skip(1) {
            let between: Vec<u32> = if cyclic {
                runs.iter().filter(|r| !r.0).map(|r| highest(&r.1)).collect()
            } else {
                (lower[0]..li).filter(|&r| !runs[r].0).map(|r| highest(&runs[r].1)).collect()
            };
            gens.push(Generator {
                label: format!("s{v}.{i}"),
                degree: 1,
                arcs: vec![a0, lowest(&runs[li].1)],
                uppers: between,
            });
        }
    }

    // flow-line ends
    let descend = |mut cur: u32| -> Option<usize> {
        loop {
            if let Some(k) = cluster[cur as usize] {
                return bottom.get(&(true, k)).copied();
            }
            match neighbors[cur as usize].iter().copied().filter(|&w| key(w) < key(cur)).min_by(|&a, &b| key(a).cmp(&key(b))) {
                Some(w) => cur = w,
                None => return bottom.get(&(false, cur as usize)).copied(),
            }
        }
    };
    let max_index: HashMap<u32, usize> = gens
        .iter()
        .enumerate()
        .filter(|(_, g)| g.degree == 2)
        .map(|(i, g)| (g.label[3..].parse::<u32>().expect("max label"), i))
        .collect();
    let ascend = |mut cur: u32| -> Option<usize> {
        loop {
            if in_plus(cur) {
                return None;
            }
            match neighbors[cur as usize].iter().copied().filter(|&w| key(w) > key(cur)).max_by(|&a, &b| key(a).cmp(&key(b))) {
                Some(w) => cur = w,
                None => return max_index.get(&cur).copied(),
            }
        }
    };

    let mut position = vec![0u32; gens.len()];
    let mut generators: Vec<Vec<String>> = vec![Vec::new(); 3];
    for (i, g) in gens.iter().enumerate() {
        position[i] = generators[g.degree].len() as u32;
        generators[g.degree].push(g.label.clone());
    }
    let mut d1: Vec<Vec<(u32, i64)>> = vec![Vec::new(); generators[1].len()];
    let mut d2: Vec<Vec<(u32, i64)>> = vec![Vec::new(); generators[2].len()];
    for (i, g) in gens.iter().enumerate().filter(|(_, g)| g.degree == 1) {
        for &a in &g.arcs {
            if let Some(t) = descend(a) {
                d1[position[i] as usize].push((position[t], 1));
            }
        }
        for &u in &g.uppers {
            if let Some(m) = ascend(u) {
                d2[position[m] as usize].push((position[i], 1));
            }
        }
    }
    let ranks: Vec<usize> = generators.iter().map(Vec::len).collect();
    let maps = vec![
        SparseMatrix::from_columns(ranks[0], d1.into_iter().map(reduce_mod2).collect()),
        SparseMatrix::from_columns(ranks[1], d2.into_iter().map(reduce_mod2).collect()),
    ];
    let complex = ChainComplex::new(FieldTag::F2, &ranks, maps)?;
    if !validate_chain_complex(&complex)? {
        return Err(Error::Invariant("flow-line differential does not square to zero".into()));
    }
    Ok(FlowComplex { complex, generators })
}

/// Maximal runs of equal `flag` along a path or cycle, in order. A cyclic
/// sequence starts at a run boundary.
fn alternating_runs(verts: &[u32], cyclic: bool, flag: impl Fn(u32) -> bool) -> Vec<(bool, Vec<u32>)> {
    let n = verts.len();
    let flags: Vec<bool> = verts.iter().map(|&v| flag(v)).collect();
    let start = if cyclic { (0..n).find(|&i| flags[i] != flags[(i + n - 1) % n]).unwrap_or(0) } else { 0 };
    let mut out: Vec<(bool, Vec<u32>)> = Vec::new();
    for k in 0..n {
        let i = (start + k) % n;
        match out.last_mut() {
            Some((f, run)) if *f == flags[i] => run.push(verts[i]),
            _ => out.push((flags[i], vec![verts[i]])),
        }
    }
    out
}
