//! Shared helpers for integration tests.
#![allow(dead_code)]

use morsequiver::chains::{SimplicialComplex, Subcomplex};

/// Samples a pair `A ⊆ X` of face-closed subcomplexes of a surface.
///
/// `X` is a patch of up to `max_triangles` triangles grown across shared edges, with up to
/// three triangles punched out (their edges kept). `A` is empty, a random
/// closed subset of `X`, the frontier of the patch, or both. `seeds` drives
/// every choice and should hold at least 64 entries.
pub fn sample_pair(cx: &SimplicialComplex, seeds: &[u32], max_triangles: usize) -> (Subcomplex, Subcomplex) {
    let mut next = {
        let mut k = 0;
        move || {
            k += 1;
            seeds[(k - 1) % seeds.len()] as usize
        }
    };
    let nf = cx.count(2);
    let target = 1 + next() % max_triangles;
    let mut chosen = vec![false; nf];
    let start = next() % nf;
    chosen[start] = true;
    let mut order = vec![start];
    while order.len() < target {
        let mut frontier: Vec<usize> = order
            .iter()
            .flat_map(|&t| cx.boundary(2, t))
            .flat_map(|(e, _)| cx.cofaces(1, e).iter().map(|&u| u as usize))
            .filter(|&u| !chosen[u])
            .collect();
        frontier.sort_unstable();
        frontier.dedup();
        if frontier.is_empty() {
            break;
        }
        let t = frontier[next() % frontier.len()];
        chosen[t] = true;
        order.push(t);
    }
    let mut kept_edges = Vec::new();
    for _ in 0..next() % 4 {
        if order.len() > 2 {
            let t = order.remove(1 + next() % (order.len() - 1));
            chosen[t] = false;
            kept_edges.extend(cx.boundary(2, t).into_iter().map(|(e, _)| cx.cell_id(1, e)));
        }
    }
    let cells = order.iter().map(|&t| cx.cell_id(2, t)).chain(kept_edges);
    let x = Subcomplex::closure_of(cx, cells);

    let frontier_edges: Vec<usize> = (0..cx.count(1))
        .filter(|&e| x.contains(1, e))
        .filter(|&e| cx.cofaces(1, e).iter().filter(|&&t| chosen[t as usize]).count() != 2)
        .map(|e| cx.cell_id(1, e))
        .collect();
    let random: Vec<usize> = x.cells(cx).into_iter().filter(|_| next() % 4 == 0).collect();
    let a = match next() % 4 {
        0 => Subcomplex::empty(cx),
        1 => Subcomplex::closure_of(cx, random),
        2 => Subcomplex::closure_of(cx, frontier_edges),
        _ => Subcomplex::closure_of(cx, frontier_edges.into_iter().chain(random)),
    };
    (x, a)
}
