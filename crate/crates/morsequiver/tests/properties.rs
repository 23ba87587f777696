mod common;

use std::sync::OnceLock;

use morsequiver::chains::{homology, ChainComplex, FieldTag, PoincarePolynomial, SimplicialComplex, SparseMatrix};
use morsequiver::fixtures::{build, Resolution, SURFACE_NAMES};
use morsequiver::pipeline::Analysis;
use morsequiver::quiveralg::{
    final_subquiver, is_final, path_count, path_count_matrix, total_complex, Arrow, PathMap, Quiver, QuiverMulticomplex,
    RQuiver,
};
use morsequiver::scalarfield::Rat;
use morsequiver::spectral::{page_dim_by_subspaces, pages, standard_filtrations, DoubleComplex, Filtration, SpectralPage};
use proptest::collection::vec;
use proptest::prelude::*;

fn surfaces() -> &'static Vec<SimplicialComplex> {
    static CELL: OnceLock<Vec<SimplicialComplex>> = OnceLock::new();
    CELL.get_or_init(|| {
        SURFACE_NAMES
            .iter()
            .map(|n| build(n, Resolution::default()).unwrap().complex)
            .collect()
    })
}

/// Acyclic quiver on `n` vertices: arrows run from higher to lower index.
fn acyclic_quiver() -> impl Strategy<Value = Quiver> {
    (2usize..7).prop_flat_map(|n| {
        vec((0..n, 0..n, 1usize..3), 0..12).prop_map(move |edges| {
            let mut q = Quiver::with_vertices(n);
            for (a, b, m) in edges {
                if a != b {
                    q.add_arrows(a.max(b), a.min(b), m);
                }
            }
            q
        })
    })
}

fn matrix_power(q: &Quiver, r: usize) -> Vec<Vec<u128>> {
    let a = q.adjacency();
    let n = a.len();
    let mut m: Vec<Vec<u128>> = (0..n).map(|i| (0..n).map(|j| u128::from(i == j)).collect()).collect();
    for _ in 0..r {
        m = (0..n)
            .map(|i| (0..n).map(|j| (0..n).map(|k| m[i][k] * a[k][j]).sum()).collect())
            .collect();
    }
    m
}

/// Relative chain complex of a small sampled pair.
fn small_complex(field: FieldTag) -> impl Strategy<Value = ChainComplex> {
    (0..SURFACE_NAMES.len(), vec(any::<u32>(), 64)).prop_map(move |(which, seeds)| {
        let cx = &surfaces()[which];
        let (x, a) = common::sample_pair(cx, &seeds, 5);
        ChainComplex::relative(cx, &x, &a, field)
    })
}

/// `C ⊗ D` with `∂′ = ∂_C ⊗ 1` and `∂″ = (−1)^p 1 ⊗ ∂_D`.
fn tensor(c: &ChainComplex, d: &ChainComplex) -> DoubleComplex {
    let (rc, rd) = (c.ranks(), d.ranks());
    let (w, h) = (rc.len().max(1), rd.len().max(1));
    let rank = |r: &[usize], i: usize| r.get(i).copied().unwrap_or(0);
    let dims: Vec<Vec<usize>> = (0..w).map(|p| (0..h).map(|q| rank(&rc, p) * rank(&rd, q)).collect()).collect();
    let mut horizontal = Vec::new();
    let mut vertical = Vec::new();
    for p in 0..w {
        let mut hrow = Vec::new();
        let mut vrow = Vec::new();
        for q in 0..h {
            let (dc, dd) = (rank(&rc, p), rank(&rd, q));
            let bc = if p > 0 { c.boundary(p) } else { SparseMatrix::zeros(0, dc) };
            let bd = if q > 0 { d.boundary(q) } else { SparseMatrix::zeros(0, dd) };
            let hrows = if p > 0 { rank(&rc, p - 1) * dd } else { 0 };
            let vrows = if q > 0 { dc * rank(&rd, q - 1) } else { 0 };
            let sign = if p % 2 == 0 { 1 } else { -1 };
            let mut hcols = Vec::with_capacity(dc * dd);
            let mut vcols = Vec::with_capacity(dc * dd);
            for i in 0..dc {
                for j in 0..dd {
                    hcols.push(bc.columns[i].iter().map(|&(k, v)| (k * dd as u32 + j as u32, v)).collect());
                    let below = rank(&rd, q.saturating_sub(1)) as u32;
                    vcols.push(bd.columns[j].iter().map(|&(l, v)| (i as u32 * below + l, sign * v)).collect());
                }
            }
            hrow.push(SparseMatrix::from_columns(hrows, hcols));
            vrow.push(SparseMatrix::from_columns(vrows, vcols));
        }
        horizontal.push(hrow);
        vertical.push(vrow);
    }
    DoubleComplex::new(c.field, dims, horizontal, vertical).expect("tensor product is a double complex")
}

fn poly_product(a: &PoincarePolynomial, b: &PoincarePolynomial) -> PoincarePolynomial {
    let (x, y) = (a.coefficients(), b.coefficients());
    if x.is_empty() || y.is_empty() {
        return PoincarePolynomial::zero();
    }
    let mut out = vec![0; x.len() + y.len() - 1];
    for (i, a) in x.iter().enumerate() {
        for (j, b) in y.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    PoincarePolynomial::new(out)
}

fn last_dims(ps: &[SpectralPage]) -> Vec<usize> {
    let mut d = ps.last().map(SpectralPage::total_dims).unwrap_or_default();
    while d.last() == Some(&0) {
        d.pop();
    }
    d
}

fn as_dims(p: &PoincarePolynomial) -> Vec<usize> {
    p.coefficients().iter().map(|&c| c as usize).collect()
}

/// Checks `Σ E₁ − H = (1 + t)·Q` with `Q ≥ 0`.
fn divisible_remainder(e1: &[usize], h: &[usize]) -> bool {
    let n = e1.len().max(h.len());
    let diff: Vec<i64> = (0..n)
        .map(|k| e1.get(k).copied().unwrap_or(0) as i64 - h.get(k).copied().unwrap_or(0) as i64)
        .collect();
    let mut q = vec![0i64; n];
    let mut carry = 0;
    for k in 0..n {
        q[k] = diff[k] - carry;
        carry = q[k];
    }
    carry == 0 && q.iter().all(|&x| x >= 0)
}

fn degenerate_multicomplex(field: FieldTag) -> &'static QuiverMulticomplex {
    static F2: OnceLock<QuiverMulticomplex> = OnceLock::new();
    static QQ: OnceLock<QuiverMulticomplex> = OnceLock::new();
    let cell = if field == FieldTag::F2 { &F2 } else { &QQ };
    cell.get_or_init(|| {
        let a = Analysis::new(build("torus_degenerate", Resolution::default()).unwrap(), field, 1).unwrap();
        let mv = a.mv().unwrap();
        let model = a.model(&mv).unwrap();
        a.levelling(&mv, &model, &a.morse_levelling()).unwrap().multicomplex
    })
}

fn permuted(mc: &QuiverMulticomplex, perm: &[usize]) -> QuiverMulticomplex {
    let n = perm.len();
    let mut labels = vec![String::new(); n];
    let mut dims = vec![Vec::new(); n];
    for v in 0..n {
        labels[perm[v]] = mc.quiver.labels[v].clone();
        dims[perm[v]] = mc.dims[v].clone();
    }
    let arrows = mc.quiver.arrows.iter().map(|a| Arrow { tail: perm[a.tail], head: perm[a.head] }).collect();
    let maps = mc
        .maps
        .iter()
        .map(|m| PathMap { source: perm[m.source], target: perm[m.target], ..m.clone() })
        .collect();
    QuiverMulticomplex { quiver: Quiver { labels, arrows }, field: mc.field, dims, maps }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn path_count_is_the_matrix_power(q in acyclic_quiver(), r in 1usize..5) {
        let power = matrix_power(&q, r);
        prop_assert_eq!(path_count_matrix(&q, r), power);
        let n = q.vertex_count();
        let mut enumerated = vec![vec![0u128; n]; n];
        for path in q.paths(r) {
            let (s, t) = q.path_ends(&path);
            enumerated[s][t] += 1;
        }
        for s in 0..n {
            for t in 0..n {
                prop_assert_eq!(path_count(&q, s, t, r), enumerated[s][t]);
            }
        }
    }

    #[test]
    fn final_subquivers_are_closed(q in acyclic_quiver(), thresholds in vec(-1i64..8, 1..5)) {
        // vertex index as grading decreases strictly along every arrow
        let grading: Vec<Rat> = (0..q.vertex_count() as i64).map(|i| Rat::from_integer(i.into())).collect();
        let rq = RQuiver::new(q.clone(), grading).unwrap();
        let sets: Vec<Vec<usize>> =
            thresholds.iter().map(|&t| final_subquiver(&rq, &Rat::from_integer(t.into())).vertices).collect();
        for a in &sets {
            prop_assert!(is_final(&q, a));
            for b in &sets {
                let inter: Vec<usize> = a.iter().copied().filter(|v| b.contains(v)).collect();
                let mut union: Vec<usize> = a.iter().chain(b).copied().collect();
                union.sort_unstable();
                union.dedup();
                prop_assert!(is_final(&q, &inter));
                prop_assert!(is_final(&q, &union));
            }
        }
    }

    #[test]
    fn filtrations_of_a_tensor_product_agree(
        c in small_complex(FieldTag::F2),
        d in small_complex(FieldTag::F2),
    ) {
        let dc = tensor(&c, &d);
        let field = dc.field;
        let first = standard_filtrations(&dc, Filtration::First).unwrap();
        let second = standard_filtrations(&dc, Filtration::Second).unwrap();
        let h = homology(&first.complex, field);
        let kuenneth = poly_product(&homology(&c, field), &homology(&d, field));
        prop_assert_eq!(&h, &kuenneth);
        for fc in [&first, &second] {
            let ps = pages(fc);
            prop_assert_eq!(last_dims(&ps), as_dims(&h));
            prop_assert!(divisible_remainder(&ps[0].total_dims(), &as_dims(&h)));
            for page in &ps {
                for (&(p, q), &dim) in &page.terms {
                    let by_formula = page_dim_by_subspaces(fc, page.r, p, (p + q) as usize);
                    prop_assert_eq!(by_formula, dim, "page {} at ({}, {})", page.r, p, q);
                }
            }
        }
    }

    #[test]
    fn rational_tensor_products_abut(c in small_complex(FieldTag::Rational), d in small_complex(FieldTag::Rational)) {
        let dc = tensor(&c, &d);
        let first = pages(&standard_filtrations(&dc, Filtration::First).unwrap());
        let second = pages(&standard_filtrations(&dc, Filtration::Second).unwrap());
        prop_assert_eq!(last_dims(&first), last_dims(&second));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn total_complex_is_invariant_under_relabelling(perm in Just((0..5).collect::<Vec<usize>>()).prop_shuffle()) {
        for field in [FieldTag::F2, FieldTag::Rational] {
            let mc = degenerate_multicomplex(field);
            let base = total_complex(mc).unwrap();
            let moved = total_complex(&permuted(mc, &perm)).unwrap();
            prop_assert_eq!(base.ranks(), moved.ranks());
            prop_assert_eq!(homology(&base, field), homology(&moved, field));
            prop_assert_eq!(homology(&moved, field), PoincarePolynomial::new(vec![1, 2, 1]));
        }
    }
}
