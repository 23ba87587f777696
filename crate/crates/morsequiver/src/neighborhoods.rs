//! Cylindrical Morse neighbourhoods, their relative Poincaré polynomials,
//! stability, duality and the Morse inequalities.

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::chains::{relative_homology, FieldTag, IntPoly, PoincarePolynomial, SimplicialComplex, Subcomplex};
use crate::error::{Error, Result};
use crate::scalarfield::{int, CriticalReport, Layered, Rat, ScalarField};

/// Which boundary part a relative polynomial is taken against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Side {
    /// Outflowing boundary ∂₋ (descending inequalities).
    Minus,
    /// Inflowing boundary ∂₊ (ascending inequalities).
    Plus,
}

/// A band-and-star neighbourhood of one critical component on the cut complex.
#[derive(Clone, Debug)]
pub struct MorseNeighborhood {
    pub component: usize,
    pub level: usize,
    pub cells: Subcomplex,
    pub boundary_plus: Subcomplex,
    pub boundary_minus: Subcomplex,
    pub boundary_perp: Subcomplex,
    /// ∂⊥ cells with all vertices at or below the critical value.
    pub perp_lower: Subcomplex,
    /// ∂⊥ cells with all vertices at or above the critical value.
    pub perp_upper: Subcomplex,
    pub delta_plus: Rat,
    pub delta_minus: Rat,
    /// Radial truncation level.
    pub tau: Rat,
}

/// Neighbourhoods of every critical component for levels `0..=n_max`, all
/// realized on one common subdivision.
#[derive(Clone, Debug)]
pub struct NeighborhoodSystem {
    /// Cut complex; field 0 is the scalar field, field `1 + i` the radial
    /// function of component `i`.
    pub layered: Layered,
    pub report: CriticalReport,
    pub n_max: usize,
    /// `neighborhoods[c][n]`.
    pub neighborhoods: Vec<Vec<MorseNeighborhood>>,
}

impl NeighborhoodSystem {
    pub fn complex(&self) -> &SimplicialComplex {
        &self.layered.complex
    }

    /// The scalar field on the cut complex.
    pub fn field(&self) -> ScalarField {
        self.layered.scalar_field(0)
    }

    pub fn get(&self, component: usize, n: usize) -> &MorseNeighborhood {
        &self.neighborhoods[component][n]
    }

    /// Relative polynomial of component `c` at level `n`.
    pub fn poincare(&self, component: usize, n: usize, side: Side, field: FieldTag) -> PoincarePolynomial {
        relative_poincare(self.complex(), self.get(component, n), side, field)
    }

    /// Relative polynomials of every component at level `n_max`.
    pub fn summands(&self, side: Side, field: FieldTag) -> Vec<PoincarePolynomial> {
        (0..self.neighborhoods.len())
            .into_par_iter()
            .map(|c| self.poincare(c, self.n_max, side, field))
            .collect()
    }
}

/// Band half-width at level `n`: a fraction of both the gap to other critical
/// values and the distance to the nearest non-component neighbour.
pub fn band_width(sf: &ScalarField, report: &CriticalReport, component: usize, n: usize) -> Rat {
    let comp = report.component(component);
    let mut m: Option<Rat> = None;
    for &v in &comp.vertices {
        for w in sf.complex.neighbors(v) {
            if report.component_of[w as usize] == Some(component) {
                continue;
            }
            let d = (sf.value(w) - &comp.value).abs();
            if !d.is_zero() && m.as_ref().map_or(true, |x| &d < x) {
                m = Some(d);
            }
        }
    }
    let mut base = m.unwrap_or_else(Rat::one);
    if let Some(g) = report.gap(component) {
        base = base.min(g);
    }
    base / int(1i64 << (n + 3))
}

/// Radial truncation level at `n`.
pub fn radial_level(n: usize) -> Rat {
    Rat::new(1.into(), (1i64 << (n + 2)).into())
}

/// Builds neighbourhoods for all components and levels `0..=n_max`.
pub fn build_neighborhood_system(sf: &ScalarField, report: &CriticalReport, n_max: usize) -> Result<NeighborhoodSystem> {
    if sf.complex.dim() > 2 {
        return Err(Error::Unsupported("neighbourhoods are built for dimension at most 2".into()));
    }
    let k = report.components.len();
    let nv = sf.complex.vertex_count();
    let mut fields = vec![sf.values.clone()];
    for c in 0..k {
        fields.push(
            (0..nv)
                .map(|v| if report.component_of[v] == Some(c) { Rat::zero() } else { Rat::one() })
                .collect(),
        );
    }
    let deltas: Vec<Vec<Rat>> = (0..k)
        .map(|c| (0..=n_max).map(|n| band_width(sf, report, c, n)).collect())
        .collect();
    for (c, ds) in deltas.iter().enumerate() {
        let value = &report.component(c).value;
        for other in &report.critical_values {
            if other != value && (other - value).abs() <= ds[0] {
                return Err(Error::Invariant(format!("band of component {c} reaches another critical value")));
            }
        }
    }

    let mut levels: Vec<Rat> = report.midpoints.clone();
    levels.extend(report.critical_values.iter().cloned());
    levels.sort();
    let mut layered = Layered::new(sf.complex.clone(), fields)?.cut_all(0, &levels);
    let taus: Vec<Rat> = (0..=n_max).map(radial_level).collect();
    for c in 0..k {
        layered = layered.cut_all(1 + c, &taus);
    }
    // band levels only matter inside the outermost radial region
    for (c, ds) in deltas.iter().enumerate() {
        let value = &report.component(c).value;
        for d in ds {
            for level in [value - d, value + d] {
                let r = layered.fields[1 + c].clone();
                let inner = |a: u32, b: u32| r[a as usize] <= taus[0] && r[b as usize] <= taus[0];
                layered = layered.cut_where(0, &level, inner);
            }
        }
    }

    let cx = &layered.complex;
    let neighborhoods: Vec<Vec<MorseNeighborhood>> = (0..k)
        .into_par_iter()
        .map(|c| {
            (0..=n_max)
                .map(|n| {
                    let value = &report.component(c).value;
                    let f = &layered.fields[0];
                    let r = &layered.fields[1 + c];
                    let (d, tau) = (&deltas[c][n], &taus[n]);
                    let (lo, hi) = (value - d, value + d);
                    let inside = |v: u32| {
                        let x = &f[v as usize];
                        &lo <= x && x <= &hi && &r[v as usize] <= tau
                    };
                    let cells = Subcomplex::from_vertex_predicate(cx, inside);
                    let on = |pred: &dyn Fn(u32) -> bool| Subcomplex::from_vertex_predicate(cx, |v| inside(v) && pred(v));
                    let boundary_plus = on(&|v| f[v as usize] == hi);
                    let boundary_minus = on(&|v| f[v as usize] == lo);
                    let boundary_perp = on(&|v| &r[v as usize] == tau);
                    let perp_lower = on(&|v| &r[v as usize] == tau && &f[v as usize] <= value);
                    let perp_upper = on(&|v| &r[v as usize] == tau && &f[v as usize] >= value);
                    MorseNeighborhood {
                        component: c,
                        level: n,
                        cells,
                        boundary_plus,
                        boundary_minus,
                        boundary_perp,
                        perp_lower,
                        perp_upper,
                        delta_plus: d.clone(),
                        delta_minus: d.clone(),
                        tau: tau.clone(),
                    }
                })
                .collect()
        })
        .collect();
    Ok(NeighborhoodSystem {
        layered,
        report: report.clone(),
        n_max,
        neighborhoods,
    })
}

/// Relative homology of the neighbourhood against ∂₋ ∪ (lower ∂⊥) or
/// ∂₊ ∪ (upper ∂⊥).
pub fn relative_poincare(cx: &SimplicialComplex, nb: &MorseNeighborhood, side: Side, field: FieldTag) -> PoincarePolynomial {
    let a = match side {
        Side::Minus => nb.boundary_minus.union(&nb.perp_lower),
        Side::Plus => nb.boundary_plus.union(&nb.perp_upper),
    };
    relative_homology(cx, &nb.cells, &a, field).expect("boundary parts are face-closed subcomplexes of the neighbourhood")
}

/// True iff every component's relative polynomials agree across all levels.
pub fn stability_check(system: &NeighborhoodSystem, field: FieldTag) -> bool {
    (0..system.neighborhoods.len()).into_par_iter().all(|c| {
        [Side::Minus, Side::Plus].iter().all(|&side| {
            let first = system.poincare(c, 0, side, field);
            (1..=system.n_max).all(|n| system.poincare(c, n, side, field) == first)
        })
    })
}

/// Checks P(𝒩, ∂₋)(t) = t^dim · P(𝒩, ∂₊)(1/t).
pub fn duality_check(cx: &SimplicialComplex, nb: &MorseNeighborhood, dim: usize, field: FieldTag) -> bool {
    let minus = relative_poincare(cx, nb, Side::Minus, field);
    let plus = relative_poincare(cx, nb, Side::Plus, field);
    plus.reflect(dim).is_some_and(|p| p == minus)
}

/// Which family of inequalities a report belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum InequalitySide {
    Descending,
    Ascending,
}

impl From<Side> for InequalitySide {
    fn from(s: Side) -> Self {
        match s {
            Side::Minus => InequalitySide::Descending,
            Side::Plus => InequalitySide::Ascending,
        }
    }
}

/// Σ summands = total + (1 + t)·remainder.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InequalityReport {
    pub side: InequalitySide,
    pub total: PoincarePolynomial,
    pub summands: Vec<PoincarePolynomial>,
    pub remainder: PoincarePolynomial,
    pub exact: bool,
}

/// Computes the remainder by exact division by (1 + t); fails on an inexact
/// division or a negative coefficient.
pub fn morse_inequalities(
    side: InequalitySide,
    total: &PoincarePolynomial,
    summands: &[PoincarePolynomial],
) -> Result<InequalityReport> {
    let sum = summands.iter().fold(IntPoly::new(vec![]), |acc, p| acc.add(&p.to_int()));
    let r = sum.sub(&total.to_int()).div_one_plus_t()?;
    let remainder = r
        .to_poincare()
        .ok_or_else(|| Error::Invariant(format!("negative Morse remainder {r}")))?;
    Ok(InequalityReport {
        side,
        total: total.clone(),
        summands: summands.to_vec(),
        exact: remainder.is_zero(),
        remainder,
    })
}

/// Number of connected pieces of a subcomplex (e.g. boundary arcs).
pub fn piece_count(cx: &SimplicialComplex, s: &Subcomplex) -> usize {
    s.connected_components(cx).len()
}
