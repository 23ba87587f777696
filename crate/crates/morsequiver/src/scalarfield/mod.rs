//! Piecewise-linear scalar fields, critical components, cut subdivision and
//! Reeb graphs.

mod classify;
mod cut;
mod reeb;

pub use classify::{classify_vertices, vertex_link, CriticalComponent, CriticalKind, CriticalReport, Link};
pub use cut::{cut_subdivide, Layered};
pub use reeb::{reeb_graph, reeb_graph_with, ReebGraph};
pub(crate) use reeb::cell_components;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::chains::{SimplicialComplex, Subcomplex};
use crate::error::{Error, Result};

/// Exact rational number.
pub type Rat = BigRational;

pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(p: i64) -> Rat {
    Rat::from_integer(BigInt::from(p))
}

/// Parses "p", "p/q" or a finite decimal such as "-1.25" exactly.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::Invalid(format!("not a rational number: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rat::new(p, q));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = whole.starts_with('-');
        let w: BigInt = if whole.is_empty() || whole == "-" || whole == "+" {
            BigInt::zero()
        } else {
            whole.parse().map_err(|_| bad())?
        };
        let f: BigInt = frac.parse().map_err(|_| bad())?;
        let den = num_traits::pow(BigInt::from(10), frac.len());
        let mag = Rat::new(w.magnitude().clone().into(), BigInt::one()) + Rat::new(f, den);
        return Ok(if neg { -mag } else { mag });
    }
    let p: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rat::from_integer(p))
}

/// Canonical "p/q" text (denominator omitted when it is 1).
pub fn fmt_rat(r: &Rat) -> String {
    r.to_string()
}

/// A PL function given by exact values at the vertices of a complex.
#[derive(Clone, Debug)]
pub struct ScalarField {
    pub complex: SimplicialComplex,
    pub values: Vec<Rat>,
}

impl ScalarField {
    pub fn new(complex: SimplicialComplex, values: Vec<Rat>) -> Result<Self> {
        if values.len() != complex.vertex_count() {
            return Err(Error::Invalid(format!(
                "{} values for {} vertices",
                values.len(),
                complex.vertex_count()
            )));
        }
        Ok(ScalarField { complex, values })
    }

    pub fn value(&self, v: u32) -> &Rat {
        &self.values[v as usize]
    }

    /// The field with all values negated.
    pub fn negated(&self) -> ScalarField {
        ScalarField {
            complex: self.complex.clone(),
            values: self.values.iter().map(|v| -v).collect(),
        }
    }

    /// Total order on vertices: by value, then by index.
    pub fn lower(&self, a: u32, b: u32) -> bool {
        (self.value(a), a) < (self.value(b), b)
    }
}

/// Largest subcomplex with all vertex values at most `a`.
pub fn sublevel_complex(sf: &ScalarField, a: &Rat) -> Subcomplex {
    Subcomplex::from_vertex_predicate(&sf.complex, |v| sf.value(v) <= a)
}

/// Largest subcomplex with all vertex values at least `a`.
pub fn superlevel_complex(sf: &ScalarField, a: &Rat) -> Subcomplex {
    Subcomplex::from_vertex_predicate(&sf.complex, |v| sf.value(v) >= a)
}

/// Cells whose vertices all have value exactly `a`.
pub fn level_complex(sf: &ScalarField, a: &Rat) -> Subcomplex {
    Subcomplex::from_vertex_predicate(&sf.complex, |v| sf.value(v) == a)
}
