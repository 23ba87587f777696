use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::double::{total_of_double, MvDoubleComplex};
use super::filtered::{pages, FilteredComplex, SpectralPage};
use crate::chains::{ChainComplex, FieldTag, SparseMatrix};
use crate::error::{Error, Result};
use crate::quiveralg::{Block, Quiver, QuiverMulticomplex};
use crate::scalarfield::{fmt_rat, parse_rat, Rat};

/// A function `φ(v, n)` on quiver vertices and degrees with finitely many
/// values; degrees beyond the table reuse its last entry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevellingFunction {
    pub name: String,
    /// `values[v][n]`, each row nonempty.
    pub values: Vec<Vec<Rat>>,
}

#[derive(Deserialize)]
struct LevellingFile {
    name: Option<String>,
    values: Vec<Vec<String>>,
}

impl LevellingFunction {
    /// `φ(v, n) = grading(v)`.
    pub fn morse(grading: &[Rat]) -> Self {
        LevellingFunction { name: "morse".into(), values: grading.iter().map(|g| vec![g.clone()]).collect() }
    }

    /// `φ(v, n) = n` for degrees `0..=top`.
    pub fn index(vertices: usize, top: usize) -> Self {
        let row: Vec<Rat> = (0..=top as i64).map(|n| Rat::from_integer(n.into())).collect();
        LevellingFunction { name: "index".into(), values: vec![row; vertices] }
    }

    /// Reads `{"name": ..., "values": [["0", "1/2", ...], ...]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: LevellingFile =
            serde_json::from_str(text).map_err(|e| Error::Invalid(format!("levelling table: {e}")))?;
        let values = file
            .values
            .iter()
            .map(|row| row.iter().map(|s| parse_rat(s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        if values.iter().any(Vec::is_empty) {
            return Err(Error::Invalid("levelling table has an empty row".into()));
        }
        Ok(LevellingFunction { name: file.name.unwrap_or_else(|| "table".into()), values })
    }

    pub fn value(&self, v: usize, n: usize) -> &Rat {
        let row = &self.values[v];
        &row[n.min(row.len() - 1)]
    }

    /// Distinct values in increasing order.
    pub fn levels(&self) -> Vec<Rat> {
        let mut all: Vec<Rat> = self.values.iter().flatten().cloned().collect();
        all.sort();
        all.dedup();
        all
    }

    fn level_of(&self, v: usize, n: usize, levels: &[Rat]) -> i64 {
        levels.binary_search(self.value(v, n)).expect("value is one of the levels") as i64
    }

    /// Conditions (i) `φ(v, n−1) ≤ φ(v, n)` and (ii) `φ(v, n−1) < φ(w, n)`
    /// for every arrow `w → v`, for degrees up to `top`.
    pub fn check(&self, quiver: &Quiver, top: usize) -> Result<()> {
        if self.values.len() != quiver.vertex_count() {
            return Err(Error::Invalid(format!(
                "levelling function has {} rows for {} vertices",
                self.values.len(),
                quiver.vertex_count()
            )));
        }
        for v in 0..self.values.len() {
            for n in 1..=top.max(self.values[v].len()) {
                if self.value(v, n - 1) > self.value(v, n) {
                    return Err(Error::Levelling {
                        condition: "i",
                        msg: format!("φ({}, {}) > φ({}, {n})", quiver.labels[v], n - 1, quiver.labels[v]),
                    });
                }
            }
        }
        for a in &quiver.arrows {
            let (w, v) = (a.tail, a.head);
            for n in 1..=top {
                if self.value(v, n - 1) >= self.value(w, n) {
                    return Err(Error::Levelling {
                        condition: "ii",
                        msg: format!(
                            "arrow {} -> {}: φ({}, {}) = {} is not below φ({}, {n}) = {}",
                            quiver.labels[w],
                            quiver.labels[v],
                            quiver.labels[v],
                            n - 1,
                            fmt_rat(self.value(v, n - 1)),
                            quiver.labels[w],
                            fmt_rat(self.value(w, n))
                        ),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Generator of the reduced model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ModelGenerator {
    pub vertex: usize,
    pub degree: usize,
}

/// A minimal filtered model of `Tot` of a Mayer–Vietoris double complex:
/// the complex is filtered by the top vertex of each nerve simplex, pairs
/// cancelling within one vertex are removed, and what remains has one
/// differential entry per surviving pair.
#[derive(Clone, Debug, Serialize)]
pub struct ReducedModel {
    pub generators: Vec<ModelGenerator>,
    /// `(source, target)` generator indices with coefficient one.
    pub differential: Vec<(usize, usize)>,
}

impl ReducedModel {
    pub fn top_degree(&self) -> usize {
        self.generators.iter().map(|g| g.degree).max().unwrap_or(0)
    }

    /// Chain complex with generators grouped by degree in index order, and
    /// the position of each generator within its degree.
    pub fn complex(&self, field: FieldTag) -> Result<(ChainComplex, Vec<usize>)> {
        let top = self.top_degree();
        let mut ranks = vec![0usize; top + 1];
        let mut position = Vec::with_capacity(self.generators.len());
        for g in &self.generators {
            position.push(ranks[g.degree]);
            ranks[g.degree] += 1;
        }
        let mut columns: Vec<Vec<Vec<(u32, i64)>>> = ranks.iter().map(|&r| vec![Vec::new(); r]).collect();
        for &(s, t) in &self.differential {
            let k = self.generators[s].degree;
            columns[k][position[s]].push((position[t] as u32, 1));
        }
        let maps = (1..=top)
            .map(|k| SparseMatrix::from_columns(ranks[k - 1], std::mem::take(&mut columns[k])))
            .collect();
        Ok((ChainComplex::new(field, &ranks, maps)?, position))
    }
}

/// Builds the reduced model of `Tot(mv)`, where `vertex_rank[v]` orders the
/// vertices (pieces) and each generator belongs to the last vertex of its
/// nerve simplex.
pub fn reduced_model(mv: &MvDoubleComplex, vertex_rank: &[usize]) -> Result<ReducedModel> {
    let tot = total_of_double(&mv.double)?;
    let vertex: Vec<Vec<usize>> = (0..tot.ranks().len())
        .map(|k| mv.total_simplices(k).into_iter().map(|s| *s.last().expect("nonempty simplex")).collect())
        .collect();
    let levels = vertex.iter().map(|row| row.iter().map(|&v| vertex_rank[v] as i64).collect()).collect();
    let fc = FilteredComplex::new(tot, levels)?;
    let bc = fc.barcode();
    let mut generators = Vec::new();
    let mut differential = Vec::new();
    for e in &bc.essential {
        generators.push(ModelGenerator { vertex: vertex[e.degree][e.generator], degree: e.degree });
    }
    for p in bc.pairs.iter().filter(|p| p.gap() > 0) {
        let t = generators.len();
        generators.push(ModelGenerator { vertex: vertex[p.degree][p.birth_generator], degree: p.degree });
        generators.push(ModelGenerator { vertex: vertex[p.degree + 1][p.death_generator], degree: p.degree + 1 });
        differential.push((t + 1, t));
    }
    Ok(ReducedModel { generators, differential })
}

/// Outcome of the chain-level check of levelling condition (iii).
#[derive(Clone, Debug, Serialize)]
pub struct ConditionThree {
    pub holds: bool,
    /// Number of `(σ, ℓ)` with `p > 0` and nonzero relative homology.
    pub failures: usize,
    /// First failing nerve simplex and level value.
    pub witness: Option<(Vec<usize>, String)>,
}

/// Evaluates condition (iii) on the chains of each nerve simplex.
pub fn condition_three(mv: &MvDoubleComplex, phi: &LevellingFunction) -> ConditionThree {
    let dc = &mv.double;
    let field = dc.field;
    let mut failures = 0;
    let mut witness = None;
    let levels = phi.levels();
    for p in 1..mv.nerve.len() {
        for (s, simplex) in mv.nerve[p].iter().enumerate() {
            let v0 = simplex[0];
            let height = dc.height();
            let ranges: Vec<std::ops::Range<usize>> = (0..height)
                .map(|q| {
                    let gens = &mv.generators[p][q];
                    let lo = gens.partition_point(|g| g.0 < s);
                    let hi = gens.partition_point(|g| g.0 <= s);
                    lo..hi
                })
                .collect();
            let rank: Vec<usize> = (0..height)
                .map(|q| {
                    if q == 0 {
                        return 0;
                    }
                    let m = &dc.vertical[p][q];
                    let cols = ranges[q].clone().map(|j| m.columns[j].clone()).collect();
                    SparseMatrix::from_columns(m.rows, cols).rank(field)
                })
                .collect();
            for level in &levels {
                let inside = |q: usize| q < height && phi.value(v0, p + q) == level;
                let homology: usize = (0..height)
                    .filter(|&q| inside(q))
                    .map(|q| {
                        let cycles = ranges[q].len() - if q > 0 && inside(q - 1) { rank[q] } else { 0 };
                        cycles - if inside(q + 1) { rank[q + 1] } else { 0 }
                    })
                    .sum();
                if homology > 0 {
                    failures += 1;
                    witness.get_or_insert_with(|| (simplex.clone(), fmt_rat(level)));
                }
            }
        }
    }
    ConditionThree { holds: failures == 0, failures, witness }
}

/// Spectral sequence of a levelling function on the reduced model.
#[derive(Clone, Debug)]
pub struct LevellingRun {
    pub name: String,
    pub pages: Vec<SpectralPage>,
    /// The `E₁` page as a multicomplex on the quiver.
    pub multicomplex: QuiverMulticomplex,
    pub condition_three: ConditionThree,
}

/// Runs the `φ`-filtration spectral sequence. `quiver` has one vertex per
/// piece of `mv`; each model differential entry from `v` to `w` is placed on
/// a shortest quiver path from `v` to `w`.
pub fn levelling_spectral(
    mv: &MvDoubleComplex,
    model: &ReducedModel,
    quiver: &Quiver,
    phi: &LevellingFunction,
) -> Result<LevellingRun> {
    let field = mv.double.field;
    let top = model.top_degree();
    phi.check(quiver, top)?;
    let (complex, position) = model.complex(field)?;
    let levels_table = phi.levels();
    let mut levels: Vec<Vec<i64>> = complex.ranks().iter().map(|&r| vec![0; r]).collect();
    for (g, &pos) in model.generators.iter().zip(&position) {
        levels[g.degree][pos] = phi.level_of(g.vertex, g.degree, &levels_table);
    }
    let fc = FilteredComplex::new(complex, levels).map_err(|e| Error::Levelling {
        condition: "ii",
        msg: format!("the filtration is not preserved by the differential: {e}"),
    })?;
    let pages = pages(&fc);

    let n = quiver.vertex_count();
    let mut dims = vec![vec![0usize; top + 1]; n];
    let mut slot = Vec::with_capacity(model.generators.len());
    for g in &model.generators {
        slot.push(dims[g.vertex][g.degree]);
        dims[g.vertex][g.degree] += 1;
    }
    let mut blocks: BTreeMap<(usize, usize, usize), Block> = BTreeMap::new();
    for &(s, t) in &model.differential {
        let (gs, gt) = (model.generators[s], model.generators[t]);
        let block = blocks
            .entry((gs.vertex, gt.vertex, gs.degree))
            .or_insert_with(|| Block::zeros(dims[gt.vertex][gt.degree], dims[gs.vertex][gs.degree]));
        block.set(slot[t], slot[s], Rat::from_integer(1.into()));
    }
    let mut mc = QuiverMulticomplex::new(quiver.clone(), field, dims)?;
    for ((v, w, degree), block) in blocks {
        let path = quiver.shortest_path(v, w).ok_or_else(|| {
            Error::Invariant(format!(
                "the differential links {} to {} but the quiver has no path between them",
                quiver.labels[v], quiver.labels[w]
            ))
        })?;
        mc.add_map(path, degree, block)?;
    }
    Ok(LevellingRun { name: phi.name.clone(), pages, multicomplex: mc, condition_three: condition_three(mv, phi) })
}
