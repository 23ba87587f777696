//! JSON report (schema 1), named invariant checks and DOT export.

use serde::Serialize;
use serde_json::{json, Value};

use crate::chains::{homology, validate_chain_complex, ChainComplex, FieldTag, PoincarePolynomial};
use crate::error::{Error, Result};
use crate::flow::{build_refined_quiver, check_strata, morse_witten_complex};
use crate::neighborhoods::{duality_check, morse_inequalities, stability_check, InequalitySide, Side};
use crate::pipeline::Analysis;
use crate::quiveralg::{validate_acyclic, Quiver};
use crate::scalarfield::{fmt_rat, reeb_graph_with};
use crate::spectral::{abuts, LevellingFunction, SpectralPage};

pub const SCHEMA: u32 = 1;

/// Outcome of one named internal check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool) -> Self {
        Check { name: name.into(), passed, detail: None }
    }

    fn with_detail(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), passed, detail: Some(detail.into()) }
    }
}

/// A rendered report and the checks it contains.
#[derive(Clone, Debug)]
pub struct Report {
    pub value: Value,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn failed(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.value).expect("report values serialize");
        s.push('\n');
        s
    }
}

/// Which levelling functions to run on top of the sublevel filtration.
#[derive(Clone, Debug)]
pub enum LevellingChoice {
    Morse,
    Index,
    Table(LevellingFunction),
}

impl LevellingChoice {
    pub fn resolve(&self, a: &Analysis) -> LevellingFunction {
        match self {
            LevellingChoice::Morse => a.morse_levelling(),
            LevellingChoice::Index => a.index_levelling(),
            LevellingChoice::Table(phi) => phi.clone(),
        }
    }
}

fn poly(p: &PoincarePolynomial) -> Value {
    json!(p.coefficients())
}

fn quiver_json(q: &Quiver, grading: Option<&[crate::scalarfield::Rat]>) -> Value {
    let vertices: Vec<Value> = q
        .labels
        .iter()
        .enumerate()
        .map(|(i, l)| match grading {
            Some(g) => json!({"index": i, "label": l, "grading": fmt_rat(&g[i])}),
            None => json!({"index": i, "label": l}),
        })
        .collect();
    let mut arrows = q.arrows.clone();
    arrows.sort();
    let mut grouped: Vec<Value> = Vec::new();
    let mut i = 0;
    while i < arrows.len() {
        let j = arrows[i..].iter().take_while(|a| **a == arrows[i]).count();
        grouped.push(json!({"tail": arrows[i].tail, "head": arrows[i].head, "multiplicity": j}));
        i += j;
    }
    json!({"vertices": vertices, "arrows": grouped})
}

fn page_json(page: &SpectralPage) -> Value {
    let terms: Vec<Value> = page.terms.iter().map(|(&(p, q), &d)| json!({"p": p, "q": q, "dim": d})).collect();
    let diffs: Vec<Value> = page
        .differentials
        .iter()
        .map(|d| json!({"source": [d.source.0, d.source.1], "target": [d.target.0, d.target.1], "rank": d.rank}))
        .collect();
    json!({
        "r": page.r,
        "infinity": page.infinity,
        "terms": terms,
        "total_dims": page.total_dims(),
        "differentials": diffs,
        "d_rank": page.total_rank(),
    })
}

fn run_json(name: &str, pages: &[SpectralPage], betti: &[u64], max_pages: Option<usize>, extra: Value) -> (Value, Check) {
    let abutment = abuts(pages, betti);
    let shown = max_pages.map_or(pages.len(), |m| m.min(pages.len()));
    let mut v = json!({
        "levelling": name,
        "page_count": pages.len(),
        "pages": pages[..shown].iter().map(page_json).collect::<Vec<_>>(),
        "e_infinity": pages.last().map(SpectralPage::total_dims).unwrap_or_default(),
        "abuts": abutment,
    });
    if let (Value::Object(m), Value::Object(e)) = (&mut v, extra) {
        m.extend(e);
    }
    (v, Check::new(format!("abutment:{name}"), abutment))
}

/// Spectral runs: the sublevel filtration plus each levelling function,
/// the latter only when a flow exists. Levelling condition (i)/(ii) violations are returned as errors.
pub fn spectral_section(
    a: &Analysis,
    levellings: &[LevellingChoice],
    max_pages: Option<usize>,
) -> Result<(Vec<Value>, Vec<Check>)> {
    let mut runs = Vec::new();
    let mut checks = Vec::new();
    let betti = a.betti.coefficients();
    let mv = a.mv_or_trivial()?;
    let sub = a.sublevel_pages(&mv)?;
    let (v, c) = run_json("sublevel", &sub, betti, max_pages, json!({}));
    runs.push(v);
    checks.push(c);
    if a.flow.is_none() {
        return Ok((runs, checks));
    }
    let model = a.model(&mv)?;
    for choice in levellings {
        let phi = choice.resolve(a);
        let run = a.levelling(&mv, &model, &phi)?;
        let c3 = &run.condition_three;
        let extra = json!({
            "condition_iii": {
                "holds": c3.holds,
                "failures": c3.failures,
                "witness": c3.witness.as_ref().map(|(s, l)| json!({"nerve_simplex": s, "level": l})),
            }
        });
        let (v, c) = run_json(&run.name, &run.pages, betti, max_pages, extra);
        runs.push(v);
        checks.push(c);
    }
    Ok((runs, checks))
}

/// Builds the full report.
pub fn analyze_report(a: &Analysis, levellings: &[LevellingChoice]) -> Result<Report> {
    let field = a.field;
    let cx = &a.input.complex;
    let mut checks = Vec::new();

    let cc = ChainComplex::of_complex(cx, field);
    checks.push(Check::new("boundary_squared_zero", validate_chain_complex(&cc)?));
    checks.push(Check::new("neighborhood_stability", stability_check(&a.system, field)));

    let components: Vec<Value> = a
        .report
        .components
        .iter()
        .map(|c| {
            let cells: Vec<usize> = (0..=cx.dim()).map(|d| c.cells.count(d)).collect();
            json!({
                "id": c.id,
                "value": fmt_rat(&c.value),
                "kind": c.kind.to_string(),
                "vertices": c.vertices,
                "cells": cells,
            })
        })
        .collect();

    let n_max = a.system.n_max;
    let minus = a.system.summands(Side::Minus, field);
    let plus = a.system.summands(Side::Plus, field);
    let polys: Vec<Value> = (0..minus.len())
        .map(|c| json!({"component": c, "minus": poly(&minus[c]), "plus": poly(&plus[c])}))
        .collect();

    let mut inequalities = Value::Null;
    let mut quiver = Value::Null;
    let mut refined = Value::Null;
    if let Some(flow) = &a.flow {
        let dim = cx.dim();
        let dual = (0..minus.len()).all(|c| duality_check(a.system.complex(), a.system.get(c, n_max), dim, field));
        checks.push(Check::new("duality", dual));

        let mut sides = serde_json::Map::new();
        let mut ok = true;
        for (side, summands) in [(InequalitySide::Descending, &minus), (InequalitySide::Ascending, &plus)] {
            let key = match side {
                InequalitySide::Descending => "descending",
                InequalitySide::Ascending => "ascending",
            };
            match morse_inequalities(side, &a.betti, summands) {
                Ok(r) => {
                    sides.insert(
                        key.into(),
                        json!({
                            "summands": r.summands.iter().map(poly).collect::<Vec<_>>(),
                            "remainder": poly(&r.remainder),
                            "exact": r.exact,
                        }),
                    );
                }
                Err(e) => {
                    ok = false;
                    sides.insert(key.into(), Value::Null);
                    checks.push(Check::with_detail(format!("inequalities:{key}"), false, e.to_string()));
                }
            }
        }
        if ok {
            checks.push(Check::new("inequalities", true));
        }
        inequalities = Value::Object(sides);

        match check_strata(&flow.gradient) {
            Ok(()) => checks.push(Check::new("strata_partition", true)),
            Err(e) => checks.push(Check::with_detail("strata_partition", false, e.to_string())),
        }
        checks.push(Check::new("quiver_acyclic", validate_acyclic(&flow.quiver.quiver)));
        let all_morse = a.report.components.iter().all(|c| c.kind.morse_index().is_some());
        if field == FieldTag::F2 && all_morse {
            // Saddle connections make the flow non-Morse–Smale; the check does not apply.
            match morse_witten_complex(&flow.gradient, field) {
                Ok(mw) => checks.push(Check::new("morse_witten", homology(&mw.complex, field) == a.betti)),
                Err(Error::Unsupported(_)) => {}
                Err(e) => return Err(e),
            }
        }
        quiver = quiver_json(&flow.quiver.quiver, Some(&flow.quiver.grading));
        refined = quiver_json(&build_refined_quiver(&flow.gradient).quiver, None);
    }

    let reeb = reeb_graph_with(&a.input, &a.report);
    let reeb_json = json!({
        "nodes": reeb
            .node_values
            .iter()
            .zip(&reeb.node_components)
            .map(|(v, cs)| json!({"value": fmt_rat(v), "components": cs}))
            .collect::<Vec<_>>(),
        "edges": reeb.edges.iter().map(|&(x, y)| json!([x, y])).collect::<Vec<_>>(),
    });

    let (runs, spectral_checks) = spectral_section(a, levellings, None)?;
    checks.extend(spectral_checks);

    let value = json!({
        "schema": SCHEMA,
        "field": field.name(),
        "n_max": n_max,
        "betti": poly(&a.betti),
        "critical_components": components,
        "neighborhood_polynomials": polys,
        "inequalities": inequalities,
        "quiver": quiver,
        "refined_quiver": refined,
        "reeb": reeb_json,
        "spectral": runs,
        "checks": checks,
    });
    Ok(Report { value, checks })
}

/// Spectral fragment: field, Betti numbers and the requested runs.
pub fn spectral_report(a: &Analysis, levellings: &[LevellingChoice], max_pages: Option<usize>) -> Result<Report> {
    let (runs, checks) = spectral_section(a, levellings, max_pages)?;
    let value = json!({
        "schema": SCHEMA,
        "field": a.field.name(),
        "betti": poly(&a.betti),
        "spectral": runs,
        "checks": checks,
    });
    Ok(Report { value, checks })
}

/// DOT text of the quiver or the refined quiver.
pub fn quiver_dot(a: &Analysis, refined: bool) -> Result<String> {
    let flow = a.flow()?;
    Ok(if refined {
        build_refined_quiver(&flow.gradient).quiver.to_dot("refined_quiver")
    } else {
        flow.quiver.quiver.to_dot("quiver")
    })
}
