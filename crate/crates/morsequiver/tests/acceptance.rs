//! Acceptance suite: prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use std::cell::Cell;
use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use morsequiver::chains::{
    homology, oracle_relative_homology_f2, relative_homology, validate_chain_complex, ChainComplex, FieldTag,
    PoincarePolynomial,
};
use morsequiver::fixtures::{build, build_quiver, Resolution, SURFACE_NAMES};
use morsequiver::flow::{check_strata, morse_witten_complex};
use morsequiver::neighborhoods::{duality_check, morse_inequalities, piece_count, stability_check, InequalitySide, Side};
use morsequiver::pipeline::Analysis;
use morsequiver::quiveralg::{path_count, power_quiver, validate_multicomplex};
use morsequiver::scalarfield::int;
use morsequiver::spectral::{abuts, total_of_double, SpectralPage};
use morsequiver::Error;
use proptest::collection::vec;
use proptest::prelude::any;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

const FIELDS: [FieldTag; 2] = [FieldTag::F2, FieldTag::Rational];
const N_MAX: usize = 2;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)*) => {
        if !$cond {
            return Err(format!($($msg)*));
        }
    };
}

fn p(c: &[u64]) -> PoincarePolynomial {
    PoincarePolynomial::new(c.to_vec())
}

fn sorted(mut v: Vec<PoincarePolynomial>) -> Vec<PoincarePolynomial> {
    v.sort();
    v
}

/// Analyses of every surface fixture over both fields at level `N_MAX`.
struct Fixtures {
    analyses: BTreeMap<(&'static str, bool), Analysis>,
}

impl Fixtures {
    fn load() -> Result<Self, String> {
        let mut analyses = BTreeMap::new();
        for name in SURFACE_NAMES {
            let sf = build(name, Resolution::default()).map_err(|e| format!("{name}: {e}"))?;
            for field in FIELDS {
                let a = Analysis::new(sf.clone(), field, N_MAX).map_err(|e| format!("{name}: {e}"))?;
                analyses.insert((*name, field == FieldTag::Rational), a);
            }
        }
        Ok(Fixtures { analyses })
    }

    fn get(&self, name: &str, field: FieldTag) -> &Analysis {
        &self.analyses[&(SURFACE_NAMES.iter().find(|n| **n == name).copied().unwrap(), field == FieldTag::Rational)]
    }

    fn all(&self) -> impl Iterator<Item = (&str, &Analysis)> {
        self.analyses.iter().map(|((n, _), a)| (*n, a))
    }
}

fn inequalities(a: &Analysis) -> Result<(PoincarePolynomial, PoincarePolynomial), String> {
    let down = morse_inequalities(InequalitySide::Descending, &a.betti, &a.system.summands(Side::Minus, a.field))
        .map_err(|e| e.to_string())?;
    let up = morse_inequalities(InequalitySide::Ascending, &a.betti, &a.system.summands(Side::Plus, a.field))
        .map_err(|e| e.to_string())?;
    Ok((down.remainder, up.remainder))
}

fn criterion_1(fx: &Fixtures) -> Outcome {
    for field in FIELDS {
        let a = fx.get("torus_standard", field);
        let mut kinds: Vec<String> = a.report.components.iter().map(|c| c.kind.to_string()).collect();
        kinds.sort();
        ensure!(kinds == ["Max", "Min", "Saddle(1)", "Saddle(1)"], "kinds {kinds:?}");
        let summands = sorted(a.system.summands(Side::Minus, field));
        ensure!(summands == sorted(vec![p(&[1]), p(&[0, 1]), p(&[0, 1]), p(&[0, 0, 1])]), "summands {summands:?}");
        let (down, up) = inequalities(a)?;
        ensure!(down.is_zero() && up.is_zero(), "remainders {down:?} {up:?}");
    }
    Ok("kinds {Min, Saddle, Saddle, Max}; summands {1, t, t, t²}; R↓ = R↑ = 0".into())
}

fn criterion_2(fx: &Fixtures) -> Outcome {
    for field in FIELDS {
        let a = fx.get("torus_degenerate", field);
        let c2 = a
            .report
            .components
            .iter()
            .position(|c| c.value == int(2))
            .ok_or("no component at value 2")?;
        ensure!(a.report.components[c2].kind.to_string() == "Degenerate(2)", "c₂ kind {}", a.report.components[c2].kind);
        for n in 0..=N_MAX {
            let poly = a.system.poincare(c2, n, Side::Minus, field);
            ensure!(poly == p(&[0, 2]), "P(N_c₂, ∂₋) = {poly:?} at level {n}");
            let nb = a.system.get(c2, n);
            let split = (piece_count(a.system.complex(), &nb.boundary_minus), piece_count(a.system.complex(), &nb.boundary_plus));
            ensure!(split == (3, 3), "boundary split {split:?} at level {n}");
        }
        let (down, up) = inequalities(a)?;
        ensure!(down == p(&[0, 1]), "R↓ = {down:?}");
        ensure!(up == p(&[1]), "R↑ = {up:?}");
    }
    Ok("P(N_c₂, ∂₋) = 2t, boundary split 3+3, R↓ = t, R↑ = 1".into())
}

fn criterion_3(fx: &Fixtures) -> Outcome {
    for field in FIELDS {
        let a = fx.get("genus2", field);
        let summands = sorted(a.system.summands(Side::Minus, field));
        let expected = sorted(vec![p(&[1]), p(&[0, 2]), p(&[0, 1, 1]), p(&[0, 1]), p(&[0, 1, 1]), p(&[0, 1]), p(&[1])]);
        ensure!(summands == expected, "summands {summands:?}");
        let (down, _) = inequalities(a)?;
        ensure!(down == p(&[1, 1]), "R↓ = {down:?}");
    }
    Ok("seven summands {1, 2t, t+t², t, t+t², t, 1}; R↓ = 1 + t".into())
}

fn criterion_4(fx: &Fixtures) -> Outcome {
    for field in FIELDS {
        let a = fx.get("torus_bott", field);
        let summands = sorted(a.system.summands(Side::Minus, field));
        ensure!(summands == sorted(vec![p(&[1, 1]), p(&[0, 1, 1])]), "summands {summands:?}");
        let (down, up) = inequalities(a)?;
        ensure!(down.is_zero() && up.is_zero(), "remainders {down:?} {up:?}");
        let q = &a.flow().map_err(|e| e.to_string())?.quiver.quiver;
        ensure!(q.vertex_count() == 2, "{} quiver vertices", q.vertex_count());
        ensure!(q.arrows.len() == 2 && q.arrows[0] == q.arrows[1], "arrows {:?}", q.arrows);
    }
    Ok("summands {1+t, t+t²}; R = 0; quiver has 2 vertices and 2 parallel arrows".into())
}

fn criterion_5(fx: &Fixtures) -> Outcome {
    let mut checked = 0;
    for (name, a) in fx.all() {
        let dim = a.input.complex.dim();
        for c in 0..a.report.components.len() {
            for n in 0..=N_MAX {
                ensure!(
                    duality_check(a.system.complex(), a.system.get(c, n), dim, a.field),
                    "{name} ({}) component {c} level {n}",
                    a.field.name()
                );
                checked += 1;
            }
        }
    }
    Ok(format!("P(N, ∂₋) = t²·P(N, ∂₊)(1/t) for {checked} neighbourhoods"))
}

fn check_degenerate_pages(label: &str, pages: &[SpectralPage]) -> Result<(), String> {
    ensure!(pages.len() == 2, "{label}: {} pages", pages.len());
    ensure!(pages[0].total_dims() == [1, 3, 2], "{label}: E₁ {:?}", pages[0].total_dims());
    ensure!(pages[0].total_rank() == 1, "{label}: d₁ rank {}", pages[0].total_rank());
    ensure!(pages[1].total_dims() == [1, 2, 1] && pages[1].infinity, "{label}: E₂ {:?}", pages[1].total_dims());
    Ok(())
}

fn criterion_6(fx: &Fixtures) -> Outcome {
    let mut runs = 0;
    for (name, a) in fx.all() {
        let label = format!("{name} ({})", a.field.name());
        let betti = a.betti.coefficients();
        let mv = a.mv_or_trivial().map_err(|e| format!("{label}: {e}"))?;
        let sub = a.sublevel_pages(&mv).map_err(|e| format!("{label}: {e}"))?;
        ensure!(abuts(&sub, betti), "{label} sublevel: E∞ {:?} vs {betti:?}", sub.last().map(|p| p.total_dims()));
        runs += 1;
        if name == "torus_degenerate" {
            check_degenerate_pages(&format!("{label} sublevel"), &sub)?;
        }
        if a.flow.is_none() {
            continue;
        }
        let model = a.model(&mv).map_err(|e| format!("{label}: {e}"))?;
        for phi in [a.morse_levelling(), a.index_levelling()] {
            let run = match a.levelling(&mv, &model, &phi) {
                Ok(run) => run,
                Err(Error::Levelling { .. }) if phi.name == "index" => continue,
                Err(e) => return Err(format!("{label} {}: {e}", phi.name)),
            };
            ensure!(abuts(&run.pages, betti), "{label} {}: E∞ {:?}", phi.name, run.pages.last().map(|p| p.total_dims()));
            runs += 1;
            if name == "torus_degenerate" {
                check_degenerate_pages(&format!("{label} {}", phi.name), &run.pages)?;
            }
        }
    }
    Ok(format!("{runs} runs abut; degenerate torus E₁ = (1,3,2), d₁ rank 1, E₂ = E∞ = (1,2,1)"))
}

fn criterion_7() -> Outcome {
    let q = |name: &str| build_quiver(name).map(|r| r.quiver).map_err(|e| e.to_string());
    let (g1, g2, g3) = (q("gamma1")?, q("gamma2")?, q("gamma3")?);
    // vertices are c₁..c₅ at indices 0..4
    ensure!(path_count(&g1, 4, 0, 2) == 10, "Γ₁ c₅→c₁ length 2: {}", path_count(&g1, 4, 0, 2));
    ensure!(path_count(&g1, 3, 0, 2) == 3, "Γ₁ c₄→c₁ length 2: {}", path_count(&g1, 3, 0, 2));
    ensure!(path_count(&g2, 4, 0, 3) == 6, "Γ₂ c₅→c₁ length 3: {}", path_count(&g2, 4, 0, 3));
    ensure!(path_count(&g3, 4, 0, 3) == 12, "Γ₃ c₅→c₁ length 3: {}", path_count(&g3, 4, 0, 3));
    for r in 3..=8 {
        ensure!(power_quiver(&g1, r).arrows.is_empty(), "Γ₁^{r} nonempty");
    }
    for r in 4..=8 {
        ensure!(power_quiver(&g2, r).arrows.is_empty(), "Γ₂^{r} nonempty");
        ensure!(power_quiver(&g3, r).arrows.is_empty(), "Γ₃^{r} nonempty");
    }
    Ok("Γ₁: 10 and 3 paths of length 2; Γ₂: 6, Γ₃: 12 of length 3; nilpotence orders 3, 4, 4".into())
}

fn criterion_8() -> Outcome {
    let complexes: Vec<_> = SURFACE_NAMES
        .iter()
        .map(|n| build(n, Resolution::default()).map(|sf| sf.complex))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let config = Config { cases: 100, failure_persistence: None, ..Config::default() };
    let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    let cases = Cell::new(0);
    let nontrivial = Cell::new(0);
    let strategy = (0..complexes.len(), vec(any::<u32>(), 64));
    let result = runner.run(&strategy, |(which, seeds)| {
        let cx = &complexes[which];
        let (x, a) = common::sample_pair(cx, &seeds, 36);
        if x.total() > 200 {
            return Err(TestCaseError::fail(format!("sampled {} simplices", x.total())));
        }
        let fast = relative_homology(cx, &x, &a, FieldTag::F2).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let slow = oracle_relative_homology_f2(cx, &x, &a);
        if fast != slow {
            return Err(TestCaseError::fail(format!("{}: {fast:?} vs oracle {slow:?}", SURFACE_NAMES[which])));
        }
        cases.set(cases.get() + 1);
        if fast.coefficients().iter().skip(1).any(|&b| b > 0) {
            nontrivial.set(nontrivial.get() + 1);
        }
        Ok(())
    });
    result.map_err(|e| e.to_string())?;
    let (cases, nontrivial) = (cases.get(), nontrivial.get());
    ensure!(cases == 100, "only {cases} cases ran");
    Ok(format!("{cases} random pairs agree with the oracle ({nontrivial} with H₁ or H₂ ≠ 0)"))
}

fn criterion_9(fx: &Fixtures) -> Outcome {
    let complexes = Cell::new(0);
    let square_zero = |cc: &ChainComplex, what: &str| -> Result<(), String> {
        ensure!(validate_chain_complex(cc).map_err(|e| format!("{what}: {e}"))?, "{what}: ∂² ≠ 0");
        complexes.set(complexes.get() + 1);
        Ok(())
    };
    let mut strata = 0;
    let mut nerve = 0;
    let mut stable = 0;
    let mut witten = Vec::new();
    for (name, a) in fx.all() {
        let field = a.field;
        let label = format!("{name} ({})", field.name());
        square_zero(&ChainComplex::of_complex(&a.input.complex, field), &format!("{label} complex"))?;
        square_zero(&ChainComplex::of_complex(a.system.complex(), field), &format!("{label} cut complex"))?;
        for c in 0..a.report.components.len() {
            for n in 0..=N_MAX {
                let nb = a.system.get(c, n);
                let rel = ChainComplex::relative(a.system.complex(), &nb.cells, &nb.boundary_minus, field);
                square_zero(&rel, &format!("{label} neighbourhood {c}/{n}"))?;
            }
        }
        ensure!(stability_check(&a.system, field), "{label}: stability fails at n_max = {N_MAX}");
        stable += 1;
        let mv = a.mv_or_trivial().map_err(|e| e.to_string())?;
        square_zero(&total_of_double(&mv.double).map_err(|e| e.to_string())?, &format!("{label} Mayer–Vietoris"))?;
        let Some(flow) = &a.flow else { continue };
        check_strata(&flow.gradient).map_err(|e| format!("{label} strata: {e}"))?;
        strata += 1;
        let q = &flow.quiver.quiver;
        for simplices in mv.nerve.iter().skip(1) {
            for s in simplices {
                for w in s.windows(2) {
                    ensure!(
                        q.shortest_path(w[1], w[0]).is_some(),
                        "{label}: nerve simplex {s:?} has no quiver path {} → {}",
                        q.labels[w[1]],
                        q.labels[w[0]]
                    );
                }
                nerve += 1;
            }
        }
        let model = a.model(&mv).map_err(|e| e.to_string())?;
        let (model_cc, _) = model.complex(field).map_err(|e| e.to_string())?;
        square_zero(&model_cc, &format!("{label} reduced model"))?;
        for phi in [a.morse_levelling(), a.index_levelling()] {
            let run = a.levelling(&mv, &model, &phi).map_err(|e| e.to_string())?;
            let report = validate_multicomplex(&run.multicomplex).map_err(|e| e.to_string())?;
            ensure!(report.square_zero, "{label} {} multicomplex: D² ≠ 0", phi.name);
            complexes.set(complexes.get() + 1);
        }
        let morse = a.report.components.iter().all(|c| c.kind.morse_index().is_some());
        if field == FieldTag::F2 && morse {
            match morse_witten_complex(&flow.gradient, field) {
                Ok(mw) => {
                    square_zero(&mw.complex, &format!("{label} Morse–Witten"))?;
                    let h = homology(&mw.complex, field);
                    ensure!(h == a.betti, "{label}: Morse–Witten {h:?} vs {:?}", a.betti);
                    witten.push(name.to_string());
                }
                Err(Error::Unsupported(_)) => {}
                Err(e) => return Err(format!("{label}: {e}")),
            }
        }
    }
    for required in ["sphere", "torus_standard"] {
        ensure!(witten.iter().any(|w| w == required), "Morse–Witten not evaluated on {required}");
    }
    Ok(format!(
        "∂² = 0 on {complexes} complexes; strata on {strata}; {nerve} nerve simplices on quiver paths; \
         stability on {stable}; Morse–Witten = homology on {}",
        witten.join(", "),
        complexes = complexes.get()
    ))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let fixtures = Fixtures::load();
    println!("fixtures loaded in {:.1}s", start.elapsed().as_secs_f64());
    let criteria: [(&str, Box<dyn Fn() -> Outcome>); 9] = [
        ("standard torus", Box::new(|| criterion_1(fixtures.as_ref()?))),
        ("degenerate torus", Box::new(|| criterion_2(fixtures.as_ref()?))),
        ("genus-2 surface", Box::new(|| criterion_3(fixtures.as_ref()?))),
        ("Morse–Bott torus", Box::new(|| criterion_4(fixtures.as_ref()?))),
        ("duality", Box::new(|| criterion_5(fixtures.as_ref()?))),
        ("spectral abutment", Box::new(|| criterion_6(fixtures.as_ref()?))),
        ("quiver path counts", Box::new(criterion_7)),
        ("oracle equivalence", Box::new(criterion_8)),
        ("property suites", Box::new(|| criterion_9(fixtures.as_ref()?))),
    ];
    let mut failures = 0;
    for (i, (title, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = check();
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("criterion {}: PASS [{title}] {msg} ({secs:.1}s)", i + 1),
            Err(msg) => {
                failures += 1;
                println!("criterion {}: FAIL [{title}] {msg} ({secs:.1}s)", i + 1);
            }
        }
    }
    println!("acceptance: {} of 9 criteria pass", 9 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
