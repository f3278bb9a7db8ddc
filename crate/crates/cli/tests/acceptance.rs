//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`) so the report prints in order;
//! any failing criterion makes the process exit non-zero.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mixedqec::bounds::{classify, singleton_bound, Bound, Classification};
use mixedqec::clique::{check_clique, DistanceOracle};
use mixedqec::compose::{clique_stabilizer_rows, paste_distance2, product_code};
use mixedqec::errors::DEFAULT_DIM_CAP;
use mixedqec::projection::{project_code, required_detectable_set};
use mixedqec::verifier::{
    code_distance, kl_verify_numeric, kl_verify_symbolic, kl_verify_symbolic_words, stabilizer_code_basis,
    verify_stabilizer, KlReport,
};
use mixedqec::{enumerate_errors, Code, CodingClique, CompositeGraph, ErrorWord, Label, MixedSystem, SearchMode};
use mixedqec_cli::certificate::{verify, Certificate, VerifyOptions};
use mixedqec_cli::commands::{cmd_search, SearchArgs, EXIT_VERIFIED};
use mixedqec_cli::fixtures::{self, FIVE_SIXTEEN_ROWS, SIX_SIXTEEN_ROWS};

/// Numeric KL and projector comparisons.
const TOL: f64 = 1e-9;
const CAP: u128 = DEFAULT_DIM_CAP;
const LIMIT_SMALL: Duration = Duration::from_secs(1);
const LIMIT_NUMERIC: Duration = Duration::from_secs(60);
const LIMIT_SEARCH: Duration = Duration::from_secs(10);
/// Random cliques per fixture graph pair in the agreement suite.
const RANDOM_CLIQUES: usize = 100;
/// Label spaces up to this size get exhaustive definition scans.
const SCAN_LIMIT: usize = 4096;
const SEED: u64 = 0x6d69_7865_6471_6563;

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn all(parts: Vec<(bool, String)>) -> Outcome {
    let pass = parts.iter().all(|p| p.0);
    let detail = parts
        .into_iter()
        .map(|(ok, s)| if ok { s } else { format!("[x] {s}") })
        .collect::<Vec<_>>()
        .join("; ");
    check(pass, detail)
}

fn clique_of(c: &Certificate) -> CodingClique {
    c.clique().expect("fixture clique parses")
}

fn numeric(code: &Code, d: usize) -> KlReport {
    kl_verify_numeric(code, d, TOL, CAP).expect("fits the dimension cap")
}

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let c = clique_of(&fixtures::three_four_two().unwrap());
    let code = Code::from_clique(c.clone());
    let report = check_clique(&c).unwrap();
    let sym = kl_verify_symbolic(&c, 2);
    let num = numeric(&code, 2);
    let dist = code_distance(&code, 3, TOL, CAP).unwrap();
    let verdict = classify(&[4, 4, 4], c.len() as u128, 2).unwrap();
    let el = t.elapsed();
    all(vec![
        (report.passes(), "check_clique".into()),
        (sym.passed() && sym.checked_errors == 45, format!("symbolic KL over {} errors", sym.checked_errors)),
        (num.passed(), format!("numeric KL dev {:.1e}", num.max_deviation)),
        (dist == 2, format!("distance {dist}")),
        (verdict == Classification::Optimal, format!("verdict {verdict}")),
        (el < LIMIT_SMALL, format!("{:.3}s", el.as_secs_f64())),
    ])
}

fn criterion_2() -> Outcome {
    let c = clique_of(&fixtures::six_sixteen_three().unwrap());
    let t = Instant::now();
    let sym = kl_verify_symbolic(&c, 3);
    let t_sym = t.elapsed();
    let t = Instant::now();
    let num = numeric(&Code::from_clique(c.clone()), 3);
    let t_num = t.elapsed();
    let dims = c.graphs().system().dims();
    let verdict = classify(&dims, c.len() as u128, 3).unwrap();
    all(vec![
        (c.len() == 16, format!("closure {}", c.len())),
        (sym.passed() && sym.checked_errors == 3465, format!("symbolic KL over {} errors", sym.checked_errors)),
        (num.passed() && num.max_deviation < TOL, format!("numeric KL dev {:.1e}", num.max_deviation)),
        (c.graphs().system().total_dim() == 4096, "dim 4096".into()),
        (verdict == Classification::Optimal, format!("verdict {verdict}")),
        (t_sym < LIMIT_SMALL, format!("symbolic {:.3}s", t_sym.as_secs_f64())),
        (t_num < LIMIT_NUMERIC, format!("numeric {:.2}s", t_num.as_secs_f64())),
    ])
}

fn criterion_3() -> Outcome {
    let mut parts = Vec::new();
    for (cert, size) in [(fixtures::six_eight_three().unwrap(), 8), (fixtures::six_four_three().unwrap(), 4)] {
        let c = clique_of(&cert);
        let dims = c.graphs().system().dims();
        let sym = kl_verify_symbolic(&c, 3);
        let num = numeric(&Code::from_clique(c.clone()), 3);
        let s = singleton_bound(&dims, 3).unwrap();
        let verdict = classify(&dims, c.len() as u128, 3).unwrap();
        parts.push((c.len() == size, format!("{} closure {}", cert.name, c.len())));
        parts.push((sym.passed() && num.passed(), format!("{} KL both ways", cert.name)));
        parts.push((s == Bound::Finite(size as u128), format!("{} Singleton {s}", cert.name)));
        parts.push((verdict == Classification::Optimal, format!("{} {verdict}", cert.name)));
    }
    all(parts)
}

fn criterion_4() -> Outcome {
    let c = clique_of(&fixtures::three_four_two().unwrap());
    let sys = c.graphs().system().clone();
    let rows = clique_stabilizer_rows(&c, CAP).unwrap();
    let p = paste_distance2(&sys, &rows, 4, &[2], Some(&[(1, 3)])).unwrap();
    let basis = stabilizer_code_basis(&p.system, &p.rows, TOL, CAP).unwrap();
    let code = Code::from_states(p.system.clone(), basis, 2).unwrap();
    let published: Vec<ErrorWord> = FIVE_SIXTEEN_ROWS
        .iter()
        .map(|r| ErrorWord::parse(&p.system, r).unwrap())
        .collect();
    let st = verify_stabilizer(&published, &code, TOL, CAP).unwrap();
    let num = numeric(&code, 2);
    all(vec![
        (p.system.dims() == vec![4, 4, 4, 2, 2], format!("dims {:?}", p.system.dims())),
        (code.k() == 16 && st.eigenspace_dim == Some(16), format!("eigenspace {:?}", st.eigenspace_dim)),
        (st.passed(), format!("published rows match, diff {:.1e}", st.projector_difference)),
        (p.system.total_dim() == 256 && num.passed(), format!("numeric KL dev {:.1e}", num.max_deviation)),
    ])
}

fn criterion_5() -> Outcome {
    let a = clique_of(&fixtures::qutrit_ancilla().unwrap());
    let spec = fixtures::projector();
    let required = required_detectable_set(&spec, a.graphs().system(), 2).unwrap();
    let detect = kl_verify_symbolic_words(&a, &required);
    let projected = project_code(&Code::from_clique(a.clone()), &spec, CAP).unwrap();
    let num = numeric(&projected, 2);
    let dims = projected.system().dims();
    let s = singleton_bound(&dims, 2).unwrap();
    let verdict = classify(&dims, projected.k() as u128, 2).unwrap();
    all(vec![
        (detect.passed(), format!("ancilla detects {} required words", required.len())),
        (projected.k() == 9 && dims == vec![3, 3, 3, 3, 2], format!("K {} dims {dims:?}", projected.k())),
        (projected.system().total_dim() == 162 && num.passed(), format!("numeric KL dev {:.1e}", num.max_deviation)),
        (s == Bound::Finite(18), format!("Singleton {s}")),
        (verdict == Classification::Suboptimal, format!("verdict {verdict}")),
    ])
}

fn criterion_6() -> Outcome {
    let c = clique_of(&fixtures::six_sixteen_three().unwrap());
    let sys = c.graphs().system().clone();
    let rows: Vec<ErrorWord> = SIX_SIXTEEN_ROWS.iter().map(|r| ErrorWord::parse(&sys, r).unwrap()).collect();
    let commute = rows
        .iter()
        .enumerate()
        .all(|(i, a)| rows[i + 1..].iter().all(|b| a.commutes_with(b)));
    let st = verify_stabilizer(&rows, &Code::from_clique(c), TOL, CAP).unwrap();
    all(vec![
        (commute && st.commuting, "rows commute".into()),
        (st.eigenspace_dim == Some(16), format!("eigenspace {:?}", st.eigenspace_dim)),
        (
            st.passed() && st.projector_difference < TOL,
            format!("projector diff {:.1e}, phases {:?}", st.projector_difference, st.chosen_phases),
        ),
    ])
}

fn criterion_7() -> Outcome {
    let t = Instant::now();
    let a = Code::from_clique(clique_of(&fixtures::three_four_two().unwrap()));
    let b = Code::from_clique(clique_of(&fixtures::three_eight_two().unwrap()));
    let p = product_code(&a, &b, CAP).unwrap();
    let sym = kl_verify_symbolic(p.clique().unwrap(), 2);
    let num = numeric(&p, 2);
    let el = t.elapsed();
    all(vec![
        (p.k() == 32 && p.system().dims() == vec![32, 32, 32], format!("K {} dims {:?}", p.k(), p.system().dims())),
        (sym.passed(), "symbolic KL".into()),
        (
            p.system().total_dim() == 32768 && num.passed(),
            format!("weight-1 numeric scan over {} errors, dev {:.1e}", num.checked_errors, num.max_deviation),
        ),
        (el < LIMIT_NUMERIC, format!("{:.2}s", el.as_secs_f64())),
    ])
}

fn criterion_8() -> Outcome {
    let t = Instant::now();
    let out = cmd_search(
        &SearchArgs {
            graph_p: "loop:3:2",
            graph_r: Some("loop:3:2"),
            distance: 2,
            target: 4,
            budget: 100_000,
            mode: SearchMode::Group,
            name: "search",
        },
        &VerifyOptions::default(),
    );
    let el = t.elapsed();
    let k = Certificate::parse(&out.stdout).map(|c| c.claimed.k).unwrap_or(0);
    all(vec![
        (out.code == EXIT_VERIFIED, format!("exit {}", out.code)),
        (k >= 4, format!("K {k}")),
        (el < LIMIT_SEARCH, format!("{:.3}s", el.as_secs_f64())),
    ])
}

/// Fixture graph pairs with their claimed distance and a valid clique.
fn fixture_cliques() -> Vec<CodingClique> {
    [
        fixtures::three_four_two(),
        fixtures::three_eight_two(),
        fixtures::six_sixteen_three(),
        fixtures::six_eight_three(),
        fixtures::six_four_three(),
        fixtures::qutrit_ancilla(),
    ]
    .into_iter()
    .map(|c| clique_of(&c.unwrap()))
    .collect()
}

fn random_label(cg: &CompositeGraph, rng: &mut ChaCha8Rng) -> Label {
    let size = cg.system().check_dim(u128::MAX).unwrap();
    cg.label_at(rng.random_range(0..size))
}

/// Half are subsets of the fixture clique (always valid), half random sets.
fn random_clique(base: &CodingClique, rng: &mut ChaCha8Rng) -> CodingClique {
    let cg = base.graphs();
    let zero = Label::zero(cg.system());
    let k = rng.random_range(2..=base.len().min(5));
    let mut v = vec![zero.clone()];
    if rng.random_bool(0.5) {
        let mut rest: Vec<Label> = base.vectors().iter().filter(|c| !c.is_zero()).cloned().collect();
        rest.shuffle(rng);
        v.extend(rest.into_iter().take(k - 1));
    } else {
        while v.len() < k {
            let l = random_label(cg, rng);
            if !v.contains(&l) {
                v.push(l);
            }
        }
    }
    base.with_vectors(v).unwrap()
}

fn agree(sym: &KlReport, num: &KlReport) -> bool {
    sym.verdict == num.verdict
        && match (&sym.witness, &num.witness) {
            (None, None) => true,
            (Some(a), Some(b)) => a.error == b.error && a.kind == b.kind,
            _ => false,
        }
}

fn suite_a(rng: &mut ChaCha8Rng) -> (bool, String) {
    let mut runs = 0;
    let mut bad = Vec::new();
    let mut passing = 0;
    for base in fixture_cliques() {
        if base.graphs().system().total_dim() > 4096 {
            continue;
        }
        for _ in 0..RANDOM_CLIQUES {
            let c = random_clique(&base, rng);
            let d = c.distance();
            let sym = kl_verify_symbolic(&c, d);
            let num = numeric(&Code::from_clique(c.clone()), d);
            runs += 1;
            passing += usize::from(sym.passed());
            if !agree(&sym, &num) {
                bad.push(format!("{:?}", c.vectors()));
            }
        }
    }
    (
        bad.is_empty() && runs == 6 * RANDOM_CLIQUES,
        format!("(a) {runs} random cliques, {passing} passing, {} disagreements", bad.len()),
    )
}

fn suite_b() -> (bool, String) {
    let mut bad = Vec::new();
    let fx = fixtures::positive_fixtures().unwrap();
    for c in &fx {
        let out = verify(c, &VerifyOptions::default()).unwrap();
        let bounds_ok = out.report["checks"]["bounds"]["pass"] == true;
        if !(out.verified && bounds_ok) {
            bad.push(c.name.clone());
        }
    }
    (bad.is_empty(), format!("(b) {} fixtures within both bounds, failing {bad:?}", fx.len()))
}

/// Particles touched by a label pair, read off the layer sites directly.
fn particles(sys: &MixedSystem, xs: &Label, zs: &Label) -> HashSet<usize> {
    let mut out = HashSet::new();
    for (k, layer) in sys.layers().iter().enumerate() {
        for v in 0..layer.len() {
            if xs.0[k].get(v) != 0 || zs.0[k].get(v) != 0 {
                out.insert(layer.sites()[v]);
            }
        }
    }
    out
}

fn suite_c() -> (bool, String) {
    let mut systems = 0;
    let mut mismatches = 0;
    for base in fixture_cliques() {
        let cg = base.graphs();
        let sys = cg.system();
        let size = sys.check_dim(u128::MAX).unwrap();
        if size > SCAN_LIMIT {
            continue;
        }
        for d in 1..=base.distance() + 1 {
            systems += 1;
            let oracle = DistanceOracle::new(cg, d).unwrap();
            // purity: |supp(s) ∪ supp(sΓ)| < d, over every label
            let mut purity: Vec<Label> = (0..size)
                .map(|i| cg.label_at(i))
                .filter(|s| particles(sys, s, &cg.action(s)).len() < d)
                .collect();
            let mut got = oracle.purity_set();
            purity.sort();
            got.sort();
            mismatches += usize::from(purity != got);
            // uncoverable: no error of weight 1..d-1 reduces to δ
            let covered: HashSet<Label> = enumerate_errors(sys, d - 1)
                .filter(|e| !e.is_identity())
                .map(|e| cg.reduce_to_phase_op(&e).1)
                .collect();
            let table = oracle.uncoverable_table(u128::MAX).unwrap();
            mismatches += (0..size).filter(|&i| table[i] == covered.contains(&cg.label_at(i))).count();
        }
    }
    (mismatches == 0, format!("(c) {systems} (system, d) scans, {mismatches} mismatches"))
}

fn suite_d(rng: &mut ChaCha8Rng) -> (bool, String) {
    let mut valid = 0;
    let mut broken = 0;
    let mut bad = 0;
    for base in fixture_cliques() {
        let small = base.graphs().system().total_dim() <= 4096;
        let d = base.distance();
        for _ in 0..RANDOM_CLIQUES {
            let c = random_clique(&base, rng);
            if check_clique(&c).unwrap().passes() {
                valid += 1;
                let ok = kl_verify_symbolic(&c, d).passed() && (!small || numeric(&Code::from_clique(c), d).passed());
                bad += usize::from(!ok);
            }
        }
        // mutations keep 0, so a broken clique fails condition (ii) or (iii)
        for _ in 0..RANDOM_CLIQUES / 4 {
            let mut v = base.vectors().to_vec();
            let i = rng.random_range(1..v.len());
            let zi = v.iter().position(Label::is_zero).unwrap();
            let i = if i == zi { 0 } else { i };
            let mut m = v[i].clone();
            let layer = rng.random_range(0..m.0.len());
            let vert = rng.random_range(0..m.0[layer].len());
            let old = m.0[layer].get(vert) as i64;
            let modulus = m.0[layer].modulus() as i64;
            m.0[layer].set(vert, old + rng.random_range(1..modulus));
            if v.contains(&m) {
                continue;
            }
            v[i] = m;
            let c = base.with_vectors(v).unwrap();
            if check_clique(&c).unwrap().passes() {
                continue;
            }
            broken += 1;
            let sym = kl_verify_symbolic(&c, d);
            let witnessed = sym.witness.as_ref().is_some_and(|w| w.weight < d);
            let num_ok = !small || !numeric(&Code::from_clique(c), d).passed();
            bad += usize::from(!(witnessed && num_ok));
        }
    }
    (
        bad == 0 && valid > 0 && broken > 0,
        format!("(d) {valid} valid cliques pass KL, {broken} broken mutations witnessed, {bad} violations"),
    )
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    all(vec![suite_a(&mut rng), suite_b(), suite_c(), suite_d(&mut rng)])
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("((3,4,2))_4 fixture", criterion_1),
        ("((6,16,3))_4 fixture", criterion_2),
        ("((6,8,3)) and ((6,4,3)) mixed fixtures", criterion_3),
        ("((5,16,2)) by pasting", criterion_4),
        ("((5,9,2)) by projection", criterion_5),
        ("((6,16,3))_4 stabilizer rows", criterion_6),
        ("((3,32,2))_32 product", criterion_7),
        ("clique search on the L3 pair", criterion_8),
        ("property suites", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = f();
        failed += usize::from(!o.pass);
        println!(
            "criterion {} {}: {} ({:.2}s) {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            name,
            t.elapsed().as_secs_f64(),
            o.detail
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
