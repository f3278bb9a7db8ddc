//! Projecting an all-`q` ancilla code onto a mixed-alphabet system.
//!
//! Each projected particle keeps a subset `S_i` of its levels. Errors on the
//! mixed system are pulled back as `P†EP` and expanded in the ancilla's
//! Pauli basis; an ancilla code detecting every term of every expansion
//! projects to a code on the smaller system.

use std::collections::{BTreeMap, HashSet};

use itertools::Itertools;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::errors::{enumerate_errors, ErrorWord, MixedSystem};
use crate::graphstate::StateVector;
use crate::verifier::{Code, DEFAULT_TOL};

/// Coefficients smaller than this are dropped from expansions.
pub const EXPANSION_TOL: f64 = 1e-12;

/// Kept levels per projected particle (0-based internally, 1-based keys in
/// JSON).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SpecJson", into = "SpecJson")]
pub struct ProjectorSpec {
    keep: BTreeMap<usize, Vec<u32>>,
}

#[derive(Serialize, Deserialize)]
struct SpecJson {
    keep: BTreeMap<String, Vec<u32>>,
}

impl TryFrom<SpecJson> for ProjectorSpec {
    type Error = Error;

    fn try_from(j: SpecJson) -> Result<Self> {
        let mut keep = BTreeMap::new();
        for (k, v) in j.keep {
            let p: usize = k
                .parse()
                .map_err(|_| Error::Parse(format!("particle key {k:?} is not an integer")))?;
            if p == 0 {
                return Err(Error::Parse("particle keys are 1-based".into()));
            }
            keep.insert(p - 1, v);
        }
        ProjectorSpec::new(keep)
    }
}

impl From<ProjectorSpec> for SpecJson {
    fn from(s: ProjectorSpec) -> Self {
        SpecJson {
            keep: s.keep.into_iter().map(|(k, v)| ((k + 1).to_string(), v)).collect(),
        }
    }
}

impl ProjectorSpec {
    /// Levels are sorted; empty or repeated level lists are rejected.
    pub fn new(keep: BTreeMap<usize, Vec<u32>>) -> Result<Self> {
        let mut out = BTreeMap::new();
        for (p, mut levels) in keep {
            levels.sort_unstable();
            if levels.is_empty() {
                return Err(Error::Precondition(format!("particle {} keeps no levels", p + 1)));
            }
            if levels.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Precondition(format!("particle {} repeats a level", p + 1)));
            }
            out.insert(p, levels);
        }
        Ok(ProjectorSpec { keep: out })
    }

    pub fn identity() -> Self {
        ProjectorSpec { keep: BTreeMap::new() }
    }

    pub fn keep(&self) -> &BTreeMap<usize, Vec<u32>> {
        &self.keep
    }

    /// Kept levels of `particle` in an ancilla of local dimension `q`.
    pub fn levels(&self, particle: usize, q: u64) -> Vec<u32> {
        match self.keep.get(&particle) {
            Some(l) => l.clone(),
            None => (0..q as u32).collect(),
        }
    }

    pub fn check(&self, ancilla: &MixedSystem) -> Result<()> {
        let dims = ancilla.dims();
        for (&p, levels) in &self.keep {
            let q = *dims
                .get(p)
                .ok_or_else(|| Error::Precondition(format!("particle {} not in the ancilla", p + 1)))?;
            if levels.iter().any(|&l| l as u64 >= q) {
                return Err(Error::Precondition(format!("particle {} keeps a level ≥ {q}", p + 1)));
            }
        }
        Ok(())
    }

    /// The mixed system left after projection, one layer per distinct
    /// dimension.
    pub fn target_system(&self, ancilla: &MixedSystem) -> Result<MixedSystem> {
        self.check(ancilla)?;
        let dims: Vec<u32> = ancilla
            .dims()
            .iter()
            .enumerate()
            .map(|(p, &q)| self.levels(p, q).len() as u32)
            .collect();
        if dims.iter().any(|&d| d < 2) {
            return Err(Error::Precondition("projected particles need at least 2 levels".into()));
        }
        MixedSystem::from_dims(&dims)
    }
}

#[derive(Clone, Debug)]
pub struct Term {
    pub coeff: Complex64,
    pub word: ErrorWord,
}

/// `Σ_u c_u B_u` for a local `q×q` matrix, with `c_u = Tr(B_u† M)/q`.
fn expand_local(sys: &MixedSystem, particle: usize, m: &[Vec<Complex64>]) -> Vec<(u64, Complex64)> {
    let q = m.len();
    let count = sys.local_op_count(particle) + 1;
    (0..count)
        .filter_map(|u| {
            let b = ErrorWord::from_local(sys, &[(particle, u)]).local_monomial(sys, &[particle]);
            let c: Complex64 = (0..q)
                .map(|col| b.coeff[col].conj() * m[b.target[col]][col])
                .sum::<Complex64>()
                / q as f64;
            (c.norm() > EXPANSION_TOL).then_some((u, c))
        })
        .collect()
}

/// Expansion of the single-particle projector `P_i` in the ancilla basis.
pub fn pauli_expansion(spec: &ProjectorSpec, ancilla: &MixedSystem, particle: usize) -> Result<Vec<Term>> {
    spec.check(ancilla)?;
    let q = ancilla.dims()[particle] as usize;
    let levels = spec.levels(particle, q as u64);
    let mut m = vec![vec![Complex64::new(0.0, 0.0); q]; q];
    for &l in &levels {
        m[l as usize][l as usize] = Complex64::new(1.0, 0.0);
    }
    Ok(expand_local(ancilla, particle, &m)
        .into_iter()
        .map(|(u, coeff)| Term {
            coeff,
            word: ErrorWord::from_local(ancilla, &[(particle, u)]),
        })
        .collect())
}

/// `P†EP` for a mixed-system word `e`, expanded in the ancilla basis.
pub fn projected_error(e: &ErrorWord, spec: &ProjectorSpec, ancilla: &MixedSystem) -> Result<Vec<Term>> {
    let target = spec.target_system(ancilla)?;
    let qs = ancilla.dims();
    let mut per_particle: Vec<Vec<(u64, Complex64)>> = Vec::with_capacity(ancilla.n());
    for (p, &q) in qs.iter().enumerate() {
        let levels = spec.levels(p, q);
        let local = e.clone().with_phase(Default::default()).local_monomial(&target, &[p]);
        let q = q as usize;
        let mut m = vec![vec![Complex64::new(0.0, 0.0); q]; q];
        for (col, (&row, &c)) in local.target.iter().zip(&local.coeff).enumerate() {
            m[levels[row] as usize][levels[col] as usize] = c;
        }
        per_particle.push(expand_local(ancilla, p, &m));
    }
    let phase = e.phase().to_complex();
    Ok(per_particle
        .iter()
        .map(|v| v.iter())
        .multi_cartesian_product()
        .map(|choice| {
            let locals: Vec<(usize, u64)> = choice.iter().enumerate().map(|(p, &&(u, _))| (p, u)).collect();
            let coeff = choice.iter().fold(phase, |acc, &&(_, c)| acc * c);
            Term {
                coeff,
                word: ErrorWord::from_local(ancilla, &locals),
            }
        })
        .filter(|t| t.coeff.norm() > EXPANSION_TOL)
        .collect())
}

fn word_key(sys: &MixedSystem, w: &ErrorWord) -> (usize, Vec<usize>, Vec<u64>) {
    let supp: Vec<usize> = w.support(sys).into_iter().collect();
    let locals = supp.iter().map(|&p| w.local_index(sys, p)).collect();
    (supp.len(), supp, locals)
}

/// Every non-identity ancilla word appearing in `P†EP` for `E = I` or any
/// mixed error of weight `< d`, in enumeration order.
pub fn required_detectable_set(spec: &ProjectorSpec, ancilla: &MixedSystem, d: usize) -> Result<Vec<ErrorWord>> {
    if d < 2 {
        return Err(Error::Precondition("distance must be at least 2".into()));
    }
    let target = spec.target_system(ancilla)?;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let sources = std::iter::once(ErrorWord::identity(&target)).chain(enumerate_errors(&target, d - 1));
    for e in sources {
        for t in projected_error(&e, spec, ancilla)? {
            if !t.word.is_identity() && seen.insert(t.word.clone()) {
                out.push(t.word);
            }
        }
    }
    out.sort_by_cached_key(|w| word_key(ancilla, w));
    Ok(out)
}

/// The basis `P|l⟩/√⟨l|P|l⟩`, re-indexed into the target system.
pub fn project_code(ancilla_code: &Code, spec: &ProjectorSpec, cap: u128) -> Result<Code> {
    let ancilla = ancilla_code.system();
    let target = spec.target_system(ancilla)?;
    let qs = ancilla.dims();
    let targets: Vec<u64> = target.dims();
    // index map: ancilla basis index → target index, if every digit is kept
    let levels: Vec<Vec<u32>> = qs.iter().enumerate().map(|(p, &q)| spec.levels(p, q)).collect();
    let pos: Vec<Vec<Option<usize>>> = qs
        .iter()
        .zip(&levels)
        .map(|(&q, l)| (0..q as u32).map(|x| l.iter().position(|&y| y == x)).collect())
        .collect();
    let dim = ancilla.check_dim(cap)?;
    let tdim = target.check_dim(cap)?;
    let mut map = vec![None; dim];
    let mut digits = vec![0usize; qs.len()];
    for entry in map.iter_mut() {
        let mut idx = Some(0usize);
        for (p, &dig) in digits.iter().enumerate() {
            idx = idx.and_then(|i| pos[p][dig].map(|k| i * targets[p] as usize + k));
        }
        *entry = idx;
        for p in (0..qs.len()).rev() {
            digits[p] += 1;
            if digits[p] < qs[p] as usize {
                break;
            }
            digits[p] = 0;
        }
    }
    let factor_dims: Vec<usize> = target.factors().iter().map(|f| f.modulus as usize).collect();
    let mut states = Vec::new();
    for (index, s) in ancilla_code.states(cap)?.iter().enumerate() {
        let mut amps = vec![Complex64::new(0.0, 0.0); tdim];
        for (x, &a) in s.amplitudes().iter().enumerate() {
            if let Some(t) = map[x] {
                amps[t] = a;
            }
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>();
        if norm <= DEFAULT_TOL {
            return Err(Error::VanishingNorm { index, norm });
        }
        let scale = 1.0 / norm.sqrt();
        for a in &mut amps {
            *a *= scale;
        }
        states.push(StateVector::new(factor_dims.clone(), amps)?);
    }
    Code::from_states(target, states, ancilla_code.distance())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Phase;
    use crate::clique::CodingClique;
    use crate::errors::DEFAULT_DIM_CAP;
    use crate::graphs::WeightedGraph;
    use crate::graphstate::{CompositeGraph, Label};
    use crate::verifier::{kl_verify_numeric, kl_verify_symbolic_words};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn keep_last(n: usize) -> ProjectorSpec {
        ProjectorSpec::new(BTreeMap::from([(n - 1, vec![0, 1])])).unwrap()
    }

    fn w(k: i64) -> Complex64 {
        Phase::new(k, 3).to_complex()
    }

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn projector_json() {
        let s: ProjectorSpec = serde_json::from_str(r#"{"keep":{"5":[1,0]}}"#).unwrap();
        assert_eq!(s.keep()[&4], vec![0, 1]);
        assert_eq!(serde_json::to_string(&s).unwrap(), r#"{"keep":{"5":[0,1]}}"#);
        assert!(serde_json::from_str::<ProjectorSpec>(r#"{"keep":{"0":[0]}}"#).is_err());
        assert!(serde_json::from_str::<ProjectorSpec>(r#"{"keep":{"1":[]}}"#).is_err());
        let anc = MixedSystem::uniform(5, 3).unwrap();
        assert!(ProjectorSpec::new(BTreeMap::from([(4, vec![0, 3])])).unwrap().check(&anc).is_err());
        assert_eq!(s.target_system(&anc).unwrap().dims(), vec![3, 3, 3, 3, 2]);
    }

    #[test]
    fn qutrit_projector_expansion() {
        let anc = MixedSystem::uniform(5, 3).unwrap();
        let terms = pauli_expansion(&keep_last(5), &anc, 4).unwrap();
        let third = 1.0 / 3.0;
        assert_eq!(terms.len(), 3);
        assert_eq!(terms[0].word, ErrorWord::identity(&anc));
        assert!(close(terms[0].coeff, Complex64::new(2.0 * third, 0.0)));
        assert_eq!(terms[1].word.to_string(), "Z^{5}");
        assert!(close(terms[1].coeff, (1.0 + w(2)) * third));
        assert!(close(terms[2].coeff, (1.0 + w(1)) * third));
        let full = pauli_expansion(&ProjectorSpec::identity(), &anc, 0).unwrap();
        assert_eq!(full.len(), 1);
        assert!(close(full[0].coeff, Complex64::new(1.0, 0.0)) && full[0].word.is_identity());
    }

    /// Σ c_u B_u as a dense local matrix.
    fn reconstruct(terms: &[Term], sys: &MixedSystem, particles: &[usize]) -> Vec<Vec<Complex64>> {
        let d: usize = particles.iter().map(|&p| sys.dims()[p] as usize).product();
        let mut m = vec![vec![Complex64::new(0.0, 0.0); d]; d];
        for t in terms {
            let b = t.word.local_monomial(sys, particles);
            for col in 0..d {
                m[b.target[col]][col] += t.coeff * b.coeff[col];
            }
        }
        m
    }

    #[test]
    fn projected_qubit_errors_match_closed_forms() {
        let anc = MixedSystem::uniform(5, 3).unwrap();
        let spec = keep_last(5);
        let tgt = spec.target_system(&anc).unwrap();
        let zp = ErrorWord::parse(&tgt, "Z^{1'}").unwrap();
        let terms = projected_error(&zp, &spec, &anc).unwrap();
        let names: Vec<_> = terms.iter().map(|t| t.word.to_string()).collect();
        assert_eq!(names, vec!["Z^{5}", "Z^{5^2}"]);
        let third = 1.0 / 3.0;
        assert!(close(terms[0].coeff, (1.0 - w(2)) * third));
        assert!(close(terms[1].coeff, (1.0 - w(1)) * third));

        let xp = ErrorWord::parse(&tgt, "X^{1'}").unwrap();
        let terms = projected_error(&xp, &spec, &anc).unwrap();
        assert_eq!(terms.len(), 6);
        assert!(terms.iter().all(|t| !t.word.part(0).x.is_zero()));
        // |1⟩⟨0| + |0⟩⟨1| on the kept levels
        let m = reconstruct(&terms, &anc, &[4]);
        for r in 0..3 {
            for c in 0..3 {
                let want = if (r, c) == (0, 1) || (r, c) == (1, 0) { 1.0 } else { 0.0 };
                assert!(close(m[r][c], Complex64::new(want, 0.0)));
            }
        }
    }

    #[test]
    fn projected_errors_reconstruct_exactly() {
        let anc = MixedSystem::uniform(3, 3).unwrap();
        let spec = ProjectorSpec::new(BTreeMap::from([(1, vec![0, 2]), (2, vec![1, 2])])).unwrap();
        let tgt = spec.target_system(&anc).unwrap();
        for e in std::iter::once(ErrorWord::identity(&tgt)).chain(enumerate_errors(&tgt, 1)) {
            let terms = projected_error(&e, &spec, &anc).unwrap();
            let m = reconstruct(&terms, &anc, &[0, 1, 2]);
            // dense P†EP by embedding the target matrix through the level maps
            let levels = [vec![0usize, 1, 2], vec![0, 2], vec![1, 2]];
            let em = e.matrix(&tgt, 1 << 10).unwrap();
            let mut want = vec![vec![Complex64::new(0.0, 0.0); 27]; 27];
            let tdims = [3usize, 2, 2];
            let embed = |t: usize| {
                let d = [t / 4, (t / 2) % 2, t % 2];
                levels[0][d[0]] * 9 + levels[1][d[1]] * 3 + levels[2][d[2]]
            };
            assert_eq!(tdims.iter().product::<usize>(), em.dim());
            for col in 0..em.dim() {
                want[embed(em.target[col])][embed(col)] = em.coeff[col];
            }
            for r in 0..27 {
                for c in 0..27 {
                    assert!(close(m[r][c], want[r][c]), "{e}");
                }
            }
        }
    }

    #[test]
    fn unprojected_errors_factorize() {
        let anc = MixedSystem::uniform(5, 3).unwrap();
        let spec = keep_last(5);
        let tgt = spec.target_system(&anc).unwrap();
        let p = pauli_expansion(&spec, &anc, 4).unwrap();
        for e in enumerate_errors(&tgt, 1).filter(|e| !e.support(&tgt).contains(&4)) {
            let terms = projected_error(&e, &spec, &anc).unwrap();
            assert_eq!(terms.len(), p.len());
            let p0 = *e.support(&tgt).iter().next().unwrap();
            let base = ErrorWord::from_local(&anc, &[(p0, e.local_index(&tgt, p0))]);
            for (t, pt) in terms.iter().zip(&p) {
                assert!(close(t.coeff, pt.coeff));
                assert!(t.word.same_operator(&base.compose(&pt.word)));
            }
        }
    }

    #[test]
    fn required_set_for_qutrit_example() {
        let anc = MixedSystem::uniform(5, 3).unwrap();
        let set = required_detectable_set(&keep_last(5), &anc, 2).unwrap();
        let z5 = ErrorWord::parse(&anc, "Z^{5}").unwrap();
        let mut want: HashSet<ErrorWord> = enumerate_errors(&anc, 1).collect();
        for e in enumerate_errors(&anc, 1).filter(|e| !e.support(&anc).contains(&4)) {
            want.insert(e.compose(&z5).with_phase(Default::default()));
            want.insert(e.compose(&z5.pow(2)).with_phase(Default::default()));
        }
        let got: HashSet<ErrorWord> = set.iter().cloned().collect();
        assert_eq!(got.len(), set.len());
        assert_eq!(got, want);
        assert_eq!(set.len(), 104);

        let plain = required_detectable_set(&ProjectorSpec::identity(), &anc, 2).unwrap();
        assert_eq!(plain, enumerate_errors(&anc, 1).collect::<Vec<_>>());
    }

    fn eq17(cg: &CompositeGraph) -> CodingClique {
        let labels = ["00000", "01020", "02110", "11010", "10222", "12200", "20210", "21102", "22120"];
        let v = labels.iter().map(|l| Label::parse(cg.system(), &[*l]).unwrap()).collect();
        CodingClique::new(cg.clone(), 2, v).unwrap()
    }

    #[test]
    fn qutrit_example_end_to_end() {
        let cg = CompositeGraph::single(WeightedGraph::loop_graph(5, 3, 1).unwrap()).unwrap();
        let clique = eq17(&cg);
        let spec = keep_last(5);
        let req = required_detectable_set(&spec, cg.system(), 2).unwrap();
        assert!(kl_verify_symbolic_words(&clique, &req).passed());
        let mixed = project_code(&Code::from_clique(clique), &spec, DEFAULT_DIM_CAP).unwrap();
        assert_eq!(mixed.system().total_dim(), 162);
        assert_eq!(mixed.k(), 9);
        let r = kl_verify_numeric(&mixed, 2, DEFAULT_TOL, DEFAULT_DIM_CAP).unwrap();
        assert!(r.passed() && r.max_deviation < 1e-9, "{r:?}");
    }

    #[test]
    fn identity_projection_is_unchanged() {
        let cg = CompositeGraph::single(WeightedGraph::loop_graph(5, 3, 1).unwrap()).unwrap();
        let code = Code::from_clique(eq17(&cg));
        let same = project_code(&code, &ProjectorSpec::identity(), DEFAULT_DIM_CAP).unwrap();
        for (a, b) in code.states(DEFAULT_DIM_CAP).unwrap().iter().zip(same.states(DEFAULT_DIM_CAP).unwrap()) {
            assert!((a.inner(&b).norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn vanishing_projection_is_reported() {
        let sys = MixedSystem::uniform(1, 3).unwrap();
        let mut a = vec![Complex64::new(0.0, 0.0); 3];
        a[2] = Complex64::new(1.0, 0.0);
        let code = Code::from_states(sys.clone(), vec![StateVector::new(vec![3], a).unwrap()], 1).unwrap();
        let spec = ProjectorSpec::new(BTreeMap::from([(0, vec![0, 1])])).unwrap();
        assert!(matches!(project_code(&code, &spec, 64), Err(Error::VanishingNorm { index: 0, .. })));
    }

    #[test]
    fn random_small_instances_follow_the_theorem() {
        // greedy ancilla codes on random qutrit graphs, last particle cut to a qubit
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut nontrivial = 0;
        for trial in 0..30 {
            let n = 3 + trial % 2;
            let mut adj = vec![vec![0i64; n]; n];
            for a in 0..n {
                for b in a + 1..n {
                    let x = rng.random_range(0..3);
                    adj[a][b] = x;
                    adj[b][a] = x;
                }
            }
            let cg = CompositeGraph::single(WeightedGraph::from_adjacency(3, adj).unwrap()).unwrap();
            let spec = keep_last(n);
            let req = required_detectable_set(&spec, cg.system(), 2).unwrap();
            let mut all = cg.all_labels(81).unwrap();
            let zero = all.remove(0);
            let mut v = vec![zero];
            while !all.is_empty() {
                let c = all.swap_remove(rng.random_range(0..all.len()));
                v.push(c);
                let ok = kl_verify_symbolic_words(&CodingClique::new(cg.clone(), 2, v.clone()).unwrap(), &req).passed();
                if !ok {
                    v.pop();
                }
            }
            if v.len() > 1 {
                nontrivial += 1;
            }
            let clique = CodingClique::new(cg.clone(), 2, v).unwrap();
            let mixed = project_code(&Code::from_clique(clique), &spec, 1 << 10).unwrap();
            assert!(kl_verify_numeric(&mixed, 2, DEFAULT_TOL, 1 << 10).unwrap().passed());
        }
        assert!(nontrivial > 0);
    }
}
