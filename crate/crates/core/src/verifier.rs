//! Knill–Laflamme verification, code distance and stabilizer checks.

use std::collections::{HashMap, HashSet};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::algebra::{lcm, Phase};
use crate::clique::CodingClique;
use crate::error::{Error, Result};
use crate::errors::{enumerate_errors, ErrorWord, MixedSystem};
use crate::graphstate::{inner, Label, StateVector};

pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub enum Basis {
    Clique(CodingClique),
    States(Vec<StateVector>),
}

#[derive(Clone, Debug)]
pub struct Code {
    system: MixedSystem,
    basis: Basis,
    distance: usize,
}

impl Code {
    pub fn from_clique(clique: CodingClique) -> Self {
        Code {
            system: clique.graphs().system().clone(),
            distance: clique.distance(),
            basis: Basis::Clique(clique),
        }
    }

    /// Fails unless the states are orthonormal within `DEFAULT_TOL`.
    pub fn from_states(system: MixedSystem, states: Vec<StateVector>, distance: usize) -> Result<Self> {
        let dim = system.total_dim();
        for s in &states {
            if s.len() as u128 != dim {
                return Err(Error::LengthMismatch(s.len(), dim as usize));
            }
        }
        if states.is_empty() {
            return Err(Error::Precondition("code has no basis states".into()));
        }
        let bad = (0..states.len()).into_par_iter().find_first(|&i| {
            (0..=i).any(|j| {
                let want = if i == j { 1.0 } else { 0.0 };
                (states[i].inner(&states[j]) - want).norm() > DEFAULT_TOL
            })
        });
        if let Some(i) = bad {
            return Err(Error::Precondition(format!("basis state {i} breaks orthonormality")));
        }
        Ok(Code {
            system,
            basis: Basis::States(states),
            distance,
        })
    }

    pub fn system(&self) -> &MixedSystem {
        &self.system
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn clique(&self) -> Option<&CodingClique> {
        match &self.basis {
            Basis::Clique(c) => Some(c),
            Basis::States(_) => None,
        }
    }

    pub fn n(&self) -> usize {
        self.system.n()
    }

    pub fn k(&self) -> usize {
        match &self.basis {
            Basis::Clique(c) => c.len(),
            Basis::States(s) => s.len(),
        }
    }

    /// Claimed distance.
    pub fn distance(&self) -> usize {
        self.distance
    }

    pub fn with_distance(mut self, d: usize) -> Self {
        self.distance = d;
        self
    }

    /// Basis amplitudes; clique codes are expanded into graph-state form.
    pub fn states(&self, cap: u128) -> Result<Vec<StateVector>> {
        match &self.basis {
            Basis::States(s) => Ok(s.clone()),
            Basis::Clique(c) => c
                .vectors()
                .par_iter()
                .map(|v| c.graphs().codeword_state(v, cap))
                .collect(),
        }
    }
}

fn sci<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{x:.3e}"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    /// `⟨i|E|j⟩ ≠ 0` for `i ≠ j`.
    OffDiagonal,
    /// `⟨i|E|i⟩ ≠ ⟨j|E|j⟩`.
    Diagonal,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KlWitness {
    pub error: String,
    pub weight: usize,
    pub kind: WitnessKind,
    pub i: usize,
    pub j: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FSummary {
    /// Errors with `f(E) ≠ 0`.
    pub nonzero: u64,
    /// Distinct exact values of `f(E)`; symbolic reports only.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<String>,
    #[serde(serialize_with = "sci")]
    pub max_abs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KlReport {
    pub method: &'static str,
    pub verdict: Verdict,
    pub checked_errors: u64,
    #[serde(serialize_with = "sci")]
    pub max_deviation: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<KlWitness>,
    pub f_values_summary: FSummary,
}

impl KlReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

enum SymOutcome {
    Zero,
    Scalar(Phase),
    Fail(WitnessKind, usize, usize),
}

struct SymbolicContext<'a> {
    clique: &'a CodingClique,
    index: HashMap<&'a Label, usize>,
    order: u64,
}

impl<'a> SymbolicContext<'a> {
    fn new(clique: &'a CodingClique) -> Self {
        SymbolicContext {
            clique,
            index: clique.vectors().iter().enumerate().map(|(i, v)| (v, i)).collect(),
            order: clique.graphs().system().phase_order(),
        }
    }

    /// `⟨i|E|j⟩ = φ ω^{-s·c_j}` when `c_i = c_j + δ`, zero otherwise.
    fn check(&self, e: &ErrorWord) -> SymOutcome {
        let (phase, delta) = self.clique.graphs().reduce_to_phase_op(e);
        let s = Label(e.parts().iter().map(|p| p.x.clone()).collect());
        let vs = self.clique.vectors();
        if !delta.is_zero() {
            for (j, c) in vs.iter().enumerate() {
                if let Some(&i) = self.index.get(&c.add(&delta)) {
                    return SymOutcome::Fail(WitnessKind::OffDiagonal, i, j);
                }
            }
            return SymOutcome::Zero;
        }
        let first = s.pairing(&vs[0], self.order);
        if let Some(j) = vs.iter().position(|c| s.pairing(c, self.order) != first) {
            return SymOutcome::Fail(WitnessKind::Diagonal, 0, j);
        }
        SymOutcome::Scalar(phase * Phase::new(-(first as i64), self.order))
    }
}

/// Exact KL check of a clique code against every error of weight `< d`.
pub fn kl_verify_symbolic(clique: &CodingClique, d: usize) -> KlReport {
    let sys = clique.graphs().system();
    let words: Vec<ErrorWord> = enumerate_errors(sys, d.saturating_sub(1)).collect();
    kl_verify_symbolic_words(clique, &words)
}

/// Exact detection check for an explicit word list.
pub fn kl_verify_symbolic_words(clique: &CodingClique, words: &[ErrorWord]) -> KlReport {
    let ctx = SymbolicContext::new(clique);
    let sys = clique.graphs().system();
    let outcomes: Vec<SymOutcome> = words.par_iter().map(|e| ctx.check(e)).collect();
    let mut values = HashSet::new();
    let mut nonzero = 0;
    for (k, o) in outcomes.iter().enumerate() {
        match o {
            SymOutcome::Zero => {}
            SymOutcome::Scalar(p) => {
                nonzero += 1;
                values.insert(*p);
            }
            SymOutcome::Fail(kind, i, j) => {
                return KlReport {
                    method: "symbolic",
                    verdict: Verdict::Fail,
                    checked_errors: k as u64 + 1,
                    max_deviation: 1.0,
                    witness: Some(KlWitness {
                        error: words[k].to_string(),
                        weight: words[k].weight(sys),
                        kind: kind.clone(),
                        i: *i,
                        j: *j,
                    }),
                    f_values_summary: summary(nonzero, values),
                }
            }
        }
    }
    KlReport {
        method: "symbolic",
        verdict: Verdict::Pass,
        checked_errors: words.len() as u64,
        max_deviation: 0.0,
        witness: None,
        f_values_summary: summary(nonzero, values),
    }
}

fn summary(nonzero: u64, values: HashSet<Phase>) -> FSummary {
    let mut v: Vec<Phase> = values.into_iter().collect();
    v.sort_by_key(|p| (p.order(), p.numerator()));
    FSummary {
        nonzero,
        max_abs: if nonzero > 0 { 1.0 } else { 0.0 },
        values: v.iter().map(ToString::to_string).collect(),
    }
}

/// Per-support Gram data: `gram[(j,a),(i,a')] = Σ_b v_j[a,b] conj(v_i[a',b])`.
struct SupportGram {
    k: usize,
    local: usize,
    gram: Vec<Complex64>,
}

impl SupportGram {
    fn new(sys: &MixedSystem, states: &[StateVector], particles: &[usize]) -> Self {
        let dims: Vec<usize> = sys.dims().iter().map(|&d| d as usize).collect();
        let total: usize = dims.iter().product();
        let local: usize = particles.iter().map(|&p| dims[p]).product();
        let rest = total / local;
        let k = states.len();
        // split each global index into (a, b)
        let mut split = vec![(0usize, 0usize); total];
        let mut digits = vec![0usize; dims.len()];
        for entry in split.iter_mut() {
            let (mut a, mut b) = (0, 0);
            for (p, &dig) in digits.iter().enumerate() {
                if particles.contains(&p) {
                    a = a * dims[p] + dig;
                } else {
                    b = b * dims[p] + dig;
                }
            }
            *entry = (a, b);
            for p in (0..dims.len()).rev() {
                digits[p] += 1;
                if digits[p] < dims[p] {
                    break;
                }
                digits[p] = 0;
            }
        }
        let rows = k * local;
        let mut mat = vec![Complex64::new(0.0, 0.0); rows * rest];
        for (j, s) in states.iter().enumerate() {
            for (x, &amp) in s.amplitudes().iter().enumerate() {
                let (a, b) = split[x];
                mat[(j * local + a) * rest + b] = amp;
            }
        }
        let upper: Vec<Vec<Complex64>> = (0..rows)
            .into_par_iter()
            .map(|r| {
                let ra = &mat[r * rest..(r + 1) * rest];
                (r..rows)
                    .map(|c| {
                        let rc = &mat[c * rest..(c + 1) * rest];
                        ra.iter().zip(rc).map(|(x, y)| x * y.conj()).sum()
                    })
                    .collect()
            })
            .collect();
        let mut gram = vec![Complex64::new(0.0, 0.0); rows * rows];
        for (r, row) in upper.iter().enumerate() {
            for (off, &v) in row.iter().enumerate() {
                let c = r + off;
                gram[r * rows + c] = v;
                gram[c * rows + r] = v.conj();
            }
        }
        SupportGram { k, local, gram }
    }

    fn matrix(&self, sys: &MixedSystem, e: &ErrorWord, particles: &[usize]) -> Vec<Complex64> {
        let mono = e.local_monomial(sys, particles);
        let rows = self.k * self.local;
        let mut m = vec![Complex64::new(0.0, 0.0); self.k * self.k];
        for i in 0..self.k {
            for j in 0..self.k {
                let mut acc = Complex64::new(0.0, 0.0);
                for a in 0..self.local {
                    acc += mono.coeff[a] * self.gram[(j * self.local + a) * rows + i * self.local + mono.target[a]];
                }
                m[i * self.k + j] = acc;
            }
        }
        m
    }
}

struct NumericOutcome {
    deviation: f64,
    f: Complex64,
    fail: Option<(WitnessKind, usize, usize)>,
}

fn kl_entry_check(m: &[Complex64], k: usize, tol: f64) -> NumericOutcome {
    let f: Complex64 = (0..k).map(|i| m[i * k + i]).sum::<Complex64>() / k as f64;
    let mut deviation: f64 = 0.0;
    let mut fail = None;
    for i in 0..k {
        for j in 0..k {
            let want = if i == j { f } else { Complex64::new(0.0, 0.0) };
            let dev = (m[i * k + j] - want).norm();
            if dev > deviation {
                deviation = dev;
            }
            if dev > tol && fail.is_none() {
                let kind = if i == j { WitnessKind::Diagonal } else { WitnessKind::OffDiagonal };
                fail = Some((kind, i, j));
            }
        }
    }
    if f.norm() > 1.0 + tol && fail.is_none() {
        fail = Some((WitnessKind::Diagonal, 0, 0));
    }
    NumericOutcome { deviation, f, fail }
}

/// Numeric KL scan over every error of weight `< d`.
pub fn kl_verify_numeric(code: &Code, d: usize, tol: f64, cap: u128) -> Result<KlReport> {
    let words: Vec<ErrorWord> = enumerate_errors(code.system(), d.saturating_sub(1)).collect();
    kl_verify_numeric_words(code, &words, tol, cap)
}

/// Numeric KL scan over an explicit word list. Words sharing a support are
/// evaluated against one Gram matrix of the basis restricted to that support.
pub fn kl_verify_numeric_words(code: &Code, words: &[ErrorWord], tol: f64, cap: u128) -> Result<KlReport> {
    let sys = code.system();
    sys.check_dim(cap)?;
    let states = code.states(cap)?;
    let k = states.len();
    let mut groups: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    let mut pos: HashMap<Vec<usize>, usize> = HashMap::new();
    for (idx, w) in words.iter().enumerate() {
        let supp: Vec<usize> = w.support(sys).into_iter().collect();
        let g = *pos.entry(supp.clone()).or_insert_with(|| {
            groups.push((supp, Vec::new()));
            groups.len() - 1
        });
        groups[g].1.push(idx);
    }
    let mut outcomes: Vec<Option<NumericOutcome>> = (0..words.len()).map(|_| None).collect();
    let per_group: Vec<Vec<(usize, NumericOutcome)>> = groups
        .par_iter()
        .map(|(supp, members)| {
            if supp.is_empty() {
                return members
                    .iter()
                    .map(|&i| {
                        let p = words[i].phase().to_complex();
                        let m: Vec<Complex64> = (0..k * k)
                            .map(|x| if x % (k + 1) == 0 { p } else { Complex64::new(0.0, 0.0) })
                            .collect();
                        (i, kl_entry_check(&m, k, tol))
                    })
                    .collect();
            }
            let gram = SupportGram::new(sys, &states, supp);
            members
                .iter()
                .map(|&i| (i, kl_entry_check(&gram.matrix(sys, &words[i], supp), k, tol)))
                .collect()
        })
        .collect();
    for group in per_group {
        for (i, o) in group {
            outcomes[i] = Some(o);
        }
    }
    let mut max_deviation: f64 = 0.0;
    let mut nonzero = 0;
    let mut max_abs: f64 = 0.0;
    for (idx, o) in outcomes.into_iter().enumerate() {
        let o = o.expect("every word evaluated");
        max_deviation = max_deviation.max(o.deviation);
        if o.f.norm() > tol {
            nonzero += 1;
            max_abs = max_abs.max(o.f.norm());
        }
        if let Some((kind, i, j)) = o.fail {
            return Ok(KlReport {
                method: "numeric",
                verdict: Verdict::Fail,
                checked_errors: idx as u64 + 1,
                max_deviation,
                witness: Some(KlWitness {
                    error: words[idx].to_string(),
                    weight: words[idx].weight(sys),
                    kind,
                    i,
                    j,
                }),
                f_values_summary: FSummary {
                    nonzero,
                    values: Vec::new(),
                    max_abs,
                },
            });
        }
    }
    Ok(KlReport {
        method: "numeric",
        verdict: Verdict::Pass,
        checked_errors: words.len() as u64,
        max_deviation,
        witness: None,
        f_values_summary: FSummary {
            nonzero,
            values: Vec::new(),
            max_abs,
        },
    })
}

fn weight_exactly(sys: &MixedSystem, w: usize) -> Vec<ErrorWord> {
    enumerate_errors(sys, w).filter(|e| e.weight(sys) == w).collect()
}

/// Smallest weight `w ≤ w_cap` with a KL violation, or `w_cap + 1`.
pub fn code_distance(code: &Code, w_cap: usize, tol: f64, cap: u128) -> Result<usize> {
    for w in 1..=w_cap.min(code.n()) {
        let words = weight_exactly(code.system(), w);
        if !kl_verify_numeric_words(code, &words, tol, cap)?.passed() {
            return Ok(w);
        }
    }
    Ok(w_cap + 1)
}

/// Exact counterpart of [`code_distance`] for clique codes. Words are
/// streamed in chunks and the scan stops at the first violation.
pub fn code_distance_symbolic(clique: &CodingClique, w_cap: usize) -> usize {
    const CHUNK: usize = 1 << 14;
    let sys = clique.graphs().system();
    let ctx = SymbolicContext::new(clique);
    for w in 1..=w_cap.min(sys.n()) {
        let mut words = enumerate_errors(sys, w).filter(|e| e.weight(sys) == w);
        loop {
            let chunk: Vec<ErrorWord> = words.by_ref().take(CHUNK).collect();
            if chunk.is_empty() {
                break;
            }
            if chunk.par_iter().any(|e| matches!(ctx.check(e), SymOutcome::Fail(..))) {
                return w;
            }
        }
    }
    w_cap + 1
}

/// The group generated by `rows`, with exact phases.
pub fn stabilizer_group(sys: &MixedSystem, rows: &[ErrorWord], limit: usize) -> Result<Vec<ErrorWord>> {
    let mut seen = HashSet::new();
    let id = ErrorWord::identity(sys);
    seen.insert(id.clone());
    let mut out = vec![id];
    let mut k = 0;
    while k < out.len() {
        for r in rows {
            let g = out[k].compose(r);
            if seen.insert(g.clone()) {
                if out.len() >= limit {
                    return Err(Error::Precondition(format!("stabilizer group exceeds {limit} elements")));
                }
                out.push(g);
            }
        }
        k += 1;
    }
    Ok(out)
}

pub const GROUP_LIMIT: usize = 1 << 16;

/// `dim` of the joint +1 eigenspace, `D · Σ_{g ∝ I} g / |G|`.
pub fn eigenspace_dim(sys: &MixedSystem, group: &[ErrorWord]) -> u128 {
    let scalar: Complex64 = group
        .iter()
        .filter(|g| g.is_scalar())
        .map(|g| g.phase().to_complex())
        .sum();
    let v = sys.total_dim() as f64 * scalar.re / group.len() as f64;
    v.round().max(0.0) as u128
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilizerReport {
    pub verdict: Verdict,
    pub commuting: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub non_commuting: Option<(usize, usize)>,
    pub row_orders: Vec<u64>,
    /// Per-row multipliers applied before forming the group.
    pub chosen_phases: Vec<String>,
    pub adjusted_rows: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eigenspace_dim: Option<u128>,
    pub code_dim: usize,
    #[serde(serialize_with = "sci")]
    pub projector_difference: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

impl StabilizerReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Checks that `rows` commute, picks per-row phases fixing the code's first
/// basis state, and compares the joint eigenspace with the code's span.
pub fn verify_stabilizer(rows: &[ErrorWord], code: &Code, tol: f64, cap: u128) -> Result<StabilizerReport> {
    let sys = code.system();
    sys.check_dim(cap)?;
    let mut report = StabilizerReport {
        verdict: Verdict::Fail,
        commuting: true,
        non_commuting: None,
        row_orders: rows.iter().map(ErrorWord::operator_order).collect(),
        chosen_phases: Vec::new(),
        adjusted_rows: Vec::new(),
        eigenspace_dim: None,
        code_dim: code.k(),
        projector_difference: f64::INFINITY,
        failure: None,
    };
    for (i, a) in rows.iter().enumerate() {
        if let Some(j) = rows.iter().skip(i + 1).position(|b| !a.commutes_with(b)) {
            report.commuting = false;
            report.non_commuting = Some((i, i + 1 + j));
            report.failure = Some(Error::NonCommuting(i, i + 1 + j).to_string());
            return Ok(report);
        }
    }
    let states = code.states(cap)?;
    let mut adjusted = Vec::with_capacity(rows.len());
    for (r, row) in rows.iter().enumerate() {
        let m = row.matrix(sys, cap)?;
        let images: Vec<Vec<Complex64>> = states.par_iter().map(|s| m.apply(s.amplitudes())).collect();
        let lambda = inner(states[0].amplitudes(), &images[0]);
        let eigen = states.iter().zip(&images).all(|(s, im)| {
            s.amplitudes().iter().zip(im).all(|(a, b)| (a * lambda - b).norm() <= tol)
        });
        let o = report.row_orders[r];
        let power = row.pow(o).phase();
        let order = lcm(lcm(sys.phase_order(), power.order()), o * power.order()) * 2;
        let mu = if eigen && (lambda.norm() - 1.0).abs() <= tol {
            Phase::from_complex(lambda.conj(), order, 1e-7).filter(|mu| (mu.pow(o as i64) * power).is_one())
        } else {
            None
        };
        let Some(mu) = mu else {
            report.failure = Some(format!("row {r} does not stabilize the code space"));
            return Ok(report);
        };
        report.chosen_phases.push(mu.to_string());
        let adj = row.clone().times_phase(mu);
        report.adjusted_rows.push(adj.to_string());
        adjusted.push(adj);
    }
    let group = stabilizer_group(sys, &adjusted, GROUP_LIMIT)?;
    let dim = eigenspace_dim(sys, &group);
    report.eigenspace_dim = Some(dim);
    // ‖P − Π‖² = tr P + K − 2 Σ_i ⟨v_i|P|v_i⟩
    let overlap: f64 = group
        .par_iter()
        .map(|g| {
            let m = g.matrix(sys, cap).expect("dimension checked");
            states
                .iter()
                .map(|s| inner(s.amplitudes(), &m.apply(s.amplitudes())).re)
                .sum::<f64>()
        })
        .sum::<f64>()
        / group.len() as f64;
    let sq = dim as f64 + code.k() as f64 - 2.0 * overlap;
    report.projector_difference = sq.max(0.0).sqrt();
    if dim != code.k() as u128 {
        report.failure = Some(format!("eigenspace dimension {dim} differs from K = {}", code.k()));
    } else if report.projector_difference > tol {
        report.failure = Some("eigenspace differs from the code space".into());
    } else {
        report.verdict = Verdict::Pass;
    }
    Ok(report)
}

/// An orthonormal basis of the joint +1 eigenspace of `rows`, one vector
/// `P e_x / ‖P e_x‖` per orbit of computational basis states.
pub fn stabilizer_code_basis(sys: &MixedSystem, rows: &[ErrorWord], tol: f64, cap: u128) -> Result<Vec<StateVector>> {
    for (i, a) in rows.iter().enumerate() {
        if let Some(j) = rows.iter().skip(i + 1).position(|b| !a.commutes_with(b)) {
            return Err(Error::NonCommuting(i, i + 1 + j));
        }
    }
    let dim = sys.check_dim(cap)?;
    let group = stabilizer_group(sys, rows, GROUP_LIMIT)?;
    let monos: Vec<_> = group
        .iter()
        .map(|g| g.matrix(sys, cap))
        .collect::<Result<_>>()?;
    let factor_dims: Vec<usize> = sys.factors().iter().map(|f| f.modulus as usize).collect();
    let mut visited = vec![false; dim];
    let mut out = Vec::new();
    for x in 0..dim {
        if visited[x] {
            continue;
        }
        let mut v: HashMap<usize, Complex64> = HashMap::new();
        for m in &monos {
            visited[m.target[x]] = true;
            *v.entry(m.target[x]).or_default() += m.coeff[x];
        }
        let norm = v.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm > tol {
            let mut amps = vec![Complex64::new(0.0, 0.0); dim];
            for (i, c) in v {
                amps[i] = c / norm;
            }
            out.push(StateVector::new(factor_dims.clone(), amps)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::errors::DEFAULT_DIM_CAP;
    use crate::graphs::WeightedGraph;
    use crate::graphstate::CompositeGraph;

    fn l3_code() -> CodingClique {
        let g = WeightedGraph::loop_graph(3, 2, 1).unwrap();
        let cg = CompositeGraph::paired(vec![g.clone(), g]).unwrap();
        let gens = vec![
            Label::parse(cg.system(), &["100", "010"]).unwrap(),
            Label::parse(cg.system(), &["010", "001"]).unwrap(),
        ];
        CodingClique::from_generators(cg, 2, gens).unwrap()
    }

    /// Dense `⟨i|E|j⟩` straight from the full matrix.
    fn dense_kl_passes(code: &Code, d: usize) -> bool {
        let states = code.states(DEFAULT_DIM_CAP).unwrap();
        enumerate_errors(code.system(), d - 1).all(|e| {
            let m = e.matrix(code.system(), DEFAULT_DIM_CAP).unwrap();
            let imgs: Vec<_> = states.iter().map(|s| m.apply(s.amplitudes())).collect();
            let f = inner(states[0].amplitudes(), &imgs[0]);
            states.iter().enumerate().all(|(i, si)| {
                imgs.iter().enumerate().all(|(j, ij)| {
                    let want = if i == j { f } else { Complex64::new(0.0, 0.0) };
                    (inner(si.amplitudes(), ij) - want).norm() < 1e-9
                })
            })
        })
    }

    #[test]
    fn small_code_passes_both_ways() {
        let c = l3_code();
        let sym = kl_verify_symbolic(&c, 2);
        assert!(sym.passed());
        assert_eq!(sym.checked_errors, 45);
        let code = Code::from_clique(c.clone());
        let num = kl_verify_numeric(&code, 2, DEFAULT_TOL, DEFAULT_DIM_CAP).unwrap();
        assert!(num.passed() && num.max_deviation < 1e-9, "{num:?}");
        assert!(dense_kl_passes(&code, 2));
        assert_eq!(code_distance(&code, 3, DEFAULT_TOL, DEFAULT_DIM_CAP).unwrap(), 2);
        assert_eq!(code_distance_symbolic(&c, 3), 2);
    }

    #[test]
    fn corrupted_vector_gives_witness() {
        let c = l3_code();
        let mut v = c.vectors().to_vec();
        v[3] = Label::parse(c.graphs().system(), &["100", "000"]).unwrap();
        let bad = c.with_vectors(v).unwrap();
        let sym = kl_verify_symbolic(&bad, 2);
        let num = kl_verify_numeric(&Code::from_clique(bad.clone()), 2, DEFAULT_TOL, DEFAULT_DIM_CAP).unwrap();
        assert!(!sym.passed() && !num.passed());
        assert_eq!(sym.witness.as_ref().unwrap().weight, 1);
        assert_eq!(sym.witness.unwrap().error, num.witness.unwrap().error);
        assert!(!dense_kl_passes(&Code::from_clique(bad), 2));
    }

    #[test]
    fn full_space_has_distance_one() {
        let sys = MixedSystem::uniform(2, 2).unwrap();
        let states = (0..4)
            .map(|i| {
                let mut a = vec![Complex64::new(0.0, 0.0); 4];
                a[i] = Complex64::new(1.0, 0.0);
                StateVector::new(vec![2, 2], a).unwrap()
            })
            .collect();
        let code = Code::from_states(sys, states, 1).unwrap();
        assert_eq!(code_distance(&code, 2, DEFAULT_TOL, DEFAULT_DIM_CAP).unwrap(), 1);
        assert!(kl_verify_numeric(&code, 1, DEFAULT_TOL, DEFAULT_DIM_CAP).unwrap().passed());
    }

    #[test]
    fn non_orthonormal_states_rejected() {
        let sys = MixedSystem::uniform(1, 2).unwrap();
        let a = StateVector::new(vec![2], vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]).unwrap();
        assert!(Code::from_states(sys, vec![a.clone(), a], 1).is_err());
    }

    #[test]
    fn single_z_halves_the_space() {
        let sys = MixedSystem::uniform(2, 2).unwrap();
        let z = ErrorWord::parse(&sys, "Z^{1}").unwrap();
        let basis = stabilizer_code_basis(&sys, &[z.clone()], DEFAULT_TOL, DEFAULT_DIM_CAP).unwrap();
        assert_eq!(basis.len(), 2);
        let code = Code::from_states(sys.clone(), basis, 1).unwrap();
        let r = verify_stabilizer(&[z.clone()], &code, DEFAULT_TOL, DEFAULT_DIM_CAP).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.eigenspace_dim, Some(2));
        let x = ErrorWord::parse(&sys, "X^{1}").unwrap();
        let r = verify_stabilizer(&[z, x], &code, DEFAULT_TOL, DEFAULT_DIM_CAP).unwrap();
        assert!(!r.commuting && !r.passed());
    }

    #[test]
    fn phase_search_flips_sign() {
        // -Z stabilizes |1⟩; verify_stabilizer must pick the multiplier -1
        let sys = MixedSystem::uniform(1, 2).unwrap();
        let one = StateVector::new(vec![2], vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]).unwrap();
        let code = Code::from_states(sys.clone(), vec![one], 1).unwrap();
        let z = ErrorWord::parse(&sys, "Z^{1}").unwrap();
        let r = verify_stabilizer(&[z], &code, DEFAULT_TOL, DEFAULT_DIM_CAP).unwrap();
        assert!(r.passed());
        assert_eq!(r.chosen_phases, vec!["-1"]);
    }

    #[test]
    fn graph_state_stabilizers_reproduce_clique_code() {
        let c = l3_code();
        let cg = c.graphs();
        let sys = cg.system();
        // stabilizers X^s Z^{sΓ} with s in the annihilator of the clique
        let order = sys.phase_order();
        let rows: Vec<ErrorWord> = cg
            .all_labels(64)
            .unwrap()
            .into_iter()
            .filter(|s| !s.is_zero() && c.vectors().iter().all(|v| s.pairing(v, order) == 0))
            .map(|s| cg.stabilizer_word(&s))
            .collect();
        let code = Code::from_clique(c.clone());
        let r = verify_stabilizer(&rows, &code, DEFAULT_TOL, DEFAULT_DIM_CAP).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.eigenspace_dim, Some(4));
        let basis = stabilizer_code_basis(sys, &rows, DEFAULT_TOL, DEFAULT_DIM_CAP).unwrap();
        assert_eq!(basis.len(), 4);
        let from_rows = Code::from_states(sys.clone(), basis, 2).unwrap();
        assert!(kl_verify_numeric(&from_rows, 2, DEFAULT_TOL, DEFAULT_DIM_CAP).unwrap().passed());
    }
}
