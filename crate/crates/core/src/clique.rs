//! Composite coding cliques: purity and uncoverable sets, condition
//! checking, closure and search.
//!
//! A label `δ` is *covered* at distance `d` when some error of weight in
//! `(0, d)` reduces to `Z^δ` on the graph state; it is *uncoverable* (in
//! `D_d`) otherwise. The purity set collects the `X^s` parts whose
//! stabilizer word has weight below `d`.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::errors::{ErrorWord, LayerOp};
use crate::graphstate::{CompositeGraph, Label};

/// Largest label space the search will index.
pub const SEARCH_SPACE_CAP: u128 = 1 << 20;

struct LowX {
    s: Label,
    sg: Label,
    mask: u64,
}

/// Precomputed low-weight `X` parts for membership tests at distance `d`.
pub struct DistanceOracle {
    graphs: CompositeGraph,
    d: usize,
    low: Vec<LowX>,
}

impl DistanceOracle {
    pub fn new(graphs: &CompositeGraph, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::Precondition("distance must be at least 1".into()));
        }
        let sys = graphs.system();
        if sys.n() > 64 {
            return Err(Error::InvalidSystem("at most 64 particles supported".into()));
        }
        let mut low = vec![LowX {
            s: Label::zero(sys),
            sg: Label::zero(sys),
            mask: 0,
        }];
        for k in 1..d.min(sys.n() + 1) {
            for subset in (0..sys.n()).combinations(k) {
                let per_particle: Vec<Vec<Vec<(usize, usize, u32)>>> = subset
                    .iter()
                    .map(|&i| local_x_configs(graphs, i))
                    .collect();
                for choice in per_particle.iter().map(|v| v.iter()).multi_cartesian_product() {
                    let mut s = Label::zero(sys);
                    for cfg in choice {
                        for &(layer, vertex, val) in cfg {
                            s.0[layer].set(vertex, val as i64);
                        }
                    }
                    let sg = graphs.action(&s);
                    let mask = graphs.particle_mask(s.parts());
                    low.push(LowX { s, sg, mask });
                }
            }
        }
        Ok(DistanceOracle {
            graphs: graphs.clone(),
            d,
            low,
        })
    }

    pub fn graphs(&self) -> &CompositeGraph {
        &self.graphs
    }

    pub fn distance(&self) -> usize {
        self.d
    }

    /// All `s` with `|ŝ ∪ (s·Γ)^| < d`, zero first.
    pub fn purity_set(&self) -> Vec<Label> {
        self.low
            .iter()
            .filter(|x| ((x.mask | self.graphs.particle_mask(x.sg.parts())).count_ones() as usize) < self.d)
            .map(|x| x.s.clone())
            .collect()
    }

    /// The first error `X^s Z^t` with `0 < weight < d` and `t − s·Γ = δ`.
    pub fn covering_error(&self, delta: &Label) -> Option<ErrorWord> {
        for x in &self.low {
            let t = delta.add(&x.sg);
            let w = (x.mask | self.graphs.particle_mask(t.parts())).count_ones() as usize;
            if w > 0 && w < self.d {
                let parts = x
                    .s
                    .0
                    .iter()
                    .zip(t.0)
                    .map(|(s, z)| LayerOp { x: s.clone(), z })
                    .collect();
                return Some(
                    ErrorWord::new(self.graphs.system(), parts, Default::default())
                        .expect("labels match system"),
                );
            }
        }
        None
    }

    pub fn in_uncoverable(&self, delta: &Label) -> bool {
        self.covering_error(delta).is_none()
    }

    /// Membership in `D_d` for every label, by label index.
    pub fn uncoverable_table(&self, cap: u128) -> Result<Vec<bool>> {
        let size = self.graphs.system().check_dim(cap)?;
        Ok((0..size)
            .into_par_iter()
            .map(|i| self.in_uncoverable(&self.graphs.label_at(i)))
            .collect())
    }
}

/// Nonzero `X` configurations of one particle as `(layer, vertex, value)`.
fn local_x_configs(graphs: &CompositeGraph, particle: usize) -> Vec<Vec<(usize, usize, u32)>> {
    let factors = graphs.system().particle_factors(particle);
    factors
        .iter()
        .map(|f| (0..f.modulus).map(move |v| (f.layer, f.vertex, v)))
        .multi_cartesian_product()
        .filter(|cfg| cfg.iter().any(|&(_, _, v)| v != 0))
        .collect()
}

pub fn purity_set(graphs: &CompositeGraph, d: usize) -> Result<Vec<Label>> {
    Ok(DistanceOracle::new(graphs, d)?.purity_set())
}

pub fn in_uncoverable(graphs: &CompositeGraph, delta: &Label, d: usize) -> Result<bool> {
    Ok(DistanceOracle::new(graphs, d)?.in_uncoverable(delta))
}

/// The additive group generated by `generators`, sorted.
pub fn closure(graphs: &CompositeGraph, generators: &[Label]) -> Vec<Label> {
    let mut seen: HashSet<Label> = HashSet::new();
    let zero = Label::zero(graphs.system());
    seen.insert(zero.clone());
    let mut queue = VecDeque::from([zero]);
    while let Some(x) = queue.pop_front() {
        for g in generators {
            let y = x.add(g);
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    let mut out: Vec<_> = seen.into_iter().collect();
    out.sort();
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodingClique {
    graphs: CompositeGraph,
    distance: usize,
    vectors: Vec<Label>,
    generators: Option<Vec<Label>>,
}

impl CodingClique {
    /// Vectors are kept in the given order; duplicates are rejected.
    pub fn new(graphs: CompositeGraph, distance: usize, vectors: Vec<Label>) -> Result<Self> {
        let zero = Label::zero(graphs.system());
        for v in &vectors {
            check_label(&zero, v)?;
        }
        let distinct: HashSet<_> = vectors.iter().collect();
        if distinct.len() != vectors.len() {
            return Err(Error::Precondition("clique vectors are not distinct".into()));
        }
        if vectors.is_empty() {
            return Err(Error::Precondition("empty clique".into()));
        }
        Ok(CodingClique {
            graphs,
            distance,
            vectors,
            generators: None,
        })
    }

    pub fn from_generators(graphs: CompositeGraph, distance: usize, generators: Vec<Label>) -> Result<Self> {
        let zero = Label::zero(graphs.system());
        for g in &generators {
            check_label(&zero, g)?;
        }
        let vectors = closure(&graphs, &generators);
        let mut c = CodingClique::new(graphs, distance, vectors)?;
        c.generators = Some(generators);
        Ok(c)
    }

    pub fn graphs(&self) -> &CompositeGraph {
        &self.graphs
    }

    pub fn distance(&self) -> usize {
        self.distance
    }

    pub fn vectors(&self) -> &[Label] {
        &self.vectors
    }

    pub fn generators(&self) -> Option<&[Label]> {
        self.generators.as_deref()
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn with_vectors(&self, vectors: Vec<Label>) -> Result<Self> {
        CodingClique::new(self.graphs.clone(), self.distance, vectors)
    }

    pub fn check(&self) -> Result<CliqueReport> {
        check_clique(self)
    }
}

fn check_label(zero: &Label, v: &Label) -> Result<()> {
    if v.0.len() != zero.0.len() {
        return Err(Error::LengthMismatch(v.0.len(), zero.0.len()));
    }
    for (a, b) in v.0.iter().zip(&zero.0) {
        if a.modulus() != b.modulus() {
            return Err(Error::ModulusMismatch(a.modulus(), b.modulus()));
        }
        if a.len() != b.len() {
            return Err(Error::LengthMismatch(a.len(), b.len()));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PurityWitness {
    pub s: Vec<String>,
    pub vector: Vec<String>,
    /// Nonzero exponent of `ω_L`.
    pub exponent: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DifferenceWitness {
    pub i: usize,
    pub j: usize,
    pub difference: Vec<String>,
    pub covering_error: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CliqueReport {
    pub contains_zero: bool,
    pub purity_violation: Option<PurityWitness>,
    pub difference_violation: Option<DifferenceWitness>,
    pub purity_set_size: usize,
}

impl CliqueReport {
    pub fn passes(&self) -> bool {
        self.contains_zero && self.purity_violation.is_none() && self.difference_violation.is_none()
    }
}

pub fn check_clique(c: &CodingClique) -> Result<CliqueReport> {
    let oracle = DistanceOracle::new(&c.graphs, c.distance)?;
    Ok(check_with(c, &oracle))
}

pub(crate) fn check_with(c: &CodingClique, oracle: &DistanceOracle) -> CliqueReport {
    let order = c.graphs.system().phase_order();
    let purity = oracle.purity_set();
    let contains_zero = c.vectors.iter().any(Label::is_zero);
    let purity_violation = purity.iter().find_map(|s| {
        c.vectors.iter().find_map(|v| {
            let e = s.pairing(v, order);
            (e != 0).then(|| PurityWitness {
                s: s.digits(),
                vector: v.digits(),
                exponent: e,
            })
        })
    });
    let mut memo: HashMap<Label, Option<ErrorWord>> = HashMap::new();
    let mut difference_violation = None;
    'outer: for (i, a) in c.vectors.iter().enumerate() {
        for (j, b) in c.vectors.iter().enumerate().skip(i + 1) {
            let delta = a.sub(b);
            let cov = memo
                .entry(delta.clone())
                .or_insert_with(|| oracle.covering_error(&delta));
            if let Some(e) = cov {
                difference_violation = Some(DifferenceWitness {
                    i,
                    j,
                    difference: delta.digits(),
                    covering_error: e.to_string(),
                });
                break 'outer;
            }
        }
    }
    CliqueReport {
        contains_zero,
        purity_violation,
        difference_violation,
        purity_set_size: purity.len(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    Group,
    Set,
}

#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    pub target: usize,
    /// Node budget per top-level branch.
    pub budget: u64,
    pub mode: SearchMode,
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub clique: CodingClique,
    pub nodes: u64,
    pub budget_exhausted: bool,
    pub target_reached: bool,
}

impl SearchOutcome {
    pub fn is_trivial(&self) -> bool {
        self.clique.len() <= 1
    }
}

struct Space<'a> {
    graphs: &'a CompositeGraph,
    /// `D_d` membership and condition (ii), by label index.
    candidate: Vec<bool>,
    uncoverable: Vec<bool>,
}

impl Space<'_> {
    fn index(&self, c: &Label) -> usize {
        self.graphs.label_index(c)
    }
}

/// Anytime search for a large coding clique.
///
/// Candidates are the nonzero labels that satisfy condition (ii) and lie in
/// `D_d`. Each top-level branch fixes the smallest generator (group mode) or
/// the smallest element (set mode) and runs its own depth-first search with
/// `budget` nodes; branches are merged by size, then lexicographically.
pub fn search_clique(graphs: &CompositeGraph, d: usize, opts: SearchOptions) -> Result<SearchOutcome> {
    if opts.target == 0 {
        return Err(Error::Precondition("target must be at least 1".into()));
    }
    let oracle = DistanceOracle::new(graphs, d)?;
    let uncoverable = oracle.uncoverable_table(SEARCH_SPACE_CAP)?;
    let order = graphs.system().phase_order();
    let purity = oracle.purity_set();
    let candidate: Vec<bool> = uncoverable
        .par_iter()
        .enumerate()
        .map(|(i, &u)| {
            let c = graphs.label_at(i);
            i != 0 && u && purity.iter().all(|s| s.pairing(&c, order) == 0)
        })
        .collect();
    let space = Space {
        graphs,
        candidate,
        uncoverable,
    };
    let cands: Vec<usize> = (0..space.candidate.len()).filter(|&i| space.candidate[i]).collect();

    let results: Vec<Branch> = if opts.target == 1 {
        Vec::new()
    } else {
        match opts.mode {
            SearchMode::Group => cands
                .par_iter()
                .map(|&g| group_branch(&space, &cands, g, opts))
                .collect(),
            SearchMode::Set => {
                let adj = SetGraph::new(&space, &cands);
                (0..cands.len())
                    .into_par_iter()
                    .map(|v| adj.branch(v, opts))
                    .collect()
            }
        }
    };

    let zero = Label::zero(graphs.system());
    let mut best = vec![zero.clone()];
    let mut best_gens = Some(Vec::new());
    let mut nodes = 0;
    let mut exhausted = false;
    for b in results {
        nodes += b.nodes;
        exhausted |= b.exhausted;
        let mut set = b.vectors;
        set.sort();
        if set.len() > best.len() || (set.len() == best.len() && set < best) {
            best = set;
            best_gens = b.generators;
        }
    }
    let target_reached = best.len() >= opts.target;
    let mut clique = CodingClique::new(graphs.clone(), d, best)?;
    clique.generators = best_gens;
    Ok(SearchOutcome {
        clique,
        nodes,
        budget_exhausted: exhausted,
        target_reached,
    })
}

struct Branch {
    vectors: Vec<Label>,
    generators: Option<Vec<Label>>,
    nodes: u64,
    exhausted: bool,
}

fn group_branch(space: &Space, cands: &[usize], first: usize, opts: SearchOptions) -> Branch {
    let zero = Label::zero(space.graphs.system());
    let mut st = GroupState {
        space,
        cands,
        opts,
        nodes: 0,
        exhausted: false,
        best: vec![zero.clone()],
        best_gens: Vec::new(),
    };
    let group = BTreeSet::from([zero]);
    let pos = cands.binary_search(&first).expect("first is a candidate");
    st.extend(&group, &[], pos);
    Branch {
        vectors: st.best,
        generators: Some(st.best_gens),
        nodes: st.nodes,
        exhausted: st.exhausted,
    }
}

struct GroupState<'a> {
    space: &'a Space<'a>,
    cands: &'a [usize],
    opts: SearchOptions,
    nodes: u64,
    exhausted: bool,
    best: Vec<Label>,
    best_gens: Vec<Label>,
}

impl GroupState<'_> {
    /// Tries generators `cands[from]` (only that one at the top level) and
    /// then every later candidate not yet in the group.
    fn extend(&mut self, group: &BTreeSet<Label>, gens: &[Label], from: usize) -> bool {
        let range: Vec<usize> = if gens.is_empty() {
            vec![from]
        } else {
            (from..self.cands.len()).collect()
        };
        for k in range {
            let g = self.space.graphs.label_at(self.cands[k]);
            if group.contains(&g) {
                continue;
            }
            if self.nodes >= self.opts.budget {
                self.exhausted = true;
                return true;
            }
            self.nodes += 1;
            let Some(next) = self.adjoin(group, &g) else {
                continue;
            };
            let mut gens2 = gens.to_vec();
            gens2.push(g);
            if next.len() > self.best.len() {
                self.best = next.iter().cloned().collect();
                self.best_gens = gens2.clone();
            }
            if self.best.len() >= self.opts.target {
                return true;
            }
            if self.extend(&next, &gens2, k + 1) {
                return true;
            }
        }
        false
    }

    /// `⟨H, g⟩` if every new element is a candidate.
    fn adjoin(&self, group: &BTreeSet<Label>, g: &Label) -> Option<BTreeSet<Label>> {
        let mut next = group.clone();
        let mut coset = g.clone();
        while !group.contains(&coset) {
            for h in group {
                let x = h.add(&coset);
                if !self.space.candidate[self.space.index(&x)] {
                    return None;
                }
                next.insert(x);
            }
            coset = coset.add(g);
        }
        Some(next)
    }
}

struct SetGraph<'a> {
    space: &'a Space<'a>,
    cands: &'a [usize],
    words: usize,
    adj: Vec<Vec<u64>>,
}

impl<'a> SetGraph<'a> {
    fn new(space: &'a Space<'a>, cands: &'a [usize]) -> Self {
        let words = cands.len().div_ceil(64);
        let labels: Vec<Label> = cands.iter().map(|&i| space.graphs.label_at(i)).collect();
        let adj = labels
            .par_iter()
            .map(|a| {
                let mut row = vec![0u64; words];
                for (j, b) in labels.iter().enumerate() {
                    if a != b && space.uncoverable[space.index(&a.sub(b))] {
                        row[j / 64] |= 1 << (j % 64);
                    }
                }
                row
            })
            .collect();
        SetGraph {
            space,
            cands,
            words,
            adj,
        }
    }

    fn branch(&self, v: usize, opts: SearchOptions) -> Branch {
        let mut p = self.adj[v].clone();
        for j in 0..=v {
            p[j / 64] &= !(1 << (j % 64));
        }
        let mut st = SetState {
            graph: self,
            opts,
            nodes: 0,
            exhausted: false,
            best: vec![v],
        };
        if opts.budget == 0 {
            st.exhausted = true;
            st.best.clear();
        } else {
            st.nodes = 1;
            if opts.target > 2 {
                st.expand(&mut vec![v], p);
            } else if let Some(u) = first_bit(&p) {
                st.best = vec![v, u];
            }
        }
        let mut vectors = vec![Label::zero(self.space.graphs.system())];
        vectors.extend(st.best.iter().map(|&i| self.space.graphs.label_at(self.cands[i])));
        Branch {
            vectors,
            generators: None,
            nodes: st.nodes,
            exhausted: st.exhausted,
        }
    }
}

fn first_bit(p: &[u64]) -> Option<usize> {
    p.iter()
        .enumerate()
        .find(|(_, &w)| w != 0)
        .map(|(k, w)| k * 64 + w.trailing_zeros() as usize)
}

fn popcount(p: &[u64]) -> usize {
    p.iter().map(|w| w.count_ones() as usize).sum()
}

struct SetState<'a> {
    graph: &'a SetGraph<'a>,
    opts: SearchOptions,
    nodes: u64,
    exhausted: bool,
    best: Vec<usize>,
}

impl SetState<'_> {
    /// Branch and bound over the candidates in `p`, all adjacent to `r`.
    /// Sizes count the implicit zero vector.
    fn expand(&mut self, r: &mut Vec<usize>, mut p: Vec<u64>) -> bool {
        while let Some(u) = first_bit(&p) {
            if r.len() + popcount(&p) <= self.best.len() {
                break;
            }
            if self.nodes >= self.opts.budget {
                self.exhausted = true;
                return true;
            }
            self.nodes += 1;
            p[u / 64] &= !(1 << (u % 64));
            let next: Vec<u64> = (0..self.graph.words).map(|k| p[k] & self.graph.adj[u][k]).collect();
            r.push(u);
            if r.len() > self.best.len() {
                self.best = r.clone();
            }
            if self.best.len() + 1 >= self.opts.target || self.expand(r, next) {
                return true;
            }
            r.pop();
        }
        false
    }
}
