//! Graph states over qudit layers, numerically and symbolically.
//!
//! For a `Z_m`-weighted graph `Γ` the graph state has amplitudes
//! `m^{-n/2} ω_m^{q(j)}` with `q(j) = Σ_{a<b} Γ_ab j_a j_b`. Commuting `X^s`
//! through the amplitudes gives the exact reduction
//!
//! ```text
//! X^s Z^t |Γ⟩ = ω_m^{q(s) - t·s} Z^{t - s·Γ} |Γ⟩
//! ```
//!
//! which is what [`CompositeGraph::reduce_to_phase_op`] implements layer by layer.

use std::fmt;

use num_complex::Complex64;
use crate::algebra::{ModVec, Phase};
use crate::error::{Error, Result};
use crate::errors::{ErrorWord, Layer, LayerOp, MixedSystem};
use crate::graphs::WeightedGraph;

/// Amplitudes over a tensor product of factors with the given dimensions.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    dims: Vec<usize>,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn new(dims: Vec<usize>, amps: Vec<Complex64>) -> Result<Self> {
        let d: usize = dims.iter().product();
        if d != amps.len() {
            return Err(Error::LengthMismatch(amps.len(), d));
        }
        Ok(StateVector { dims, amps })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        inner(&self.amps, &other.amps)
    }

    pub fn normalized(mut self) -> Self {
        let n = self.norm();
        for a in &mut self.amps {
            *a /= n;
        }
        self
    }

    pub fn apply(&self, word: &ErrorWord, sys: &MixedSystem, cap: u128) -> Result<StateVector> {
        let m = word.matrix(sys, cap)?;
        if m.dim() != self.len() {
            return Err(Error::LengthMismatch(m.dim(), self.len()));
        }
        Ok(StateVector {
            dims: self.dims.clone(),
            amps: m.apply(&self.amps),
        })
    }
}

pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// `m^{-n/2} Σ_j ω_m^{q(j)} |j⟩`.
pub fn graph_state_vector(g: &WeightedGraph, cap: u128) -> Result<StateVector> {
    let cg = CompositeGraph::single(g.clone())?;
    cg.codeword_state(&Label::zero(cg.system()), cap)
}

/// Phase labels `c ⊗ c′ ⊗ …`, one vector per layer.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label(pub Vec<ModVec>);

impl Label {
    pub fn zero(sys: &MixedSystem) -> Self {
        Label(
            sys.layers()
                .iter()
                .map(|l| ModVec::zeros(l.modulus(), l.len()))
                .collect(),
        )
    }

    pub fn parse(sys: &MixedSystem, parts: &[impl AsRef<str>]) -> Result<Self> {
        if parts.len() != sys.layers().len() {
            return Err(Error::Parse(format!(
                "label has {} parts, system has {} layers",
                parts.len(),
                sys.layers().len()
            )));
        }
        let v = parts
            .iter()
            .zip(sys.layers())
            .map(|(s, l)| {
                let v = ModVec::parse(l.modulus(), s.as_ref())?;
                if v.len() != l.len() {
                    return Err(Error::LengthMismatch(v.len(), l.len()));
                }
                Ok(v)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Label(v))
    }

    pub fn parts(&self) -> &[ModVec] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(ModVec::is_zero)
    }

    pub fn add(&self, other: &Label) -> Label {
        Label(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Label) -> Label {
        Label(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: i64) -> Label {
        Label(self.0.iter().map(|a| a.scale(k)).collect())
    }

    pub fn order(&self) -> u64 {
        self.0.iter().map(ModVec::order).fold(1, crate::algebra::lcm)
    }

    pub fn digits(&self) -> Vec<String> {
        self.0.iter().map(ModVec::to_digits).collect()
    }

    /// Exponent of `Π_k ω_{m_k}^{a_k·b_k}` as a power of `ω_L`,
    /// `L = lcm(m_k)`.
    pub fn pairing(&self, other: &Label, order: u64) -> u64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (order / a.modulus() as u64) * a.dot_unchecked(b) as u64)
            .sum::<u64>()
            % order
    }

    /// `Z^c` as an error word.
    pub fn phase_word(&self, sys: &MixedSystem) -> ErrorWord {
        let parts = self
            .0
            .iter()
            .map(|c| LayerOp {
                x: ModVec::zeros(c.modulus(), c.len()),
                z: c.clone(),
            })
            .collect();
        ErrorWord::new(sys, parts, Phase::ONE).expect("label matches system")
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.digits().join("⊗"))
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.digits().join("⊗"))
    }
}

/// One weighted graph per layer of a mixed system; layer `k`'s vertex `v`
/// lives on particle `sys.layer(k).sites()[v]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CompositeGraph {
    system: MixedSystem,
    graphs: Vec<WeightedGraph>,
}

impl CompositeGraph {
    pub fn new(system: MixedSystem, graphs: Vec<WeightedGraph>) -> Result<Self> {
        if graphs.len() != system.layers().len() {
            return Err(Error::LengthMismatch(graphs.len(), system.layers().len()));
        }
        for (g, l) in graphs.iter().zip(system.layers()) {
            if g.modulus() != l.modulus() {
                return Err(Error::ModulusMismatch(g.modulus(), l.modulus()));
            }
            if g.n() != l.len() {
                return Err(Error::LengthMismatch(g.n(), l.len()));
            }
        }
        Ok(CompositeGraph { system, graphs })
    }

    pub fn single(g: WeightedGraph) -> Result<Self> {
        let sys = MixedSystem::uniform(g.n(), g.modulus())?;
        CompositeGraph::new(sys, vec![g])
    }

    /// Layers paired with identity vertex pairing: every graph's vertex `i`
    /// sits on particle `i`, so the first graph must be the largest.
    pub fn paired(graphs: Vec<WeightedGraph>) -> Result<Self> {
        let n = graphs.first().map(WeightedGraph::n).unwrap_or(0);
        if graphs.iter().any(|g| g.n() > n) {
            return Err(Error::InvalidSystem("first graph must span every particle".into()));
        }
        let layers = graphs
            .iter()
            .map(|g| Layer::new(g.modulus(), (0..g.n()).collect()))
            .collect();
        CompositeGraph::new(MixedSystem::new(n, layers)?, graphs)
    }

    pub fn system(&self) -> &MixedSystem {
        &self.system
    }

    pub fn graphs(&self) -> &[WeightedGraph] {
        &self.graphs
    }

    /// Concatenates the layers of two graphs over the same particle count.
    pub fn stack(&self, other: &CompositeGraph) -> Result<Self> {
        if self.system.n() != other.system.n() {
            return Err(Error::LengthMismatch(self.system.n(), other.system.n()));
        }
        let mut layers = self.system.layers().to_vec();
        layers.extend(other.system.layers().iter().cloned());
        let mut graphs = self.graphs.clone();
        graphs.extend(other.graphs.iter().cloned());
        CompositeGraph::new(MixedSystem::new(self.system.n(), layers)?, graphs)
    }

    /// `s·Γ` on every layer.
    pub fn action(&self, s: &Label) -> Label {
        Label(
            self.graphs
                .iter()
                .zip(&s.0)
                .map(|(g, v)| g.action_unchecked(v))
                .collect(),
        )
    }

    /// The graph-state stabilizer `g^s = φ X^s Z^{s·Γ}`, with `φ = ω^{q(s)}`
    /// chosen so that `g^s |Γ⟩ = |Γ⟩` exactly.
    pub fn stabilizer_word(&self, s: &Label) -> ErrorWord {
        let mut phase = Phase::ONE;
        let parts = self
            .graphs
            .iter()
            .zip(&s.0)
            .map(|(g, v)| {
                phase = phase * Phase::omega(g.modulus(), g.pair_form(v.entries()) as i64);
                LayerOp {
                    x: v.clone(),
                    z: g.action_unchecked(v),
                }
            })
            .collect();
        ErrorWord::new(&self.system, parts, phase).expect("label matches system")
    }

    /// `(φ, c)` with `E |Γ⟩ = φ Z^c |Γ⟩` for `E = phase · X^s Z^t`.
    pub fn reduce_to_phase_op(&self, word: &ErrorWord) -> (Phase, Label) {
        let mut phase = word.phase();
        let mut labels = Vec::with_capacity(self.graphs.len());
        for (g, p) in self.graphs.iter().zip(word.parts()) {
            let m = g.modulus();
            let q = g.pair_form(p.x.entries()) as i64;
            let ts = p.z.dot_unchecked(&p.x) as i64;
            phase = phase * Phase::omega(m, q - ts);
            labels.push(&p.z - &g.action_unchecked(&p.x));
        }
        (phase, Label(labels))
    }

    /// `⊗_k Z^{c_k} |Γ_k⟩` in the system's factor order.
    pub fn codeword_state(&self, c: &Label, cap: u128) -> Result<StateVector> {
        let dim = self.system.check_dim(cap)?;
        let factors = self.system.factors();
        let order = self.system.phase_order();
        let table: Vec<Complex64> = (0..order)
            .map(|k| Phase::new(k as i64, order).to_complex())
            .collect();
        let norm = 1.0 / (dim as f64).sqrt();
        let mut digits: Vec<Vec<u32>> = self
            .system
            .layers()
            .iter()
            .map(|l| vec![0; l.len()])
            .collect();
        let mut counter = vec![0u32; factors.len()];
        let mut amps = Vec::with_capacity(dim);
        for _ in 0..dim {
            for (f, &j) in factors.iter().zip(&counter) {
                digits[f.layer][f.vertex] = j;
            }
            let mut e = 0u64;
            for ((g, cv), j) in self.graphs.iter().zip(&c.0).zip(&digits) {
                let m = g.modulus() as u64;
                let dot: u64 = cv.entries().iter().zip(j).map(|(&a, &b)| a as u64 * b as u64).sum();
                e += (order / m) * ((g.pair_form(j) + dot) % m);
            }
            amps.push(table[(e % order) as usize] * norm);
            for k in (0..counter.len()).rev() {
                counter[k] += 1;
                if counter[k] < factors[k].modulus {
                    break;
                }
                counter[k] = 0;
            }
        }
        StateVector::new(factors.iter().map(|f| f.modulus as usize).collect(), amps)
    }

    /// Position of `c` in the lexicographic order of the layer-major digit
    /// string.
    pub fn label_index(&self, c: &Label) -> usize {
        let mut idx = 0usize;
        for v in &c.0 {
            let m = v.modulus() as usize;
            for &e in v.entries() {
                idx = idx * m + e as usize;
            }
        }
        idx
    }

    pub fn label_at(&self, mut idx: usize) -> Label {
        let mut parts: Vec<ModVec> = self
            .system
            .layers()
            .iter()
            .map(|l| ModVec::zeros(l.modulus(), l.len()))
            .collect();
        for v in parts.iter_mut().rev() {
            let m = v.modulus() as usize;
            for i in (0..v.len()).rev() {
                v.set(i, (idx % m) as i64);
                idx /= m;
            }
        }
        Label(parts)
    }

    /// Every label of the phase-label space in index order. Fails if the
    /// space exceeds `cap`.
    pub fn all_labels(&self, cap: u128) -> Result<Vec<Label>> {
        let size = self.system.check_dim(cap)?;
        Ok((0..size).map(|i| self.label_at(i)).collect())
    }

    /// Particles touched by the nonzero entries of `parts`, as a bit mask.
    pub fn particle_mask(&self, parts: &[ModVec]) -> u64 {
        let mut mask = 0u64;
        for (v, l) in parts.iter().zip(self.system.layers()) {
            for (i, &e) in v.entries().iter().enumerate() {
                if e != 0 {
                    mask |= 1 << l.sites()[i];
                }
            }
        }
        mask
    }
}

/// `X^s Z^{s·Γ}` with the phase that makes it stabilize `|Γ⟩`.
pub fn stabilizer_word(g: &WeightedGraph, s: &ModVec) -> Result<ErrorWord> {
    let cg = CompositeGraph::single(g.clone())?;
    g.action(s)?;
    Ok(cg.stabilizer_word(&Label(vec![s.clone()])))
}

/// `(φ, t − s·Γ)` with `X^s Z^t |Γ⟩ = φ Z^{t−s·Γ} |Γ⟩`.
pub fn reduce_to_phase_op(s: &ModVec, t: &ModVec, g: &WeightedGraph) -> Result<(Phase, ModVec)> {
    let cg = CompositeGraph::single(g.clone())?;
    let w = ErrorWord::from_xz(cg.system(), vec![(s.clone(), t.clone())])?;
    let (phase, c) = cg.reduce_to_phase_op(&w);
    Ok((phase, c.0.into_iter().next().expect("one layer")))
}
