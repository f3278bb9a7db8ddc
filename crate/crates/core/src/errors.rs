//! Mixed-radix Pauli error words.
//!
//! A [`MixedSystem`] is a set of particles carrying one or more *layers*.
//! Each layer is a register of `m`-level subsystems attached to a subset of
//! the particles, so a particle of dimension `q = r·p` is the composite of
//! a `p`-level factor and an `r`-level factor. Within a particle the tensor
//! factors are ordered by layer index, and particles are ordered by index;
//! the first factor is the most significant digit of a basis index.
//!
//! Error words are stored layer by layer as `X^s Z^t` (so `Z^t` acts first)
//! together with an exact global phase.

use std::collections::BTreeSet;
use std::fmt;

use itertools::Itertools;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{lcm, ModVec, Phase};
use crate::error::{Error, Result};

/// Default cap on the Hilbert-space dimension for dense numerics.
pub const DEFAULT_DIM_CAP: u128 = 1 << 16;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Layer {
    modulus: u32,
    sites: Vec<usize>,
}

impl Layer {
    pub fn new(modulus: u32, sites: Vec<usize>) -> Self {
        Layer { modulus, sites }
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    /// Particle index of each layer vertex.
    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }
}

/// One tensor factor of the global Hilbert space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Factor {
    pub particle: usize,
    pub layer: usize,
    pub vertex: usize,
    pub modulus: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "SystemJson", into = "SystemJson")]
pub struct MixedSystem {
    n: usize,
    layers: Vec<Layer>,
}

#[derive(Serialize, Deserialize)]
struct LayerJson {
    #[serde(rename = "mod")]
    modulus: u32,
    sites: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct SystemJson {
    n: usize,
    dims: Vec<u64>,
    layers: Vec<LayerJson>,
}

impl TryFrom<SystemJson> for MixedSystem {
    type Error = Error;

    fn try_from(j: SystemJson) -> Result<Self> {
        let layers = j
            .layers
            .into_iter()
            .map(|l| {
                let sites = l
                    .sites
                    .into_iter()
                    .map(|s| {
                        s.checked_sub(1)
                            .ok_or_else(|| Error::InvalidSystem("sites are 1-based".into()))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Layer::new(l.modulus, sites))
            })
            .collect::<Result<Vec<_>>>()?;
        let sys = MixedSystem::new(j.n, layers)?;
        if sys.dims() != j.dims {
            return Err(Error::InvalidSystem(format!(
                "declared dims {:?} disagree with layers {:?}",
                j.dims,
                sys.dims()
            )));
        }
        Ok(sys)
    }
}

impl From<MixedSystem> for SystemJson {
    fn from(s: MixedSystem) -> Self {
        SystemJson {
            n: s.n,
            dims: s.dims(),
            layers: s
                .layers
                .into_iter()
                .map(|l| LayerJson {
                    modulus: l.modulus,
                    sites: l.sites.into_iter().map(|x| x + 1).collect(),
                })
                .collect(),
        }
    }
}

impl MixedSystem {
    pub fn new(n: usize, layers: Vec<Layer>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSystem("no particles".into()));
        }
        let mut covered = vec![false; n];
        for (k, l) in layers.iter().enumerate() {
            if l.modulus < 2 {
                return Err(Error::InvalidSystem(format!("layer {k} has modulus {}", l.modulus)));
            }
            if l.sites.is_empty() {
                return Err(Error::InvalidSystem(format!("layer {k} has no sites")));
            }
            if !l.sites.windows(2).all(|w| w[0] < w[1]) {
                return Err(Error::InvalidSystem(format!("layer {k} sites not increasing")));
            }
            if let Some(&s) = l.sites.iter().find(|&&s| s >= n) {
                return Err(Error::InvalidSystem(format!("layer {k} site {s} out of range")));
            }
            for &s in &l.sites {
                covered[s] = true;
            }
        }
        if let Some(i) = covered.iter().position(|c| !c) {
            return Err(Error::InvalidSystem(format!("particle {i} carries no layer")));
        }
        Ok(MixedSystem { n, layers })
    }

    /// `n` particles of a `p` layer, the first `n1` of which also carry an
    /// `r` layer (`q = r·p`). `r = 1` or `n1 = 0` gives a uniform system.
    pub fn composite(n: usize, p: u32, r: u32, n1: usize) -> Result<Self> {
        let mut layers = vec![Layer::new(p, (0..n).collect())];
        if r >= 2 && n1 > 0 {
            if n1 > n {
                return Err(Error::InvalidSystem(format!("n1 = {n1} exceeds n = {n}")));
            }
            layers.push(Layer::new(r, (0..n1).collect()));
        }
        MixedSystem::new(n, layers)
    }

    pub fn uniform(n: usize, q: u32) -> Result<Self> {
        MixedSystem::new(n, vec![Layer::new(q, (0..n).collect())])
    }

    /// One single-factor layer per distinct dimension.
    pub fn from_dims(dims: &[u32]) -> Result<Self> {
        let mut layers: Vec<Layer> = Vec::new();
        for (i, &d) in dims.iter().enumerate() {
            match layers.iter_mut().find(|l| l.modulus == d) {
                Some(l) => l.sites.push(i),
                None => layers.push(Layer::new(d, vec![i])),
            }
        }
        MixedSystem::new(dims.len(), layers)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn layer(&self, k: usize) -> &Layer {
        &self.layers[k]
    }

    /// Per-particle dimensions.
    pub fn dims(&self) -> Vec<u64> {
        let mut d = vec![1u64; self.n];
        for l in &self.layers {
            for &s in &l.sites {
                d[s] *= l.modulus as u64;
            }
        }
        d
    }

    pub fn total_dim(&self) -> u128 {
        self.dims().iter().map(|&d| d as u128).product()
    }

    /// Least common multiple of all layer moduli.
    pub fn phase_order(&self) -> u64 {
        self.layers.iter().map(|l| l.modulus as u64).fold(1, lcm)
    }

    /// Tensor factors in global order.
    pub fn factors(&self) -> Vec<Factor> {
        let mut out = Vec::new();
        for particle in 0..self.n {
            for (layer, l) in self.layers.iter().enumerate() {
                if let Ok(vertex) = l.sites.binary_search(&particle) {
                    out.push(Factor {
                        particle,
                        layer,
                        vertex,
                        modulus: l.modulus,
                    });
                }
            }
        }
        out
    }

    pub fn particle_factors(&self, particle: usize) -> Vec<Factor> {
        self.factors()
            .into_iter()
            .filter(|f| f.particle == particle)
            .collect()
    }

    /// Number of non-identity local operators on a particle, `dim² − 1`.
    pub fn local_op_count(&self, particle: usize) -> u64 {
        let d = self.dims()[particle];
        d * d - 1
    }

    pub fn check_dim(&self, cap: u128) -> Result<usize> {
        let dim = self.total_dim();
        if dim > cap {
            return Err(Error::DimensionCap { dim, cap });
        }
        Ok(dim as usize)
    }

    /// Human-readable alphabet such as `4^3 2^2`.
    pub fn alphabet(&self) -> String {
        let dims = self.dims();
        let mut out: Vec<String> = Vec::new();
        for (d, group) in &dims.iter().chunk_by(|d| **d) {
            let c = group.count();
            out.push(if c == 1 { d.to_string() } else { format!("{d}^{c}") });
        }
        out.join(" ")
    }
}

/// `X^s Z^t` on a single layer.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LayerOp {
    pub x: ModVec,
    pub z: ModVec,
}

impl LayerOp {
    pub fn identity(modulus: u32, len: usize) -> Self {
        LayerOp {
            x: ModVec::zeros(modulus, len),
            z: ModVec::zeros(modulus, len),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }
}

/// A Pauli word `phase · ⊗_k X^{s_k} Z^{t_k}` over a mixed system.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ErrorWord {
    parts: Vec<LayerOp>,
    phase: Phase,
}

impl ErrorWord {
    pub fn identity(sys: &MixedSystem) -> Self {
        ErrorWord {
            parts: sys
                .layers
                .iter()
                .map(|l| LayerOp::identity(l.modulus, l.len()))
                .collect(),
            phase: Phase::ONE,
        }
    }

    pub fn new(sys: &MixedSystem, parts: Vec<LayerOp>, phase: Phase) -> Result<Self> {
        if parts.len() != sys.layers.len() {
            return Err(Error::LengthMismatch(parts.len(), sys.layers.len()));
        }
        for (p, l) in parts.iter().zip(&sys.layers) {
            for v in [&p.x, &p.z] {
                if v.modulus() != l.modulus {
                    return Err(Error::ModulusMismatch(v.modulus(), l.modulus));
                }
                if v.len() != l.len() {
                    return Err(Error::LengthMismatch(v.len(), l.len()));
                }
            }
        }
        Ok(ErrorWord { parts, phase })
    }

    /// `X^{s_k} Z^{t_k}` with `(s_k, t_k)` given per layer.
    pub fn from_xz(sys: &MixedSystem, xz: Vec<(ModVec, ModVec)>) -> Result<Self> {
        let parts = xz.into_iter().map(|(x, z)| LayerOp { x, z }).collect();
        ErrorWord::new(sys, parts, Phase::ONE)
    }

    pub fn parts(&self) -> &[LayerOp] {
        &self.parts
    }

    pub fn part(&self, k: usize) -> &LayerOp {
        &self.parts[k]
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phase = phase;
        self
    }

    pub fn times_phase(mut self, phase: Phase) -> Self {
        self.phase = self.phase * phase;
        self
    }

    /// True when the operator part is trivial, irrespective of the phase.
    pub fn is_scalar(&self) -> bool {
        self.parts.iter().all(LayerOp::is_identity)
    }

    pub fn is_identity(&self) -> bool {
        self.is_scalar() && self.phase.is_one()
    }

    /// Equality up to the global phase.
    pub fn same_operator(&self, other: &ErrorWord) -> bool {
        self.parts == other.parts
    }

    /// Support on particles: union of the X and Z supports of every layer.
    pub fn support(&self, sys: &MixedSystem) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for (p, l) in self.parts.iter().zip(&sys.layers) {
            for v in p.x.support().into_iter().chain(p.z.support()) {
                out.insert(l.sites[v]);
            }
        }
        out
    }

    pub fn weight(&self, sys: &MixedSystem) -> usize {
        self.support(sys).len()
    }

    /// Operator product `self · other`, reordering each layer as
    /// `Z^t X^s = ω^{t·s} X^s Z^t`.
    pub fn compose(&self, other: &ErrorWord) -> ErrorWord {
        let mut phase = self.phase * other.phase;
        let parts = self
            .parts
            .iter()
            .zip(&other.parts)
            .map(|(a, b)| {
                let m = a.x.modulus();
                phase = phase * Phase::omega(m, a.z.dot_unchecked(&b.x) as i64);
                LayerOp {
                    x: &a.x + &b.x,
                    z: &a.z + &b.z,
                }
            })
            .collect();
        ErrorWord { parts, phase }
    }

    pub fn pow(&self, e: u64) -> ErrorWord {
        let mut acc = ErrorWord {
            parts: self
                .parts
                .iter()
                .map(|p| LayerOp::identity(p.x.modulus(), p.x.len()))
                .collect(),
            phase: Phase::ONE,
        };
        for _ in 0..e {
            acc = acc.compose(self);
        }
        acc
    }

    /// Inverse word: `(φ X^s Z^t)^{-1} = φ^{-1} ω^{t·s} X^{-s} Z^{-t}`.
    pub fn inverse(&self) -> ErrorWord {
        let mut phase = self.phase.inverse();
        let parts = self
            .parts
            .iter()
            .map(|p| {
                let m = p.x.modulus();
                phase = phase * Phase::omega(m, p.z.dot_unchecked(&p.x) as i64);
                LayerOp {
                    x: -&p.x,
                    z: -&p.z,
                }
            })
            .collect();
        ErrorWord { parts, phase }
    }

    /// The phase `φ` with `self · other = φ · other · self`.
    pub fn commutator_phase(&self, other: &ErrorWord) -> Phase {
        self.parts
            .iter()
            .zip(&other.parts)
            .fold(Phase::ONE, |acc, (a, b)| {
                let m = a.x.modulus();
                let k = a.z.dot_unchecked(&b.x) as i64 - b.z.dot_unchecked(&a.x) as i64;
                acc * Phase::omega(m, k)
            })
    }

    pub fn commutes_with(&self, other: &ErrorWord) -> bool {
        self.commutator_phase(other).is_one()
    }

    /// Smallest `k >= 1` with `self^k` scalar.
    pub fn operator_order(&self) -> u64 {
        self.parts
            .iter()
            .map(|p| p.x.order().max(1))
            .zip(self.parts.iter().map(|p| p.z.order()))
            .fold(1, |acc, (a, b)| lcm(acc, lcm(a, b)))
    }

    /// Local operator index on `particle` in `1..dim²` (0 = identity); the
    /// digits `(x, z)` of each factor are read most significant first.
    pub fn local_index(&self, sys: &MixedSystem, particle: usize) -> u64 {
        let mut idx = 0u64;
        for f in sys.particle_factors(particle) {
            let m = f.modulus as u64;
            let p = &self.parts[f.layer];
            idx = (idx * m + p.x.get(f.vertex) as u64) * m + p.z.get(f.vertex) as u64;
        }
        idx
    }

    /// Builds a word from local operator indices on distinct particles.
    pub fn from_local(sys: &MixedSystem, locals: &[(usize, u64)]) -> ErrorWord {
        let mut w = ErrorWord::identity(sys);
        for &(particle, index) in locals {
            let factors = sys.particle_factors(particle);
            let mut rest = index;
            for f in factors.iter().rev() {
                let m = f.modulus as u64;
                let z = rest % m;
                rest /= m;
                let x = rest % m;
                rest /= m;
                let p = &mut w.parts[f.layer];
                p.x.set(f.vertex, x as i64);
                p.z.set(f.vertex, z as i64);
            }
        }
        w
    }

    /// Action on the factors of `particles` (the word must be supported
    /// there) as a monomial matrix over their joint local space.
    pub fn local_monomial(&self, sys: &MixedSystem, particles: &[usize]) -> Monomial {
        let factors: Vec<Factor> = particles
            .iter()
            .flat_map(|&p| sys.particle_factors(p))
            .collect();
        let order = lcm(sys.phase_order(), self.phase.order());
        let dim: usize = factors.iter().map(|f| f.modulus as usize).product();
        let base = self.phase.exponent_in(order).unwrap();
        let digits: Vec<(u32, u32, u32)> = factors
            .iter()
            .map(|f| {
                let p = &self.parts[f.layer];
                (f.modulus, p.x.get(f.vertex), p.z.get(f.vertex))
            })
            .collect();
        let table: Vec<Complex64> = (0..order).map(|k| Phase::new(k as i64, order).to_complex()).collect();
        let mut target = vec![0usize; dim];
        let mut coeff = vec![Complex64::new(0.0, 0.0); dim];
        let mut jd = vec![0u32; digits.len()];
        for col in 0..dim {
            let mut row = 0usize;
            let mut e = base;
            for (k, &(m, x, z)) in digits.iter().enumerate() {
                let j = jd[k];
                e += (order / m as u64) * (z as u64 * j as u64 % m as u64);
                row = row * m as usize + ((j + x) % m) as usize;
            }
            target[col] = row;
            coeff[col] = table[(e % order) as usize];
            // advance mixed-radix counter, last factor fastest
            for k in (0..digits.len()).rev() {
                jd[k] += 1;
                if jd[k] < digits[k].0 {
                    break;
                }
                jd[k] = 0;
            }
        }
        Monomial { target, coeff }
    }

    /// Full-space matrix, subject to the dimension cap.
    pub fn matrix(&self, sys: &MixedSystem, cap: u128) -> Result<Monomial> {
        sys.check_dim(cap)?;
        let all: Vec<usize> = (0..sys.n).collect();
        Ok(self.local_monomial(sys, &all))
    }

    /// Parses the superscript notation (`Z^{14}Z^{3'4'6'}`) or per-site
    /// letter rows (`XZZXZZ⊗XZIIIZ`). Letter segments map to layers in order
    /// of appearance; superscript items select their layer by prime count.
    pub fn parse(sys: &MixedSystem, s: &str) -> Result<Self> {
        notation::parse(sys, s)
    }

    /// Letter form, one segment per layer, when every layer is a qubit layer.
    pub fn to_letters(&self) -> Option<String> {
        let mut segs = Vec::new();
        let mut phase = self.phase;
        for p in &self.parts {
            if p.x.modulus() != 2 {
                return None;
            }
            let mut seg = String::new();
            for v in 0..p.x.len() {
                let c = match (p.x.get(v), p.z.get(v)) {
                    (0, 0) => 'I',
                    (1, 0) => 'X',
                    (0, 1) => 'Z',
                    _ => {
                        // XZ = -i Y
                        phase = phase * Phase::new(3, 4);
                        'Y'
                    }
                };
                seg.push(c);
            }
            segs.push(seg);
        }
        let prefix = if phase.is_one() { String::new() } else { phase.to_string() };
        Some(format!("{prefix}{}", segs.join("⊗")))
    }
}

impl fmt::Display for ErrorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&notation::format(self))
    }
}

/// A matrix with one nonzero entry per column: column `j` maps to row
/// `target[j]` with value `coeff[j]`.
#[derive(Clone, Debug)]
pub struct Monomial {
    pub target: Vec<usize>,
    pub coeff: Vec<Complex64>,
}

impl Monomial {
    pub fn dim(&self) -> usize {
        self.target.len()
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
        for (j, &a) in v.iter().enumerate() {
            out[self.target[j]] += self.coeff[j] * a;
        }
        out
    }

    pub fn to_dense(&self) -> Vec<Vec<Complex64>> {
        let d = self.dim();
        let mut m = vec![vec![Complex64::new(0.0, 0.0); d]; d];
        for j in 0..d {
            m[self.target[j]][j] = self.coeff[j];
        }
        m
    }
}

/// Every non-identity error of weight `<= w_max`, ordered by weight, then
/// support (lexicographic), then local operator indices.
pub fn enumerate_errors(sys: &MixedSystem, w_max: usize) -> impl Iterator<Item = ErrorWord> + '_ {
    let w_max = w_max.min(sys.n);
    (1..=w_max)
        .flat_map(move |w| (0..sys.n).combinations(w))
        .flat_map(move |supp| {
            supp.iter()
                .map(|&i| 1..=sys.local_op_count(i))
                .multi_cartesian_product()
                .map(move |ops| {
                    let locals: Vec<(usize, u64)> = supp.iter().copied().zip(ops).collect();
                    ErrorWord::from_local(sys, &locals)
                })
        })
}

/// Number of words `enumerate_errors` yields, by elementary symmetric sums.
pub fn error_count(sys: &MixedSystem, w_max: usize) -> u128 {
    let per: Vec<u128> = (0..sys.n).map(|i| sys.local_op_count(i) as u128).collect();
    let mut e = vec![0u128; sys.n + 1];
    e[0] = 1;
    for &c in &per {
        for k in (1..=sys.n).rev() {
            e[k] += e[k - 1] * c;
        }
    }
    e[1..=w_max.min(sys.n)].iter().sum()
}

mod notation {
    use super::*;

    fn layer_of(primes: usize, sys: &MixedSystem) -> Result<usize> {
        if primes >= sys.layers.len() {
            return Err(Error::Parse(format!(
                "{primes} primes but the system has {} layers",
                sys.layers.len()
            )));
        }
        Ok(primes)
    }

    fn parse_phase_prefix(s: &str) -> Result<(Phase, &str)> {
        let s = s.trim_start();
        if let Some(rest) = s.strip_prefix("w[") {
            let end = rest
                .find(']')
                .ok_or_else(|| Error::Parse(format!("unterminated phase in {s:?}")))?;
            let (k, l) = rest[..end]
                .split_once('/')
                .ok_or_else(|| Error::Parse(format!("bad phase {:?}", &rest[..end])))?;
            let k: i64 = k.trim().parse().map_err(|_| Error::Parse(format!("bad phase {s:?}")))?;
            let l: u64 = l.trim().parse().map_err(|_| Error::Parse(format!("bad phase {s:?}")))?;
            if l == 0 {
                return Err(Error::Parse("phase order 0".into()));
            }
            return Ok((Phase::new(k, l), &rest[end + 1..]));
        }
        let (neg, s) = match s.strip_prefix('-') {
            Some(r) => (true, r),
            None => (false, s.strip_prefix('+').unwrap_or(s)),
        };
        let (imag, s) = match s.strip_prefix('i') {
            Some(r) => (true, r),
            None => (false, s),
        };
        let mut p = Phase::ONE;
        if neg {
            p = p * Phase::minus_one();
        }
        if imag {
            p = p * Phase::i();
        }
        Ok((p, s))
    }

    struct Item {
        vertex: usize,
        layer: usize,
        power: i64,
    }

    fn parse_items(body: &str, sys: &MixedSystem) -> Result<Vec<Item>> {
        let comma = body.contains(',');
        let chars: Vec<char> = body.chars().collect();
        let mut i = 0;
        let mut items = Vec::new();
        while i < chars.len() {
            let c = chars[i];
            if c == ',' || c.is_whitespace() {
                i += 1;
                continue;
            }
            if !c.is_ascii_digit() {
                return Err(Error::Parse(format!("unexpected {c:?} in {body:?}")));
            }
            let mut num = String::new();
            if comma {
                while i < chars.len() && chars[i].is_ascii_digit() {
                    num.push(chars[i]);
                    i += 1;
                }
            } else {
                num.push(c);
                i += 1;
            }
            let mut primes = 0;
            while i < chars.len() && chars[i] == '\'' {
                primes += 1;
                i += 1;
            }
            let mut power = 1i64;
            if i < chars.len() && chars[i] == '^' {
                i += 1;
                let mut p = String::new();
                while i < chars.len() && chars[i].is_ascii_digit() {
                    p.push(chars[i]);
                    i += 1;
                }
                power = p.parse().map_err(|_| Error::Parse(format!("bad power in {body:?}")))?;
            }
            let vertex: usize = num.parse().map_err(|_| Error::Parse(format!("bad vertex in {body:?}")))?;
            let layer = layer_of(primes, sys)?;
            if vertex == 0 || vertex > sys.layers[layer].len() {
                return Err(Error::Parse(format!(
                    "vertex {vertex} out of range for layer {layer}"
                )));
            }
            items.push(Item {
                vertex: vertex - 1,
                layer,
                power,
            });
        }
        Ok(items)
    }

    fn single(sys: &MixedSystem, kind: char, item: &Item) -> Result<ErrorWord> {
        let mut w = ErrorWord::identity(sys);
        let m = sys.layers[item.layer].modulus;
        match kind {
            'X' => w.parts[item.layer].x.set(item.vertex, item.power),
            'Z' => w.parts[item.layer].z.set(item.vertex, item.power),
            'Y' => {
                if m != 2 || item.power != 1 {
                    return Err(Error::Parse("Y is only defined on qubit layers".into()));
                }
                w.parts[item.layer].x.set(item.vertex, 1);
                w.parts[item.layer].z.set(item.vertex, 1);
                w.phase = Phase::i();
            }
            'I' => {}
            _ => unreachable!(),
        }
        Ok(w)
    }

    fn parse_superscript(sys: &MixedSystem, seg: &str) -> Result<ErrorWord> {
        let chars: Vec<char> = seg.chars().collect();
        let mut acc = ErrorWord::identity(sys);
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            if c.is_whitespace() || c == '·' || c == '*' {
                i += 1;
                continue;
            }
            if !matches!(c, 'X' | 'Z' | 'Y' | 'I') {
                return Err(Error::Parse(format!("unexpected {c:?} in {seg:?}")));
            }
            i += 1;
            if i >= chars.len() || chars[i] != '^' {
                return Err(Error::Parse(format!("expected '^' after {c} in {seg:?}")));
            }
            i += 1;
            let body: String = if i < chars.len() && chars[i] == '{' {
                let start = i + 1;
                let mut depth = 1;
                i += 1;
                while i < chars.len() && depth > 0 {
                    match chars[i] {
                        '{' => depth += 1,
                        '}' => depth -= 1,
                        _ => {}
                    }
                    i += 1;
                }
                if depth != 0 {
                    return Err(Error::Parse(format!("unbalanced braces in {seg:?}")));
                }
                chars[start..i - 1].iter().collect()
            } else {
                let start = i;
                if i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                while i < chars.len() && chars[i] == '\'' {
                    i += 1;
                }
                chars[start..i].iter().collect()
            };
            for item in parse_items(&body, sys)? {
                acc = acc.compose(&single(sys, c, &item)?);
            }
        }
        Ok(acc)
    }

    fn parse_letters(sys: &MixedSystem, layer: usize, seg: &str) -> Result<ErrorWord> {
        let l = sys
            .layers
            .get(layer)
            .ok_or_else(|| Error::Parse(format!("segment {layer} has no layer")))?;
        let letters: Vec<char> = seg.chars().filter(|c| !c.is_whitespace()).collect();
        if letters.len() != l.len() {
            return Err(Error::Parse(format!(
                "segment {seg:?} has {} symbols, layer {layer} has {} vertices",
                letters.len(),
                l.len()
            )));
        }
        let mut acc = ErrorWord::identity(sys);
        for (v, &c) in letters.iter().enumerate() {
            if !matches!(c, 'X' | 'Z' | 'Y' | 'I') {
                return Err(Error::Parse(format!("bad symbol {c:?} in {seg:?}")));
            }
            let item = Item {
                vertex: v,
                layer,
                power: 1,
            };
            acc = acc.compose(&single(sys, c, &item)?);
        }
        Ok(acc)
    }

    pub fn parse(sys: &MixedSystem, s: &str) -> Result<ErrorWord> {
        let (phase, rest) = parse_phase_prefix(s)?;
        let rest = rest.trim();
        let segments: Vec<&str> = rest.split(['⊗', '|']).collect();
        let mut acc = ErrorWord::identity(sys);
        if rest.is_empty() || rest == "I" {
            return Ok(acc.with_phase(phase));
        }
        if rest.contains('^') && segments.len() == 1 {
            acc = parse_superscript(sys, rest)?;
        } else {
            for (k, seg) in segments.iter().enumerate() {
                let w = if seg.contains('^') {
                    parse_superscript(sys, seg)?
                } else {
                    parse_letters(sys, k, seg)?
                };
                acc = acc.compose(&w);
            }
        }
        Ok(acc.times_phase(phase))
    }

    fn term(kind: char, v: &ModVec, layer: usize) -> Option<String> {
        let support = v.support();
        if support.is_empty() {
            return None;
        }
        let wide = v.len() > 9;
        let items: Vec<String> = support
            .iter()
            .map(|&i| {
                let mut s = format!("{}{}", i + 1, "'".repeat(layer));
                if v.get(i) != 1 {
                    s.push_str(&format!("^{}", v.get(i)));
                }
                s
            })
            .collect();
        Some(format!("{kind}^{{{}}}", items.join(if wide { "," } else { "" })))
    }

    pub fn format(w: &ErrorWord) -> String {
        let mut out = String::new();
        if !w.phase.is_one() {
            out.push_str(&w.phase.to_string());
        }
        let mut any = false;
        for (k, p) in w.parts.iter().enumerate() {
            for t in [term('X', &p.x, k), term('Z', &p.z, k)].into_iter().flatten() {
                out.push_str(&t);
                any = true;
            }
        }
        if !any {
            out.push('I');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn composite(n: usize, n1: usize) -> MixedSystem {
        MixedSystem::composite(n, 2, 2, n1).unwrap()
    }

    fn cmul(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
        let d = a.len();
        let mut c = vec![vec![Complex64::new(0.0, 0.0); d]; d];
        for i in 0..d {
            for k in 0..d {
                if a[i][k].norm() == 0.0 {
                    continue;
                }
                for j in 0..d {
                    c[i][j] += a[i][k] * b[k][j];
                }
            }
        }
        c
    }

    fn close(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> bool {
        a.iter().flatten().zip(b.iter().flatten()).all(|(x, y)| (x - y).norm() < 1e-12)
    }

    #[test]
    fn system_layout() {
        let sys = MixedSystem::composite(5, 2, 2, 3).unwrap();
        assert_eq!(sys.dims(), vec![4, 4, 4, 2, 2]);
        assert_eq!(sys.total_dim(), 256);
        assert_eq!(sys.alphabet(), "4^3 2^2");
        let f = sys.factors();
        assert_eq!(f.len(), 8);
        assert_eq!((f[0].layer, f[1].layer, f[6].particle, f[7].particle), (0, 1, 3, 4));
        assert!(MixedSystem::composite(3, 2, 2, 4).is_err());
        assert!(MixedSystem::new(2, vec![Layer::new(2, vec![0])]).is_err());
        let json = serde_json::to_string(&sys).unwrap();
        let back: MixedSystem = serde_json::from_str(&json).unwrap();
        assert_eq!(back, sys);
    }

    #[test]
    fn weight_examples() {
        let sys = composite(6, 5);
        assert_eq!(ErrorWord::identity(&sys).weight(&sys), 0);
        let e = ErrorWord::from_xz(
            &sys,
            vec![
                (ModVec::parse(2, "100100").unwrap(), ModVec::zeros(2, 6)),
                (ModVec::zeros(2, 5), ModVec::parse(2, "00110").unwrap()),
            ],
        )
        .unwrap();
        assert_eq!(e.weight(&sys), 3);
        let sys = composite(6, 6);
        let e = ErrorWord::from_xz(
            &sys,
            vec![
                (ModVec::zeros(2, 6), ModVec::parse(2, "001101").unwrap()),
                (ModVec::parse(2, "101001").unwrap(), ModVec::zeros(2, 6)),
            ],
        )
        .unwrap();
        assert_eq!(e.weight(&sys), 4);
    }

    #[test]
    fn enumeration_counts() {
        let qubit = MixedSystem::uniform(1, 2).unwrap();
        let all: Vec<_> = enumerate_errors(&qubit, 1).collect();
        assert_eq!(all.len(), 3);
        assert_eq!(all[0].to_string(), "Z^{1}");
        assert_eq!(all[1].to_string(), "X^{1}");
        assert_eq!(all[2].to_string(), "X^{1}Z^{1}");

        let sys = composite(6, 6);
        assert_eq!(enumerate_errors(&sys, 1).count(), 90);
        assert_eq!(error_count(&sys, 2), 3465);

        let sys = MixedSystem::composite(5, 2, 2, 3).unwrap();
        // brute-force oracle: every assignment of local indices with support <= 2
        let dims = sys.dims();
        let mut brute = 0u64;
        for a in 0..dims.iter().map(|d| d * d).product::<u64>() {
            let mut rest = a;
            let mut w = 0;
            for d in &dims {
                if rest % (d * d) != 0 {
                    w += 1;
                }
                rest /= d * d;
            }
            if (1..=2).contains(&w) {
                brute += 1;
            }
        }
        assert_eq!(enumerate_errors(&sys, 2).count() as u64, brute);
        assert_eq!(error_count(&sys, 2), brute as u128);
    }

    #[test]
    fn enumeration_has_no_duplicates_and_is_weight_sorted() {
        let sys = MixedSystem::composite(3, 3, 2, 2).unwrap();
        let all: Vec<_> = enumerate_errors(&sys, 3).collect();
        let set: std::collections::HashSet<_> = all.iter().collect();
        assert_eq!(set.len(), all.len());
        assert_eq!(all.len() as u128, error_count(&sys, 3));
        assert!(all.windows(2).all(|w| w[0].weight(&sys) <= w[1].weight(&sys)));
        assert!(all.iter().all(|e| e.weight(&sys) > 0));
    }

    #[test]
    fn local_index_round_trip() {
        let sys = MixedSystem::composite(2, 3, 2, 1).unwrap();
        for idx in 0..36 {
            let w = ErrorWord::from_local(&sys, &[(0, idx)]);
            assert_eq!(w.local_index(&sys, 0), idx);
        }
    }

    #[test]
    fn qutrit_shift_matrix() {
        let sys = MixedSystem::uniform(1, 3).unwrap();
        let x = ErrorWord::parse(&sys, "X^{1}").unwrap();
        let m = x.matrix(&sys, DEFAULT_DIM_CAP).unwrap();
        assert_eq!(m.target, vec![1, 2, 0]);
        assert!(m.coeff.iter().all(|c| (c - Complex64::new(1.0, 0.0)).norm() < 1e-15));
        let id = ErrorWord::identity(&sys).matrix(&sys, DEFAULT_DIM_CAP).unwrap();
        assert_eq!(id.target, vec![0, 1, 2]);
    }

    #[test]
    fn zx_equals_matrix_product() {
        let sys = MixedSystem::uniform(1, 2).unwrap();
        let z = ErrorWord::parse(&sys, "Z^{1}").unwrap();
        let x = ErrorWord::parse(&sys, "X^{1}").unwrap();
        let zx = ErrorWord::parse(&sys, "Z^{1}X^{1}").unwrap();
        assert_eq!(zx.phase(), Phase::minus_one());
        let prod = cmul(
            &z.matrix(&sys, 16).unwrap().to_dense(),
            &x.matrix(&sys, 16).unwrap().to_dense(),
        );
        assert!(close(&prod, &zx.matrix(&sys, 16).unwrap().to_dense()));
    }

    #[test]
    fn compose_matches_matrix_product_exhaustively() {
        let systems = [
            MixedSystem::uniform(1, 6).unwrap(),
            MixedSystem::composite(1, 2, 3, 1).unwrap(),
            MixedSystem::composite(2, 2, 2, 1).unwrap(),
            MixedSystem::from_dims(&[3, 2]).unwrap(),
        ];
        for sys in &systems {
            let mut words: Vec<ErrorWord> = vec![ErrorWord::identity(sys)];
            words.extend(enumerate_errors(sys, sys.n()));
            let mats: Vec<_> = words
                .iter()
                .map(|w| w.matrix(sys, 64).unwrap().to_dense())
                .collect();
            for (a, ma) in words.iter().zip(&mats) {
                for (b, mb) in words.iter().zip(&mats) {
                    let ab = a.compose(b).matrix(sys, 64).unwrap().to_dense();
                    assert!(close(&cmul(ma, mb), &ab), "{a} * {b}");
                }
            }
        }
    }

    #[test]
    fn matrices_are_unitary() {
        let sys = MixedSystem::from_dims(&[3, 2, 4]).unwrap();
        for w in enumerate_errors(&sys, 2).step_by(7) {
            let m = w.matrix(&sys, 64).unwrap();
            let mut seen = vec![false; m.dim()];
            for (&t, c) in m.target.iter().zip(&m.coeff) {
                assert!(!seen[t]);
                seen[t] = true;
                assert!((c.norm() - 1.0).abs() < 1e-12);
            }
        }
        let big = MixedSystem::uniform(17, 2).unwrap();
        assert!(matches!(
            ErrorWord::identity(&big).matrix(&big, DEFAULT_DIM_CAP),
            Err(Error::DimensionCap { .. })
        ));
    }

    #[test]
    fn inverse_and_order() {
        let sys = MixedSystem::composite(2, 3, 2, 1).unwrap();
        for w in enumerate_errors(&sys, 2).step_by(5) {
            assert!(w.compose(&w.inverse()).is_identity());
            let k = w.operator_order();
            assert!(w.pow(k).is_scalar());
        }
    }

    #[test]
    fn commutator_phase_matches_products() {
        let sys = MixedSystem::composite(2, 2, 3, 2).unwrap();
        let words: Vec<_> = enumerate_errors(&sys, 2).step_by(11).collect();
        for a in &words {
            for b in &words {
                let ab = a.compose(b);
                let ba = b.compose(a);
                assert!(ab.same_operator(&ba));
                assert_eq!(ab.phase(), a.commutator_phase(b) * ba.phase());
            }
        }
    }

    #[test]
    fn notation_round_trip_and_published_forms() {
        let sys = composite(6, 6);
        let w = ErrorWord::parse(&sys, "Z^{14}Z^{3'4'6'}").unwrap();
        assert_eq!(w.part(0).z.to_digits(), "100100");
        assert_eq!(w.part(1).z.to_digits(), "001101");
        assert_eq!(w.to_string(), "Z^{14}Z^{3'4'6'}");
        let row = ErrorWord::parse(&sys, "XZZXZZ⊗XZIIIZ").unwrap();
        assert_eq!(row.part(0).x.to_digits(), "100100");
        assert_eq!(row.part(0).z.to_digits(), "011011");
        assert_eq!(row.to_letters().unwrap(), "XZZXZZ⊗XZIIIZ");
        let y = ErrorWord::parse(&sys, "IZXZII⊗YYZIIZ").unwrap();
        assert_eq!(y.phase(), Phase::minus_one());
        assert_eq!(y.to_letters().unwrap(), "IZXZII⊗YYZIIZ");
        for text in ["-i X^{1}Z^{2'}", "w[1/3]X^{2}", "I"] {
            let sys3 = MixedSystem::composite(3, 3, 2, 2).unwrap();
            let w = ErrorWord::parse(&sys3, text).unwrap();
            assert_eq!(ErrorWord::parse(&sys3, &w.to_string()).unwrap(), w);
        }
        let q = MixedSystem::uniform(5, 3).unwrap();
        let w = ErrorWord::parse(&q, "X^{5}Z^{5^2}").unwrap();
        assert_eq!(w.part(0).z.get(4), 2);
        assert_eq!(w.to_string(), "X^{5}Z^{5^2}");
        let p15 = MixedSystem::composite(5, 2, 2, 3).unwrap();
        let r = ErrorWord::parse(&p15, "Z^1Z^2X^3X^4Z^5⊗I^{1'}I^{2'}I^{3'}").unwrap();
        assert_eq!(r.to_letters().unwrap(), "ZZXXZ⊗III");
        assert!(ErrorWord::parse(&p15, "Z^{4'}").is_err());
        assert!(ErrorWord::parse(&p15, "Q^{1}").is_err());
        assert!(ErrorWord::parse(&p15, "XZ⊗III").is_err());
    }
}
