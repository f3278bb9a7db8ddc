//! Tensor products of codes and distance-2 stabilizer pasting.

use std::collections::HashSet;

use itertools::Itertools;
use num_complex::Complex64;

use crate::algebra::ModVec;
use crate::clique::{closure, CodingClique};
use crate::error::{Error, Result};
use crate::errors::{enumerate_errors, ErrorWord, Layer, LayerOp, MixedSystem};
use crate::graphstate::{Label, StateVector};
use crate::verifier::{stabilizer_group, Basis, Code, GROUP_LIMIT};

/// `A ⊗ B` with particle `i` owning `A`'s factors followed by `B`'s.
/// Two clique codes yield a clique code over the stacked layers.
pub fn product_code(a: &Code, b: &Code, cap: u128) -> Result<Code> {
    if a.n() != b.n() {
        return Err(Error::LengthMismatch(a.n(), b.n()));
    }
    if a.distance() != b.distance() {
        return Err(Error::Precondition(format!(
            "claimed distances differ: {} vs {}",
            a.distance(),
            b.distance()
        )));
    }
    if let (Basis::Clique(ca), Basis::Clique(cb)) = (a.basis(), b.basis()) {
        let graphs = ca.graphs().stack(cb.graphs())?;
        let vectors = ca
            .vectors()
            .iter()
            .cartesian_product(cb.vectors())
            .map(|(x, y)| Label(x.0.iter().chain(&y.0).cloned().collect()))
            .collect();
        let mut clique = CodingClique::new(graphs, a.distance(), vectors)?;
        if let (Some(ga), Some(gb)) = (ca.generators(), cb.generators()) {
            let za = Label::zero(ca.graphs().system());
            let zb = Label::zero(cb.graphs().system());
            let gens: Vec<Label> = ga
                .iter()
                .map(|g| Label(g.0.iter().chain(&zb.0).cloned().collect()))
                .chain(gb.iter().map(|g| Label(za.0.iter().chain(&g.0).cloned().collect())))
                .collect();
            clique = CodingClique::from_generators(clique.graphs().clone(), a.distance(), gens)?;
        }
        return Ok(Code::from_clique(clique));
    }
    let mut layers = a.system().layers().to_vec();
    layers.extend(b.system().layers().iter().cloned());
    let sys = MixedSystem::new(a.n(), layers)?;
    let dim = sys.check_dim(cap)?;
    let da: Vec<usize> = a.system().dims().iter().map(|&d| d as usize).collect();
    let db: Vec<usize> = b.system().dims().iter().map(|&d| d as usize).collect();
    // product index → (index in A, index in B)
    let mut split = Vec::with_capacity(dim);
    let mut digits = vec![0usize; a.n()];
    for _ in 0..dim {
        let (mut ia, mut ib) = (0, 0);
        for (p, &x) in digits.iter().enumerate() {
            ia = ia * da[p] + x / db[p];
            ib = ib * db[p] + x % db[p];
        }
        split.push((ia, ib));
        for p in (0..digits.len()).rev() {
            digits[p] += 1;
            if digits[p] < da[p] * db[p] {
                break;
            }
            digits[p] = 0;
        }
    }
    let factor_dims: Vec<usize> = sys.factors().iter().map(|f| f.modulus as usize).collect();
    let sa = a.states(cap)?;
    let sb = b.states(cap)?;
    let mut states = Vec::with_capacity(sa.len() * sb.len());
    for x in &sa {
        for y in &sb {
            let amps: Vec<Complex64> = split
                .iter()
                .map(|&(i, j)| x.amplitudes()[i] * y.amplitudes()[j])
                .collect();
            states.push(StateVector::new(factor_dims.clone(), amps)?);
        }
    }
    Code::from_states(sys, states, a.distance())
}

/// Generators `g^s` of the stabilizer of a group clique code: `s` runs
/// over a lexicographically greedy basis of the clique's annihilator.
pub fn clique_stabilizer_rows(clique: &CodingClique, cap: u128) -> Result<Vec<ErrorWord>> {
    let graphs = clique.graphs();
    let set: HashSet<&Label> = clique.vectors().iter().collect();
    let closed = closure(graphs, clique.vectors());
    if closed.len() != set.len() {
        return Err(Error::Precondition("clique is not an additive group".into()));
    }
    let order = graphs.system().phase_order();
    let mut span: HashSet<Label> = HashSet::from([Label::zero(graphs.system())]);
    let mut gens = Vec::new();
    for s in graphs.all_labels(cap)? {
        if span.contains(&s) || clique.vectors().iter().any(|c| s.pairing(c, order) != 0) {
            continue;
        }
        gens.push(s);
        span = closure(graphs, &gens).into_iter().collect();
    }
    Ok(gens.iter().map(|s| graphs.stabilizer_word(s)).collect())
}

/// First error of weight `< d` that commutes with every row without being
/// a stabilizer up to phase.
pub fn stabilizer_undetected(sys: &MixedSystem, rows: &[ErrorWord], d: usize) -> Result<Option<ErrorWord>> {
    let group = stabilizer_group(sys, rows, GROUP_LIMIT)?;
    let ops: HashSet<ErrorWord> = group.iter().map(|g| g.clone().with_phase(Default::default())).collect();
    Ok(enumerate_errors(sys, d.saturating_sub(1))
        .find(|e| rows.iter().all(|r| e.commutes_with(r)) && !ops.contains(e)))
}

#[derive(Clone, Debug)]
pub struct Pasted {
    pub system: MixedSystem,
    pub rows: Vec<ErrorWord>,
    /// Per block layer, the base rows receiving `X_a Z_b` and `Z_a X_b`.
    pub targets: Vec<(usize, usize)>,
    /// Code dimension predicted from the base.
    pub k: u128,
}

/// Layers each block factor lands on: base layers whose modulus divides the
/// remaining block dimension, in order, then a fresh layer for any rest.
fn block_layers(base: &MixedSystem, q: u32) -> Vec<(Option<usize>, u32)> {
    let mut rest = q;
    let mut out = Vec::new();
    for (k, l) in base.layers().iter().enumerate() {
        if rest > 1 && rest.is_multiple_of(l.modulus()) {
            out.push((Some(k), l.modulus()));
            rest /= l.modulus();
        }
    }
    if rest > 1 {
        out.push((None, rest));
    }
    out
}

/// Pastes trivial `((2,1,2))_q` blocks onto a distance-2 stabilizer code.
///
/// Every block layer contributes the pair `X_a Z_b`, `Z_a X_b`, multiplied
/// into two distinct base rows. Without explicit `attach` targets the first
/// assignment (lexicographic over row pairs, rows acting on the same layer
/// first) that keeps distance 2 is used; all blocks share it.
pub fn paste_distance2(
    base_sys: &MixedSystem,
    base_rows: &[ErrorWord],
    base_k: u128,
    block_dims: &[u32],
    attach: Option<&[(usize, usize)]>,
) -> Result<Pasted> {
    if block_dims.is_empty() {
        return Err(Error::Precondition("at least one block is required".into()));
    }
    if base_rows.len() < 2 {
        return Err(Error::Precondition("base needs at least two rows".into()));
    }
    if let Some(e) = stabilizer_undetected(base_sys, base_rows, 2)? {
        return Err(Error::Precondition(format!("base rows do not detect {e}")));
    }
    let shape = block_layers(base_sys, block_dims[0]);
    if block_dims.iter().any(|&q| block_layers(base_sys, q) != shape) {
        return Err(Error::Precondition("blocks must share one dimension".into()));
    }

    // extended system: block particles appended, layers extended or added
    let n0 = base_sys.n();
    let n = n0 + 2 * block_dims.len();
    let mut layers: Vec<Layer> = base_sys.layers().to_vec();
    let mut block_layer_ids = Vec::new();
    for &(k, m) in &shape {
        let id = match k {
            Some(k) => k,
            None => {
                layers.push(Layer::new(m, Vec::new()));
                layers.len() - 1
            }
        };
        block_layer_ids.push(id);
    }
    let mut pairs: Vec<Vec<(usize, usize)>> = vec![Vec::new(); block_layer_ids.len()];
    for b in 0..block_dims.len() {
        for (ell, &id) in block_layer_ids.iter().enumerate() {
            let sites = layers[id].sites().to_vec();
            let (u, v) = (sites.len(), sites.len() + 1);
            let mut new_sites = sites;
            new_sites.extend([n0 + 2 * b, n0 + 2 * b + 1]);
            layers[id] = Layer::new(layers[id].modulus(), new_sites);
            pairs[ell].push((u, v));
        }
    }
    let sys = MixedSystem::new(n, layers)?;
    let pad = |w: &ErrorWord| -> ErrorWord {
        let parts = sys
            .layers()
            .iter()
            .enumerate()
            .map(|(k, l)| {
                let mut op = LayerOp::identity(l.modulus(), l.len());
                if let Some(p) = w.parts().get(k) {
                    for i in 0..p.x.len() {
                        op.x.set(i, p.x.get(i) as i64);
                        op.z.set(i, p.z.get(i) as i64);
                    }
                }
                op
            })
            .collect();
        ErrorWord::new(&sys, parts, w.phase()).expect("padded word fits")
    };
    let padded: Vec<ErrorWord> = base_rows.iter().map(pad).collect();
    let block_word = |ell: usize, flip: bool| -> ErrorWord {
        let id = block_layer_ids[ell];
        let l = sys.layer(id);
        let mut op = LayerOp::identity(l.modulus(), l.len());
        for &(u, v) in &pairs[ell] {
            let (xu, zv) = if flip { (v, u) } else { (u, v) };
            op.x.set(xu, 1);
            op.z.set(zv, 1);
        }
        let parts = sys
            .layers()
            .iter()
            .enumerate()
            .map(|(k, l)| if k == id { op.clone() } else { LayerOp::identity(l.modulus(), l.len()) })
            .collect();
        ErrorWord::new(&sys, parts, Default::default()).expect("block word fits")
    };
    let xz: Vec<(ErrorWord, ErrorWord)> = (0..shape.len()).map(|l| (block_word(l, false), block_word(l, true))).collect();
    let build = |targets: &[(usize, usize)]| -> Vec<ErrorWord> {
        let mut rows = padded.clone();
        for (ell, &(a, b)) in targets.iter().enumerate() {
            rows[a] = rows[a].compose(&xz[ell].0);
            rows[b] = rows[b].compose(&xz[ell].1);
        }
        rows
    };
    let k = base_k * block_dims.iter().map(|&q| (q as u128).pow(2)).product::<u128>();

    let targets: Vec<(usize, usize)> = match attach {
        Some(t) => {
            if t.len() != shape.len() || t.iter().any(|&(a, b)| a == b || a >= base_rows.len() || b >= base_rows.len()) {
                return Err(Error::Precondition("attach targets must name two distinct base rows per block layer".into()));
            }
            t.to_vec()
        }
        None => {
            let r = base_rows.len();
            let per_layer: Vec<Vec<(usize, usize)>> = block_layer_ids
                .iter()
                .map(|&id| {
                    let acts = |i: usize| base_rows[i].parts().get(id).is_some_and(|p| !p.x.is_zero() || !p.z.is_zero());
                    let mut ps: Vec<(usize, usize)> = (0..r).cartesian_product(0..r).filter(|(a, b)| a != b).collect();
                    ps.sort_by_key(|&(a, b)| (!(acts(a) && acts(b)), a, b));
                    ps
                })
                .collect();
            let mut found = None;
            for choice in per_layer.iter().map(|v| v.iter().copied()).multi_cartesian_product() {
                if stabilizer_undetected(&sys, &build(&choice), 2)?.is_none() {
                    found = Some(choice);
                    break;
                }
            }
            found.ok_or_else(|| Error::Precondition("no attachment keeps distance 2".into()))?
        }
    };
    let rows = build(&targets);
    if let Some(e) = stabilizer_undetected(&sys, &rows, 2)? {
        return Err(Error::Precondition(format!("pasted rows do not detect {e}")));
    }
    Ok(Pasted {
        system: sys,
        rows,
        targets,
        k,
    })
}

/// Extends a label by zeros on appended layer vertices.
pub fn pad_vec(v: &ModVec, len: usize) -> ModVec {
    let mut out = ModVec::zeros(v.modulus(), len);
    for i in 0..v.len() {
        out.set(i, v.get(i) as i64);
    }
    out
}
