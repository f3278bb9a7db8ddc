//! Code certificates: a serializable construction plus its verification.
//!
//! The content hash is the SHA-256 of the canonical JSON (sorted keys, no
//! whitespace) with `verification` and `toolkit` removed, so re-running the
//! verifiers never changes a certificate's identity.

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use mixedqec::bounds::{bound_report, Classification};
use mixedqec::clique::{check_clique, CodingClique};
use mixedqec::compose::{clique_stabilizer_rows, paste_distance2, product_code, stabilizer_undetected};
use mixedqec::projection::{project_code, required_detectable_set, ProjectorSpec};
use mixedqec::verifier::{
    code_distance, code_distance_symbolic, eigenspace_dim, kl_verify_numeric, kl_verify_numeric_words,
    kl_verify_symbolic, kl_verify_symbolic_words, stabilizer_code_basis, stabilizer_group, verify_stabilizer,
    GROUP_LIMIT,
};
use mixedqec::{Code, CompositeGraph, Error, ErrorWord, Label, MixedSystem, Result, WeightedGraph};

pub const SCHEMA: &str = "mixedqec-cert/1";
pub const TOOLKIT: &str = concat!("mixedqec ", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Certificate {
    pub schema: String,
    pub name: String,
    pub system: MixedSystem,
    /// Two-layer view: a mod-`p` layer on every particle and a mod-`r` layer
    /// on the first `n1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<Decomposition>,
    pub claimed: Claimed,
    pub construction: Construction,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verification: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub toolkit: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Decomposition {
    pub p: u32,
    pub r: u32,
    pub n1: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Claimed {
    pub k: u64,
    pub d: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pairing {
    /// Vertex `v` of graph `k` sits on the `v`-th site of layer `k`.
    Identity,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Construction {
    CompositeClique {
        graphs: Vec<WeightedGraph>,
        pairing: Pairing,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        generators: Option<Vec<Vec<String>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        vectors: Option<Vec<Vec<String>>>,
    },
    Stabilizer {
        rows: Vec<String>,
        /// Code whose space the rows must stabilize exactly.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        compare: Option<CertRef>,
    },
    Projection {
        ancilla: CertRef,
        projector: ProjectorSpec,
    },
    Product {
        inputs: Vec<CertRef>,
    },
    Pasting {
        base: CertRef,
        blocks: Vec<u32>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        attach: Option<Vec<[usize; 2]>>,
        rows: Vec<String>,
    },
}

/// An input certificate, embedded and pinned by content hash.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertRef {
    pub hash: String,
    pub certificate: Box<Certificate>,
}

impl CertRef {
    pub fn new(cert: &Certificate) -> Result<Self> {
        let mut c = cert.clone();
        c.verification = None;
        c.toolkit = None;
        Ok(CertRef {
            hash: cert.content_hash()?,
            certificate: Box::new(c),
        })
    }

    pub fn resolve(&self) -> Result<&Certificate> {
        let h = self.certificate.content_hash()?;
        if h != self.hash {
            return Err(Error::Certificate(format!(
                "reference to {:?} pins hash {} but content hashes to {h}",
                self.certificate.name, self.hash
            )));
        }
        Ok(&self.certificate)
    }
}

/// Sorted-key JSON text.
pub fn canonical_json(v: &Value) -> String {
    // serde_json's default map is ordered by key
    serde_json::to_string(v).expect("values always serialize")
}

pub fn render_row(w: &ErrorWord) -> String {
    w.to_letters().unwrap_or_else(|| w.to_string())
}

fn labels_to_strings(ls: &[Label]) -> Vec<Vec<String>> {
    ls.iter().map(Label::digits).collect()
}

fn parse_labels(sys: &MixedSystem, raw: &[Vec<String>]) -> Result<Vec<Label>> {
    raw.iter().map(|l| Label::parse(sys, l)).collect()
}

fn parse_rows(sys: &MixedSystem, rows: &[String]) -> Result<Vec<ErrorWord>> {
    rows.iter().map(|r| ErrorWord::parse(sys, r)).collect()
}

pub fn decomposition_of(sys: &MixedSystem) -> Option<Decomposition> {
    match sys.layers() {
        [p, r] if p.sites() == (0..sys.n()).collect::<Vec<_>>().as_slice()
            && r.sites() == (0..r.len()).collect::<Vec<_>>().as_slice() =>
        {
            Some(Decomposition {
                p: p.modulus(),
                r: r.modulus(),
                n1: r.len(),
            })
        }
        [p] if p.len() == sys.n() => Some(Decomposition {
            p: p.modulus(),
            r: 1,
            n1: 0,
        }),
        _ => None,
    }
}

impl Certificate {
    pub fn new(name: &str, system: MixedSystem, k: u64, d: usize, construction: Construction) -> Self {
        Certificate {
            schema: SCHEMA.into(),
            name: name.into(),
            decomposition: decomposition_of(&system),
            system,
            claimed: Claimed { k, d },
            construction,
            verification: None,
            toolkit: Some(TOOLKIT.into()),
        }
    }

    pub fn from_clique(name: &str, clique: &CodingClique) -> Self {
        let cg = clique.graphs();
        let (generators, vectors) = match clique.generators() {
            Some(g) => (Some(labels_to_strings(g)), None),
            None => (None, Some(labels_to_strings(clique.vectors()))),
        };
        Certificate::new(
            name,
            cg.system().clone(),
            clique.len() as u64,
            clique.distance(),
            Construction::CompositeClique {
                graphs: cg.graphs().to_vec(),
                pairing: Pairing::Identity,
                generators,
                vectors,
            },
        )
    }

    pub fn parse(text: &str) -> Result<Self> {
        let c: Certificate = serde_json::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("certificates always serialize")
    }

    /// Pretty, key-sorted JSON with a trailing newline.
    pub fn to_pretty(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_value()).expect("values always serialize");
        s.push('\n');
        s
    }

    pub fn content_hash(&self) -> Result<String> {
        let mut v = self.to_value();
        if let Value::Object(m) = &mut v {
            m.remove("verification");
            m.remove("toolkit");
        }
        Ok(hex::encode(Sha256::digest(canonical_json(&v).as_bytes())))
    }

    /// Structural checks that need no verification run.
    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA {
            return Err(Error::Certificate(format!("unsupported schema {:?}", self.schema)));
        }
        if let Some(dec) = self.decomposition {
            if decomposition_of(&self.system) != Some(dec) {
                return Err(Error::Certificate("decomposition disagrees with the layers".into()));
            }
        }
        if self.claimed.d == 0 {
            return Err(Error::Certificate("claimed distance must be at least 1".into()));
        }
        match &self.construction {
            Construction::CompositeClique {
                generators, vectors, ..
            } => {
                if generators.is_some() == vectors.is_some() {
                    return Err(Error::Certificate("give exactly one of generators or vectors".into()));
                }
                self.clique()?;
            }
            Construction::Stabilizer { rows, compare } => {
                parse_rows(&self.system, rows)?;
                if let Some(c) = compare {
                    c.resolve()?.validate()?;
                }
            }
            Construction::Projection { ancilla, projector } => {
                let a = ancilla.resolve()?;
                a.validate()?;
                if projector.target_system(&a.system)? != self.system {
                    return Err(Error::Certificate("system is not the projected ancilla system".into()));
                }
            }
            Construction::Product { inputs } => {
                if inputs.len() != 2 {
                    return Err(Error::Certificate("product takes exactly two inputs".into()));
                }
                for i in inputs {
                    i.resolve()?.validate()?;
                }
            }
            Construction::Pasting { base, rows, .. } => {
                base.resolve()?.validate()?;
                parse_rows(&self.system, rows)?;
            }
        }
        Ok(())
    }

    pub fn clique(&self) -> Result<CodingClique> {
        let Construction::CompositeClique {
            graphs,
            generators,
            vectors,
            ..
        } = &self.construction
        else {
            return Err(Error::Certificate("not a clique certificate".into()));
        };
        let cg = CompositeGraph::new(self.system.clone(), graphs.clone())?;
        let d = self.claimed.d;
        match (generators, vectors) {
            (Some(g), None) => {
                let g = parse_labels(cg.system(), g)?;
                CodingClique::from_generators(cg, d, g)
            }
            (None, Some(v)) => {
                let v = parse_labels(cg.system(), v)?;
                CodingClique::new(cg, d, v)
            }
            _ => Err(Error::Certificate("give exactly one of generators or vectors".into())),
        }
    }

    /// The code this certificate describes. Stabilizer-type codes are
    /// materialized numerically and respect `cap`.
    pub fn code(&self, cap: u128) -> Result<Code> {
        let d = self.claimed.d;
        match &self.construction {
            Construction::CompositeClique { .. } => Ok(Code::from_clique(self.clique()?)),
            Construction::Stabilizer { .. } | Construction::Pasting { .. } => {
                let rows = self.stabilizer_rows(cap)?;
                let states = stabilizer_code_basis(&self.system, &rows, mixedqec::verifier::DEFAULT_TOL, cap)?;
                Code::from_states(self.system.clone(), states, d)
            }
            Construction::Projection { ancilla, projector } => {
                let a = ancilla.resolve()?.code(cap)?;
                Ok(project_code(&a, projector, cap)?.with_distance(d))
            }
            Construction::Product { inputs } => {
                let a = inputs[0].resolve()?.code(cap)?;
                let b = inputs[1].resolve()?.code(cap)?;
                product_code(&a, &b, cap)
            }
        }
    }

    /// Stabilizer rows, when the construction has them.
    pub fn stabilizer_rows(&self, cap: u128) -> Result<Vec<ErrorWord>> {
        match &self.construction {
            Construction::CompositeClique { .. } => clique_stabilizer_rows(&self.clique()?, cap),
            Construction::Stabilizer { rows, .. } | Construction::Pasting { rows, .. } => {
                parse_rows(&self.system, rows)
            }
            _ => Err(Error::Certificate("construction has no stabilizer rows".into())),
        }
    }
}

/// Builds the pasting certificate for `base` and `blocks`.
pub fn pasting_certificate(
    name: &str,
    base: &Certificate,
    blocks: &[u32],
    attach: Option<&[(usize, usize)]>,
    cap: u128,
) -> Result<Certificate> {
    let rows = base.stabilizer_rows(cap)?;
    let p = paste_distance2(&base.system, &rows, base.claimed.k as u128, blocks, attach)?;
    let k = u64::try_from(p.k).map_err(|_| Error::Precondition("code dimension overflows u64".into()))?;
    Ok(Certificate::new(
        name,
        p.system.clone(),
        k,
        2,
        Construction::Pasting {
            base: CertRef::new(base)?,
            blocks: blocks.to_vec(),
            attach: attach.map(|t| t.iter().map(|&(a, b)| [a, b]).collect()),
            rows: p.rows.iter().map(render_row).collect(),
        },
    ))
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    pub symbolic: bool,
    pub numeric: bool,
    pub tol: f64,
    pub cap: u128,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            symbolic: true,
            numeric: true,
            tol: mixedqec::verifier::DEFAULT_TOL,
            cap: mixedqec::errors::DEFAULT_DIM_CAP,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub verified: bool,
    pub report: Value,
}

#[derive(Default)]
struct Checks {
    map: Map<String, Value>,
    failed: Vec<String>,
    skipped: Vec<String>,
    notes: Vec<String>,
}

impl Checks {
    fn add(&mut self, name: &str, pass: bool, detail: Value) {
        let mut v = match detail {
            Value::Object(m) => m,
            other => {
                let mut m = Map::new();
                m.insert("value".into(), other);
                m
            }
        };
        v.insert("pass".into(), Value::Bool(pass));
        self.map.insert(name.into(), Value::Object(v));
        if !pass {
            self.failed.push(name.into());
        }
    }

    fn skip(&mut self, what: &str, why: String) {
        self.skipped.push(format!("{what}: {why}"));
    }
}

fn to_json<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("reports always serialize")
}

fn fits(sys: &MixedSystem, cap: u128) -> std::result::Result<(), String> {
    sys.check_dim(cap).map(|_| ()).map_err(|e| e.to_string())
}

/// Runs the verifiers for the certificate's construction.
///
/// `Err` is reserved for malformed input; a code that fails a check is an
/// `Ok` outcome with `verified == false`.
pub fn verify(cert: &Certificate, opts: &VerifyOptions) -> Result<Outcome> {
    cert.validate()?;
    let d = cert.claimed.d;
    let mut ch = Checks::default();
    let mut k_found: Option<u128> = None;

    match &cert.construction {
        Construction::CompositeClique { .. } => {
            let clique = cert.clique()?;
            k_found = Some(clique.len() as u128);
            let rep = check_clique(&clique)?;
            ch.add("clique", rep.passes(), to_json(&rep));
            if opts.symbolic {
                let rep = kl_verify_symbolic(&clique, d);
                ch.add("symbolic", rep.passed(), to_json(&rep));
                let dist = code_distance_symbolic(&clique, d);
                ch.add("distance", dist >= d, distance_json(dist, d, "symbolic"));
            }
            numeric_kl(&mut ch, opts, &Code::from_clique(clique), d, false)?;
        }
        Construction::Stabilizer { rows, compare } => {
            let rows = parse_rows(&cert.system, rows)?;
            symbolic_stabilizer(&mut ch, opts, &cert.system, &rows, d, compare.is_none(), &mut k_found)?;
            match compare {
                Some(c) => {
                    let other = c.resolve()?;
                    match fits(&other.system, opts.cap) {
                        Err(why) => ch.skip("stabilizer", why),
                        Ok(()) if !opts.numeric => ch.skip("stabilizer", "numeric checks disabled".into()),
                        Ok(()) => {
                            let code = other.code(opts.cap)?;
                            let rep = verify_stabilizer(&rows, &code, opts.tol, opts.cap)?;
                            if rep.passed() {
                                k_found = Some(code.k() as u128);
                            }
                            ch.add("stabilizer", rep.passed(), to_json(&rep));
                        }
                    }
                }
                None => {
                    if opts.numeric && fits(&cert.system, opts.cap).is_ok() {
                        let code = cert.code(opts.cap)?;
                        numeric_kl(&mut ch, opts, &code, d, true)?;
                    } else {
                        ch.skip("numeric", skip_reason(opts, &cert.system));
                    }
                }
            }
        }
        Construction::Projection { ancilla, projector } => {
            let a = ancilla.resolve()?;
            let required = required_detectable_set(projector, &a.system, d)?;
            match a.clique() {
                Ok(c) => {
                    let rep = kl_verify_symbolic_words(&c, &required);
                    ch.add("required_set", rep.passed(), json!({"words": required.len(), "report": to_json(&rep)}));
                }
                Err(_) if opts.numeric && fits(&a.system, opts.cap).is_ok() => {
                    let rep = kl_verify_numeric_words(&a.code(opts.cap)?, &required, opts.tol, opts.cap)?;
                    ch.add("required_set", rep.passed(), json!({"words": required.len(), "report": to_json(&rep)}));
                }
                Err(_) => ch.skip("required_set", skip_reason(opts, &a.system)),
            }
            if opts.numeric && fits(&a.system, opts.cap).is_ok() {
                match cert.code(opts.cap) {
                    Ok(code) => {
                        k_found = Some(code.k() as u128);
                        numeric_kl(&mut ch, opts, &code, d, true)?;
                    }
                    Err(e @ Error::Precondition(_)) => ch.add("projection", false, json!({"error": e.to_string()})),
                    Err(e) => return Err(e),
                }
            } else {
                ch.skip("numeric", skip_reason(opts, &a.system));
            }
        }
        Construction::Product { inputs } => {
            let a = inputs[0].resolve()?;
            let b = inputs[1].resolve()?;
            let both_cliques = a.clique().is_ok() && b.clique().is_ok();
            if both_cliques || (opts.numeric && fits(&cert.system, opts.cap).is_ok()) {
                let code = cert.code(opts.cap)?;
                k_found = Some(code.k() as u128);
                if let (Some(c), true) = (code.clique(), opts.symbolic) {
                    let rep = kl_verify_symbolic(c, d);
                    ch.add("symbolic", rep.passed(), to_json(&rep));
                    let dist = code_distance_symbolic(c, d);
                    ch.add("distance", dist >= d, distance_json(dist, d, "symbolic"));
                }
                numeric_kl(&mut ch, opts, &code, d, code.clique().is_none())?;
            } else {
                k_found = Some(a.claimed.k as u128 * b.claimed.k as u128);
                ch.skip("numeric", skip_reason(opts, &cert.system));
            }
        }
        Construction::Pasting {
            base,
            blocks,
            attach,
            rows,
        } => {
            let b = base.resolve()?;
            let attach: Option<Vec<(usize, usize)>> = attach.as_ref().map(|t| t.iter().map(|&[a, b]| (a, b)).collect());
            let rebuilt = pasting_certificate(&cert.name, b, blocks, attach.as_deref(), opts.cap)?;
            let Construction::Pasting { rows: expect, .. } = &rebuilt.construction else {
                unreachable!("pasting_certificate builds a pasting construction")
            };
            let same = expect == rows && rebuilt.system == cert.system;
            ch.add("rows", same, json!({"expected": expect}));
            let rows = parse_rows(&cert.system, rows)?;
            symbolic_stabilizer(&mut ch, opts, &cert.system, &rows, d, true, &mut k_found)?;
            if opts.numeric && fits(&cert.system, opts.cap).is_ok() {
                numeric_kl(&mut ch, opts, &cert.code(opts.cap)?, d, true)?;
            } else {
                ch.skip("numeric", skip_reason(opts, &cert.system));
                ch.notes.push("symbolically constructed, numerically verified up to n=1".into());
            }
        }
    }

    let dims = cert.system.dims();
    match k_found {
        Some(k) => {
            ch.add("dimension", k == cert.claimed.k as u128, json!({"claimed": cert.claimed.k, "found": k as u64}));
            let b = bound_report(&dims, d, Some(k))?;
            ch.add("bounds", b.verdict != Some(Classification::Violates), to_json(&b));
        }
        None => ch.skip("dimension", "no check determined K".into()),
    }
    let ran_kl = ["symbolic", "numeric", "stabilizer"].iter().any(|k| ch.map.contains_key(*k));
    if !ran_kl {
        ch.failed.push("no code-space check ran".into());
    }
    let verified = ch.failed.is_empty();
    let mut report = json!({
        "name": cert.name,
        "hash": cert.content_hash()?,
        "claimed": cert.claimed,
        "verified": verified,
        "tolerance": format!("{:e}", opts.tol),
        "checks": Value::Object(ch.map),
    });
    if !ch.failed.is_empty() {
        report["failed"] = json!(ch.failed);
    }
    if !ch.skipped.is_empty() {
        report["skipped"] = json!(ch.skipped);
    }
    if !ch.notes.is_empty() {
        report["notes"] = json!(ch.notes);
    }
    Ok(Outcome { verified, report })
}

fn skip_reason(opts: &VerifyOptions, sys: &MixedSystem) -> String {
    if !opts.numeric {
        "numeric checks disabled".into()
    } else {
        fits(sys, opts.cap).err().unwrap_or_default()
    }
}

fn distance_json(dist: usize, w_cap: usize, method: &str) -> Value {
    if dist > w_cap {
        json!({"method": method, "at_least": dist})
    } else {
        json!({"method": method, "exact": dist})
    }
}

fn numeric_kl(ch: &mut Checks, opts: &VerifyOptions, code: &Code, d: usize, with_distance: bool) -> Result<()> {
    if !opts.numeric {
        ch.skip("numeric", "numeric checks disabled".into());
        return Ok(());
    }
    if let Err(why) = fits(code.system(), opts.cap) {
        ch.skip("numeric", why);
        return Ok(());
    }
    let rep = kl_verify_numeric(code, d, opts.tol, opts.cap)?;
    ch.add("numeric", rep.passed(), to_json(&rep));
    if with_distance {
        let dist = code_distance(code, d, opts.tol, opts.cap)?;
        ch.add("distance", dist >= d, distance_json(dist, d, "numeric"));
    }
    Ok(())
}

fn symbolic_stabilizer(
    ch: &mut Checks,
    opts: &VerifyOptions,
    sys: &MixedSystem,
    rows: &[ErrorWord],
    d: usize,
    count_k: bool,
    k_found: &mut Option<u128>,
) -> Result<()> {
    let commuting = rows
        .iter()
        .enumerate()
        .all(|(i, a)| rows[i + 1..].iter().all(|b| a.commutes_with(b)));
    if !opts.symbolic {
        return Ok(());
    }
    if !commuting {
        ch.add("symbolic", false, json!({"commuting": false}));
        return Ok(());
    }
    let undetected = stabilizer_undetected(sys, rows, d)?;
    let mut detail = json!({"commuting": true, "checked_weight_below": d});
    if let Some(e) = &undetected {
        detail["undetected"] = json!(e.to_string());
    }
    if count_k {
        let group = stabilizer_group(sys, rows, GROUP_LIMIT)?;
        let dim = eigenspace_dim(sys, &group);
        detail["eigenspace_dim"] = json!(dim as u64);
        *k_found = Some(dim);
    }
    ch.add("symbolic", undetected.is_none(), detail);
    Ok(())
}

/// Verifies and attaches the verification block.
pub fn verify_and_record(cert: &mut Certificate, opts: &VerifyOptions) -> Result<Outcome> {
    let out = verify(cert, opts)?;
    cert.verification = Some(out.report.clone());
    cert.toolkit = Some(TOOLKIT.into());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use mixedqec::graphs::WeightedGraph;

    fn l3() -> Certificate {
        let g = WeightedGraph::loop_graph(3, 2, 1).unwrap();
        let cg = CompositeGraph::paired(vec![g.clone(), g]).unwrap();
        let gens = vec![
            Label::parse(cg.system(), &["100", "010"]).unwrap(),
            Label::parse(cg.system(), &["010", "001"]).unwrap(),
        ];
        Certificate::from_clique("3_4_2_q4", &CodingClique::from_generators(cg, 2, gens).unwrap())
    }

    #[test]
    fn round_trip_keeps_hash() {
        let c = l3();
        let text = c.to_pretty();
        let back = Certificate::parse(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.content_hash().unwrap(), c.content_hash().unwrap());
        assert_eq!(back.to_pretty(), text);
    }

    #[test]
    fn hash_ignores_key_order_and_verification() {
        let c = l3();
        let mut v = c.to_value();
        let reordered: Map<String, Value> = v.as_object().unwrap().clone().into_iter().rev().collect();
        let text = serde_json::to_string(&reordered).unwrap();
        assert_eq!(Certificate::parse(&text).unwrap().content_hash().unwrap(), c.content_hash().unwrap());
        v["verification"] = json!({"verified": true});
        v["toolkit"] = json!("other 9.9");
        let d: Certificate = serde_json::from_value(v).unwrap();
        assert_eq!(d.content_hash().unwrap(), c.content_hash().unwrap());
        let mut e = c.clone();
        e.claimed.k = 5;
        assert_ne!(e.content_hash().unwrap(), c.content_hash().unwrap());
    }

    #[test]
    fn schema_errors() {
        let mut v = l3().to_value();
        v.as_object_mut().unwrap().remove("claimed");
        assert!(Certificate::parse(&v.to_string()).is_err());
        let mut v = l3().to_value();
        v["schema"] = json!("mixedqec-cert/0");
        assert!(Certificate::parse(&v.to_string()).is_err());
        let mut v = l3().to_value();
        v["extra"] = json!(1);
        assert!(Certificate::parse(&v.to_string()).is_err());
        let mut v = l3().to_value();
        v["construction"]["vectors"] = json!([["000", "000"]]);
        assert!(Certificate::parse(&v.to_string()).is_err());
    }

    #[test]
    fn verifies_small_clique() {
        let out = verify(&l3(), &VerifyOptions::default()).unwrap();
        assert!(out.verified, "{}", out.report);
        assert_eq!(out.report["checks"]["distance"]["exact"], 2);
        assert_eq!(out.report["checks"]["bounds"]["verdict"], "optimal");
        let mut wrong = l3();
        wrong.claimed.k = 8;
        assert!(!verify(&wrong, &VerifyOptions::default()).unwrap().verified);
    }

    #[test]
    fn stale_reference_is_rejected() {
        let base = l3();
        let mut p = pasting_certificate("p", &base, &[2], None, 1 << 16).unwrap();
        if let Construction::Pasting { base, .. } = &mut p.construction {
            base.certificate.claimed.k = 3;
        }
        assert!(matches!(verify(&p, &VerifyOptions::default()), Err(Error::Certificate(_))));
    }

    #[test]
    fn decomposition_detection() {
        assert_eq!(
            decomposition_of(&MixedSystem::composite(6, 2, 2, 5).unwrap()),
            Some(Decomposition { p: 2, r: 2, n1: 5 })
        );
        assert_eq!(decomposition_of(&MixedSystem::uniform(5, 3).unwrap()).unwrap().n1, 0);
        let three = CompositeGraph::paired(vec![WeightedGraph::loop_graph(3, 2, 1).unwrap(); 3]).unwrap();
        assert_eq!(decomposition_of(three.system()), None);
    }
}
