//! The shipped fixture certificates, built from their defining data.

use std::fs;
use std::path::Path;

use serde_json::json;

use mixedqec::projection::ProjectorSpec;
use mixedqec::{CodingClique, CompositeGraph, Error, Label, MixedSystem, Result, WeightedGraph};

use crate::certificate::{pasting_certificate, verify_and_record, CertRef, Certificate, Construction, VerifyOptions};

/// Published stabilizer rows of the ((6,16,3))₄ code, one letter string per
/// layer.
pub const SIX_SIXTEEN_ROWS: [&str; 8] = [
    "XZZXZZ⊗XZIIIZ",
    "ZXZZXZ⊗ZXZIII",
    "ZZXZZX⊗IIIIII",
    "IIIIII⊗ZZXZZX",
    "XZIIIZ⊗IIZXZI",
    "ZXZIII⊗IIIZXZ",
    "IZXZII⊗YYZIIZ",
    "YXYZIZ⊗IZXZII",
];

/// Rows of the pasted ((5,16,2)) code.
pub const FIVE_SIXTEEN_ROWS: [&str; 4] = ["ZZXXZ⊗III", "IIIII⊗XZZ", "XZZZX⊗ZXZ", "ZXZII⊗ZZX"];

pub const QUTRIT_LABELS: [&str; 9] = [
    "00000", "01020", "02110", "11010", "10222", "12200", "20210", "21102", "22120",
];

fn lp(n: usize, m: u32) -> WeightedGraph {
    WeightedGraph::loop_graph(n, m, 1).expect("loop graphs are valid")
}

fn clique(graphs: Vec<WeightedGraph>, d: usize, gens: &[&[&str]]) -> Result<CodingClique> {
    let cg = CompositeGraph::paired(graphs)?;
    let gens = gens
        .iter()
        .map(|g| Label::parse(cg.system(), g))
        .collect::<Result<Vec<_>>>()?;
    CodingClique::from_generators(cg, d, gens)
}

pub fn three_four_two() -> Result<Certificate> {
    let c = clique(vec![lp(3, 2), lp(3, 2)], 2, &[&["100", "010"], &["010", "001"]])?;
    Ok(Certificate::from_clique("3_4_2_q4", &c))
}

pub fn three_eight_two() -> Result<Certificate> {
    let c = clique(
        vec![lp(3, 2); 3],
        2,
        &[&["100", "010", "000"], &["010", "000", "001"], &["000", "001", "010"]],
    )?;
    Ok(Certificate::from_clique("3_8_2_q8", &c))
}

pub fn six_sixteen_three() -> Result<Certificate> {
    let c = clique(
        vec![lp(6, 2), lp(6, 2)],
        3,
        &[
            &["100100", "001101"],
            &["010010", "001011"],
            &["001101", "101001"],
            &["000110", "110000"],
        ],
    )?;
    Ok(Certificate::from_clique("6_16_3_q4", &c))
}

pub fn six_eight_three() -> Result<Certificate> {
    let c = clique(
        vec![lp(6, 2), lp(5, 2)],
        3,
        &[&["100000", "11111"], &["011110", "10000"], &["000011", "01010"]],
    )?;
    Ok(Certificate::from_clique("6_8_3", &c))
}

pub fn six_four_three() -> Result<Certificate> {
    let c = clique(vec![lp(6, 2), lp(4, 2)], 3, &[&["111010", "0101"], &["011101", "1010"]])?;
    Ok(Certificate::from_clique("6_4_3", &c))
}

pub fn qutrit_ancilla() -> Result<Certificate> {
    let cg = CompositeGraph::single(lp(5, 3))?;
    let v = QUTRIT_LABELS
        .iter()
        .map(|s| Label::parse(cg.system(), &[s]))
        .collect::<Result<Vec<_>>>()?;
    Ok(Certificate::from_clique("5_9_2_ancilla_q3", &CodingClique::new(cg, 2, v)?))
}

pub fn projector() -> ProjectorSpec {
    serde_json::from_value(json!({"keep": {"5": [0, 1]}})).expect("valid projector")
}

pub fn projection_certificate(name: &str, ancilla: &Certificate, spec: ProjectorSpec, k: u64) -> Result<Certificate> {
    let system = spec.target_system(&ancilla.system)?;
    Ok(Certificate::new(
        name,
        system,
        k,
        ancilla.claimed.d,
        Construction::Projection {
            ancilla: CertRef::new(ancilla)?,
            projector: spec,
        },
    ))
}

pub fn product_certificate(name: &str, a: &Certificate, b: &Certificate) -> Result<Certificate> {
    let mut layers = a.system.layers().to_vec();
    layers.extend(b.system.layers().iter().cloned());
    let system = MixedSystem::new(a.system.n(), layers)?;
    if a.claimed.d != b.claimed.d {
        return Err(Error::Precondition("claimed distances differ".into()));
    }
    Ok(Certificate::new(
        name,
        system,
        a.claimed.k * b.claimed.k,
        a.claimed.d,
        Construction::Product {
            inputs: vec![CertRef::new(a)?, CertRef::new(b)?],
        },
    ))
}

pub fn stabilizer_certificate(name: &str, system: MixedSystem, rows: &[&str], compare: &Certificate) -> Result<Certificate> {
    Ok(Certificate::new(
        name,
        system,
        compare.claimed.k,
        compare.claimed.d,
        Construction::Stabilizer {
            rows: rows.iter().map(|r| r.to_string()).collect(),
            compare: Some(CertRef::new(compare)?),
        },
    ))
}

/// Every positive fixture, keyed by its file stem (the certificate name).
pub fn positive_fixtures() -> Result<Vec<Certificate>> {
    let base = three_four_two()?;
    let eight = three_eight_two()?;
    let six = six_sixteen_three()?;
    let ancilla = qutrit_ancilla()?;
    let pasted = pasting_certificate("5_16_2", &base, &[2], Some(&[(1, 3)]), 1 << 16)?;
    let quart = pasting_certificate("5_64_2_q4", &base, &[4], None, 1 << 16)?;
    Ok(vec![
        stabilizer_certificate("6_16_3_stabilizer", six.system.clone(), &SIX_SIXTEEN_ROWS, &six)?,
        stabilizer_certificate("5_16_2_stabilizer", pasted.system.clone(), &FIVE_SIXTEEN_ROWS, &pasted)?,
        product_certificate("3_32_2", &base, &eight)?,
        projection_certificate("5_9_2", &ancilla, projector(), 9)?,
        base,
        eight,
        six,
        six_eight_three()?,
        six_four_three()?,
        ancilla,
        pasted,
        quart,
    ])
}

/// Negative fixtures as `(file name, text)`. `fail_*` must verify as failed
/// and `invalid_*` must be rejected as input.
pub fn negative_fixtures() -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();

    // one closure vector of the ((6,16,3)) clique with a flipped digit
    let six = six_sixteen_three()?;
    let c = six.clique()?;
    let mut vectors = c.vectors().to_vec();
    let mut v = vectors[5].clone();
    let e = v.0[0].get(0);
    v.0[0].set(0, e as i64 + 1);
    vectors[5] = v;
    let mut bad = Certificate::from_clique("fail_6_16_3_corrupt_vector", &c.with_vectors(vectors)?);
    bad.toolkit = None;
    out.push(("fail_6_16_3_corrupt_vector.json".into(), bad.to_pretty()));

    let mut wrong_k = three_four_two()?;
    wrong_k.name = "fail_3_4_2_wrong_k".into();
    wrong_k.claimed.k = 8;
    wrong_k.toolkit = None;
    out.push(("fail_3_4_2_wrong_k.json".into(), wrong_k.to_pretty()));

    let mut missing = three_four_two()?.to_value();
    missing.as_object_mut().expect("object").remove("claimed");
    missing["name"] = json!("invalid_missing_field");
    out.push((
        "invalid_missing_field.json".into(),
        serde_json::to_string_pretty(&missing)? + "\n",
    ));

    let mut stale = product_certificate("invalid_stale_reference", &three_four_two()?, &three_eight_two()?)?;
    if let Construction::Product { inputs } = &mut stale.construction {
        inputs[0].certificate.claimed.k = 2;
    }
    stale.toolkit = None;
    out.push(("invalid_stale_reference.json".into(), stale.to_pretty()));
    Ok(out)
}

/// Writes verified fixtures to `dir` and negatives to `dir/negative`.
pub fn write_all(dir: &Path, opts: &VerifyOptions) -> Result<()> {
    fs::create_dir_all(dir.join("negative"))?;
    for mut c in positive_fixtures()? {
        let out = verify_and_record(&mut c, opts)?;
        if !out.verified {
            return Err(Error::Certificate(format!("fixture {} does not verify: {}", c.name, out.report)));
        }
        fs::write(dir.join(format!("{}.json", c.name)), c.to_pretty())?;
    }
    for (file, text) in negative_fixtures()? {
        fs::write(dir.join("negative").join(file), text)?;
    }
    Ok(())
}
