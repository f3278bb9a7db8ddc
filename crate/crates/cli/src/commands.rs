//! Subcommand bodies. Each returns an exit status plus the text for stdout
//! and stderr, so tests can drive them without spawning a process.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use mixedqec::bounds::bound_report;
use mixedqec::clique::{search_clique, SearchMode, SearchOptions};
use mixedqec::errors::DEFAULT_DIM_CAP;
use mixedqec::projection::ProjectorSpec;
use mixedqec::{CompositeGraph, Error, Result, WeightedGraph};

use crate::certificate::{pasting_certificate, verify, verify_and_record, Certificate, VerifyOptions};
use crate::fixtures::{product_certificate, projection_certificate};

pub const EXIT_VERIFIED: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_TRIVIAL: i32 = 3;

pub const DIM_CAP_ENV: &str = "MIXEDQEC_DIM_CAP";

#[derive(Clone, Debug, Default)]
pub struct CmdOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CmdOutput {
    fn ok(code: i32, stdout: String) -> Self {
        CmdOutput {
            code,
            stdout,
            stderr: String::new(),
        }
    }

    fn input_error(e: &Error) -> Self {
        CmdOutput {
            code: EXIT_INPUT,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values always serialize");
    s.push('\n');
    s
}

/// The dimension cap from the environment, or the default.
pub fn dim_cap_from_env() -> Result<u128> {
    match std::env::var(DIM_CAP_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("{DIM_CAP_ENV}={s:?} is not an integer"))),
        Err(_) => Ok(DEFAULT_DIM_CAP),
    }
}

pub fn load(path: &Path) -> Result<Certificate> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Certificate(format!("cannot read {}: {e}", path.display())))?;
    Certificate::parse(&text).map_err(|e| Error::Certificate(format!("{}: {e}", path.display())))
}

/// `loop:n:m[:w]` or a path to a graph JSON file.
pub fn parse_graph(arg: &str) -> Result<WeightedGraph> {
    if let Some(rest) = arg.strip_prefix("loop:") {
        let parts: Vec<&str> = rest.split(':').collect();
        let num = |s: &str| -> Result<i64> {
            s.parse()
                .map_err(|_| Error::Parse(format!("bad number {s:?} in graph shorthand {arg:?}")))
        };
        return match parts.as_slice() {
            [n, m] => WeightedGraph::loop_graph(num(n)? as usize, num(m)? as u32, 1),
            [n, m, w] => WeightedGraph::loop_graph(num(n)? as usize, num(m)? as u32, num(w)?),
            _ => Err(Error::Parse(format!("graph shorthand is loop:n:m[:w], got {arg:?}"))),
        };
    }
    let text = fs::read_to_string(arg).map_err(|e| Error::Parse(format!("cannot read graph {arg:?}: {e}")))?;
    Ok(serde_json::from_str(&text)?)
}

pub fn cmd_verify(path: &Path, opts: &VerifyOptions, update: bool) -> CmdOutput {
    let run = || -> Result<CmdOutput> {
        let mut cert = load(path)?;
        let out = verify_and_record(&mut cert, opts)?;
        if update {
            fs::write(path, cert.to_pretty())?;
        }
        let code = if out.verified { EXIT_VERIFIED } else { EXIT_FAILED };
        Ok(CmdOutput::ok(code, pretty(&out.report)))
    };
    run().unwrap_or_else(|e| CmdOutput::input_error(&e))
}

pub struct SearchArgs<'a> {
    pub graph_p: &'a str,
    pub graph_r: Option<&'a str>,
    pub distance: usize,
    pub target: usize,
    pub budget: u64,
    pub mode: SearchMode,
    pub name: &'a str,
}

pub fn cmd_search(args: &SearchArgs, opts: &VerifyOptions) -> CmdOutput {
    let run = || -> Result<CmdOutput> {
        let mut graphs = vec![parse_graph(args.graph_p)?];
        if let Some(r) = args.graph_r {
            graphs.push(parse_graph(r)?);
        }
        let cg = CompositeGraph::paired(graphs)?;
        let outcome = search_clique(
            &cg,
            args.distance,
            SearchOptions {
                target: args.target,
                budget: args.budget,
                mode: args.mode,
            },
        )?;
        let mut cert = Certificate::from_clique(args.name, &outcome.clique);
        let out = verify_and_record(&mut cert, opts)?;
        if let Some(Value::Object(m)) = cert.verification.as_mut() {
            m.insert(
                "search".into(),
                json!({
                    "mode": args.mode,
                    "budget": args.budget,
                    "nodes": outcome.nodes,
                    "budget_exhausted": outcome.budget_exhausted,
                    "target_reached": outcome.target_reached,
                }),
            );
        }
        let code = if outcome.is_trivial() {
            EXIT_TRIVIAL
        } else if out.verified {
            EXIT_VERIFIED
        } else {
            EXIT_FAILED
        };
        Ok(CmdOutput::ok(code, cert.to_pretty()))
    };
    run().unwrap_or_else(|e| CmdOutput::input_error(&e))
}

pub fn cmd_bounds(dims: &[u64], distance: usize, k: Option<u128>) -> CmdOutput {
    match bound_report(dims, distance, k) {
        Ok(r) => CmdOutput::ok(EXIT_VERIFIED, pretty(&serde_json::to_value(r).expect("reports serialize"))),
        Err(e) => CmdOutput::input_error(&e),
    }
}

/// Inputs to a composition must themselves verify.
fn verified_input(path: &Path, opts: &VerifyOptions) -> Result<std::result::Result<Certificate, CmdOutput>> {
    let cert = load(path)?;
    let out = verify(&cert, opts)?;
    if out.verified {
        Ok(Ok(cert))
    } else {
        Ok(Err(CmdOutput {
            code: EXIT_FAILED,
            stdout: pretty(&out.report),
            stderr: format!("error: input {} does not verify\n", path.display()),
        }))
    }
}

fn finish(mut cert: Certificate, opts: &VerifyOptions) -> Result<CmdOutput> {
    let out = verify_and_record(&mut cert, opts)?;
    let mut o = CmdOutput::ok(if out.verified { EXIT_VERIFIED } else { EXIT_FAILED }, cert.to_pretty());
    if !out.verified {
        o.stderr = format!("error: composed certificate does not verify: {}\n", out.report["failed"]);
    }
    Ok(o)
}

macro_rules! input {
    ($e:expr) => {
        match $e {
            Ok(c) => c,
            Err(o) => return Ok(o),
        }
    };
}

pub fn cmd_project(ancilla: &Path, spec: ProjectorSpec, k: Option<u64>, name: &str, opts: &VerifyOptions) -> CmdOutput {
    let run = || -> Result<CmdOutput> {
        let a = input!(verified_input(ancilla, opts)?);
        // K is the ancilla's unless the caller claims otherwise
        let cert = projection_certificate(name, &a, spec, k.unwrap_or(a.claimed.k))?;
        finish(cert, opts)
    };
    run().unwrap_or_else(|e| CmdOutput::input_error(&e))
}

pub fn cmd_product(a: &Path, b: &Path, name: &str, opts: &VerifyOptions) -> CmdOutput {
    let run = || -> Result<CmdOutput> {
        let a = input!(verified_input(a, opts)?);
        let b = input!(verified_input(b, opts)?);
        finish(product_certificate(name, &a, &b)?, opts)
    };
    run().unwrap_or_else(|e| CmdOutput::input_error(&e))
}

pub fn cmd_paste(base: &Path, blocks: &[u32], attach: Option<&[(usize, usize)]>, name: &str, opts: &VerifyOptions) -> CmdOutput {
    let run = || -> Result<CmdOutput> {
        let b = input!(verified_input(base, opts)?);
        finish(pasting_certificate(name, &b, blocks, attach, opts.cap)?, opts)
    };
    run().unwrap_or_else(|e| CmdOutput::input_error(&e))
}

/// Expected exit status of a fixture file, from its name.
pub fn expected_exit(path: &Path) -> i32 {
    let stem = path.file_name().and_then(|s| s.to_str()).unwrap_or_default();
    if stem.starts_with("fail_") {
        EXIT_FAILED
    } else if stem.starts_with("invalid_") {
        EXIT_INPUT
    } else {
        EXIT_VERIFIED
    }
}

fn json_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    if !dir.is_dir() {
        return Ok(out);
    }
    for entry in fs::read_dir(dir)? {
        let p = entry?.path();
        if p.extension().is_some_and(|e| e == "json") {
            out.push(p);
        }
    }
    out.sort();
    Ok(out)
}

/// Verifies every `*.json` in `dir` and `dir/negative` against its expected
/// exit status.
pub fn cmd_run_fixtures(dir: &Path, opts: &VerifyOptions) -> CmdOutput {
    let run = || -> Result<CmdOutput> {
        let mut files = json_files(dir)?;
        files.extend(json_files(&dir.join("negative"))?);
        if files.is_empty() {
            return Err(Error::Certificate(format!("no fixtures under {}", dir.display())));
        }
        let mut lines = String::new();
        let mut bad = 0;
        for f in &files {
            let got = cmd_verify(f, opts, false).code;
            let want = expected_exit(f);
            let ok = got == want;
            bad += usize::from(!ok);
            lines.push_str(&format!(
                "{} {} (exit {got}, expected {want})\n",
                if ok { "ok  " } else { "FAIL" },
                f.strip_prefix(dir).unwrap_or(f).display()
            ));
        }
        lines.push_str(&format!("{} fixtures, {} unexpected\n", files.len(), bad));
        Ok(CmdOutput::ok(if bad == 0 { EXIT_VERIFIED } else { EXIT_FAILED }, lines))
    };
    run().unwrap_or_else(|e| CmdOutput::input_error(&e))
}

/// `5:0,1;3:0,2` or a JSON projector.
pub fn parse_keep(arg: &str) -> Result<ProjectorSpec> {
    if arg.trim_start().starts_with('{') {
        return Ok(serde_json::from_str(arg)?);
    }
    let mut keep = serde_json::Map::new();
    for item in arg.split(';').filter(|s| !s.trim().is_empty()) {
        let (p, levels) = item
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("keep item {item:?} is not particle:levels")))?;
        let levels = levels
            .split(',')
            .map(|l| l.trim().parse::<u32>().map_err(|_| Error::Parse(format!("bad level {l:?}"))))
            .collect::<Result<Vec<_>>>()?;
        keep.insert(p.trim().to_string(), json!(levels));
    }
    Ok(serde_json::from_value(json!({ "keep": keep }))?)
}

/// `1,3;0,2`: one comma pair of base-row indices per block layer.
pub fn parse_attach(arg: &str) -> Result<Vec<(usize, usize)>> {
    arg.split(';')
        .map(|pair| {
            let v: Vec<usize> = pair
                .split(',')
                .map(|x| x.trim().parse().map_err(|_| Error::Parse(format!("bad row index {x:?}"))))
                .collect::<Result<_>>()?;
            match v.as_slice() {
                [a, b] => Ok((*a, *b)),
                _ => Err(Error::Parse(format!("attach item {pair:?} is not a,b"))),
            }
        })
        .collect()
}
