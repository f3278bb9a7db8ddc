use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use mixedqec::SearchMode;
use mixedqec_cli::certificate::VerifyOptions;
use mixedqec_cli::commands::{self, CmdOutput, SearchArgs, EXIT_INPUT};

#[derive(Parser)]
#[command(name = "mixedqec", version, about = "Construct and certify mixed-alphabet quantum codes")]
struct Cli {
    /// Worker threads for search and verification (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct VerifyFlags {
    /// Run only the numeric verifier (with --symbolic, run both).
    #[arg(long)]
    numeric: bool,
    /// Run only the symbolic verifier (with --numeric, run both).
    #[arg(long)]
    symbolic: bool,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Total-dimension limit for numeric checks; overrides MIXEDQEC_DIM_CAP.
    #[arg(long)]
    dim_cap: Option<u128>,
}

impl VerifyFlags {
    fn options(&self) -> Result<VerifyOptions, CmdOutput> {
        let cap = match self.dim_cap {
            Some(c) => c,
            None => commands::dim_cap_from_env().map_err(|e| CmdOutput {
                code: EXIT_INPUT,
                stderr: format!("error: {e}\n"),
                ..Default::default()
            })?,
        };
        let both = !self.numeric && !self.symbolic;
        Ok(VerifyOptions {
            symbolic: both || self.symbolic,
            numeric: both || self.numeric,
            tol: self.tol,
            cap,
        })
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Group,
    Set,
}

#[derive(Subcommand)]
enum Command {
    /// Verify a certificate and print the report.
    Verify {
        certificate: PathBuf,
        /// Write the refreshed verification block back to the file.
        #[arg(long)]
        update: bool,
        #[command(flatten)]
        flags: VerifyFlags,
    },
    /// Search for a composite coding clique and print its certificate.
    Search {
        /// `loop:n:m[:w]` or a graph JSON file; spans every particle.
        #[arg(long)]
        graph_p: String,
        /// Second layer on the first particles, same syntax.
        #[arg(long)]
        graph_r: Option<String>,
        #[arg(long)]
        distance: usize,
        #[arg(long)]
        target: usize,
        /// Node budget per top-level branch.
        #[arg(long, default_value_t = 100_000)]
        budget: u64,
        #[arg(long, value_enum, default_value = "group")]
        mode: Mode,
        #[arg(long, default_value = "search")]
        name: String,
        #[command(flatten)]
        flags: VerifyFlags,
    },
    /// Singleton and Hamming bounds for a dimension list.
    Bounds {
        /// Comma-separated particle dimensions.
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<u64>,
        #[arg(long)]
        distance: usize,
        /// Code dimension to classify.
        #[arg(long)]
        k: Option<u128>,
    },
    /// Project an ancilla code onto kept levels.
    Project {
        ancilla: PathBuf,
        /// `particle:levels[;particle:levels]`, 1-based particles, or JSON.
        #[arg(long)]
        keep: String,
        /// Claimed K of the result (default: the ancilla's).
        #[arg(long)]
        k: Option<u64>,
        #[arg(long, default_value = "projected")]
        name: String,
        #[command(flatten)]
        flags: VerifyFlags,
    },
    /// Tensor product of two same-length codes.
    Product {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value = "product")]
        name: String,
        #[command(flatten)]
        flags: VerifyFlags,
    },
    /// Paste trivial two-particle blocks onto a distance-2 code.
    Paste {
        base: PathBuf,
        /// Block dimension, once per block.
        #[arg(long = "block", required = true)]
        blocks: Vec<u32>,
        /// Base rows per block layer, e.g. `1,3`.
        #[arg(long)]
        attach: Option<String>,
        #[arg(long, default_value = "pasted")]
        name: String,
        #[command(flatten)]
        flags: VerifyFlags,
    },
    /// Verify every fixture under a directory against its expected status.
    RunFixtures {
        #[arg(default_value = "fixtures")]
        dir: PathBuf,
        #[command(flatten)]
        flags: VerifyFlags,
    },
}

fn dispatch(cmd: Command) -> CmdOutput {
    macro_rules! opts {
        ($f:expr) => {
            match $f.options() {
                Ok(o) => o,
                Err(e) => return e,
            }
        };
    }
    match cmd {
        Command::Verify {
            certificate,
            update,
            flags,
        } => commands::cmd_verify(&certificate, &opts!(flags), update),
        Command::Search {
            graph_p,
            graph_r,
            distance,
            target,
            budget,
            mode,
            name,
            flags,
        } => {
            let args = SearchArgs {
                graph_p: &graph_p,
                graph_r: graph_r.as_deref(),
                distance,
                target,
                budget,
                mode: match mode {
                    Mode::Group => SearchMode::Group,
                    Mode::Set => SearchMode::Set,
                },
                name: &name,
            };
            commands::cmd_search(&args, &opts!(flags))
        }
        Command::Bounds { dims, distance, k } => commands::cmd_bounds(&dims, distance, k),
        Command::Project {
            ancilla,
            keep,
            k,
            name,
            flags,
        } => match commands::parse_keep(&keep) {
            Ok(spec) => commands::cmd_project(&ancilla, spec, k, &name, &opts!(flags)),
            Err(e) => CmdOutput {
                code: EXIT_INPUT,
                stderr: format!("error: {e}\n"),
                ..Default::default()
            },
        },
        Command::Product { a, b, name, flags } => commands::cmd_product(&a, &b, &name, &opts!(flags)),
        Command::Paste {
            base,
            blocks,
            attach,
            name,
            flags,
        } => {
            let attach = match attach.as_deref().map(commands::parse_attach).transpose() {
                Ok(a) => a,
                Err(e) => {
                    return CmdOutput {
                        code: EXIT_INPUT,
                        stderr: format!("error: {e}\n"),
                        ..Default::default()
                    }
                }
            };
            commands::cmd_paste(&base, &blocks, attach.as_deref(), &name, &opts!(flags))
        }
        Command::RunFixtures { dir, flags } => commands::cmd_run_fixtures(&dir, &opts!(flags)),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT as u8 } else { 0 });
        }
    };
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INPUT as u8);
        }
    }
    let out = dispatch(cli.command);
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    let _ = std::io::stdout().flush();
    ExitCode::from(out.code as u8)
}
