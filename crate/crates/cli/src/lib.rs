//! The `chd` command-line tool: JSON in, JSON (or text) reports out.
//!
//! Exit codes: 0 on success, 1 on domain or input errors, 2 on usage errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use chd_core::diagonalise::{
    catalogue, certify, split_check, theorem_checks, SpectrumAssignment, Target,
};
use chd_core::graphs::{
    cayley, combine, complement, double_cover, merge, named, neps, parse_rational, product, AbelianGroup, Combine,
    Family, Product,
};
use chd_core::hadamard::{character_table, conference_lift, paley_conference};
use chd_core::spectral::{cheeger, cheeger_inequality_audit, min_edge_density, tightness_check};
use chd_core::walks::{check_pst, evolve_column, find_fr, RationalAngle};
use chd_core::{ButsonMatrix, WeightedGraph};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

pub mod io;
pub mod report;

use io::{CliError, Inputs};
use report::RunReport;

#[derive(Debug, Parser)]
#[command(name = "chd", version, about = "Complex Hadamard diagonalisable graphs: exact certification and quantum walks")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Worker threads for parallel sections.
    #[arg(long, global = true, env = "CHD_THREADS")]
    pub threads: Option<usize>,
    /// Seed for randomized sweeps.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Butson matrix utilities.
    #[command(subcommand)]
    Hadamard(HadamardCmd),
    /// Graph constructions.
    #[command(subcommand)]
    Graph(GraphCmd),
    /// Certify that a matrix diagonalises a graph and report the eigenvalues.
    Certify(CertifyArgs),
    /// Regular graphs up to a given order diagonalisable by a Real or Turyn matrix.
    Catalogue {
        #[arg(long, default_value_t = 8)]
        max_n: usize,
    },
    /// Exact Cheeger constant; with a diagonaliser, also the tightness check.
    Cheeger {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        hadamard: Option<PathBuf>,
    },
    /// Exact minimum edge density over all cuts.
    Density {
        #[arg(long)]
        graph: PathBuf,
    },
    /// Amplitudes of exp(-itL) e_from.
    Walk {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        hadamard: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
        #[arg(long)]
        from: usize,
    },
    /// Every fractional revival between vertex pairs.
    FrSearch {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        hadamard: PathBuf,
    },
    /// Exact perfect state transfer test at a rational time.
    PstCheck {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        hadamard: PathBuf,
        #[arg(long)]
        a: usize,
        #[arg(long)]
        b: usize,
        /// Time as a fraction of 2pi, e.g. `1/4` or `1/2 pi`.
        #[arg(long)]
        tau: String,
    },
    /// Structural checks on a certified spectrum, or a seeded Cayley sweep.
    Theorems(TheoremsArgs),
}

#[derive(Debug, Subcommand)]
pub enum HadamardCmd {
    Verify {
        #[arg(long)]
        hadamard: PathBuf,
    },
    Dephase {
        #[arg(long)]
        hadamard: PathBuf,
    },
    Tensor {
        #[arg(long)]
        hadamard: PathBuf,
        #[arg(long)]
        with: PathBuf,
    },
    Classify {
        #[arg(long)]
        hadamard: PathBuf,
    },
    CharacterTable {
        /// Cyclic factor orders, e.g. `2,2,2`.
        #[arg(long, value_delimiter = ',', required = true)]
        moduli: Vec<usize>,
    },
    ConferenceLift {
        /// Build the Paley conference matrix of order q + 1.
        #[arg(long, conflicts_with = "conference", required_unless_present = "conference")]
        paley: Option<usize>,
        /// A JSON file holding a symmetric conference matrix as rows of integers.
        #[arg(long)]
        conference: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum GraphCmd {
    /// Build a graph and print its JSON.
    #[command(subcommand)]
    Make(MakeCmd),
}

#[derive(Debug, Subcommand)]
pub enum MakeCmd {
    Complete {
        #[arg(long)]
        n: usize,
    },
    Empty {
        #[arg(long)]
        n: usize,
    },
    Cycle {
        #[arg(long)]
        n: usize,
    },
    Hypercube {
        #[arg(long)]
        d: usize,
    },
    /// `(nK_2)^c` on 2n vertices.
    Cocktail {
        #[arg(long)]
        n: usize,
    },
    Multipartite {
        #[arg(long, value_delimiter = ',', required = true)]
        parts: Vec<usize>,
    },
    Cayley {
        #[arg(long, value_delimiter = ',', required = true)]
        moduli: Vec<usize>,
        /// Elements separated by `;`, coordinates by `,`, e.g. `1,0;0,1`.
        #[arg(long)]
        connection: String,
    },
    Complement {
        #[arg(long)]
        graph: PathBuf,
    },
    Union {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        with: PathBuf,
    },
    Join {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        with: PathBuf,
    },
    Product {
        #[arg(long, value_enum)]
        kind: ProductKind,
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        with: PathBuf,
    },
    DoubleCover {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        with: PathBuf,
    },
    Merge {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        with: PathBuf,
        #[arg(long, default_value = "1")]
        w1: String,
        #[arg(long, default_value = "1")]
        w2: String,
    },
    Neps {
        /// Factor graphs, in order.
        #[arg(long = "graph", required = true)]
        graphs: Vec<PathBuf>,
        /// Basis vectors separated by `;`, entries by `,`, e.g. `1,0;0,1`.
        #[arg(long)]
        basis: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProductKind {
    Direct,
    Cartesian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TargetArg {
    Laplacian,
    Adjacency,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub hadamard: PathBuf,
    #[arg(long, value_enum, default_value_t = TargetArg::Laplacian)]
    pub target: TargetArg,
}

#[derive(Debug, Args)]
pub struct TheoremsArgs {
    #[arg(long, required_unless_present = "cayley_sweep")]
    pub graph: Option<PathBuf>,
    #[arg(long, required_unless_present = "cayley_sweep")]
    pub hadamard: Option<PathBuf>,
    /// Number of random Cayley graphs to check instead of a single input.
    #[arg(long, conflicts_with_all = ["graph", "hadamard"])]
    pub cayley_sweep: Option<usize>,
    /// Group for the sweep, e.g. `5,5`.
    #[arg(long, value_delimiter = ',', default_value = "2,2,2")]
    pub moduli: Vec<usize>,
}

/// Parses `argv` (including the program name), runs the command and writes
/// the report to `out`. Errors go to `err`. Returns the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if code == 0 { write!(out, "{e}") } else { write!(err, "{e}") };
            return code;
        }
    };
    let command: Vec<String> = argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    match execute(&cli, command) {
        Ok((report, code)) => {
            let text = match cli.format {
                Format::Json => report.to_json() + "\n",
                Format::Text => report.to_text(),
            };
            let _ = out.write_all(text.as_bytes());
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli, command: Vec<String>) -> Result<(RunReport, i32), CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        builder = builder.num_threads(t);
    }
    let pool = builder.build().map_err(|e| CliError::Domain(e.to_string()))?;
    let start = Instant::now();
    let mut inputs = Inputs::default();
    let (mode, result, code) = pool.install(|| dispatch(cli, &mut inputs))?;
    Ok((
        RunReport {
            command,
            inputs: inputs.digests,
            mode,
            result,
            timing_ms: start.elapsed().as_millis(),
        },
        code,
    ))
}

type Outcome = (&'static str, Value, i32);

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn exact(v: Value) -> Result<Outcome, CliError> {
    Ok(("exact", v, 0))
}

fn dispatch(cli: &Cli, inputs: &mut Inputs) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Hadamard(cmd) => hadamard(cmd, inputs),
        Command::Graph(GraphCmd::Make(cmd)) => exact(to_value(&make(cmd, inputs)?)),
        Command::Certify(args) => {
            let g: WeightedGraph = inputs.load("graph", &args.graph)?;
            let h: ButsonMatrix = inputs.load("hadamard", &args.hadamard)?;
            let target = match args.target {
                TargetArg::Laplacian => Target::Laplacian,
                TargetArg::Adjacency => Target::Adjacency,
            };
            let dephased_input = h.is_dephased();
            let h = dephase(h)?;
            let spectrum = certify(&g, &h, target)?;
            exact(json!({
                "diagonalisable": spectrum.is_some(),
                "target": format!("{target:?}").to_lowercase(),
                "dephased_input": dephased_input,
                "eigenvalues": spectrum.map(|s| to_value(&s.eigenvalues)),
            }))
        }
        Command::Catalogue { max_n } => exact(to_value(&catalogue(*max_n)?)),
        Command::Cheeger { graph, hadamard } => {
            let g: WeightedGraph = inputs.load("graph", graph)?;
            let (h_value, witness) = cheeger(&g)?;
            let mut result = json!({ "h": h_value.to_string(), "witness": to_value(&witness) });
            match hadamard {
                Some(path) => {
                    let h = dephase(inputs.load("hadamard", path)?)?;
                    let spectrum = require_certified(&g, &h)?;
                    result["tightness"] = to_value(&tightness_check(&g, &h, &spectrum)?);
                    result["inequality"] = to_value(&cheeger_inequality_audit(&g, Some(&spectrum))?);
                }
                None => {
                    if let Ok(audit) = cheeger_inequality_audit(&g, None) {
                        result["inequality"] = to_value(&audit);
                    }
                }
            }
            exact(result)
        }
        Command::Density { graph } => {
            let g: WeightedGraph = inputs.load("graph", graph)?;
            let (rho, witness) = min_edge_density(&g)?;
            exact(json!({ "min_density": rho.to_string(), "witness": to_value(&witness) }))
        }
        Command::Walk { graph, hadamard, t, from } => {
            let g: WeightedGraph = inputs.load("graph", graph)?;
            let h = dephase(inputs.load("hadamard", hadamard)?)?;
            let spectrum = require_certified(&g, &h)?;
            if *from >= g.order() {
                return Err(CliError::Domain(format!("vertex {from} out of range")));
            }
            let col = evolve_column(&h, &spectrum, *t, *from);
            let amplitudes: Vec<[f64; 2]> = col.iter().map(|z| [z.re, z.im]).collect();
            let probabilities: Vec<f64> = col.iter().map(|z| z.norm_sqr()).collect();
            Ok((
                "float",
                json!({ "t": t, "from": from, "amplitudes": amplitudes, "probabilities": probabilities }),
                0,
            ))
        }
        Command::FrSearch { graph, hadamard } => {
            let g: WeightedGraph = inputs.load("graph", graph)?;
            let h = dephase(inputs.load("hadamard", hadamard)?)?;
            let spectrum = require_certified(&g, &h)?;
            let certificates = find_fr(&h, &spectrum)?;
            Ok(("exact+float-check", json!({ "certificates": to_value(&certificates) }), 0))
        }
        Command::PstCheck { graph, hadamard, a, b, tau } => {
            let g: WeightedGraph = inputs.load("graph", graph)?;
            let h = dephase(inputs.load("hadamard", hadamard)?)?;
            let spectrum = require_certified(&g, &h)?;
            let tau: RationalAngle = tau.parse()?;
            let pst = check_pst(&h, &spectrum, *a, *b, &tau)?;
            exact(json!({ "a": a, "b": b, "tau": tau, "pst": pst }))
        }
        Command::Theorems(args) => theorems(args, cli.seed, inputs),
    }
}

fn dephase(h: ButsonMatrix) -> Result<ButsonMatrix, CliError> {
    if !h.verify() {
        return Err(CliError::Domain("input is not a complex Hadamard matrix".into()));
    }
    Ok(if h.is_dephased() { h } else { h.dephase()? })
}

fn require_certified(g: &WeightedGraph, h: &ButsonMatrix) -> Result<SpectrumAssignment, CliError> {
    certify(g, h, Target::Laplacian)?
        .ok_or_else(|| CliError::Domain("the matrix does not diagonalise the graph's Laplacian".into()))
}

fn hadamard(cmd: &HadamardCmd, inputs: &mut Inputs) -> Result<Outcome, CliError> {
    match cmd {
        HadamardCmd::Verify { hadamard } => {
            let h: ButsonMatrix = inputs.load("hadamard", hadamard)?;
            let ok = h.verify();
            Ok((
                "exact",
                json!({
                    "n": h.order(),
                    "r": h.root_order(),
                    "hadamard": ok,
                    "dephased": h.is_dephased(),
                    "classification": to_value(&h.classify()),
                }),
                if ok { 0 } else { 1 },
            ))
        }
        HadamardCmd::Dephase { hadamard } => exact(to_value(&dephase(inputs.load("hadamard", hadamard)?)?)),
        HadamardCmd::Tensor { hadamard, with } => {
            let a: ButsonMatrix = inputs.load("hadamard", hadamard)?;
            let b: ButsonMatrix = inputs.load("with", with)?;
            exact(to_value(&a.tensor(&b)))
        }
        HadamardCmd::Classify { hadamard } => {
            let h: ButsonMatrix = inputs.load("hadamard", hadamard)?;
            exact(json!({ "classification": to_value(&h.classify()) }))
        }
        HadamardCmd::CharacterTable { moduli } => exact(to_value(&character_table(moduli)?)),
        HadamardCmd::ConferenceLift { paley, conference } => {
            let c: Vec<Vec<i64>> = match (paley, conference) {
                (Some(q), _) => paley_conference(*q)?,
                (None, Some(path)) => inputs.load("conference", path)?,
                (None, None) => return Err(CliError::Usage("give --paley or --conference".into())),
            };
            exact(to_value(&conference_lift(&c)?))
        }
    }
}

fn parse_elements(s: &str) -> Result<Vec<Vec<usize>>, CliError> {
    s.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            p.split(',')
                .map(|x| x.trim().parse::<usize>().map_err(|_| CliError::Usage(format!("bad element list `{s}`"))))
                .collect()
        })
        .collect()
}

fn make(cmd: &MakeCmd, inputs: &mut Inputs) -> Result<WeightedGraph, CliError> {
    let mut pair = |a: &PathBuf, b: &PathBuf| -> Result<(WeightedGraph, WeightedGraph), CliError> {
        Ok((inputs.load("graph", a)?, inputs.load("with", b)?))
    };
    Ok(match cmd {
        MakeCmd::Complete { n } => named(&Family::Complete(*n))?,
        MakeCmd::Empty { n } => named(&Family::Empty(*n))?,
        MakeCmd::Cycle { n } => named(&Family::Cycle(*n))?,
        MakeCmd::Hypercube { d } => named(&Family::Hypercube(*d))?,
        MakeCmd::Cocktail { n } => named(&Family::Cocktail(*n))?,
        MakeCmd::Multipartite { parts } => named(&Family::CompleteMultipartite(parts.clone()))?,
        MakeCmd::Cayley { moduli, connection } => {
            let group = AbelianGroup::new(moduli.clone())?;
            cayley(&group, &parse_elements(connection)?)?
        }
        MakeCmd::Complement { graph } => complement(&inputs.load("graph", graph)?)?,
        MakeCmd::Union { graph, with } => {
            let (a, b) = pair(graph, with)?;
            combine(&a, &b, Combine::Union)?
        }
        MakeCmd::Join { graph, with } => {
            let (a, b) = pair(graph, with)?;
            combine(&a, &b, Combine::Join)?
        }
        MakeCmd::Product { kind, graph, with } => {
            let (a, b) = pair(graph, with)?;
            let kind = match kind {
                ProductKind::Direct => Product::Direct,
                ProductKind::Cartesian => Product::Cartesian,
            };
            product(&a, &b, kind)?
        }
        MakeCmd::DoubleCover { graph, with } => {
            let (a, b) = pair(graph, with)?;
            double_cover(&a, &b)?
        }
        MakeCmd::Merge { graph, with, w1, w2 } => {
            let (a, b) = pair(graph, with)?;
            merge(&a, &b, &parse_rational(w1)?, &parse_rational(w2)?)?
        }
        MakeCmd::Neps { graphs, basis } => {
            let factors = graphs
                .iter()
                .enumerate()
                .map(|(i, p)| inputs.load(&format!("graph{i}"), p))
                .collect::<Result<Vec<WeightedGraph>, _>>()?;
            let basis: Vec<Vec<u8>> = parse_elements(basis)?
                .into_iter()
                .map(|v| v.into_iter().map(|x| x.min(u8::MAX as usize) as u8).collect())
                .collect();
            neps(&factors, &basis)?
        }
    })
}

fn theorems(args: &TheoremsArgs, seed: u64, inputs: &mut Inputs) -> Result<Outcome, CliError> {
    if let Some(samples) = args.cayley_sweep {
        let group = AbelianGroup::new(args.moduli.clone())?;
        let h = character_table(&args.moduli)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut failures = Vec::new();
        for i in 0..samples {
            let mut conn = Vec::new();
            for idx in 1..group.order() {
                let e = group.element(idx);
                let inv = group.neg(&e);
                if group.index(&inv)? >= idx && rng.random_bool(0.5) {
                    if inv != e {
                        conn.push(inv);
                    }
                    conn.push(e);
                }
            }
            let g = cayley(&group, &conn)?;
            let spectrum = require_certified(&g, &h)?;
            let report = theorem_checks(&g, &h, &spectrum);
            if !report.holds() {
                failures.push(json!({ "sample": i, "connection": conn, "report": to_value(&report) }));
            }
        }
        return exact(json!({
            "moduli": args.moduli,
            "seed": seed,
            "samples": samples,
            "holds": failures.is_empty(),
            "failures": failures,
        }));
    }
    let (Some(gp), Some(hp)) = (&args.graph, &args.hadamard) else {
        return Err(CliError::Usage("give --graph and --hadamard, or --cayley-sweep".into()));
    };
    let g: WeightedGraph = inputs.load("graph", gp)?;
    let h = dephase(inputs.load("hadamard", hp)?)?;
    let spectrum = require_certified(&g, &h)?;
    let report = theorem_checks(&g, &h, &spectrum);
    let splits: Vec<Value> = (1..g.order())
        .map(|k| match split_check(&g, &h, &spectrum, k) {
            Ok(holds) => json!({ "column": k, "split": holds }),
            Err(e) => json!({ "column": k, "error": e.to_string() }),
        })
        .collect();
    let code = if report.holds() { 0 } else { 1 };
    Ok(("exact", json!({ "report": to_value(&report), "splits": splits }), code))
}
