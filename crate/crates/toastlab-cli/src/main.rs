//! Command-line pipelines: generate toast decompositions, build and verify
//! certificates (spanning forests, balanced orientations, perfect
//! matchings), and run the brute-force oracles.
//!
//! Exit codes: 0 success, 2 verification failure or bad input data,
//! 3 generation failure, 64 usage error, 66 missing input file.

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use std::path::{Path, PathBuf};
use toastlab::error::Error;
use toastlab::folner::{folner_sets, verify_folner, verify_iso_family, IsoFamily};
use toastlab::graph::{Graph, Topology, VertexSet};
use toastlab::levels::{fill_levels, generate_level_sets, levels_to_toast, verify_level_sets, LevelSets};
use toastlab::matching::{perfect_matching, verify_matching, Matching};
use toastlab::oracles::{kappa_search, oracle_matching, oracle_parity_exists};
use toastlab::orientation::{balanced_orientation, orientation_dot, verify_balanced, Orientation};
use toastlab::ratio::Ratio;
use toastlab::render;
use toastlab::report::Report;
use toastlab::toast::{verify_toast, Toast};
use toastlab::tree::{build_tree, tree_dot, verify_tree, TreeCertificate};

const EXIT_OK: i32 = 0;
const EXIT_VERIFY: i32 = 2;
const EXIT_GENERATION: i32 = 3;
const EXIT_USAGE: i32 = 64;
const EXIT_NOINPUT: i32 = 66;

#[derive(Parser)]
#[command(name = "toastlab", version, about = "toast decompositions of lattice graphs, with certified constructions and verifiers")]
struct Cli {
    /// Threads for parallel verifiers (0 = library default)
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate graph, level sets, and a verified toast
    Generate(GenerateArgs),
    /// Build a one-ended spanning forest certificate from a toast
    Tree(BuildArgs),
    /// Build a balanced orientation from a toast
    Orient(BuildArgs),
    /// Build a perfect matching from a toast
    Match(MatchArgs),
    /// Verify an artifact against its graph
    Verify(VerifyArgs),
    /// Run a brute-force oracle
    Oracle(OracleArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Comma-separated side lengths, e.g. 64,64
    #[arg(long, value_delimiter = ',', required = true)]
    dims: Vec<usize>,
    #[arg(long, default_value = "torus")]
    topology: String,
    #[arg(long, default_value_t = 2)]
    levels: usize,
    #[arg(long, default_value_t = 8)]
    scale: usize,
    #[arg(long, default_value_t = 1)]
    r: usize,
    /// Seed; falls back to TOASTLAB_SEED, then 0
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Write artifacts even when verification fails
    #[arg(long)]
    force_emit: bool,
    /// Also write an SVG rendering
    #[arg(long)]
    svg: bool,
}

#[derive(Args)]
struct BuildArgs {
    #[arg(long, default_value = "graph.json")]
    graph: PathBuf,
    #[arg(long, default_value = "toast.json")]
    toast: PathBuf,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    #[arg(long)]
    force_emit: bool,
    /// Also write a Graphviz export
    #[arg(long)]
    dot: bool,
    #[arg(long)]
    svg: bool,
}

#[derive(Args)]
struct MatchArgs {
    #[arg(long)]
    d: usize,
    #[command(flatten)]
    common: BuildArgs,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(subcommand)]
    kind: VerifyKind,
}

#[derive(Subcommand)]
enum VerifyKind {
    /// T1-T4 for a toast file
    Toast {
        #[arg(long, default_value = "graph.json")]
        graph: PathBuf,
        #[arg(long = "in", default_value = "toast.json")]
        input: PathBuf,
    },
    /// P1-P3 for a level-set file
    Levels {
        #[arg(long, default_value = "graph.json")]
        graph: PathBuf,
        #[arg(long = "in", default_value = "levels.json")]
        input: PathBuf,
    },
    /// Spanning/acyclicity/out-degree/one-end proxy for a tree certificate
    Tree {
        #[arg(long, default_value = "graph.json")]
        graph: PathBuf,
        #[arg(long, default_value = "toast.json")]
        toast: PathBuf,
        #[arg(long = "in", default_value = "tree.json")]
        input: PathBuf,
    },
    /// Coverage and per-vertex balance of an orientation
    Orientation {
        #[arg(long, default_value = "graph.json")]
        graph: PathBuf,
        #[arg(long = "in", default_value = "orientation.json")]
        input: PathBuf,
    },
    /// Disjointness and coverage of a matching
    Matching {
        #[arg(long, default_value = "graph.json")]
        graph: PathBuf,
        #[arg(long = "in", default_value = "matching.json")]
        input: PathBuf,
    },
    /// Shell conditions and ratio for the canonical family
    Folner {
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "0.25")]
        epsilon: String,
    },
    /// Conditions (1)-(4) and the shell ratio for a family file
    Iso {
        #[arg(long, default_value = "graph.json")]
        graph: PathBuf,
        #[arg(long = "in", default_value = "family.json")]
        input: PathBuf,
    },
}

#[derive(Args)]
struct OracleArgs {
    #[command(subcommand)]
    kind: OracleKind,
}

#[derive(Subcommand)]
enum OracleKind {
    /// Maximum bipartite matching by augmenting paths
    Matching {
        #[arg(long, default_value = "graph.json")]
        graph: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Existence of a spanning subgraph with odd degree exactly on P
    Parity {
        #[arg(long, default_value = "graph.json")]
        graph: PathBuf,
        /// Comma-separated vertex ids
        #[arg(long, value_delimiter = ',', default_value = "")]
        p: Vec<usize>,
    },
    /// Least uniform boundary-connectivity radius over small full sets
    Kappa {
        #[arg(long, value_delimiter = ',', default_value = "21,21")]
        dims: Vec<usize>,
        #[arg(long, default_value_t = 6)]
        max_size: usize,
        #[arg(long, default_value_t = 4)]
        kappa_max: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints help/version with success; usage errors get 64
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if cli.threads > 0 {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global();
    }
    let code = match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    };
    std::process::exit(code);
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::GenerationFailed(_) | Error::BudgetExceeded(_) => EXIT_GENERATION,
        Error::InvalidParameter(_) => EXIT_USAGE,
        _ => EXIT_VERIFY,
    }
}

fn run(cmd: Command) -> Result<i32, Error> {
    match cmd {
        Command::Generate(args) => cmd_generate(args),
        Command::Tree(args) => cmd_tree(args),
        Command::Orient(args) => cmd_orient(args),
        Command::Match(args) => cmd_match(args),
        Command::Verify(args) => cmd_verify(args.kind),
        Command::Oracle(args) => cmd_oracle(args.kind),
    }
}

fn write_json<T: serde::Serialize>(dir: &Path, name: &str, value: &T) -> Result<(), Error> {
    std::fs::create_dir_all(dir)
        .map_err(|e| Error::InvalidInput(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    let body = serde_json::to_string_pretty(value)
        .map_err(|e| Error::InvalidInput(format!("serialization: {e}")))?;
    std::fs::write(&path, body + "\n")
        .map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display())))?;
    Ok(())
}

fn write_text(dir: &Path, name: &str, body: &str) -> Result<(), Error> {
    std::fs::create_dir_all(dir)
        .map_err(|e| Error::InvalidInput(format!("cannot create {}: {e}", dir.display())))?;
    std::fs::write(dir.join(name), body)
        .map_err(|e| Error::InvalidInput(format!("cannot write {name}: {e}")))?;
    Ok(())
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, MissingOr> {
    let body = std::fs::read_to_string(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            MissingOr::Missing(path.to_path_buf())
        } else {
            MissingOr::Other(Error::InvalidInput(format!(
                "cannot read {}: {e}",
                path.display()
            )))
        }
    })?;
    serde_json::from_str(&body).map_err(|e| {
        MissingOr::Other(Error::InvalidInput(format!(
            "cannot parse {}: {e}",
            path.display()
        )))
    })
}

enum MissingOr {
    Missing(PathBuf),
    Other(Error),
}

/// Reads a file, turning a missing path straight into exit code 66.
fn load<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Error> {
    match read_json(path) {
        Ok(v) => Ok(v),
        Err(MissingOr::Missing(p)) => {
            eprintln!("error: missing input file {}", p.display());
            std::process::exit(EXIT_NOINPUT);
        }
        Err(MissingOr::Other(e)) => Err(e),
    }
}

fn seed_from(args_seed: Option<u64>) -> u64 {
    args_seed
        .or_else(|| {
            std::env::var("TOASTLAB_SEED")
                .ok()
                .and_then(|s| s.parse().ok())
        })
        .unwrap_or(0)
}

fn print_report(label: &str, report: &Report) {
    for check in &report.checks {
        println!(
            "{label}.{}: {}",
            check.name,
            if check.pass { "pass" } else { "FAIL" }
        );
    }
}

/// Gate used everywhere a toast feeds a construction: T1, T2 always, T3 and
/// T4 only when claimed.
fn toast_gate(report: &Report, toast: &Toast) -> bool {
    let need = |name: &str| report.check(name).is_some_and(|c| c.pass);
    need("T1")
        && need("T2")
        && (!toast.flags.claims_connected || need("T3"))
        && (!toast.flags.claims_layered || need("T4"))
}

fn cmd_generate(args: GenerateArgs) -> Result<i32, Error> {
    let topology = match args.topology.as_str() {
        "torus" => Topology::Torus,
        "window" => Topology::Window,
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown topology {other}"
            )))
        }
    };
    let seed = seed_from(args.seed);
    let g = Graph::build_grid(&args.dims, topology)?;
    let ls = generate_level_sets(&g, args.r, args.levels, args.scale, seed)?;
    let levels_report = verify_level_sets(&g, &ls);
    let filled = fill_levels(&g, &ls)?;
    let toast = levels_to_toast(&g, &filled);
    let toast_report = verify_toast(&g, &toast);
    let pass = levels_report.pass() && toast_gate(&toast_report, &toast);

    write_json(&args.out_dir, "graph.json", &g)?;
    write_json(&args.out_dir, "levels.json", &ls)?;
    write_json(
        &args.out_dir,
        "report.json",
        &json!({"levels": levels_report, "toast": toast_report}),
    )?;
    if pass || args.force_emit {
        write_json(&args.out_dir, "toast.json", &toast)?;
        if args.svg {
            write_text(&args.out_dir, "toast.svg", &render::svg_toast(&g, &toast))?;
        }
    }
    print_report("levels", &levels_report);
    print_report("toast", &toast_report);
    Ok(if pass { EXIT_OK } else { EXIT_VERIFY })
}

fn load_graph_toast(graph: &Path, toast: &Path) -> Result<(Graph, Toast), Error> {
    let g: Graph = load(graph)?;
    let t: Toast = load(toast)?;
    t.validate(&g)?;
    Ok((g, t))
}

fn cmd_tree(args: BuildArgs) -> Result<i32, Error> {
    let (g, toast) = load_graph_toast(&args.graph, &args.toast)?;
    let cert = match build_tree(&g, &toast) {
        Ok(cert) => cert,
        Err(e) => {
            write_json(&args.out_dir, "tree_report.json", &json!({"error": e.to_string()}))?;
            eprintln!("error: {e}");
            return Ok(EXIT_VERIFY);
        }
    };
    let report = verify_tree(&g, &toast, &cert);
    write_json(&args.out_dir, "tree_report.json", &report)?;
    if report.pass() || args.force_emit {
        write_json(&args.out_dir, "tree.json", &cert)?;
        if args.dot {
            write_text(&args.out_dir, "tree.dot", &tree_dot(&g, &cert))?;
        }
        if args.svg {
            write_text(&args.out_dir, "tree.svg", &render::svg_tree(&g, &toast, &cert))?;
        }
    }
    print_report("tree", &report);
    Ok(if report.pass() { EXIT_OK } else { EXIT_VERIFY })
}

fn cmd_orient(args: BuildArgs) -> Result<i32, Error> {
    let (g, toast) = load_graph_toast(&args.graph, &args.toast)?;
    let run = match balanced_orientation(&g, &toast) {
        Ok(run) => run,
        Err(e) => {
            write_json(
                &args.out_dir,
                "orient_report.json",
                &json!({"error": e.to_string()}),
            )?;
            eprintln!("error: {e}");
            return Ok(EXIT_VERIFY);
        }
    };
    let report = verify_balanced(&g, &run.orientation);
    write_json(&args.out_dir, "orient_report.json", &report)?;
    write_json(&args.out_dir, "orient_log.json", &run.cycles)?;
    if report.pass() || args.force_emit {
        write_json(&args.out_dir, "orientation.json", &run.orientation)?;
        if args.dot {
            write_text(&args.out_dir, "orientation.dot", &orientation_dot(&g, &run.orientation))?;
        }
        if args.svg {
            write_text(
                &args.out_dir,
                "orientation.svg",
                &render::svg_orientation(&g, &run.orientation),
            )?;
        }
    }
    print_report("orientation", &report);
    Ok(if report.pass() { EXIT_OK } else { EXIT_VERIFY })
}

fn cmd_match(args: MatchArgs) -> Result<i32, Error> {
    let (g, toast) = load_graph_toast(&args.common.graph, &args.common.toast)?;
    let outcome = match perfect_matching(&g, &toast, args.d) {
        Ok(outcome) => outcome,
        Err(e) => {
            write_json(
                &args.common.out_dir,
                "match_report.json",
                &json!({"error": e.to_string()}),
            )?;
            eprintln!("error: {e}");
            return Ok(EXIT_VERIFY);
        }
    };
    let report = verify_matching(&g, &outcome.matching);
    write_json(&args.common.out_dir, "match_report.json", &report)?;
    write_json(&args.common.out_dir, "match_log.json", &outcome.circuits)?;
    write_json(&args.common.out_dir, "fractional.json", &outcome.fractional)?;
    if report.pass() || args.common.force_emit {
        write_json(&args.common.out_dir, "matching.json", &outcome.matching)?;
        if args.common.svg {
            write_text(
                &args.common.out_dir,
                "matching.svg",
                &render::svg_matching(&g, &outcome.matching),
            )?;
        }
    }
    print_report("matching", &report);
    Ok(if report.pass() { EXIT_OK } else { EXIT_VERIFY })
}

fn cmd_verify(kind: VerifyKind) -> Result<i32, Error> {
    let (label, report, pass) = match kind {
        VerifyKind::Toast { graph, input } => {
            let g: Graph = load(&graph)?;
            let t: Toast = load(&input)?;
            t.validate(&g)?;
            let report = verify_toast(&g, &t);
            let pass = toast_gate(&report, &t);
            ("toast", report, pass)
        }
        VerifyKind::Levels { graph, input } => {
            let g: Graph = load(&graph)?;
            let ls: LevelSets = load(&input)?;
            let report = verify_level_sets(&g, &ls);
            let pass = report.pass();
            ("levels", report, pass)
        }
        VerifyKind::Tree { graph, toast, input } => {
            let g: Graph = load(&graph)?;
            let t: Toast = load(&toast)?;
            let cert: TreeCertificate = load(&input)?;
            let report = verify_tree(&g, &t, &cert);
            let pass = report.pass();
            ("tree", report, pass)
        }
        VerifyKind::Orientation { graph, input } => {
            let g: Graph = load(&graph)?;
            let o: Orientation = load(&input)?;
            let report = verify_balanced(&g, &o);
            let pass = report.pass();
            ("orientation", report, pass)
        }
        VerifyKind::Matching { graph, input } => {
            let g: Graph = load(&graph)?;
            let m: Matching = load(&input)?;
            let report = verify_matching(&g, &m);
            let pass = report.pass();
            ("matching", report, pass)
        }
        VerifyKind::Folner { d, n, epsilon } => {
            let eps = Ratio::parse(&epsilon)
                .ok_or_else(|| Error::InvalidParameter(format!("bad epsilon {epsilon}")))?;
            let (g, pair) = folner_sets(d, n)?;
            let report = verify_folner(&g, &pair, eps);
            let pass = report.pass();
            ("folner", report, pass)
        }
        VerifyKind::Iso { graph, input } => {
            let g: Graph = load(&graph)?;
            let fam: IsoFamily = load(&input)?;
            let (mut report, ratio) = verify_iso_family(&g, &fam)?;
            report.push("iso_ratio", true, Some(json!({"ratio": ratio})));
            let pass = report.pass();
            ("iso", report, pass)
        }
    };
    print_report(label, &report);
    Ok(if pass { EXIT_OK } else { EXIT_VERIFY })
}

fn cmd_oracle(kind: OracleKind) -> Result<i32, Error> {
    match kind {
        OracleKind::Matching { graph, out } => {
            let g: Graph = load(&graph)?;
            let result = oracle_matching(&g)?;
            let body = serde_json::to_value(&result)
                .map_err(|e| Error::InvalidInput(e.to_string()))?;
            match out {
                Some(path) => write_json(
                    path.parent().unwrap_or(Path::new(".")),
                    &path.file_name().unwrap().to_string_lossy(),
                    &body,
                )?,
                None => println!("{body}"),
            }
            println!(
                "oracle.matching: {} edges, perfect: {}",
                result.matching.edges.len(),
                result.perfect
            );
            Ok(EXIT_OK)
        }
        OracleKind::Parity { graph, p } => {
            let g: Graph = load(&graph)?;
            let p = VertexSet::from_vec(p);
            let exists = oracle_parity_exists(&g, &p)?;
            println!("{}", json!({"exists": exists}));
            Ok(EXIT_OK)
        }
        OracleKind::Kappa {
            dims,
            max_size,
            kappa_max,
            out,
        } => {
            let report = kappa_search(&dims, max_size, kappa_max)?;
            let body = serde_json::to_value(&report)
                .map_err(|e| Error::InvalidInput(e.to_string()))?;
            match out {
                Some(path) => write_json(
                    path.parent().unwrap_or(Path::new(".")),
                    &path.file_name().unwrap().to_string_lossy(),
                    &body,
                )?,
                None => println!("{body}"),
            }
            println!("oracle.kappa: {}", report.kappa);
            Ok(EXIT_OK)
        }
    }
}
