mod pattern;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use subdiv::cab::{cycle_shape, find_cab_logged, find_oriented_cycle_subdivision_seeded};
use subdiv::constructions::{
    join_no_k4, join_no_s4, shipped_even_free_block, shipped_s3_free_block, BlockProperty, BuildingBlock,
};
use subdiv::digraph::Digraph;
use subdiv::finder::{FindError, RunLog};
use subdiv::k3e::find_k3e_logged;
use subdiv::mader::{lower_witness, verify_upper, MaderReport, Mode, Outcome};
use subdiv::menger::strong_arc_connectivity;
use subdiv::oracle::{contains_subdivision, validate_certificate, SearchBudget, SubdivisionCertificate, DEFAULT_BUDGET};
use subdiv::random::{random_gnp, random_k_out, rng};
use subdiv::two_block::find_two_block_logged;

use pattern::Pattern;

const FOUND: u8 = 0;
const NOT_FOUND: u8 = 1;
const BUDGET: u8 = 2;
const PARSE: u8 = 3;
const FAILURE: u8 = 4;

#[derive(Parser)]
#[command(name = "subdiv", version, about = "Find and check subdivisions of small patterns in digraphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Csv,
    Edges,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VerifyMode {
    Exhaustive,
    Sampled,
}

#[derive(Subcommand)]
enum Command {
    /// Search a host for a subdivision of a pattern.
    Find {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        pattern: String,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Certificate output (JSON) or highlighted host (DOT).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Write the finder's event log as JSON lines.
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Validate a certificate against a host and a pattern.
    Check {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        pattern: String,
        #[arg(long)]
        cert: PathBuf,
    },
    /// Check that every host with minimum out-degree k contains the pattern.
    Verify {
        #[arg(long)]
        pattern: String,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 5)]
        n_max: usize,
        #[arg(long, value_enum, default_value_t = VerifyMode::Exhaustive)]
        mode: VerifyMode,
        /// Number of hosts in sampled mode.
        #[arg(long, default_value_t = 1000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Node budget of each oracle call.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Build a digraph: g1, h1, lower-witness:<pattern>, k-out:n,k, gnp:n,p
    /// or any pattern spec.
    Construct {
        #[arg(long)]
        pattern: String,
        /// Building block file for g1 / h1.
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Edges)]
        format: Format,
    },
    /// Girth, degrees, arc-connectivity and strong components of a digraph.
    Stats {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

struct Fail {
    code: u8,
    msg: String,
}

fn parse_err(msg: impl ToString) -> Fail {
    Fail { code: PARSE, msg: msg.to_string() }
}

fn failure(msg: impl ToString) -> Fail {
    Fail { code: FAILURE, msg: msg.to_string() }
}

fn read(path: &Path) -> Result<String, Fail> {
    fs::read_to_string(path).map_err(|e| failure(format!("{}: {e}", path.display())))
}

fn write(path: &Option<PathBuf>, text: &str) -> Result<(), Fail> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| failure(format!("{}: {e}", p.display()))),
        None => Ok(()),
    }
}

fn load_host(path: &Path) -> Result<Digraph, Fail> {
    Digraph::parse_edge_list(&read(path)?).map_err(|e| parse_err(format!("{}: {e}", path.display())))
}

fn load_pattern(spec: &str) -> Result<(Pattern, Digraph), Fail> {
    let p = pattern::parse(spec).map_err(parse_err)?;
    let g = p.digraph().map_err(parse_err)?;
    Ok((p, g))
}

/// Host in DOT with the certificate's arcs and branch vertices marked.
fn highlighted_dot(d: &Digraph, cert: &SubdivisionCertificate) -> String {
    let used: std::collections::BTreeSet<(usize, usize)> =
        cert.paths.iter().flat_map(|p| p.vertices.windows(2).map(|w| (w[0], w[1]))).collect();
    let mut s = String::from("digraph D {\n");
    for v in 0..d.n() {
        match cert.branch.iter().find(|(_, &h)| h == v) {
            Some((x, _)) => s.push_str(&format!("  {v} [shape=box, xlabel=\"{x}\"];\n")),
            None => s.push_str(&format!("  {v};\n")),
        }
    }
    for (u, v) in d.arcs() {
        let attr = if used.contains(&(u, v)) { " [color=red, penwidth=2]" } else { "" };
        s.push_str(&format!("  {u} -> {v}{attr};\n"));
    }
    s.push_str("}\n");
    s
}

fn oracle_search(d: &Digraph, f: &Digraph, budget: u64) -> Result<SubdivisionCertificate, FindError> {
    match contains_subdivision(d, f, &mut SearchBudget::new(budget)) {
        Ok(Some(c)) => Ok(c),
        Ok(None) => Err(FindError::stuck("oracle", json!({ "exhausted": true }))),
        Err(_) => Err(FindError::budget(budget, "oracle", json!({}))),
    }
}

fn search(d: &Digraph, pat: &Pattern, f: &Digraph, budget: u64, seed: u64, log: &mut RunLog) -> Result<SubdivisionCertificate, FindError> {
    let mut b = SearchBudget::new(budget);
    let res = match pat {
        Pattern::TwoBlock(k1, k2) => find_two_block_logged(d, *k1, *k2, &mut b, log),
        Pattern::Cab(a, bb) if *a >= 2 => find_cab_logged(d, *a, *bb, &mut b, log),
        Pattern::K3e => {
            let ok = |v0: usize| d.out_degree(v0) >= 1 && (0..d.n()).all(|v| v == v0 || d.out_degree(v) >= 2);
            match (0..d.n()).find(|&v| ok(v)) {
                Some(v0) => find_k3e_logged(d, v0, None, log),
                None => Err(FindError::PreconditionViolated { vertex: 0 }),
            }
        }
        _ if cycle_shape(f).is_ok() => find_oriented_cycle_subdivision_seeded(d, f, &mut b, seed, log),
        _ => return oracle_search(d, f, budget),
    };
    match res {
        Err(FindError::PreconditionViolated { vertex }) => {
            log.push("fallback", json!({ "reason": "precondition", "vertex": vertex }));
            oracle_search(d, f, budget)
        }
        r => r,
    }
}

fn cmd_find(
    input: &Path,
    spec: &str,
    budget: u64,
    seed: u64,
    out: &Option<PathBuf>,
    format: Format,
    log_path: &Option<PathBuf>,
) -> Result<u8, Fail> {
    let d = load_host(input)?;
    let (pat, f) = load_pattern(spec)?;
    let mut log = RunLog::default();
    let res = search(&d, &pat, &f, budget, seed, &mut log);
    write(log_path, &log.to_jsonl())?;
    match res {
        Ok(cert) => {
            validate_certificate(&d, &f, &cert).map_err(failure)?;
            let text = match format {
                Format::Json => cert.to_json(),
                Format::Dot => highlighted_dot(&d, &cert),
                _ => return Err(parse_err("find writes json or dot")),
            };
            write(out, &text)?;
            println!("found {pat} subdivision on {} host vertices", cert.host_vertices().len());
            Ok(FOUND)
        }
        Err(e @ FindError::NotFound(_)) => {
            println!("{e}");
            Ok(NOT_FOUND)
        }
        Err(e @ FindError::BudgetExceeded { .. }) => {
            println!("{e}");
            Ok(BUDGET)
        }
        Err(e @ FindError::DegeneratePattern(_)) | Err(e @ FindError::BadParams(_)) => Err(parse_err(e)),
        Err(e) => Err(failure(e)),
    }
}

fn cmd_check(input: &Path, spec: &str, cert_path: &Path) -> Result<u8, Fail> {
    let d = load_host(input)?;
    let (_, f) = load_pattern(spec)?;
    let cert = SubdivisionCertificate::from_json(&read(cert_path)?).map_err(|e| parse_err(format!("{}: {e}", cert_path.display())))?;
    match validate_certificate(&d, &f, &cert) {
        Ok(()) => {
            println!("valid");
            Ok(FOUND)
        }
        Err(msg) => {
            println!("invalid: {msg}");
            Ok(NOT_FOUND)
        }
    }
}

fn report_csv(r: &MaderReport, cex: Option<&Path>) -> String {
    let mode = match r.mode {
        Mode::Exhaustive => "exhaustive",
        Mode::Sampled { .. } => "sampled",
    };
    let cex = cex.map(|p| p.display().to_string()).unwrap_or_default();
    format!(
        "pattern,k,n_max,mode,tested,outcome,counterexample\n{},{},{},{mode},{},{},{cex}\n",
        r.pattern,
        r.k,
        r.n_max,
        r.tested,
        r.outcome_label()
    )
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    spec: &str,
    k: usize,
    n_max: usize,
    mode: VerifyMode,
    samples: u64,
    seed: u64,
    budget: u64,
    out: &Option<PathBuf>,
    format: Format,
) -> Result<u8, Fail> {
    let (pat, f) = load_pattern(spec)?;
    let mode = match mode {
        VerifyMode::Exhaustive => Mode::Exhaustive,
        VerifyMode::Sampled => Mode::Sampled { count: samples, seed },
    };
    let report = verify_upper(&f, &pat.to_string(), k, n_max, mode, budget).map_err(failure)?;
    let cex_path = match (&report.counterexample(), out) {
        (Some(g), Some(o)) => {
            let p = o.with_extension("counterexample.edges");
            fs::write(&p, g.to_edge_list()).map_err(|e| failure(format!("{}: {e}", p.display())))?;
            Some(p)
        }
        _ => None,
    };
    let text = match format {
        Format::Json => report.to_json(),
        Format::Csv => report_csv(&report, cex_path.as_deref()),
        _ => return Err(parse_err("verify writes json or csv")),
    };
    write(out, &text)?;
    println!("{pat} with min out-degree {k}, n <= {n_max}: {} ({} hosts)", report.outcome_label(), report.tested);
    Ok(match report.outcome {
        Outcome::AllContain => FOUND,
        Outcome::Counterexample { .. } => NOT_FOUND,
        Outcome::Inconclusive { .. } => BUDGET,
    })
}

fn load_block(input: &Option<PathBuf>, default: BuildingBlock, want: BlockProperty) -> Result<BuildingBlock, Fail> {
    let Some(p) = input else { return Ok(default) };
    let block = BuildingBlock::parse(&read(p)?).map_err(|e| parse_err(format!("{}: {e}", p.display())))?;
    if block.property != want {
        return Err(parse_err(format!("block must have property {}", want.tag())));
    }
    Ok(block)
}

fn construct(spec: &str, input: &Option<PathBuf>, seed: u64) -> Result<Digraph, Fail> {
    let (gen, params) = spec.split_once(':').unwrap_or((spec, ""));
    let two = || -> Result<(String, String), Fail> {
        let (a, b) = params.split_once(',').ok_or_else(|| parse_err(format!("{spec:?} takes two parameters")))?;
        Ok((a.trim().to_string(), b.trim().to_string()))
    };
    let int = |s: &str| s.parse::<usize>().map_err(|_| parse_err(format!("bad number {s:?}")));
    match gen {
        "g1" => {
            let block = load_block(input, shipped_even_free_block(), BlockProperty::NoEvenDicycle)?;
            Ok(join_no_k4(&block).map_err(failure)?.0)
        }
        "h1" => {
            let block = load_block(input, shipped_s3_free_block(), BlockProperty::NoS3Subdivision)?;
            Ok(join_no_s4(&block).map_err(failure)?.0)
        }
        "lower-witness" => {
            let (_, f) = load_pattern(params)?;
            lower_witness(&f).map_err(failure)
        }
        "k-out" => {
            let (n, k) = two()?;
            let (n, k) = (int(&n)?, int(&k)?);
            if k >= n.max(1) {
                return Err(parse_err(format!("k-out needs k < n, got n={n} k={k}")));
            }
            Ok(random_k_out(n, k, &mut rng(seed)))
        }
        "gnp" => {
            let (n, p) = two()?;
            let p: f64 = p.parse().map_err(|_| parse_err(format!("bad probability {p:?}")))?;
            if !(0.0..=1.0).contains(&p) {
                return Err(parse_err(format!("probability {p} out of range")));
            }
            Ok(random_gnp(int(&n)?, p, &mut rng(seed)))
        }
        _ => Ok(load_pattern(spec)?.1),
    }
}

fn cmd_construct(spec: &str, input: &Option<PathBuf>, seed: u64, out: &Option<PathBuf>, format: Format) -> Result<u8, Fail> {
    let d = construct(spec, input, seed)?;
    let text = match format {
        Format::Edges => d.to_edge_list(),
        Format::Dot => d.to_dot(),
        Format::Json => serde_json::to_string(&json!({ "n": d.n(), "arcs": d.arcs() })).unwrap(),
        Format::Csv => return Err(parse_err("construct writes edges, dot or json")),
    };
    match out {
        Some(_) => write(out, &text)?,
        None => print!("{text}"),
    }
    Ok(FOUND)
}

fn cmd_stats(input: &Path, out: &Option<PathBuf>, format: Format) -> Result<u8, Fail> {
    let d = load_host(input)?;
    let deg = |r: Result<usize, _>| r.ok();
    let stats = json!({
        "n": d.n(),
        "arcs": d.arc_count(),
        "girth": d.directed_girth().to_string(),
        "min_out": deg(d.min_out_degree()),
        "max_out": deg(d.max_out_degree()),
        "min_in": deg(d.min_in_degree()),
        "max_in": deg(d.max_in_degree()),
        "arc_connectivity": strong_arc_connectivity(&d).ok(),
        "strong_components": d.strong_components().len(),
        "digon": d.has_digon(),
    });
    let show = |k: &str| match &stats[k] {
        serde_json::Value::String(s) => s.clone(),
        serde_json::Value::Null => "-".into(),
        v => v.to_string(),
    };
    let keys = ["n", "arcs", "girth", "min_out", "max_out", "min_in", "max_in", "arc_connectivity", "strong_components", "digon"];
    let text = match format {
        Format::Json => serde_json::to_string_pretty(&stats).unwrap(),
        Format::Csv => format!("{}\n{}\n", keys.join(","), keys.map(show).join(",")),
        _ => return Err(parse_err("stats writes json or csv")),
    };
    write(out, &text)?;
    println!(
        "n {}  arcs {}  girth {}  min out {}  arc-connectivity {}  strong components {}",
        show("n"),
        show("arcs"),
        show("girth"),
        show("min_out"),
        show("arc_connectivity"),
        show("strong_components")
    );
    Ok(FOUND)
}

fn run(cli: Cli) -> Result<u8, Fail> {
    match cli.command {
        Command::Find { input, pattern, budget, seed, out, format, log } => {
            cmd_find(&input, &pattern, budget, seed, &out, format, &log)
        }
        Command::Check { input, pattern, cert } => cmd_check(&input, &pattern, &cert),
        Command::Verify { pattern, k, n_max, mode, samples, seed, budget, out, format } => {
            cmd_verify(&pattern, k, n_max, mode, samples, seed, budget, &out, format)
        }
        Command::Construct { pattern, input, seed, out, format } => cmd_construct(&pattern, &input, seed, &out, format),
        Command::Stats { input, out, format } => cmd_stats(&input, &out, format),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { PARSE } else { FOUND });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Fail { code, msg }) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
