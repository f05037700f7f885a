//! Command-line interface: compile, gen-code, gen-arch, verify, metrics,
//! export-wcnf.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use crate::arch::{generate_arch, ArchFamily, CouplingGraph};
use crate::circuit::{compute_metrics, emit_stim_text, Circuit};
use crate::code::{generate_code, BinaryMatrix, CodeSpecifier, StabilizerCode};
use crate::config::{DepthSearch, RunConfig};
use crate::error::{param, Error, Result};
use crate::pipeline::compile;
use crate::stage1::{stage1_wcnf, MappingSolution};
use crate::verifier::verify_syndrome_extraction;

/// Environment variable holding an external MaxSAT solver command.
pub const EXTERNAL_SOLVER_ENV: &str = "ESMC_MAXSAT_CMD";

#[derive(Debug, Parser)]
#[command(
    name = "esmc",
    about = "Compile stabilizer-code syndrome-measurement circuits onto sparse coupling graphs"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Map a code onto an architecture, schedule it, verify and emit artifacts.
    Compile(CompileArgs),
    /// Generate a stabilizer code file.
    GenCode(GenCodeArgs),
    /// Generate a coupling-graph file.
    GenArch(GenArchArgs),
    /// Re-verify emitted artifacts.
    Verify(VerifyArgs),
    /// Recompute metrics of a circuit file.
    Metrics(MetricsArgs),
    /// Export the stage-1 WCNF with a variable legend sidecar.
    ExportWcnf(ExportArgs),
}

#[derive(Debug, Args)]
struct CodeArchArgs {
    /// Code: surface:<d>, steane, repetition:<n>, cube, hgp:<h1>,<h2>, or a JSON file path.
    #[arg(long)]
    code: String,
    /// Architecture: square:<r>x<c>, hexagon:<r>x<c>, heavy-square:<r>x<c>,
    /// heavy-hexagon:<r>x<c>, or a JSON file path.
    #[arg(long)]
    arch: String,
    /// Comma-separated defective nodes removed from the architecture.
    #[arg(long, value_delimiter = ',')]
    defects: Vec<usize>,
}

#[derive(Debug, Args)]
struct SolverArgs {
    /// Initial per-stabilizer bridge-size limit (default: stabilizer weight).
    #[arg(long)]
    l_init: Option<usize>,
    /// Uniform +1 escalations of the bridge limit to try on UNSAT.
    #[arg(long, default_value_t = 4)]
    l_cap: usize,
    /// Soft-weight overrides (defaults are auto-stratified).
    #[arg(long)]
    w1: Option<u64>,
    #[arg(long)]
    w2: Option<u64>,
    #[arg(long)]
    w3: Option<u64>,
    /// Stage-1 time limit in seconds.
    #[arg(long, default_value_t = 7200)]
    stage1_limit: u64,
    /// Stage-2 time limit in seconds.
    #[arg(long, default_value_t = 7200)]
    stage2_limit: u64,
    /// Depth search strategy.
    #[arg(long, default_value = "binary")]
    depth_search: String,
    /// Use the per-start-vertex traversal encoding in stage 1.
    #[arg(long)]
    per_root_bft: bool,
    /// External MaxSAT command (overrides the ESMC_MAXSAT_CMD environment
    /// variable); receives a WCNF path, must print "s ..." and "v ..." lines.
    #[arg(long)]
    external_solver: Option<String>,
    /// Random seed recorded in artifacts; all internal search is
    /// deterministic.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct CompileArgs {
    #[command(flatten)]
    input: CodeArchArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// Number of stabilizer subsets (1 = whole code at once).
    #[arg(long, default_value_t = 1)]
    partition: usize,
    /// Output directory for artifacts.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Debug, Args)]
struct GenCodeArgs {
    /// surface:<d>, steane, repetition:<n>, cube, or hgp:<h1>,<h2>.
    spec: String,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct GenArchArgs {
    /// square:<r>x<c>, hexagon:<r>x<c>, heavy-square:<r>x<c>, heavy-hexagon:<r>x<c>.
    spec: String,
    #[arg(long, value_delimiter = ',')]
    defects: Vec<usize>,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long)]
    circuit: PathBuf,
    #[arg(long)]
    code: PathBuf,
    #[arg(long)]
    mapping: PathBuf,
    /// Segment of the circuit to verify (for partitioned compiles).
    #[arg(long, default_value_t = 0)]
    segment: usize,
}

#[derive(Debug, Args)]
struct MetricsArgs {
    #[arg(long)]
    circuit: PathBuf,
}

#[derive(Debug, Args)]
struct ExportArgs {
    #[command(flatten)]
    input: CodeArchArgs,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(short, long)]
    output: PathBuf,
}

/// Exit codes: 0 success, 1 oracle rejection, 2 infeasible, 3 timeout
/// without a solution, 64 bad input, 70 internal error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 64 } else { 0 };
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Infeasible(_) => 2,
                Error::Timeout => 3,
                Error::Parameter(_) | Error::Json(_) | Error::Io(_) => 64,
                _ => 70,
            }
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Compile(args) => cmd_compile(args),
        Command::GenCode(args) => {
            let code = parse_code(&args.spec)?;
            code.write_file(&args.output)?;
            println!("wrote {}", args.output.display());
            Ok(0)
        }
        Command::GenArch(args) => {
            let arch = parse_arch(&args.spec, &args.defects)?;
            arch.write_file(&args.output)?;
            println!("wrote {}", args.output.display());
            Ok(0)
        }
        Command::Verify(args) => cmd_verify(args),
        Command::Metrics(args) => {
            let circuit = Circuit::read_file(&args.circuit)?;
            let metrics = compute_metrics(&circuit);
            println!("{}", serde_json::to_string_pretty(&metrics)?);
            Ok(0)
        }
        Command::ExportWcnf(args) => cmd_export(args),
    }
}

pub fn parse_code(spec: &str) -> Result<StabilizerCode> {
    if let Some(rest) = spec.strip_prefix("surface:") {
        let d: usize = rest
            .parse()
            .map_err(|_| param(format!("bad surface distance '{rest}'")))?;
        return generate_code(&CodeSpecifier::Surface { distance: d });
    }
    if spec == "steane" {
        return generate_code(&CodeSpecifier::Steane);
    }
    if let Some(rest) = spec.strip_prefix("repetition:") {
        let n: usize = rest
            .parse()
            .map_err(|_| param(format!("bad repetition length '{rest}'")))?;
        return generate_code(&CodeSpecifier::Repetition { n });
    }
    if spec == "cube" {
        return generate_code(&CodeSpecifier::Cube);
    }
    if let Some(rest) = spec.strip_prefix("hgp:") {
        let (h1, h2) = rest
            .split_once(',')
            .ok_or_else(|| param("hgp spec needs two matrix files: hgp:<h1>,<h2>"))?;
        let h1 = BinaryMatrix::parse(&std::fs::read_to_string(h1)?)?;
        let h2 = BinaryMatrix::parse(&std::fs::read_to_string(h2)?)?;
        return generate_code(&CodeSpecifier::Hgp { h1, h2 });
    }
    let path = Path::new(spec);
    if path.exists() {
        return StabilizerCode::read_file(path);
    }
    Err(param(format!("unknown code spec '{spec}'")))
}

pub fn parse_arch(spec: &str, defects: &[usize]) -> Result<CouplingGraph> {
    let graph = if let Some((family, dims)) = spec.split_once(':') {
        let family = ArchFamily::parse(family)?;
        let (rows, cols) = dims
            .split_once('x')
            .ok_or_else(|| param(format!("bad dimensions '{dims}', expected <r>x<c>")))?;
        let rows: usize = rows
            .parse()
            .map_err(|_| param(format!("bad row count '{rows}'")))?;
        let cols: usize = cols
            .parse()
            .map_err(|_| param(format!("bad column count '{cols}'")))?;
        generate_arch(family, rows, cols)?
    } else {
        let path = Path::new(spec);
        if !path.exists() {
            return Err(param(format!("unknown architecture spec '{spec}'")));
        }
        CouplingGraph::read_file(path)?
    };
    if defects.is_empty() {
        Ok(graph)
    } else {
        graph.remove_defects(&defects.iter().copied().collect::<BTreeSet<usize>>())
    }
}

fn build_config(args: &SolverArgs, partition: usize) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    cfg.partition = partition;
    cfg.seed = args.seed;
    cfg.stage1.bridge_limit = args.l_init;
    cfg.stage1.escalation_cap = args.l_cap;
    cfg.stage1.w1 = args.w1;
    cfg.stage1.w2 = args.w2;
    cfg.stage1.w3 = args.w3;
    cfg.stage1.per_root_bft = args.per_root_bft;
    cfg.stage1.time_limit = Duration::from_secs(args.stage1_limit);
    cfg.stage2.time_limit = Duration::from_secs(args.stage2_limit);
    cfg.stage2.depth_search = match args.depth_search.as_str() {
        "binary" => DepthSearch::Binary,
        "linear" => DepthSearch::Linear,
        other => return Err(param(format!("unknown depth search '{other}'"))),
    };
    cfg.external_solver = args
        .external_solver
        .clone()
        .or_else(|| std::env::var(EXTERNAL_SOLVER_ENV).ok().filter(|s| !s.is_empty()));
    Ok(cfg)
}

fn cmd_compile(args: CompileArgs) -> Result<i32> {
    let code = parse_code(&args.input.code)?;
    let arch = parse_arch(&args.input.arch, &args.input.defects)?;
    let cfg = build_config(&args.solver, args.partition)?;
    let result = compile(&code, &arch, &cfg)?;

    std::fs::create_dir_all(&args.out_dir)?;
    let out = |name: &str| args.out_dir.join(name);
    result.circuit.write_file(&out("circuit.json"))?;
    std::fs::write(out("circuit.stim"), emit_stim_text(&result.circuit))?;
    std::fs::write(
        out("metrics.json"),
        serde_json::to_string_pretty(&result.metrics)?,
    )?;
    for (i, segment) in result.segments.iter().enumerate() {
        std::fs::write(
            out(&format!("mapping.{i}.json")),
            segment.solution.to_json(&segment.sub_code),
        )?;
        segment.sub_code.write_file(&out(&format!("code.{i}.json")))?;
    }
    if result.segments.len() == 1 {
        std::fs::write(
            out("mapping.json"),
            result.segments[0]
                .solution
                .to_json(&result.segments[0].sub_code),
        )?;
    } else {
        std::fs::write(
            out("plan.json"),
            serde_json::to_string_pretty(&result.plan_dump())?,
        )?;
    }

    println!(
        "extra_cnots={} depth={} two_qubit_total={} ancilla_total={} swaps={}",
        result.metrics.extra_cnots,
        result.metrics.depth,
        result.metrics.two_qubit_total,
        result.metrics.ancilla_total,
        result.metrics.swap_count
    );
    println!(
        "stage1_optimal={} stage2_optimal={} overall={}",
        result.segments.iter().all(|s| s.stage1_optimal),
        result.segments.iter().all(|s| s.stage2_optimal),
        if result.optimal { "optimal" } else { "non-optimal" }
    );
    if !result.verify.passed() {
        for f in &result.verify.failures {
            eprintln!("oracle failure [{}]: {}", f.stab, f.reason);
        }
        return Ok(1);
    }
    println!("oracle: PASS ({} stabilizers)", result.verify.checked);
    Ok(0)
}

fn cmd_verify(args: VerifyArgs) -> Result<i32> {
    let circuit = Circuit::read_file(&args.circuit)?;
    let code = StabilizerCode::read_file(&args.code)?;
    let mapping = MappingSolution::read_file(&args.mapping, &code)?;
    let slice = Circuit {
        n: circuit.n,
        gates: circuit
            .gates
            .iter()
            .filter(|g| g.segment == args.segment && g.phase != "route")
            .cloned()
            .collect(),
        metrics: None,
    };
    let report = verify_syndrome_extraction(&slice, &code, &mapping);
    if report.passed() {
        println!("oracle: PASS ({} stabilizers)", report.checked);
        Ok(0)
    } else {
        for f in &report.failures {
            eprintln!("oracle failure [{}]: {}", f.stab, f.reason);
        }
        Ok(1)
    }
}

fn cmd_export(args: ExportArgs) -> Result<i32> {
    let code = parse_code(&args.input.code)?;
    let arch = parse_arch(&args.input.arch, &args.input.defects)?;
    let cfg = build_config(&args.solver, 1)?;
    let (wcnf, legend) = stage1_wcnf(&code, &arch, &cfg.stage1)?;
    esmc_sat::dimacs::write_wcnf(&wcnf, &args.output)?;
    let legend_path = args.output.with_extension("legend");
    std::fs::write(&legend_path, legend)?;
    println!(
        "wrote {} ({} vars, {} hard, {} soft) and {}",
        args.output.display(),
        wcnf.num_vars(),
        wcnf.hard_clauses().len(),
        wcnf.soft_clauses().len(),
        legend_path.display()
    );
    Ok(0)
}
