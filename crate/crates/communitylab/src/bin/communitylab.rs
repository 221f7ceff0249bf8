//! Command-line front end: instance generation, the two gadget
//! reductions, partition certificates, detection, enumeration, counting,
//! max-gap probes, and community verification, each emitting a JSON run
//! manifest with parameter and file digests.
//!
//! Thresholds are exact rationals written as `NUM/DEN` (or a bare
//! integer); floats are rejected so boundary comparisons stay
//! reproducible. The `COMMUNITYLAB_BUDGET` environment variable raises
//! or lowers the work ceiling every enumeration honors.

use clap::{Args, Parser, Subcommand, ValueEnum};
use communitylab::budget::Budget;
use communitylab::counting::{CountingGadget, CountingParams};
use communitylab::decision::{BuildMode, DecisionGadget, DecisionParams};
use communitylab::detector::{detect, DetectorConfig, DetectorMode};
use communitylab::error::Error;
use communitylab::field::PrimeField;
use communitylab::gen::{gen_planted_community, gen_random_3sat, gen_random_biregular_lc};
use communitylab::graph::{
    count_communities, enumerate_communities, is_community, max_gap, profile, CommunityGraph,
    SubsetSelection,
};
use communitylab::labelcover::{reduce_3sat, Cnf3, LabelCoverInstance};
use communitylab::manifest::{frac_json, sfrac_json, RunManifest};
use communitylab::partition::{contiguous_blocks, random_partition};
use communitylab::{frac, Frac};
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "communitylab",
    version,
    about = "Exact (alpha,beta)-community analysis and hardness-gadget construction"
)]
struct Cli {
    /// Worker cap. Accepted for interface stability; current analyses
    /// run single-threaded, and results never depend on this value.
    #[arg(long, global = true, default_value_t = 1, hide_short_help = true)]
    threads: usize,
    /// Manifest path; defaults next to the primary output (or
    /// `<subcommand>.manifest.json` for stdout-only runs).
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a test instance (deterministic per seed)
    #[command(subcommand)]
    Gen(GenCmd),
    /// Build a hardness gadget from a Label Cover instance
    #[command(subcommand)]
    Reduce(ReduceCmd),
    /// Randomized balanced partition of a bi-regular instance, with certificate
    Partition(PartitionArgs),
    /// Tuple-sampling community detector with exact verification
    Detect(DetectArgs),
    /// Enumerate all (alpha,beta)-communities
    Enumerate(EnumerateArgs),
    /// Count labeled (alpha,beta)-communities
    Count(CountArgs),
    /// Largest alpha* - beta* over all subsets, with witness
    Maxgap(MaxgapArgs),
    /// Check one subset against the community predicate
    Verify(VerifyArgs),
    /// Query one group adjacency (explicit file or rebuilt oracle)
    Edge(EdgeArgs),
    /// DIMACS 3CNF -> Label Cover -> gadget -> analysis, in one run
    Pipeline(PipelineArgs),
}

#[derive(Subcommand)]
enum GenCmd {
    /// Uniform 3CNF with distinct variables per clause
    #[command(name = "random-3sat")]
    Random3sat(Gen3satArgs),
    /// Clique planted in an Erdos-Renyi background
    PlantedCommunity(GenPlantedArgs),
    /// Random bi-regular Label Cover with projection constraints
    RandomBiregularLc(GenLcArgs),
}

#[derive(Args)]
struct Gen3satArgs {
    #[arg(long)]
    vars: usize,
    #[arg(long)]
    clauses: usize,
    #[arg(long)]
    seed: u64,
    /// DIMACS output path
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GenPlantedArgs {
    #[arg(long)]
    n: usize,
    /// Background edge probability, exact (e.g. 1/20)
    #[arg(long, value_parser = parse_frac)]
    background: Frac,
    #[arg(long)]
    plant_size: usize,
    #[arg(long)]
    seed: u64,
    /// Graph output path; the plant ids go to `<out>.plant.json`
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GenLcArgs {
    #[arg(long)]
    n_a: usize,
    #[arg(long)]
    n_b: usize,
    #[arg(long)]
    d_a: usize,
    #[arg(long)]
    d_b: usize,
    #[arg(long)]
    sigma_a: u16,
    #[arg(long)]
    sigma_b: u16,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum ReduceCmd {
    /// Parsimonious gadget: communities correspond to satisfying labelings
    Counting(ReduceCountingArgs),
    /// Balanced-subset gadget for gap community detection
    Decision(ReduceDecisionArgs),
}

#[derive(Args)]
struct ReduceCountingArgs {
    #[arg(long)]
    labelcover: PathBuf,
    /// Prime field order p
    #[arg(long)]
    field: u64,
    /// Grid is the first `gridsize` field elements
    #[arg(long)]
    gridsize: usize,
    /// Copies per proper class; epsilon = 1/mult
    #[arg(long)]
    mult: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ReduceDecisionArgs {
    #[arg(long)]
    labelcover: PathBuf,
    /// Prime field order p
    #[arg(long)]
    field: u64,
    /// Grid is the first `gridsize` field elements
    #[arg(long)]
    gridsize: usize,
    /// Row-block elements F_A, comma separated (e.g. 0,1)
    #[arg(long, value_parser = parse_u64_list)]
    fa: std::vec::Vec<u64>,
    /// Column-block elements F_B, comma separated
    #[arg(long, value_parser = parse_u64_list)]
    fb: std::vec::Vec<u64>,
    /// Balanced subset size
    #[arg(long)]
    t: usize,
    /// Required |S intersect F_A|
    #[arg(long = "quotaA")]
    quota_a: usize,
    /// Required |S intersect F_B|
    #[arg(long = "quotaB")]
    quota_b: usize,
    /// Gap parameter recorded with the gadget
    #[arg(long, value_parser = parse_frac, default_value = "1/2")]
    eps: Frac,
    /// Aux kind u_H set size (omit to drop the kind)
    #[arg(long)]
    aux_h: Option<usize>,
    /// Aux kind u_{H_A} set size
    #[arg(long)]
    aux_ha: Option<usize>,
    /// Aux kind u_{H_B} set size
    #[arg(long)]
    aux_hb: Option<usize>,
    /// Aux multiplicity is min(proper^2, this cap)
    #[arg(long, default_value_t = 2)]
    aux_cap: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Explicit)]
    mode: ModeArg,
    /// Graph output (explicit mode only; oracle graphs answer `edge`)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Explicit,
    Oracle,
}

#[derive(Args)]
struct PartitionArgs {
    #[arg(long)]
    labelcover: PathBuf,
    /// Block size on both sides
    #[arg(long)]
    rho: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    retries: u32,
    /// JSON-lines report path (stdout if omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DetectArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, value_parser = parse_frac)]
    alpha: Frac,
    #[arg(long, value_parser = parse_frac)]
    beta: Frac,
    /// Tuple size
    #[arg(long)]
    k: usize,
    /// Candidate threshold (default (alpha+beta)/2)
    #[arg(long, value_parser = parse_frac)]
    theta: Option<Frac>,
    #[arg(long, value_enum, default_value_t = DetectModeArg::Exhaustive)]
    mode: DetectModeArg,
    /// Sampled mode: number of tuples drawn
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    /// Sampled mode: RNG seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    min_size: usize,
    /// JSON-lines output path (stdout if omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum DetectModeArg {
    Exhaustive,
    Sampled,
}

#[derive(Args)]
struct EnumerateArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, value_parser = parse_frac)]
    alpha: Frac,
    #[arg(long, value_parser = parse_frac)]
    beta: Frac,
    #[arg(long, default_value_t = 1)]
    min_size: usize,
    /// JSON-lines output path (stdout if omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CountArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, value_parser = parse_frac)]
    alpha: Frac,
    #[arg(long, value_parser = parse_frac)]
    beta: Frac,
    #[arg(long, default_value_t = 1)]
    min_size: usize,
    /// JSON report path (stdout line only if omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MaxgapArgs {
    #[arg(long)]
    graph: PathBuf,
    /// JSON report path (stdout line only if omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    graph: PathBuf,
    /// JSON file with {"counts": [...]} over the graph's groups
    #[arg(long)]
    community: PathBuf,
    #[arg(long, value_parser = parse_frac)]
    alpha: Frac,
    #[arg(long, value_parser = parse_frac)]
    beta: Frac,
    /// JSON report path (stdout line only if omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EdgeArgs {
    /// First group id
    v1: usize,
    /// Second group id
    v2: usize,
    /// Explicit graph file to query
    #[arg(long, conflicts_with = "labelcover")]
    graph: Option<PathBuf>,
    /// Label Cover file: rebuild the decision oracle and query it
    #[arg(long, requires = "field")]
    labelcover: Option<PathBuf>,
    #[arg(long)]
    field: Option<u64>,
    #[arg(long)]
    gridsize: Option<usize>,
    #[arg(long, value_parser = parse_u64_list)]
    fa: Option<std::vec::Vec<u64>>,
    #[arg(long, value_parser = parse_u64_list)]
    fb: Option<std::vec::Vec<u64>>,
    #[arg(long)]
    t: Option<usize>,
    #[arg(long = "quotaA")]
    quota_a: Option<usize>,
    #[arg(long = "quotaB")]
    quota_b: Option<usize>,
    #[arg(long, value_parser = parse_frac, default_value = "1/2")]
    eps: Frac,
    #[arg(long)]
    aux_h: Option<usize>,
    #[arg(long)]
    aux_ha: Option<usize>,
    #[arg(long)]
    aux_hb: Option<usize>,
    #[arg(long, default_value_t = 2)]
    aux_cap: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReductionArg {
    Counting,
    Decision,
}

#[derive(Clone, Copy, ValueEnum)]
enum AnalysisArg {
    Count,
    Detect,
    Maxgap,
    Verify,
}

#[derive(Args)]
struct PipelineArgs {
    /// DIMACS 3CNF input
    #[arg(long)]
    cnf: PathBuf,
    #[arg(long, value_enum)]
    reduction: ReductionArg,
    #[arg(long, value_enum)]
    analysis: AnalysisArg,
    /// Output directory for pipeline.cgraph and pipeline.report.json
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Field order (default: smallest prime the reduction admits)
    #[arg(long)]
    field: Option<u64>,
    /// Grid size (default: smallest the reduction admits)
    #[arg(long)]
    gridsize: Option<usize>,
    /// Counting reduction: copies per class
    #[arg(long, default_value_t = 2)]
    mult: usize,
    /// Decision reduction parameters
    #[arg(long, value_parser = parse_u64_list)]
    fa: Option<std::vec::Vec<u64>>,
    #[arg(long, value_parser = parse_u64_list)]
    fb: Option<std::vec::Vec<u64>>,
    #[arg(long)]
    t: Option<usize>,
    #[arg(long = "quotaA", default_value_t = 1)]
    quota_a: usize,
    #[arg(long = "quotaB", default_value_t = 1)]
    quota_b: usize,
    #[arg(long, value_parser = parse_frac, default_value = "1/2")]
    eps: Frac,
    #[arg(long)]
    aux_h: Option<usize>,
    #[arg(long)]
    aux_ha: Option<usize>,
    #[arg(long)]
    aux_hb: Option<usize>,
    #[arg(long, default_value_t = 2)]
    aux_cap: usize,
    /// Analysis thresholds (counting defaults: alpha 1, beta 1/mult)
    #[arg(long, value_parser = parse_frac)]
    alpha: Option<Frac>,
    #[arg(long, value_parser = parse_frac)]
    beta: Option<Frac>,
    #[arg(long, default_value_t = 1)]
    min_size: usize,
    /// Detect analysis: tuple size
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, value_parser = parse_frac)]
    theta: Option<Frac>,
    #[arg(long, value_enum, default_value_t = DetectModeArg::Exhaustive)]
    mode: DetectModeArg,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Verify analysis: community file
    #[arg(long)]
    community: Option<PathBuf>,
}

fn parse_frac(s: &str) -> Result<Frac, String> {
    if s.contains('.') {
        return Err(format!(
            "'{}' looks like a float; thresholds are exact rationals like 3/10",
            s
        ));
    }
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let num: u64 = num.trim().parse().map_err(|e| format!("numerator: {}", e))?;
    let den: u64 = den.trim().parse().map_err(|e| format!("denominator: {}", e))?;
    if den == 0 {
        return Err("denominator must be nonzero".into());
    }
    Ok(Frac::new(num, den))
}

fn parse_u64_list(s: &str) -> Result<Vec<u64>, String> {
    s.split(',')
        .map(|part| part.trim().parse::<u64>().map_err(|e| e.to_string()))
        .collect()
}

/// Files written so far, removed wholesale if a later stage fails.
#[derive(Default)]
struct Outputs {
    files: Vec<PathBuf>,
}

impl Outputs {
    fn write(&mut self, path: &Path, content: &str) -> Result<(), Error> {
        if let Some(dir) = path.parent() {
            if !dir.as_os_str().is_empty() {
                std::fs::create_dir_all(dir)?;
            }
        }
        std::fs::write(path, content)?;
        self.files.push(path.to_path_buf());
        Ok(())
    }

    fn cleanup(&self) {
        for f in &self.files {
            let _ = std::fs::remove_file(f);
        }
    }
}

fn stage<T>(name: &'static str, r: Result<T, Error>) -> Result<T, Error> {
    r.map_err(|e| Error::Stage {
        stage: name,
        source: Box::new(e),
    })
}

/// Read with the offending path in the error, not just the OS message.
fn read_file(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path)
        .map_err(|e| std::io::Error::new(e.kind(), format!("{}: {}", path.display(), e)).into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let budget = Budget::from_env();
    let mut outputs = Outputs::default();
    let mut manifest = RunManifest::new(subcommand_name(&cli.cmd));
    let default_manifest = default_manifest_path(&cli.cmd);
    let manifest_path = cli.manifest.clone().unwrap_or(default_manifest);
    match run(&cli, budget, &mut manifest, &mut outputs) {
        Ok(summary) => {
            for f in &outputs.files {
                if let Err(e) = manifest.record_output(f) {
                    eprintln!("error: digesting {}: {}", f.display(), e);
                    return ExitCode::FAILURE;
                }
            }
            if let Err(e) = manifest.write(&manifest_path, summary) {
                eprintln!("error: writing manifest: {}", e);
                return ExitCode::FAILURE;
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            outputs.cleanup();
            eprintln!("error: {}", e);
            ExitCode::FAILURE
        }
    }
}

fn subcommand_name(cmd: &Cmd) -> &'static str {
    match cmd {
        Cmd::Gen(GenCmd::Random3sat(_)) => "gen random-3sat",
        Cmd::Gen(GenCmd::PlantedCommunity(_)) => "gen planted-community",
        Cmd::Gen(GenCmd::RandomBiregularLc(_)) => "gen random-biregular-lc",
        Cmd::Reduce(ReduceCmd::Counting(_)) => "reduce counting",
        Cmd::Reduce(ReduceCmd::Decision(_)) => "reduce decision",
        Cmd::Partition(_) => "partition",
        Cmd::Detect(_) => "detect",
        Cmd::Enumerate(_) => "enumerate",
        Cmd::Count(_) => "count",
        Cmd::Maxgap(_) => "maxgap",
        Cmd::Verify(_) => "verify",
        Cmd::Edge(_) => "edge",
        Cmd::Pipeline(_) => "pipeline",
    }
}

fn default_manifest_path(cmd: &Cmd) -> PathBuf {
    let beside = |out: &Path| -> PathBuf {
        let mut s = out.as_os_str().to_owned();
        s.push(".manifest.json");
        PathBuf::from(s)
    };
    match cmd {
        Cmd::Gen(GenCmd::Random3sat(a)) => beside(&a.out),
        Cmd::Gen(GenCmd::PlantedCommunity(a)) => beside(&a.out),
        Cmd::Gen(GenCmd::RandomBiregularLc(a)) => beside(&a.out),
        Cmd::Reduce(ReduceCmd::Counting(a)) => beside(&a.out),
        Cmd::Reduce(ReduceCmd::Decision(a)) => a
            .out
            .as_deref()
            .map(beside)
            .unwrap_or_else(|| PathBuf::from("reduce-decision.manifest.json")),
        Cmd::Partition(a) => a
            .out
            .as_deref()
            .map(beside)
            .unwrap_or_else(|| PathBuf::from("partition.manifest.json")),
        Cmd::Detect(a) => a
            .out
            .as_deref()
            .map(beside)
            .unwrap_or_else(|| PathBuf::from("detect.manifest.json")),
        Cmd::Enumerate(a) => a
            .out
            .as_deref()
            .map(beside)
            .unwrap_or_else(|| PathBuf::from("enumerate.manifest.json")),
        Cmd::Count(a) => a
            .out
            .as_deref()
            .map(beside)
            .unwrap_or_else(|| PathBuf::from("count.manifest.json")),
        Cmd::Maxgap(a) => a
            .out
            .as_deref()
            .map(beside)
            .unwrap_or_else(|| PathBuf::from("maxgap.manifest.json")),
        Cmd::Verify(a) => a
            .out
            .as_deref()
            .map(beside)
            .unwrap_or_else(|| PathBuf::from("verify.manifest.json")),
        Cmd::Edge(_) => PathBuf::from("edge.manifest.json"),
        Cmd::Pipeline(a) => a.out_dir.join("pipeline.manifest.json"),
    }
}

fn run(
    cli: &Cli,
    budget: Budget,
    manifest: &mut RunManifest,
    outputs: &mut Outputs,
) -> Result<Value, Error> {
    match &cli.cmd {
        Cmd::Gen(g) => run_gen(g, manifest, outputs),
        Cmd::Reduce(r) => run_reduce(r, budget, manifest, outputs),
        Cmd::Partition(a) => run_partition(a, manifest, outputs),
        Cmd::Detect(a) => run_detect(a, budget, manifest, outputs),
        Cmd::Enumerate(a) => run_enumerate(a, budget, manifest, outputs),
        Cmd::Count(a) => run_count(a, budget, manifest, outputs),
        Cmd::Maxgap(a) => run_maxgap(a, budget, manifest, outputs),
        Cmd::Verify(a) => run_verify(a, manifest, outputs),
        Cmd::Edge(a) => run_edge(a, budget, manifest),
        Cmd::Pipeline(a) => run_pipeline(a, budget, manifest, outputs),
    }
}

fn load_graph(path: &Path, manifest: &mut RunManifest) -> Result<CommunityGraph, Error> {
    let text = read_file(path)?;
    manifest.record_input(path)?;
    CommunityGraph::from_text(&text)
}

fn load_labelcover(
    path: &Path,
    manifest: &mut RunManifest,
) -> Result<LabelCoverInstance, Error> {
    let text = read_file(path)?;
    manifest.record_input(path)?;
    LabelCoverInstance::from_text(&text)
}

fn load_selection(path: &Path, manifest: &mut RunManifest) -> Result<SubsetSelection, Error> {
    let text = read_file(path)?;
    manifest.record_input(path)?;
    let sel: SubsetSelection = serde_json::from_str(&text)?;
    Ok(sel)
}

/// Write JSON lines either to a file (tracked) or stdout.
fn emit_lines(
    out: &Option<PathBuf>,
    lines: &[Value],
    outputs: &mut Outputs,
) -> Result<(), Error> {
    let mut text = String::new();
    for line in lines {
        text.push_str(&line.to_string());
        text.push('\n');
    }
    match out {
        Some(path) => outputs.write(path, &text),
        None => {
            print!("{}", text);
            Ok(())
        }
    }
}

fn community_record(graph: &CommunityGraph, sel: &SubsetSelection) -> Result<Value, Error> {
    let p = profile(graph, sel)?;
    Ok(json!({
        "counts": sel.counts,
        "size": p.size,
        "alpha_star": frac_json(p.alpha_star),
        "beta_star": frac_json(p.beta_star),
    }))
}

fn run_gen(
    cmd: &GenCmd,
    manifest: &mut RunManifest,
    outputs: &mut Outputs,
) -> Result<Value, Error> {
    match cmd {
        GenCmd::Random3sat(a) => {
            manifest.set_seed(a.seed);
            manifest.param("vars", a.vars);
            manifest.param("clauses", a.clauses);
            let f = gen_random_3sat(a.vars, a.clauses, a.seed)?;
            outputs.write(&a.out, &f.to_dimacs())?;
            println!("wrote {}", a.out.display());
            Ok(json!({"vars": a.vars, "clauses": a.clauses, "path": a.out.display().to_string()}))
        }
        GenCmd::PlantedCommunity(a) => {
            manifest.set_seed(a.seed);
            manifest.param("n", a.n);
            manifest.param("background", frac_json(a.background));
            manifest.param("plant_size", a.plant_size);
            let inst = gen_planted_community(a.n, a.background, a.plant_size, a.seed)?;
            outputs.write(&a.out, &inst.graph.to_text()?)?;
            let mut sidecar = a.out.as_os_str().to_owned();
            sidecar.push(".plant.json");
            let sidecar = PathBuf::from(sidecar);
            outputs.write(&sidecar, &format!("{:#}\n", json!({"plant": inst.plant})))?;
            println!(
                "wrote {} (plant of {} in {})",
                a.out.display(),
                a.plant_size,
                sidecar.display()
            );
            Ok(json!({
                "n": a.n,
                "plant_size": a.plant_size,
                "graph": a.out.display().to_string(),
                "sidecar": sidecar.display().to_string(),
            }))
        }
        GenCmd::RandomBiregularLc(a) => {
            manifest.set_seed(a.seed);
            manifest.param("n_a", a.n_a);
            manifest.param("n_b", a.n_b);
            manifest.param("d_a", a.d_a);
            manifest.param("d_b", a.d_b);
            manifest.param("sigma_a", a.sigma_a);
            manifest.param("sigma_b", a.sigma_b);
            let inst =
                gen_random_biregular_lc(a.n_a, a.n_b, a.d_a, a.d_b, a.sigma_a, a.sigma_b, a.seed)?;
            outputs.write(&a.out, &inst.to_text()?)?;
            println!("wrote {}", a.out.display());
            Ok(json!({
                "edges": inst.edges.len(),
                "regularity": inst.regularity.map(|(da, db)| vec![da, db]),
                "path": a.out.display().to_string(),
            }))
        }
    }
}

fn run_reduce(
    cmd: &ReduceCmd,
    budget: Budget,
    manifest: &mut RunManifest,
    outputs: &mut Outputs,
) -> Result<Value, Error> {
    match cmd {
        ReduceCmd::Counting(a) => {
            let inst = load_labelcover(&a.labelcover, manifest)?;
            manifest.param("field", a.field);
            manifest.param("gridsize", a.gridsize);
            manifest.param("mult", a.mult);
            let field = PrimeField::new(a.field)?;
            let grid: Vec<u64> = (0..a.gridsize as u64).collect();
            let params = CountingParams::new(field, grid, a.mult)?;
            let eps = params.epsilon();
            let gadget = CountingGadget::build(&inst, params, budget)?;
            let summary = json!({
                "classes": gadget.num_classes(),
                "proper_groups": gadget.num_proper_groups(),
                "groups": gadget.graph().num_groups(),
                "vertices": gadget.graph().num_vertices(),
                "epsilon": frac_json(eps),
            });
            outputs.write(&a.out, &gadget.graph().to_text()?)?;
            println!(
                "wrote {} ({} groups, epsilon {})",
                a.out.display(),
                gadget.graph().num_groups(),
                eps
            );
            Ok(summary)
        }
        ReduceCmd::Decision(a) => {
            let inst = load_labelcover(&a.labelcover, manifest)?;
            manifest.param("field", a.field);
            manifest.param("gridsize", a.gridsize);
            manifest.param("fa", a.fa.clone());
            manifest.param("fb", a.fb.clone());
            manifest.param("t", a.t);
            manifest.param("quotaA", a.quota_a);
            manifest.param("quotaB", a.quota_b);
            manifest.param("eps", frac_json(a.eps));
            manifest.param("aux_cap", a.aux_cap);
            let params = DecisionParams {
                field: PrimeField::new(a.field)?,
                grid: (0..a.gridsize as u64).collect(),
                f_a: a.fa.clone(),
                f_b: a.fb.clone(),
                t: a.t,
                quota_a: a.quota_a,
                quota_b: a.quota_b,
                eps: a.eps,
                aux_h: a.aux_h,
                aux_h_a: a.aux_ha,
                aux_h_b: a.aux_hb,
                aux_cap: a.aux_cap,
            };
            let mode = match a.mode {
                ModeArg::Explicit => BuildMode::Explicit,
                ModeArg::Oracle => BuildMode::Oracle,
            };
            manifest.param(
                "mode",
                match a.mode {
                    ModeArg::Explicit => "explicit",
                    ModeArg::Oracle => "oracle",
                },
            );
            let gadget = DecisionGadget::build(&inst, params, mode, budget)?;
            let summary = json!({
                "balanced_subsets": gadget.balanced_subsets().len(),
                "families_per_subset": gadget.families_per_subset().to_string(),
                "proper": gadget.proper_count(),
                "aux_groups": gadget.aux_specs().len(),
                "m_aux": gadget.m_aux(),
            });
            match (&a.out, mode) {
                (Some(path), BuildMode::Explicit) => {
                    outputs.write(path, &gadget.graph().to_text()?)?;
                    println!(
                        "wrote {} ({} proper + {} aux groups)",
                        path.display(),
                        gadget.proper_count(),
                        gadget.aux_specs().len()
                    );
                }
                (Some(_), BuildMode::Oracle) => {
                    return Err(Error::Unserializable(
                        "oracle-mode graphs have no file form; query with `edge` or use --mode explicit"
                            .into(),
                    ));
                }
                (None, _) => {
                    println!(
                        "built {} proper + {} aux groups (no --out requested)",
                        gadget.proper_count(),
                        gadget.aux_specs().len()
                    );
                }
            }
            Ok(summary)
        }
    }
}

fn run_partition(
    a: &PartitionArgs,
    manifest: &mut RunManifest,
    outputs: &mut Outputs,
) -> Result<Value, Error> {
    let inst = load_labelcover(&a.labelcover, manifest)?;
    manifest.set_seed(a.seed);
    manifest.param("rho", a.rho);
    manifest.param("retries", a.retries);
    let t_blocks = contiguous_blocks(inst.n_b, a.rho)?;
    let (partition, report) = random_partition(&inst, &t_blocks, a.rho, a.seed, a.retries)?;
    let mut lines = vec![json!({
        "type": "blocks",
        "rho": report.rho,
        "seed": partition.seed,
        "block_sizes": report.block_sizes,
        "sizes_ok": report.sizes_ok,
    })];
    for pair in &report.pairs {
        lines.push(json!({
            "type": "pair",
            "i": pair.i,
            "j": pair.j,
            "count": pair.count,
            "target": frac_json(pair.target),
            "ok": pair.ok,
        }));
    }
    lines.push(json!({
        "type": "summary",
        "pass": report.pass,
        "note": report.note,
    }));
    emit_lines(&a.out, &lines, outputs)?;
    if a.out.is_some() {
        println!(
            "partition {} ({})",
            if report.pass { "passed" } else { "failed" },
            report.summary()
        );
    }
    Ok(json!({
        "pass": report.pass,
        "pairs": report.pairs.len(),
        "winning_seed": partition.seed,
    }))
}

fn run_detect(
    a: &DetectArgs,
    budget: Budget,
    manifest: &mut RunManifest,
    outputs: &mut Outputs,
) -> Result<Value, Error> {
    let graph = load_graph(&a.graph, manifest)?;
    manifest.param("alpha", frac_json(a.alpha));
    manifest.param("beta", frac_json(a.beta));
    manifest.param("k", a.k);
    manifest.param("min_size", a.min_size);
    let mode = match a.mode {
        DetectModeArg::Exhaustive => DetectorMode::Exhaustive,
        DetectModeArg::Sampled => {
            manifest.set_seed(a.seed);
            manifest.param("trials", a.trials);
            DetectorMode::Sampled {
                trials: a.trials,
                seed: a.seed,
            }
        }
    };
    let mut cfg = DetectorConfig::new(a.k, mode);
    cfg.theta = a.theta;
    cfg.min_size = a.min_size;
    let found = detect(&graph, a.alpha, a.beta, &cfg, budget)?;
    let mut lines = Vec::with_capacity(found.len());
    for c in &found {
        lines.push(json!({
            "counts": c.selection.counts,
            "size": c.profile.size,
            "alpha_star": frac_json(c.profile.alpha_star),
            "beta_star": frac_json(c.profile.beta_star),
        }));
    }
    emit_lines(&a.out, &lines, outputs)?;
    if a.out.is_some() {
        println!("found {} communities", found.len());
    }
    Ok(json!({"found": found.len()}))
}

fn run_enumerate(
    a: &EnumerateArgs,
    budget: Budget,
    manifest: &mut RunManifest,
    outputs: &mut Outputs,
) -> Result<Value, Error> {
    let graph = load_graph(&a.graph, manifest)?;
    manifest.param("alpha", frac_json(a.alpha));
    manifest.param("beta", frac_json(a.beta));
    manifest.param("min_size", a.min_size);
    let found = enumerate_communities(&graph, a.alpha, a.beta, a.min_size, budget)?;
    let mut lines = Vec::with_capacity(found.len());
    for sel in &found {
        lines.push(community_record(&graph, sel)?);
    }
    emit_lines(&a.out, &lines, outputs)?;
    if a.out.is_some() {
        println!("found {} communities", found.len());
    }
    Ok(json!({"found": found.len()}))
}

fn count_json(count: u128) -> Value {
    u64::try_from(count)
        .map(Value::from)
        .unwrap_or_else(|_| Value::from(count.to_string()))
}

fn run_count(
    a: &CountArgs,
    budget: Budget,
    manifest: &mut RunManifest,
    outputs: &mut Outputs,
) -> Result<Value, Error> {
    let graph = load_graph(&a.graph, manifest)?;
    manifest.param("alpha", frac_json(a.alpha));
    manifest.param("beta", frac_json(a.beta));
    manifest.param("min_size", a.min_size);
    let count = count_communities(&graph, a.alpha, a.beta, a.min_size, budget)?;
    let report = json!({
        "alpha": frac_json(a.alpha),
        "beta": frac_json(a.beta),
        "min_size": a.min_size,
        "count": count_json(count),
    });
    if let Some(path) = &a.out {
        outputs.write(path, &format!("{:#}\n", report))?;
    }
    println!("count = {}", count);
    Ok(report)
}

fn run_maxgap(
    a: &MaxgapArgs,
    budget: Budget,
    manifest: &mut RunManifest,
    outputs: &mut Outputs,
) -> Result<Value, Error> {
    let graph = load_graph(&a.graph, manifest)?;
    let (gap, witness) = max_gap(&graph, budget)?;
    let p = profile(&graph, &witness)?;
    let report = json!({
        "max_gap": sfrac_json(gap),
        "witness": {
            "counts": witness.counts,
            "size": p.size,
            "alpha_star": frac_json(p.alpha_star),
            "beta_star": frac_json(p.beta_star),
        },
    });
    if let Some(path) = &a.out {
        outputs.write(path, &format!("{:#}\n", report))?;
    }
    println!("max gap = {} (witness size {})", gap, p.size);
    Ok(report)
}

fn run_verify(
    a: &VerifyArgs,
    manifest: &mut RunManifest,
    outputs: &mut Outputs,
) -> Result<Value, Error> {
    let graph = load_graph(&a.graph, manifest)?;
    let sel = load_selection(&a.community, manifest)?;
    manifest.param("alpha", frac_json(a.alpha));
    manifest.param("beta", frac_json(a.beta));
    let pass = is_community(&graph, &sel, a.alpha, a.beta)?;
    let p = profile(&graph, &sel)?;
    let report = json!({
        "pass": pass,
        "alpha": frac_json(a.alpha),
        "beta": frac_json(a.beta),
        "size": p.size,
        "alpha_star": frac_json(p.alpha_star),
        "beta_star": frac_json(p.beta_star),
    });
    if let Some(path) = &a.out {
        outputs.write(path, &format!("{:#}\n", report))?;
    }
    println!(
        "{}: alpha* = {}, beta* = {}, size {}",
        if pass { "PASS" } else { "FAIL" },
        p.alpha_star,
        p.beta_star,
        p.size
    );
    Ok(report)
}

fn run_edge(a: &EdgeArgs, budget: Budget, manifest: &mut RunManifest) -> Result<Value, Error> {
    manifest.param("v1", a.v1);
    manifest.param("v2", a.v2);
    let adjacent = match (&a.graph, &a.labelcover) {
        (Some(path), None) => {
            let graph = load_graph(path, manifest)?;
            if a.v1 >= graph.num_groups() || a.v2 >= graph.num_groups() {
                return Err(Error::InvalidParameter(format!(
                    "group ids must be below {}",
                    graph.num_groups()
                )));
            }
            graph.group_adjacent(a.v1, a.v2)
        }
        (None, Some(path)) => {
            let inst = load_labelcover(path, manifest)?;
            let missing = |flag: &str| {
                Error::InvalidParameter(format!("--{} is required with --labelcover", flag))
            };
            let params = DecisionParams {
                field: PrimeField::new(a.field.ok_or_else(|| missing("field"))?)?,
                grid: (0..a.gridsize.ok_or_else(|| missing("gridsize"))? as u64).collect(),
                f_a: a.fa.clone().ok_or_else(|| missing("fa"))?,
                f_b: a.fb.clone().ok_or_else(|| missing("fb"))?,
                t: a.t.ok_or_else(|| missing("t"))?,
                quota_a: a.quota_a.ok_or_else(|| missing("quotaA"))?,
                quota_b: a.quota_b.ok_or_else(|| missing("quotaB"))?,
                eps: a.eps,
                aux_h: a.aux_h,
                aux_h_a: a.aux_ha,
                aux_h_b: a.aux_hb,
                aux_cap: a.aux_cap,
            };
            let gadget = DecisionGadget::build(&inst, params, BuildMode::Oracle, budget)?;
            let n = gadget.graph().num_groups();
            if a.v1 >= n || a.v2 >= n {
                return Err(Error::InvalidParameter(format!(
                    "group ids must be below {}",
                    n
                )));
            }
            gadget.graph().group_adjacent(a.v1, a.v2)
        }
        _ => {
            return Err(Error::InvalidParameter(
                "pass exactly one of --graph or --labelcover".into(),
            ))
        }
    };
    println!("adjacent: {}", adjacent);
    Ok(json!({"v1": a.v1, "v2": a.v2, "adjacent": adjacent}))
}

/// Smallest prime at or above `min`.
fn next_prime(mut min: u64) -> u64 {
    min = min.max(2);
    loop {
        if PrimeField::new(min).is_ok() {
            return min;
        }
        min += 1;
    }
}

fn run_pipeline(
    a: &PipelineArgs,
    budget: Budget,
    manifest: &mut RunManifest,
    outputs: &mut Outputs,
) -> Result<Value, Error> {
    let text = read_file(&a.cnf)?;
    manifest.record_input(&a.cnf)?;
    // The intermediate Label Cover instance stays in memory: slot-match
    // constraints have no file form, only the built graph does.
    let cnf = stage("parse", Cnf3::parse_dimacs(&text))?;
    let inst = reduce_3sat(&cnf);

    // Reduction defaults are the smallest parameters the gadget admits.
    let (graph, default_alpha, default_beta, reduction_meta) = match a.reduction {
        ReductionArg::Counting => {
            let gridsize = a
                .gridsize
                .unwrap_or_else(|| (2..).find(|f| f * f >= inst.n_a + inst.n_b).unwrap());
            let min_field = (inst.sigma_a as u64)
                .max(inst.sigma_b as u64)
                .max(gridsize as u64)
                .max(((gridsize - 1) * a.mult + 1) as u64);
            let field_order = a.field.unwrap_or_else(|| next_prime(min_field));
            manifest.param("field", field_order);
            manifest.param("gridsize", gridsize);
            manifest.param("mult", a.mult);
            let field = PrimeField::new(field_order)?;
            let params = stage(
                "build",
                CountingParams::new(field, (0..gridsize as u64).collect(), a.mult),
            )?;
            let eps = params.epsilon();
            let gadget = stage("build", CountingGadget::build(&inst, params, budget))?;
            let meta = json!({
                "reduction": "counting",
                "field": field_order,
                "gridsize": gridsize,
                "mult": a.mult,
                "classes": gadget.num_classes(),
                "groups": gadget.graph().num_groups(),
                "epsilon": frac_json(eps),
            });
            (gadget.into_graph(), Some(frac(1, 1)), Some(eps), meta)
        }
        ReductionArg::Decision => {
            let f_a = a.fa.clone().unwrap_or_else(|| vec![0]);
            let f_b = a.fb.clone().unwrap_or_else(|| vec![1]);
            let rho_a = if inst.n_a > 0 { inst.n_a.div_ceil(f_a.len()) } else { 0 };
            let rho_b = if inst.n_b > 0 { inst.n_b.div_ceil(f_b.len()) } else { 0 };
            let gridsize = a.gridsize.unwrap_or_else(|| rho_a.max(rho_b).max(2));
            let t = a.t.unwrap_or(2);
            let pair_cap = inst.sigma_a as u64 * inst.sigma_b as u64;
            let field_order = a
                .field
                .unwrap_or_else(|| next_prime(pair_cap.max(gridsize as u64)));
            manifest.param("field", field_order);
            manifest.param("gridsize", gridsize);
            manifest.param("t", t);
            manifest.param("quotaA", a.quota_a);
            manifest.param("quotaB", a.quota_b);
            let params = DecisionParams {
                field: PrimeField::new(field_order)?,
                grid: (0..gridsize as u64).collect(),
                f_a,
                f_b,
                t,
                quota_a: a.quota_a,
                quota_b: a.quota_b,
                eps: a.eps,
                aux_h: a.aux_h,
                aux_h_a: a.aux_ha,
                aux_h_b: a.aux_hb,
                aux_cap: a.aux_cap,
            };
            let gadget = stage(
                "build",
                DecisionGadget::build(&inst, params, BuildMode::Explicit, budget),
            )?;
            let meta = json!({
                "reduction": "decision",
                "field": field_order,
                "gridsize": gridsize,
                "t": t,
                "proper": gadget.proper_count(),
                "aux_groups": gadget.aux_specs().len(),
                "m_aux": gadget.m_aux(),
            });
            (gadget.into_graph(), None, None, meta)
        }
    };
    let graph_path = a.out_dir.join("pipeline.cgraph");
    outputs.write(&graph_path, &graph.to_text()?)?;

    let need = |v: Option<Frac>, flag: &str| {
        v.ok_or_else(|| {
            Error::InvalidParameter(format!(
                "analysis: --{} is required for this reduction/analysis combination",
                flag
            ))
        })
    };
    let analysis = match a.analysis {
        AnalysisArg::Count => {
            let alpha = need(a.alpha.or(default_alpha), "alpha")?;
            let beta = need(a.beta.or(default_beta), "beta")?;
            let count = stage(
                "analysis",
                count_communities(&graph, alpha, beta, a.min_size, budget),
            )?;
            println!("count = {}", count);
            json!({
                "analysis": "count",
                "alpha": frac_json(alpha),
                "beta": frac_json(beta),
                "min_size": a.min_size,
                "count": count_json(count),
            })
        }
        AnalysisArg::Detect => {
            let alpha = need(a.alpha.or(default_alpha), "alpha")?;
            let beta = need(a.beta.or(default_beta), "beta")?;
            let k = a.k.ok_or_else(|| {
                Error::InvalidParameter("analysis: --k is required for detect".into())
            })?;
            let mode = match a.mode {
                DetectModeArg::Exhaustive => DetectorMode::Exhaustive,
                DetectModeArg::Sampled => DetectorMode::Sampled {
                    trials: a.trials,
                    seed: a.seed,
                },
            };
            let mut cfg = DetectorConfig::new(k, mode);
            cfg.theta = a.theta;
            cfg.min_size = a.min_size;
            let found = stage("analysis", detect(&graph, alpha, beta, &cfg, budget))?;
            println!("found {} communities", found.len());
            json!({
                "analysis": "detect",
                "alpha": frac_json(alpha),
                "beta": frac_json(beta),
                "k": k,
                "found": found.len(),
                "communities": found
                    .iter()
                    .map(|c| json!({
                        "counts": c.selection.counts,
                        "size": c.profile.size,
                        "alpha_star": frac_json(c.profile.alpha_star),
                        "beta_star": frac_json(c.profile.beta_star),
                    }))
                    .collect::<Vec<_>>(),
            })
        }
        AnalysisArg::Maxgap => {
            let (gap, witness) = stage("analysis", max_gap(&graph, budget))?;
            let p = profile(&graph, &witness)?;
            println!("max gap = {} (witness size {})", gap, p.size);
            json!({
                "analysis": "maxgap",
                "max_gap": sfrac_json(gap),
                "witness": {
                    "counts": witness.counts,
                    "size": p.size,
                    "alpha_star": frac_json(p.alpha_star),
                    "beta_star": frac_json(p.beta_star),
                },
            })
        }
        AnalysisArg::Verify => {
            let community = a.community.as_ref().ok_or_else(|| {
                Error::InvalidParameter("analysis: --community is required for verify".into())
            })?;
            let sel = load_selection(community, manifest)?;
            let alpha = need(a.alpha.or(default_alpha), "alpha")?;
            let beta = need(a.beta.or(default_beta), "beta")?;
            let pass = stage("analysis", is_community(&graph, &sel, alpha, beta))?;
            let p = profile(&graph, &sel)?;
            println!(
                "{}: alpha* = {}, beta* = {}, size {}",
                if pass { "PASS" } else { "FAIL" },
                p.alpha_star,
                p.beta_star,
                p.size
            );
            json!({
                "analysis": "verify",
                "pass": pass,
                "alpha": frac_json(alpha),
                "beta": frac_json(beta),
                "size": p.size,
                "alpha_star": frac_json(p.alpha_star),
                "beta_star": frac_json(p.beta_star),
            })
        }
    };
    let report = json!({
        "cnf": a.cnf.display().to_string(),
        "labelcover": {
            "n_a": inst.n_a,
            "n_b": inst.n_b,
            "sigma_a": inst.sigma_a,
            "sigma_b": inst.sigma_b,
            "edges": inst.edges.len(),
        },
        "reduction": reduction_meta,
        "result": analysis,
    });
    let report_path = a.out_dir.join("pipeline.report.json");
    outputs.write(&report_path, &format!("{:#}\n", report))?;
    Ok(report)
}
