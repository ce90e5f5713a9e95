use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use specgap_core::{
    bottom_k, certified_gaps,
    embed::embed,
    gaps,
    gen::{planted_partition, ring_block_conductance, ring_of_cliques},
    oracle::{conductance_optima, kmeans_oracle_feasible, kmeans_opt_exact},
    theory::{
        check_lemma7, check_structure, check_theorem1, check_theorem2,
        check_theorem3_contrapositive, lemma4_centers, normalized_indicators, AlphaHat,
        Inequality, LEMMA7_TOL,
    },
    wkmeans::evaluate_partition,
    ClusteringResult, EmbeddingKind, GapSource, Graph, LloydConfig, Matrix, Partition,
};

use crate::io::{self, Sidecar};
use crate::parallel::{best_of_parallel, thread_limit};
use crate::report::{self, GapJson, GraphJson, InequalityJson, RationalJson, Real, Theorem3Json, SCHEMA};

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;
pub const EXIT_VIOLATION: u8 = 4;

/// Spectral partitioning with certified gap bounds.
#[derive(Debug, Parser)]
#[command(name = "specgap", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic graph and its planted partition.
    Generate(GenerateArgs),
    /// Embed, cluster and report the best partition.
    Partition(PartitionArgs),
    /// Check the clustering against the gap bounds.
    Verify(VerifyArgs),
    /// Exact k-way conductance and gaps by enumeration.
    Oracle(OracleArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Family {
    Ring,
    Planted,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KindArg {
    Sm,
    Njw,
}

impl From<KindArg> for EmbeddingKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Sm => EmbeddingKind::Sm,
            KindArg::Njw => EmbeddingKind::Njw,
        }
    }
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    #[arg(long)]
    pub k: usize,
    /// Clique size (ring) or block size (planted).
    #[arg(long)]
    pub size: usize,
    /// Edges between neighbouring cliques (ring).
    #[arg(long, default_value_t = 1)]
    pub bridges: usize,
    #[arg(long)]
    pub p_in: Option<f64>,
    #[arg(long)]
    pub p_out: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct LloydArgs {
    /// Explicit seed list; overrides --restarts.
    #[arg(long, value_delimiter = ',')]
    pub seeds: Vec<u64>,
    /// Use seeds 0..RESTARTS.
    #[arg(long, default_value_t = 10)]
    pub restarts: u64,
    #[arg(long, default_value_t = 100)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub rel_tol: f64,
}

impl LloydArgs {
    fn seeds(&self) -> Vec<u64> {
        if self.seeds.is_empty() {
            (0..self.restarts).collect()
        } else {
            self.seeds.clone()
        }
    }

    fn config(&self) -> LloydConfig {
        LloydConfig {
            max_iters: self.max_iters,
            rel_tol: self.rel_tol,
        }
    }
}

#[derive(Debug, Args)]
pub struct PartitionArgs {
    pub graph: PathBuf,
    #[arg(long)]
    pub k: usize,
    #[arg(long, value_enum, default_value = "sm")]
    pub embedding: KindArg,
    #[command(flatten)]
    pub lloyd: LloydArgs,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the partition as a sidecar file.
    #[arg(long)]
    pub result: Option<PathBuf>,
    #[arg(long)]
    pub eigen_csv: Option<PathBuf>,
    #[arg(long)]
    pub embedding_csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub graph: PathBuf,
    #[arg(long)]
    pub k: usize,
    #[arg(long, value_enum, default_value = "sm")]
    pub embedding: KindArg,
    /// Planted partition sidecar, used as a surrogate optimum.
    #[arg(long)]
    pub planted: Option<PathBuf>,
    /// Certify the gap by exhaustive enumeration.
    #[arg(long)]
    pub oracle: bool,
    /// Check this partition sidecar instead of running Lloyd.
    #[arg(long)]
    pub result: Option<PathBuf>,
    /// Asserted approximation ratio of the clustering; replaces COST/OPT.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[command(flatten)]
    pub lloyd: LloydArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    pub graph: PathBuf,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A command that could not finish, with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Failure {
    fn usage(error: impl Into<anyhow::Error>) -> Self {
        Self {
            code: EXIT_USAGE,
            error: error.into(),
        }
    }
}

impl From<specgap_core::Error> for Failure {
    fn from(e: specgap_core::Error) -> Self {
        use specgap_core::Error::*;
        let code = match e {
            NoConvergence { .. } | DegenerateRow(_) | NonFinite(_) | DegenerateGap => EXIT_NUMERICAL,
            _ => EXIT_USAGE,
        };
        Self {
            code,
            error: e.into(),
        }
    }
}

impl From<io::FormatError> for Failure {
    fn from(e: io::FormatError) -> Self {
        match e {
            io::FormatError::Graph(e) => e.into(),
            e => Self::usage(e),
        }
    }
}

/// What a successful command prints and how it exits.
#[derive(Debug, PartialEq)]
pub struct Outcome {
    pub stdout: String,
    pub code: u8,
}

pub fn run(cli: Cli) -> Result<Outcome, Failure> {
    match cli.command {
        Command::Generate(a) => generate(&a),
        Command::Partition(a) => partition(&a),
        Command::Verify(a) => verify(&a),
        Command::Oracle(a) => oracle(&a),
    }
}

fn load_graph(path: &Path) -> Result<Graph, Failure> {
    let text = io::read_to_string(path).map_err(Failure::usage)?;
    io::parse_edge_list(&text).map_err(|e| {
        let f = Failure::from(e);
        Failure {
            code: f.code,
            error: f.error.context(format!("parsing {}", path.display())),
        }
    })
}

fn load_partition(path: &Path, g: &Graph) -> Result<Partition, Failure> {
    let text = io::read_to_string(path).map_err(Failure::usage)?;
    let side = io::parse_sidecar(&text)?;
    if side.node_count != g.node_count() {
        return Err(Failure::usage(anyhow!(
            "{} covers {} nodes, graph has {}",
            path.display(),
            side.node_count,
            g.node_count()
        )));
    }
    Ok(side.partition()?)
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    io::write_atomic(path, contents.as_bytes())
        .with_context(|| format!("writing {}", path.display()))
        .map_err(Failure::usage)
}

/// Writes the report to `out`, or returns it for stdout.
fn emit(out: Option<&Path>, text: String, code: u8) -> Result<Outcome, Failure> {
    match out {
        Some(path) => {
            write_file(path, &text)?;
            Ok(Outcome {
                stdout: String::new(),
                code,
            })
        }
        None => Ok(Outcome { stdout: text, code }),
    }
}

fn generate(a: &GenerateArgs) -> Result<Outcome, Failure> {
    let (stem, generated, closed_form, params) = match a.family {
        Family::Ring => {
            if a.p_in.is_some() || a.p_out.is_some() {
                return Err(Failure::usage(anyhow!("--p-in/--p-out apply to --family planted")));
            }
            let r = ring_of_cliques(a.k, a.size, a.bridges, a.seed)?;
            (
                format!("ring_k{}_s{}_b{}_seed{}", a.k, a.size, a.bridges, a.seed),
                r,
                Some(ring_block_conductance(a.k, a.size, a.bridges)),
                serde_json::json!({
                    "family": "ring", "k": a.k, "size": a.size,
                    "bridges": a.bridges, "seed": a.seed,
                }),
            )
        }
        Family::Planted => {
            let (Some(p_in), Some(p_out)) = (a.p_in, a.p_out) else {
                return Err(Failure::usage(anyhow!("--family planted needs --p-in and --p-out")));
            };
            let r = planted_partition(a.k, a.size, p_in, p_out, a.seed)?;
            (
                format!("planted_k{}_s{}_seed{}", a.k, a.size, a.seed),
                r,
                None,
                serde_json::json!({
                    "family": "planted", "k": a.k, "size": a.size,
                    "p_in": p_in, "p_out": p_out, "seed": a.seed,
                }),
            )
        }
    };
    fs::create_dir_all(&a.out)
        .with_context(|| format!("creating {}", a.out.display()))
        .map_err(Failure::usage)?;
    let family = if matches!(a.family, Family::Ring) { "ring" } else { "planted" };
    let mut side = Sidecar::new(family, &generated.graph, &generated.planted)?;
    side.closed_form = closed_form.as_ref().map(RationalJson::from);
    side.parameters = Some(params);
    let edges = a.out.join(format!("{stem}.edges"));
    let sidecar = a.out.join(format!("{stem}.json"));
    write_file(&edges, &io::format_edge_list(&generated.graph))?;
    write_file(&sidecar, &report::to_json(&side))?;
    Ok(Outcome {
        stdout: format!("{}\n{}\n", edges.display(), sidecar.display()),
        code: 0,
    })
}

#[derive(Serialize)]
struct ClusteringJson {
    /// `lloyd` or `file`.
    source: &'static str,
    seeds: Vec<u64>,
    best_seed: Option<u64>,
    iterations: usize,
    converged: bool,
    cost: f64,
    blocks: Vec<Vec<usize>>,
    opt: Option<f64>,
    alpha_hat: Real,
    alpha_certified: bool,
}

#[derive(Serialize)]
struct PartitionReport {
    schema: u32,
    command: &'static str,
    graph: GraphJson,
    k: usize,
    embedding: &'static str,
    eigenvalues: Vec<f64>,
    clustering: ClusteringJson,
}

fn graph_json(g: &Graph) -> GraphJson {
    GraphJson {
        nodes: g.node_count(),
        edges: g.edge_count(),
    }
}

fn opt_if_feasible(e: &specgap_core::Embedding, k: usize) -> Result<Option<f64>, Failure> {
    if kmeans_oracle_feasible(e, k) {
        Ok(Some(kmeans_opt_exact(e, k)?))
    } else {
        Ok(None)
    }
}

/// Relabels clusters so blocks are listed by their smallest node.
fn canonical(res: ClusteringResult) -> Result<ClusteringResult, Failure> {
    let order = res.partition.canonical_order();
    let centers = Matrix::from_fn(res.centers.rows(), res.centers.cols(), |j, c| {
        res.centers[(order[j], c)]
    });
    Ok(ClusteringResult {
        partition: res.partition.reordered(&order)?,
        centers,
        ..res
    })
}

fn partition(a: &PartitionArgs) -> Result<Outcome, Failure> {
    let g = load_graph(&a.graph)?;
    let basis = bottom_k(&g, a.k)?;
    let kind = EmbeddingKind::from(a.embedding);
    let e = embed(kind, &basis, &g)?;
    let seeds = a.lloyd.seeds();
    let threads = thread_limit().map_err(Failure::usage)?;
    let res = canonical(best_of_parallel(&e, a.k, &seeds, &a.lloyd.config(), threads)?)?;
    let opt = opt_if_feasible(&e, a.k)?;
    let alpha = AlphaHat::from_costs(res.cost, opt);

    if let Some(path) = &a.eigen_csv {
        write_file(path, &io::format_eigen_csv(&basis))?;
    }
    if let Some(path) = &a.embedding_csv {
        write_file(path, &io::format_embedding_csv(&e))?;
    }
    if let Some(path) = &a.result {
        write_file(path, &report::to_json(&Sidecar::new("lloyd", &g, &res.partition)?))?;
    }
    let rep = PartitionReport {
        schema: SCHEMA,
        command: "partition",
        graph: graph_json(&g),
        k: a.k,
        embedding: kind.as_str(),
        eigenvalues: basis.eigenvalues.clone(),
        clustering: ClusteringJson {
            source: "lloyd",
            seeds,
            best_seed: Some(res.seed),
            iterations: res.iterations,
            converged: res.converged,
            cost: res.cost,
            blocks: io::one_based(&res.partition),
            opt,
            alpha_hat: Real(alpha.value),
            alpha_certified: alpha.certified,
        },
    };
    emit(a.out.as_deref(), report::to_json(&rep), 0)
}

#[derive(Serialize)]
struct StructureJson {
    residual: f64,
    bound_loose: Real,
    bound_simple: Real,
    remainder_norm: f64,
    ball_sum: f64,
    identity_gap: f64,
    gram_gap: f64,
    projection_error: f64,
    lemma7_deviation: f64,
    singular_values: Vec<f64>,
    rank_deficient: bool,
    coeff: Vec<Vec<f64>>,
    orthogonal: Vec<Vec<f64>>,
    inequalities: Vec<InequalityJson>,
}

#[derive(Serialize)]
struct Lemma4Json {
    centers: Vec<Vec<f64>>,
    delta: Vec<Vec<f64>>,
    d_value: f64,
    omega: Real,
    inequalities: Vec<InequalityJson>,
}

#[derive(Serialize)]
struct ClusterJson {
    cluster: usize,
    matched: usize,
    sym_diff: u64,
    volume: u64,
    phi_cluster: RationalJson,
    phi_block: RationalJson,
}

#[derive(Serialize)]
struct Theorem1Json {
    applicable: bool,
    alpha: Real,
    beta: f64,
    sym_diff_coeff: f64,
    envelope_coeff: f64,
    clusters: Vec<ClusterJson>,
    inequalities: Vec<InequalityJson>,
}

#[derive(Serialize)]
struct Theorem2Json {
    cost: f64,
    opt: Option<f64>,
    alpha: Real,
    d_value: f64,
    omega: Real,
    ceiling: Real,
    inequalities: Vec<InequalityJson>,
}

#[derive(Serialize)]
struct SummaryJson {
    inequalities: usize,
    applicable_certified: usize,
    violations: Vec<String>,
    theorem3_violations: Vec<f64>,
    passed: bool,
}

#[derive(Serialize)]
struct VerifyReport {
    schema: u32,
    command: &'static str,
    graph: GraphJson,
    k: usize,
    embedding: &'static str,
    gap: GapJson,
    structure: StructureJson,
    lemma4: Lemma4Json,
    clustering: ClusteringJson,
    theorem1: Theorem1Json,
    theorem2: Theorem2Json,
    theorem3: Vec<Theorem3Json>,
    summary: SummaryJson,
}

/// `ε` values swept for the lower bound on `COST`.
pub fn theorem3_epsilons() -> impl Iterator<Item = f64> {
    (1..=10).map(|i| i as f64 / 20.0)
}

fn verify(a: &VerifyArgs) -> Result<Outcome, Failure> {
    let g = load_graph(&a.graph)?;
    let basis = bottom_k(&g, a.k)?;
    let kind = EmbeddingKind::from(a.embedding);
    let planted = a.planted.as_deref().map(|p| load_partition(p, &g)).transpose()?;
    let gap = match (&planted, a.oracle) {
        (Some(p), false) => gaps(&g, &basis, GapSource::Provided(p))?,
        _ => gaps(&g, &basis, GapSource::Oracle).map_err(|e| {
            let size = matches!(e, specgap_core::Error::SizeGuard { .. });
            let f = Failure::from(e);
            if size && planted.is_none() {
                Failure::usage(f.error.context("pass --planted FILE to use a surrogate partition"))
            } else {
                f
            }
        })?,
    };

    let st = check_structure(&g, &basis, &gap)?;
    let ind = normalized_indicators(&g, &gap.partition)?;
    let lemma7 = check_lemma7(&basis.vectors, &ind.gbar)?;
    let mut st_ineq = st.inequalities.clone();
    st_ineq.push(Inequality::with_tolerance(
        "|Y^T Y - (I - C^T C)|_max <= 0",
        lemma7,
        0.0,
        LEMMA7_TOL,
    ));

    let e = embed(kind, &basis, &g)?;
    let seeds = a.lloyd.seeds();
    let (res, source) = match &a.result {
        Some(path) => (evaluate_partition(&e, &load_partition(path, &g)?)?, "file"),
        None => {
            let threads = thread_limit().map_err(Failure::usage)?;
            let res = best_of_parallel(&e, a.k, &seeds, &a.lloyd.config(), threads)?;
            (canonical(res)?, "lloyd")
        }
    };
    let opt = opt_if_feasible(&e, a.k)?;
    let alpha = match a.alpha {
        Some(x) if x >= 1.0 => AlphaHat {
            value: x,
            certified: true,
        },
        Some(x) => return Err(Failure::usage(anyhow!("--alpha must be at least 1, got {x}"))),
        None => AlphaHat::from_costs(res.cost, opt),
    };

    let l4 = lemma4_centers(&gap, &st.procrustes.orthogonal, &e)?;
    let t1 = check_theorem1(&g, &res.partition, &gap, kind, alpha)?;
    let t2 = check_theorem2(&gap, res.cost, opt, alpha, l4.d_value, l4.omega);
    let mut t3 = Vec::new();
    for eps in theorem3_epsilons() {
        let out = check_theorem3_contrapositive(&g, &res.partition, res.cost, &gap, kind, eps);
        if let Err(err) = &out {
            if !matches!(err, specgap_core::Error::LowerBoundViolation { .. }) {
                return Err(err.clone().into());
            }
        }
        t3.push(Theorem3Json::new(eps, res.cost, &out));
    }

    let sections: [(&str, &[Inequality]); 4] = [
        ("structure", &st_ineq),
        ("lemma4", &l4.inequalities),
        ("theorem1", &t1.inequalities),
        ("theorem2", &t2.inequalities),
    ];
    let all = || sections.iter().flat_map(|(s, list)| list.iter().map(move |i| (*s, i)));
    let violations: Vec<String> = all()
        .filter(|(_, i)| i.violated())
        .map(|(s, i)| format!("{s}: {}", i.name))
        .collect();
    let theorem3_violations: Vec<f64> = t3.iter().filter(|t| t.is_violation()).map(|t| t.epsilon).collect();
    let passed = violations.is_empty() && theorem3_violations.is_empty();
    let summary = SummaryJson {
        inequalities: all().count(),
        applicable_certified: all().filter(|(_, i)| i.applicable && i.certified).count(),
        violations,
        theorem3_violations,
        passed,
    };

    let rep = VerifyReport {
        schema: SCHEMA,
        command: "verify",
        graph: graph_json(&g),
        k: a.k,
        embedding: kind.as_str(),
        gap: GapJson::from(&gap),
        structure: StructureJson {
            residual: st.procrustes.residual,
            bound_loose: Real(st.bound_loose),
            bound_simple: Real(st.bound_simple),
            remainder_norm: st.remainder_norm,
            ball_sum: st.ball_sum,
            identity_gap: st.identity_gap,
            gram_gap: st.gram_gap,
            projection_error: st.projection_error,
            lemma7_deviation: lemma7,
            singular_values: st.procrustes.singular_values.clone(),
            rank_deficient: st.procrustes.rank_deficient,
            coeff: report::rows(&st.procrustes.coeff),
            orthogonal: report::rows(&st.procrustes.orthogonal),
            inequalities: report::inequalities(&st_ineq),
        },
        lemma4: Lemma4Json {
            centers: report::rows(&l4.centers),
            delta: report::rows(&l4.delta),
            d_value: l4.d_value,
            omega: Real(l4.omega),
            inequalities: report::inequalities(&l4.inequalities),
        },
        clustering: ClusteringJson {
            source,
            seeds: if source == "lloyd" { seeds } else { Vec::new() },
            best_seed: (source == "lloyd").then_some(res.seed),
            iterations: res.iterations,
            converged: res.converged,
            cost: res.cost,
            blocks: io::one_based(&res.partition),
            opt,
            alpha_hat: Real(alpha.value),
            alpha_certified: alpha.certified,
        },
        theorem1: Theorem1Json {
            applicable: t1.applicable,
            alpha: Real(t1.alpha.value),
            beta: t1.beta,
            sym_diff_coeff: t1.sym_diff_coeff,
            envelope_coeff: t1.envelope_coeff,
            clusters: t1
                .clusters
                .iter()
                .map(|c| ClusterJson {
                    cluster: c.cluster + 1,
                    matched: c.matched + 1,
                    sym_diff: c.sym_diff,
                    volume: c.volume,
                    phi_cluster: (&c.phi_cluster).into(),
                    phi_block: (&c.phi_block).into(),
                })
                .collect(),
            inequalities: report::inequalities(&t1.inequalities),
        },
        theorem2: Theorem2Json {
            cost: t2.cost,
            opt: t2.opt,
            alpha: Real(t2.alpha.value),
            d_value: t2.d_value,
            omega: Real(t2.omega),
            ceiling: Real(t2.ceiling),
            inequalities: report::inequalities(&t2.inequalities),
        },
        theorem3: t3,
        summary,
    };
    let code = if passed { 0 } else { EXIT_VIOLATION };
    emit(a.out.as_deref(), report::to_json(&rep), code)
}

#[derive(Serialize)]
struct OracleReport {
    schema: u32,
    command: &'static str,
    graph: GraphJson,
    k: usize,
    lambda_next: f64,
    phi_k: RationalJson,
    phi_bar_k: RationalJson,
    upsilon: Real,
    psi: Real,
    mu_max: u64,
    mu_min: u64,
    beta: f64,
    phi_bar_partition: Vec<Vec<usize>>,
    optimal_partitions: Vec<Vec<Vec<usize>>>,
}

fn oracle(a: &OracleArgs) -> Result<Outcome, Failure> {
    let g = load_graph(&a.graph)?;
    let basis = bottom_k(&g, a.k)?;
    let optima = conductance_optima(&g, a.k)?;
    let gap = certified_gaps(&g, &basis, &optima)?;
    let rep = OracleReport {
        schema: SCHEMA,
        command: "oracle",
        graph: graph_json(&g),
        k: a.k,
        lambda_next: gap.lambda_next,
        phi_k: (&optima.phi_k).into(),
        phi_bar_k: (&optima.phi_bar_k).into(),
        upsilon: Real(gap.upsilon),
        psi: Real(gap.psi),
        mu_max: gap.mu_max,
        mu_min: gap.mu_min,
        beta: gap.beta,
        phi_bar_partition: io::one_based(&optima.phi_bar_partition),
        optimal_partitions: optima.optima.iter().map(io::one_based).collect(),
    };
    emit(a.out.as_deref(), report::to_json(&rep), 0)
}
