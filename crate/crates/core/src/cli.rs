//! Command-line front end.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::det::{Mode, MotifSet};
use crate::error::{Error, Result};
use crate::global::{
    fg_decompose, wg_decompose, ExactOracle, GlobalOptions, MonteCarlo, TailEstimator,
};
use crate::graph::{
    induced_edge_subgraph, load_edge_list, ProbabilisticGraph, SubgraphView, VertexId,
};
use crate::local::{compute_scores, decompose, Backend, Nucleus, NucleusScores};
use crate::metrics::{pcc, pd};
use crate::motif::{build_index, Triangle, TriangleIndex};
use crate::oracle::{exact_tail_table, OracleBudget, DEFAULT_MAX_EDGES};
use crate::sampling::{required_samples, SamplingConfig, DEFAULT_MIN_SAMPLES};
use crate::support::{dp_distribution, Hyperparams};

#[derive(Debug, Parser)]
#[command(
    name = "pnucleus",
    version,
    about = "Nucleus decomposition of probabilistic graphs"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Local nucleus scores and nuclei for every k.
    Local(LocalArgs),
    /// Fully global nuclei.
    Global(GlobalArgs),
    /// Weakly-global nuclei.
    WeaklyGlobal(GlobalArgs),
    /// Probabilistic density and clustering coefficient.
    Metrics(MetricsArgs),
    /// Exact tail probabilities by enumerating possible worlds.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Tsv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Estimator {
    Mc,
    Oracle,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Local,
    Global,
    WeaklyGlobal,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Local => Mode::Local,
            ModeArg::Global => Mode::Global,
            ModeArg::WeaklyGlobal => Mode::WeaklyGlobal,
        }
    }
}

#[derive(Debug, Args)]
struct Common {
    /// Edge list file (`u v p` per line); standard input when absent or `-`.
    input: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Worker threads; defaults to the machine's parallelism.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Args)]
struct LocalArgs {
    #[command(flatten)]
    common: Common,
    /// Probability threshold in (0, 1].
    #[arg(long)]
    theta: f64,
    /// Support tail computation: `exact` (dynamic programming) or `hybrid`.
    #[arg(long, default_value = "exact")]
    backend: Backend,
    /// Approximation selector parameters `A,B,C,D`.
    #[arg(long)]
    hyper: Option<Hyperparams>,
    /// Only report nuclei at this level.
    #[arg(long)]
    k: Option<u32>,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    #[command(flatten)]
    local: LocalArgs,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    /// Samples per candidate; defaults to the larger of the Hoeffding bound and 200.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "mc")]
    estimator: Estimator,
    #[arg(long, default_value_t = DEFAULT_MAX_EDGES)]
    max_oracle_edges: usize,
    /// Report every accepted candidate, not only maximal ones.
    #[arg(long)]
    keep_nonmaximal: bool,
}

#[derive(Debug, Args)]
struct MetricsArgs {
    #[command(flatten)]
    common: Common,
    /// Restrict to the subgraph induced by these labels (comma separated).
    #[arg(long, value_delimiter = ',')]
    vertices: Option<Vec<u64>>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum, default_value = "local")]
    mode: ModeArg,
    #[arg(long, default_value_t = 1)]
    k: u32,
    /// Triangle as three comma-separated labels; every triangle when absent.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    triangle: Option<Vec<u64>>,
    /// Restrict to the subgraph induced by these labels (comma separated).
    #[arg(long, value_delimiter = ',')]
    vertices: Option<Vec<u64>>,
    #[arg(long, default_value_t = DEFAULT_MAX_EDGES)]
    max_oracle_edges: usize,
}

#[derive(Serialize)]
struct ScoreRow {
    triangle: [u64; 3],
    nu: Option<u32>,
}

#[derive(Serialize)]
struct NucleusRow {
    k: u32,
    vertices: Vec<u64>,
    edges: Vec<(u64, u64, f64)>,
    pd: Option<f64>,
    pcc: Option<f64>,
}

#[derive(Serialize)]
struct Params {
    backend: Backend,
    hyper: [f64; 4],
    #[serde(skip_serializing_if = "Option::is_none")]
    sampling: Option<SamplingParams>,
}

#[derive(Serialize)]
struct SamplingParams {
    estimator: &'static str,
    epsilon: f64,
    delta: f64,
    samples: usize,
    seed: u64,
    max_oracle_edges: usize,
    keep_nonmaximal: bool,
}

#[derive(Serialize)]
struct Report {
    mode: Mode,
    theta: f64,
    params: Params,
    scores: Vec<ScoreRow>,
    nuclei: Vec<NucleusRow>,
}

#[derive(Serialize)]
struct MetricsReport {
    vertices: usize,
    edges: usize,
    pd: Option<f64>,
    pcc: Option<f64>,
}

#[derive(Serialize)]
struct VerifyRow {
    triangle: [u64; 3],
    k: u32,
    probability: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    dp: Option<f64>,
}

#[derive(Serialize)]
struct VerifyReport {
    mode: Mode,
    edges: usize,
    results: Vec<VerifyRow>,
}

fn read_graph(common: &Common) -> Result<ProbabilisticGraph> {
    match &common.input {
        Some(path) if path.as_os_str() != "-" => {
            let file = File::open(path).map_err(|e| {
                Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display())))
            })?;
            load_edge_list(BufReader::new(file))
        }
        _ => load_edge_list(io::stdin().lock()),
    }
}

fn labels_to_ids(g: &ProbabilisticGraph, labels: &[u64]) -> Result<Vec<VertexId>> {
    labels
        .iter()
        .map(|&l| {
            g.vertex_of(l)
                .ok_or_else(|| Error::Index(format!("vertex {l} is not in the graph")))
        })
        .collect()
}

fn tri_labels(g: &ProbabilisticGraph, t: &Triangle) -> [u64; 3] {
    t.vertices().map(|v| g.label(v))
}

fn nucleus_row(g: &ProbabilisticGraph, n: &Nucleus) -> NucleusRow {
    let view = induced_edge_subgraph(g, n.edges.iter().copied()).expect("nucleus edges");
    NucleusRow {
        k: n.k,
        vertices: n.vertices.iter().map(|&v| g.label(v)).collect(),
        edges: n
            .edges
            .iter()
            .map(|&e| {
                let edge = g.edge(e);
                (g.label(edge.u), g.label(edge.v), edge.p)
            })
            .collect(),
        pd: pd(&view).ok(),
        pcc: pcc(&view).ok(),
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "-".to_string(), |v| v.to_string())
}

fn write_report(out: &mut dyn Write, format: Format, report: &Report) -> Result<()> {
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, report).map_err(io::Error::from)?;
            writeln!(out)?;
        }
        Format::Tsv => {
            for s in &report.scores {
                let [u, v, w] = s.triangle;
                let nu = s.nu.map_or_else(|| "-".to_string(), |x| x.to_string());
                writeln!(out, "triangle\t{u}\t{v}\t{w}\t{nu}")?;
            }
            for (i, n) in report.nuclei.iter().enumerate() {
                let vs: Vec<String> = n.vertices.iter().map(u64::to_string).collect();
                writeln!(
                    out,
                    "nucleus\t{i}\t{}\t{}\t{}\t{}",
                    n.k,
                    vs.join(","),
                    fmt_opt(n.pd),
                    fmt_opt(n.pcc)
                )?;
                for (u, v, p) in &n.edges {
                    writeln!(out, "edge\t{i}\t{u}\t{v}\t{p}")?;
                }
            }
        }
    }
    Ok(())
}

fn check_theta(theta: f64) -> Result<()> {
    if theta > 0.0 && theta <= 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "theta must lie in (0, 1], got {theta}"
        )))
    }
}

fn local_scores(
    args: &LocalArgs,
    g: &ProbabilisticGraph,
) -> Result<(TriangleIndex, NucleusScores)> {
    check_theta(args.theta)?;
    let idx = build_index(g);
    let hp = args.hyper.unwrap_or_default();
    let scores = compute_scores(&idx, args.theta, &hp, args.backend)?;
    Ok((idx, scores))
}

fn report(
    g: &ProbabilisticGraph,
    idx: &TriangleIndex,
    args: &LocalArgs,
    mode: Mode,
    scores: &NucleusScores,
    nuclei: &[Nucleus],
    sampling: Option<SamplingParams>,
) -> Report {
    let hp = args.hyper.unwrap_or_default();
    Report {
        mode,
        theta: args.theta,
        params: Params {
            backend: args.backend,
            hyper: [
                hp.clt_min_cliques as f64,
                hp.poisson_max_cliques as f64,
                hp.poisson_max_prob,
                hp.binomial_min_ratio,
            ],
            sampling,
        },
        scores: idx
            .triangles()
            .iter()
            .zip(&scores.nu)
            .map(|(t, &nu)| ScoreRow {
                triangle: tri_labels(g, t),
                nu,
            })
            .collect(),
        nuclei: nuclei
            .iter()
            .filter(|n| args.k.is_none_or(|k| n.k == k))
            .map(|n| nucleus_row(g, n))
            .collect(),
    }
}

fn run_local(args: &LocalArgs, out: &mut dyn Write) -> Result<()> {
    let g = read_graph(&args.common)?;
    let (idx, scores) = local_scores(args, &g)?;
    let nuclei = decompose(&idx, &scores);
    let rep = report(&g, &idx, args, Mode::Local, &scores, &nuclei, None);
    write_report(out, args.common.format, &rep)
}

fn run_global(args: &GlobalArgs, mode: Mode, out: &mut dyn Write) -> Result<()> {
    let g = read_graph(&args.local.common)?;
    let (idx, scores) = local_scores(&args.local, &g)?;
    let samples = match args.samples {
        Some(n) => n,
        None => required_samples(args.epsilon, args.delta)?.max(DEFAULT_MIN_SAMPLES),
    };
    let cfg = SamplingConfig::new(args.epsilon, args.delta, Some(samples), args.seed)?;
    let mc = MonteCarlo(cfg);
    let oracle = ExactOracle(OracleBudget {
        max_edges: args.max_oracle_edges,
    });
    let est: &dyn TailEstimator = match args.estimator {
        Estimator::Mc => &mc,
        Estimator::Oracle => &oracle,
    };
    let opts = GlobalOptions {
        only_k: args.local.k,
        keep_nonmaximal: args.keep_nonmaximal,
    };
    let nuclei = match mode {
        Mode::Global => fg_decompose(&g, &idx, &scores, est, opts)?,
        _ => wg_decompose(&g, &idx, &scores, est, opts)?,
    };
    let sampling = SamplingParams {
        estimator: match args.estimator {
            Estimator::Mc => "mc",
            Estimator::Oracle => "oracle",
        },
        epsilon: args.epsilon,
        delta: args.delta,
        samples,
        seed: args.seed,
        max_oracle_edges: args.max_oracle_edges,
        keep_nonmaximal: args.keep_nonmaximal,
    };
    let rep = report(
        &g,
        &idx,
        &args.local,
        mode,
        &scores,
        &nuclei,
        Some(sampling),
    );
    write_report(out, args.local.common.format, &rep)
}

fn subgraph<'g>(g: &'g ProbabilisticGraph, labels: &Option<Vec<u64>>) -> Result<SubgraphView<'g>> {
    match labels {
        Some(labels) => Ok(SubgraphView::induced_by_vertices(
            g,
            &labels_to_ids(g, labels)?,
        )),
        None => Ok(SubgraphView::full(g)),
    }
}

fn run_metrics(args: &MetricsArgs, out: &mut dyn Write) -> Result<()> {
    let g = read_graph(&args.common)?;
    let h = subgraph(&g, &args.vertices)?;
    let rep = MetricsReport {
        vertices: h.vertices().len(),
        edges: h.edge_count(),
        pd: pd(&h).ok(),
        pcc: pcc(&h).ok(),
    };
    match args.common.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, &rep).map_err(io::Error::from)?;
            writeln!(out)?;
        }
        Format::Tsv => {
            writeln!(out, "vertices\t{}", rep.vertices)?;
            writeln!(out, "edges\t{}", rep.edges)?;
            writeln!(out, "pd\t{}", fmt_opt(rep.pd))?;
            writeln!(out, "pcc\t{}", fmt_opt(rep.pcc))?;
        }
    }
    Ok(())
}

fn run_verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<()> {
    let g = read_graph(&args.common)?;
    let h = subgraph(&g, &args.vertices)?;
    let budget = OracleBudget {
        max_edges: args.max_oracle_edges,
    };
    budget.check(h.edge_count())?;
    let m = MotifSet::from_view(&h);
    let mode = Mode::from(args.mode);
    let wanted: Vec<u32> = match &args.triangle {
        Some(labels) => {
            if labels.len() != 3 {
                return Err(Error::Domain(format!(
                    "--triangle takes three labels, got {}",
                    labels.len()
                )));
            }
            let v = labels_to_ids(&g, labels)?;
            let t = Triangle::new(v[0], v[1], v[2]);
            vec![m.triangle_id(&t).ok_or_else(|| {
                Error::Index(format!("{labels:?} is not a triangle of the subgraph"))
            })?]
        }
        None => (0..m.triangles().len() as u32).collect(),
    };
    let table = exact_tail_table(&m, mode, &budget)?;
    let sub_idx = (mode == Mode::Local).then(|| {
        let sub = ProbabilisticGraph::from_labeled_edges(h.edge_ids().iter().map(|&e| {
            let edge = g.edge(e);
            (g.label(edge.u), g.label(edge.v), edge.p)
        }))
        .expect("edges of a valid graph");
        (build_index(&sub), sub)
    });
    let results = wanted
        .into_iter()
        .map(|t| {
            let [u, v, w] = m.triangles()[t as usize].vertices;
            let tri = Triangle::new(u, v, w);
            let labels = tri_labels(&g, &tri);
            let dp = sub_idx.as_ref().map(|(idx, sub)| {
                let ids = labels.map(|l| sub.vertex_of(l).expect("label of subgraph"));
                let id = idx
                    .id_of(&Triangle::new(ids[0], ids[1], ids[2]))
                    .expect("triangle of subgraph");
                dp_distribution(idx.profile(id)).tail(args.k as usize)
            });
            VerifyRow {
                triangle: labels,
                k: args.k,
                probability: table.tail(t, args.k),
                dp,
            }
        })
        .collect();
    let rep = VerifyReport {
        mode,
        edges: h.edge_count(),
        results,
    };
    match args.common.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, &rep).map_err(io::Error::from)?;
            writeln!(out)?;
        }
        Format::Tsv => {
            for r in &rep.results {
                let [u, v, w] = r.triangle;
                writeln!(
                    out,
                    "{u}\t{v}\t{w}\t{}\t{}\t{}",
                    r.k,
                    r.probability,
                    fmt_opt(r.dp)
                )?;
            }
        }
    }
    Ok(())
}

fn threads(cmd: &Command) -> Option<usize> {
    match cmd {
        Command::Local(a) => a.common.threads,
        Command::Global(a) | Command::WeaklyGlobal(a) => a.local.common.threads,
        Command::Metrics(a) => a.common.threads,
        Command::Verify(a) => a.common.threads,
    }
}

fn dispatch(cmd: &Command, out: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::Local(a) => run_local(a, out),
        Command::Global(a) => run_global(a, Mode::Global, out),
        Command::WeaklyGlobal(a) => run_global(a, Mode::WeaklyGlobal, out),
        Command::Metrics(a) => run_metrics(a, out),
        Command::Verify(a) => run_verify(a, out),
    }
}

/// Runs the command line `args` (program name first), writing results to
/// `out` and diagnostics to `err`. Returns the process exit code: 0 on
/// success, 2 when the oracle budget is exceeded and 1 for any other error.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let mut buf = Vec::new();
    let result = match threads(&cli.command) {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(&cli.command, &mut buf)),
            Err(e) => Err(Error::Domain(format!("cannot start {n} threads: {e}"))),
        },
        None => dispatch(&cli.command, &mut buf),
    }
    .and_then(|()| out.write_all(&buf).map_err(Error::from));
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::Budget { .. } => 2,
                _ => 1,
            }
        }
    }
}
