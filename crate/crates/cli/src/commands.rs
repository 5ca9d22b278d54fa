use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use log::info;
use serde::Serialize;

use mcbnc_core::consensus::score_to_f64;
use mcbnc_core::format::{parse_dag, parse_ordering, parse_pdag, write_dag, write_ordering, write_pdag};
use mcbnc_core::synth;
use mcbnc_core::trajectory::write_summary_csv;
use mcbnc_core::{
    fuse, prefix_profile, run, select_theta, smhd, treewidth_upper, Config, Dag, FusionInput, GenConstraints,
    NodeOrder, NodeSet, Pdag, Score, Trajectory,
};

use crate::manifest::{absolute, RunConfig, RunManifest};
use crate::output::Staged;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl ReportFormat {
    fn name(self) -> &'static str {
        match self {
            ReportFormat::Json => "json",
            ReportFormat::Csv => "csv",
        }
    }

    fn parse(name: &str) -> Result<Self> {
        match name {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => bail!("unknown report format `{other}`"),
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_dag(path: &Path) -> Result<Dag> {
    parse_dag(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn load_dags(paths: &[PathBuf]) -> Result<Vec<Dag>> {
    ensure!(!paths.is_empty(), "at least one input graph is required");
    paths.iter().map(|p| load_dag(p)).collect()
}

fn absolute_all(paths: &[PathBuf]) -> Result<Vec<String>> {
    paths.iter().map(|p| absolute(p)).collect()
}

fn optional_absolute(path: Option<&PathBuf>) -> Result<Option<String>> {
    path.map(|p| absolute(p)).transpose()
}

fn load_ordering(path: Option<&PathBuf>, nodes: &NodeSet) -> Result<Option<NodeOrder>> {
    path.map(|p| parse_ordering(&read(p)?, nodes).with_context(|| format!("in {}", p.display())))
        .transpose()
}

pub struct SynthArgs {
    pub nodes: usize,
    pub graphs: usize,
    pub seed: u64,
}

pub fn synth(args: &SynthArgs, out_dir: &Path) -> Result<()> {
    ensure!(args.nodes >= 2, "need at least two nodes, got {}", args.nodes);
    ensure!(args.graphs >= 1, "need at least one input graph");
    let c = GenConstraints::for_nodes(args.nodes);
    let (gold, inputs) = synth::instance(args.nodes, args.graphs, args.seed, &c)?;
    let width = args.graphs.to_string().len().max(2);
    let mut out = Staged::new(out_dir);
    out.add("gold.txt", write_dag(&gold));
    for (i, g) in inputs.iter().enumerate() {
        out.add(format!("input_{:0width$}.txt", i + 1), write_dag(g));
    }
    let config = RunConfig {
        seed: Some(args.seed),
        nodes: Some(args.nodes),
        graphs: Some(args.graphs),
        ..RunConfig::default()
    };
    out.commit(RunManifest::new("synth", Vec::new(), config))?;
    info!("wrote gold and {} inputs to {}", inputs.len(), out_dir.display());
    Ok(())
}

pub struct FuseArgs {
    pub inputs: Vec<PathBuf>,
    pub ordering: Option<PathBuf>,
}

pub fn fuse_cmd(args: &FuseArgs, out_dir: &Path) -> Result<()> {
    let graphs = load_dags(&args.inputs)?;
    let mut input = FusionInput::new(graphs);
    let nodes = input.nodes()?.clone();
    if let Some(o) = load_ordering(args.ordering.as_ref(), &nodes)? {
        input = input.with_ordering(o);
    }
    let f = fuse(&input)?;
    let mut out = Staged::new(out_dir);
    out.add("fused.txt", write_dag(&f.g_plus));
    out.add("sigma.txt", write_ordering(&f.sigma, &nodes));
    let config = RunConfig {
        ordering: optional_absolute(args.ordering.as_ref())?,
        ..RunConfig::default()
    };
    out.commit(RunManifest::new("fuse", absolute_all(&args.inputs)?, config))?;
    info!("fused graph has {} edges", f.g_plus.edge_count());
    Ok(())
}

pub struct ConsensusArgs {
    pub inputs: Vec<PathBuf>,
    /// `None` runs the full trajectory.
    pub theta: Option<Score>,
    pub k_max: usize,
    pub ordering: Option<PathBuf>,
    pub gold: Option<PathBuf>,
}

pub fn consensus(args: &ConsensusArgs, out_dir: &Path) -> Result<()> {
    let graphs = load_dags(&args.inputs)?;
    let mut input = FusionInput::new(graphs.clone());
    let nodes = input.nodes()?.clone();
    if let Some(o) = load_ordering(args.ordering.as_ref(), &nodes)? {
        input = input.with_ordering(o);
    }
    let gold = args.gold.as_deref().map(load_dag).transpose()?;
    if let Some(g) = &gold {
        nodes.ensure_same(g.nodes())?;
    }
    let cfg = Config {
        theta: args.theta,
        k_max: args.k_max,
    };
    let result = run(&input, &cfg)?;
    let profile = prefix_profile(&result.trajectory, &graphs, gold.as_ref())?;
    let mut csv = Vec::new();
    write_summary_csv(&profile, &mut csv)?;

    let mut out = Staged::new(out_dir);
    out.add("consensus.txt", write_dag(&result.dag));
    out.add("cpdag.txt", write_pdag(&result.cpdag));
    out.add("trajectory.json", result.trajectory.to_json()?);
    out.add("metrics.csv", csv);
    let config = RunConfig {
        theta: args.theta.map(|t| t.to_string()),
        trajectory: args.theta.is_none(),
        k_max: Some(args.k_max),
        ordering: optional_absolute(args.ordering.as_ref())?,
        gold: optional_absolute(args.gold.as_ref())?,
        ..RunConfig::default()
    };
    out.commit(RunManifest::new("consensus", absolute_all(&args.inputs)?, config))?;
    info!(
        "{} deletions, {} edges remain",
        result.trajectory.steps.len(),
        result.cpdag.skeleton_edge_count()
    );
    Ok(())
}

pub struct SelectArgs {
    pub trajectory: PathBuf,
    pub inputs: Vec<PathBuf>,
    pub gold: Option<PathBuf>,
    pub format: ReportFormat,
}

#[derive(Serialize)]
struct SelectionReport {
    theta: String,
    theta_value: f64,
    prefix: usize,
    edges: usize,
    treewidth_ub: usize,
    mean_smhd_to_inputs: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    smhd_to_gold: Option<usize>,
}

pub fn select(args: &SelectArgs, out_dir: &Path) -> Result<String> {
    let traj = Trajectory::from_json(&read(&args.trajectory)?)
        .with_context(|| format!("in {}", args.trajectory.display()))?;
    let graphs = load_dags(&args.inputs)?;
    let gold = args.gold.as_deref().map(load_dag).transpose()?;
    let sel = select_theta(&traj, &graphs)?;
    let report = SelectionReport {
        theta: sel.theta.to_string(),
        theta_value: score_to_f64(sel.theta),
        prefix: sel.prefix,
        edges: sel.graph.skeleton_edge_count(),
        treewidth_ub: treewidth_upper(&sel.graph)?,
        mean_smhd_to_inputs: score_to_f64(sel.mean_smhd),
        smhd_to_gold: gold.as_ref().map(|g| smhd(&sel.graph, g)).transpose()?,
    };
    let text = match args.format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(&report)?;
            s.push('\n');
            s
        }
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.serialize(&report)?;
            String::from_utf8(w.into_inner()?)?
        }
    };
    let mut out = Staged::new(out_dir);
    out.add("selected.txt", write_pdag(&sel.graph));
    out.add(format!("selection.{}", args.format.name()), text.clone());
    let config = RunConfig {
        gold: optional_absolute(args.gold.as_ref())?,
        trajectory_file: Some(absolute(&args.trajectory)?),
        report_format: Some(args.format.name().to_string()),
        ..RunConfig::default()
    };
    out.commit(RunManifest::new("select-theta", absolute_all(&args.inputs)?, config))?;
    Ok(text)
}

pub struct MetricsArgs {
    pub reference: PathBuf,
    pub others: Vec<PathBuf>,
    pub format: ReportFormat,
}

/// Counts for single graphs, means for the summary row.
#[derive(Clone, Copy, Serialize)]
#[serde(untagged)]
enum Value {
    Count(usize),
    Mean(f64),
}

impl Value {
    fn as_f64(self) -> f64 {
        match self {
            Value::Count(c) => c as f64,
            Value::Mean(m) => m,
        }
    }
}

#[derive(Serialize)]
struct MetricsRow {
    reference: String,
    graph: String,
    smhd: Value,
    edges: Value,
    treewidth_ub: Value,
}

/// Graph files may hold DAGs or PDAGs.
fn load_structure(path: &Path) -> Result<Pdag> {
    parse_pdag(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn file_label(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// One row per compared graph and, for several graphs, a closing `mean` row.
pub fn metrics(args: &MetricsArgs, out_dir: Option<&Path>) -> Result<String> {
    ensure!(!args.others.is_empty(), "give at least one graph to compare");
    let reference = load_structure(&args.reference)?;
    let mut rows = Vec::new();
    for p in &args.others {
        let g = load_structure(p)?;
        reference.nodes().ensure_same(g.nodes())?;
        rows.push(MetricsRow {
            reference: file_label(&args.reference),
            graph: file_label(p),
            smhd: Value::Count(smhd(&reference, &g)?),
            edges: Value::Count(g.skeleton_edge_count()),
            treewidth_ub: Value::Count(treewidth_upper(&g)?),
        });
    }
    if rows.len() > 1 {
        let k = rows.len() as f64;
        let mean = |f: fn(&MetricsRow) -> Value| Value::Mean(rows.iter().map(|r| f(r).as_f64()).sum::<f64>() / k);
        let row = MetricsRow {
            reference: file_label(&args.reference),
            graph: "mean".to_string(),
            smhd: mean(|r| r.smhd),
            edges: mean(|r| r.edges),
            treewidth_ub: mean(|r| r.treewidth_ub),
        };
        rows.push(row);
    }
    let text = match args.format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(&rows)?;
            s.push('\n');
            s
        }
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in &rows {
                w.serialize(r)?;
            }
            String::from_utf8(w.into_inner()?)?
        }
    };
    if let Some(dir) = out_dir {
        let mut out = Staged::new(dir);
        out.add(format!("metrics.{}", args.format.name()), text.clone());
        let mut inputs = vec![absolute(&args.reference)?];
        inputs.extend(absolute_all(&args.others)?);
        let config = RunConfig {
            report_format: Some(args.format.name().to_string()),
            ..RunConfig::default()
        };
        out.commit(RunManifest::new("metrics", inputs, config))?;
    }
    Ok(text)
}

/// Re-executes the command recorded in a manifest, writing into `out_dir`.
/// Returns whatever the command prints.
pub fn rerun(m: &RunManifest, out_dir: &Path) -> Result<String> {
    let c = &m.config;
    let paths: Vec<PathBuf> = m.inputs.iter().map(PathBuf::from).collect();
    let path = |s: &Option<String>| s.as_ref().map(PathBuf::from);
    let format = || ReportFormat::parse(c.report_format.as_deref().unwrap_or("json"));
    let mut printed = String::new();
    match m.command.as_str() {
        "synth" => synth(
            &SynthArgs {
                nodes: c.nodes.context("manifest lacks `nodes`")?,
                graphs: c.graphs.context("manifest lacks `graphs`")?,
                seed: c.seed.context("manifest lacks `seed`")?,
            },
            out_dir,
        )?,
        "fuse" => fuse_cmd(
            &FuseArgs {
                inputs: paths,
                ordering: path(&c.ordering),
            },
            out_dir,
        )?,
        "consensus" => {
            let theta = match (&c.theta, c.trajectory) {
                (Some(t), false) => Some(mcbnc_core::parse_score(t)?),
                (None, true) => None,
                _ => bail!("manifest must set exactly one of `theta` and `trajectory`"),
            };
            consensus(
                &ConsensusArgs {
                    inputs: paths,
                    theta,
                    k_max: c.k_max.unwrap_or(mcbnc_core::DEFAULT_K_MAX),
                    ordering: path(&c.ordering),
                    gold: path(&c.gold),
                },
                out_dir,
            )?
        }
        "select-theta" => {
            printed = select(
                &SelectArgs {
                    trajectory: path(&c.trajectory_file).context("manifest lacks `trajectory_file`")?,
                    inputs: paths,
                    gold: path(&c.gold),
                    format: format()?,
                },
                out_dir,
            )?
        }
        "metrics" => {
            let (reference, others) = paths.split_first().context("manifest lists no inputs")?;
            printed = metrics(
                &MetricsArgs {
                    reference: reference.clone(),
                    others: others.to_vec(),
                    format: format()?,
                },
                Some(out_dir),
            )?
        }
        other => bail!("unknown command `{other}` in manifest"),
    }
    Ok(printed)
}
