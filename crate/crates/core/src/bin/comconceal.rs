use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use comconceal::dmon::{self, DmonHyper};
use comconceal::experiment::{self, SweepConfig};
use comconceal::graph;
use comconceal::lfr::{self, FeatureGenParams, LfrParams};
use comconceal::metrics::{self, EcsParams};
use comconceal::perturb::{self, Method, PerturbSpec};
use comconceal::records::{self, Metric};
use comconceal::{plots, seeding, stats, Error, Result};

#[derive(Parser)]
#[command(name = "comconceal", version, about = "Community concealment benchmarks")]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an LFR graph with Gaussian node features.
    Generate(GenerateArgs),
    /// Perturb a graph around one target community.
    Perturb(PerturbArgs),
    /// Cluster a featurized graph with DMoN.
    Cluster(ClusterArgs),
    /// Evaluate a detected partition against a reference.
    Evaluate(EvaluateArgs),
    /// Consensus Louvain labelling.
    Consensus(ConsensusArgs),
    /// Run a sweep from a JSON config.
    Experiment(ExperimentArgs),
    /// Aggregate a records file into tables, trend tests and figures.
    Report(ReportArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 25.0)]
    avg_degree: f64,
    /// Defaults to n / 10.
    #[arg(long)]
    k_max: Option<usize>,
    #[arg(long, default_value_t = -2.0, allow_hyphen_values = true)]
    alpha: f64,
    #[arg(long, default_value_t = -1.1, allow_hyphen_values = true)]
    beta: f64,
    #[arg(long, default_value_t = 30)]
    s_min: usize,
    /// Defaults to k_max.
    #[arg(long)]
    s_max: Option<usize>,
    #[arg(long, default_value_t = 0.1)]
    mu: f64,
    #[arg(long, default_value_t = 1.0)]
    sigma_c: f64,
    #[arg(long, default_value_t = 32)]
    d: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct PerturbArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    partition: PathBuf,
    /// Required for fcom-dice.
    #[arg(long)]
    features: Option<PathBuf>,
    /// Target community label.
    #[arg(long)]
    target: usize,
    #[arg(long, default_value = "fcom-dice")]
    method: Method,
    #[arg(long)]
    beta_b: f64,
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct ClusterArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    features: PathBuf,
    #[arg(long)]
    k: usize,
    #[arg(long, value_delimiter = ',', default_value = "64")]
    hidden: Vec<usize>,
    #[arg(long, default_value_t = 0.01)]
    lr: f64,
    #[arg(long, default_value_t = 500)]
    epochs: usize,
    #[arg(long, default_value_t = 0.5)]
    dropout: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    loss_trace: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Reference partition; the target community is read from it.
    #[arg(long)]
    truth: PathBuf,
    #[arg(long)]
    detected: PathBuf,
    #[arg(long)]
    features: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "m1,m2,ecs,q")]
    metrics: Vec<String>,
    #[arg(long)]
    target: Option<usize>,
    #[arg(long, default_value_t = 0.9)]
    ecs_alpha: f64,
}

#[derive(Args)]
struct ConsensusArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value_t = 50)]
    runs: usize,
    #[arg(long, default_value_t = 0.3)]
    tau: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Restrict to these target community ids.
    #[arg(long, value_delimiter = ',')]
    targets: Option<Vec<usize>>,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out_dir: PathBuf,
}

fn generate(a: &GenerateArgs) -> Result<()> {
    let k_max = a.k_max.unwrap_or(a.n / 10);
    let params = LfrParams {
        n: a.n,
        avg_degree: a.avg_degree,
        k_max,
        alpha: a.alpha,
        beta: a.beta,
        s_min: a.s_min,
        s_max: a.s_max.unwrap_or(k_max),
        mu: a.mu,
        mixing_tolerance: 0.03,
        max_rewire_iters: None,
    };
    let fp = FeatureGenParams { d: a.d, sigma_c: a.sigma_c, sigma: 1.0 };
    let (g, p, x) = lfr::generate_featurized(&params, &fp, a.seed)?;
    std::fs::create_dir_all(&a.out_dir).map_err(|e| Error::io(&a.out_dir, e))?;
    graph::save_edge_list(a.out_dir.join("graph.tsv"), &g)?;
    graph::save_partition(a.out_dir.join("partition.tsv"), &p)?;
    graph::save_features(a.out_dir.join("features.csv"), &x)?;
    println!(
        "n={} m={} communities={} mixing={:.4}",
        g.n(),
        g.m(),
        p.k(),
        lfr::empirical_mixing(&g, &p)?
    );
    Ok(())
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn perturb_cmd(a: &PerturbArgs) -> Result<()> {
    let g = graph::load_edge_list(&a.graph)?;
    let p = graph::load_partition(&a.partition, Some(g.n()))?;
    if a.target >= p.k() {
        return Err(Error::TargetMissing(a.target));
    }
    let spec = PerturbSpec::new(p.members(a.target), a.beta_b, a.p)?;
    let mut rng = seeding::rng(a.seed);
    let result = match a.method {
        Method::Dice => perturb::dice(&g, &spec, &mut rng)?,
        Method::FcomDice => {
            let path = a
                .features
                .as_ref()
                .ok_or_else(|| Error::InvalidParam("fcom-dice needs --features".into()))?;
            let x = graph::load_features(path, Some(g.n()))?;
            let index = perturb::community_centroids(&x, &p)?;
            perturb::fcom_dice(&g, &x, &p, &index, &spec, &mut rng)?
        }
    };
    std::fs::create_dir_all(&a.out_dir).map_err(|e| Error::io(&a.out_dir, e))?;
    graph::save_edge_list(a.out_dir.join("graph.tsv"), &result.graph)?;
    if let Some(x) = &result.features {
        graph::save_features(a.out_dir.join("features.csv"), x)?;
    }
    write_text(&a.out_dir.join("ledger.json"), &serde_json::to_string_pretty(&result.ledger(a.method))?)?;
    println!(
        "budget={} deleted={} added={} exhausted_deletion={} exhausted_addition={}",
        result.budget.total,
        result.deleted.len(),
        result.added.len(),
        result.exhausted.deletion,
        result.exhausted.addition
    );
    Ok(())
}

fn cluster(a: &ClusterArgs) -> Result<()> {
    let g = graph::load_edge_list(&a.graph)?;
    let x = graph::load_features(&a.features, Some(g.n()))?;
    let hyper = DmonHyper {
        hidden_dims: a.hidden.clone(),
        learning_rate: a.lr,
        epochs: a.epochs,
        dropout_rate: a.dropout,
        seed: a.seed,
        dropout_enabled: a.dropout > 0.0,
        ..DmonHyper::new(a.k)
    };
    let out = dmon::train(&g, &x, &hyper)?;
    let hard = dmon::hard_assignment(&out.assignment);
    graph::save_partition(&a.out, &hard)?;
    if let Some(path) = &a.loss_trace {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["epoch", "total", "modularity", "collapse"])?;
        for (i, t) in out.loss_trace.iter().enumerate() {
            w.write_record([i.to_string(), t.total.to_string(), t.modularity.to_string(), t.collapse.to_string()])?;
        }
        w.flush().map_err(|e| Error::io(path, e))?;
    }
    println!("clusters={}", hard.k());
    Ok(())
}

fn evaluate(a: &EvaluateArgs) -> Result<()> {
    let g = graph::load_edge_list(&a.graph)?;
    let truth = graph::load_partition(&a.truth, Some(g.n()))?;
    let detected = graph::load_partition(&a.detected, Some(g.n()))?;
    let needs_target = a.metrics.iter().any(|m| matches!(m.as_str(), "m1" | "m2" | "descriptors"));
    let target = match (a.target, needs_target) {
        (Some(t), _) if t < truth.k() => Some(t),
        (Some(t), _) => return Err(Error::TargetMissing(t)),
        (None, true) => return Err(Error::InvalidParam("--target is required for m1, m2 and descriptors".into())),
        (None, false) => None,
    };
    let mut header = Vec::new();
    let mut row = Vec::new();
    for m in &a.metrics {
        match m.as_str() {
            "m1" => {
                header.push("m1".to_string());
                row.push(metrics::m1(&truth.members(target.expect("checked")), &detected)?.to_string());
            }
            "m2" => {
                header.push("m2".to_string());
                row.push(metrics::m2(&truth.members(target.expect("checked")), &detected, g.n())?.to_string());
            }
            "ecs" => {
                header.push("ecs".to_string());
                let params = EcsParams { alpha: a.ecs_alpha };
                row.push(metrics::element_centric_similarity(&truth, &detected, params)?.to_string());
            }
            "q" => {
                header.push("q".to_string());
                row.push(metrics::modularity(&g, &detected)?.to_string());
            }
            "descriptors" => {
                let path = a
                    .features
                    .as_ref()
                    .ok_or_else(|| Error::InvalidParam("descriptors need --features".into()))?;
                let x = graph::load_features(path, Some(g.n()))?;
                let d = metrics::community_descriptors(&g, &truth, &x, target.expect("checked"))?;
                let value = serde_json::to_value(&d)?;
                for (k, v) in value.as_object().expect("struct serializes to object") {
                    header.push(k.clone());
                    row.push(if v.is_null() { String::new() } else { v.to_string() });
                }
            }
            other => return Err(Error::InvalidParam(format!("unknown metric {other}"))),
        }
    }
    println!("{}", header.join(","));
    println!("{}", row.join(","));
    Ok(())
}

fn consensus(a: &ConsensusArgs) -> Result<()> {
    let g = graph::load_edge_list(&a.graph)?;
    let p = metrics::consensus_louvain(&g, a.runs, a.tau, a.seed)?;
    graph::save_partition(&a.out, &p)?;
    println!("communities={} modularity={:.4}", p.k(), metrics::modularity(&g, &p)?);
    Ok(())
}

fn run_experiment(a: &ExperimentArgs, threads: Option<usize>) -> Result<bool> {
    let mut cfg = SweepConfig::load(&a.config)?;
    if let Some(dir) = &a.output_dir {
        cfg.output_dir = dir.clone();
    }
    if a.targets.is_some() {
        cfg.targets = a.targets.clone();
    }
    if threads.is_some() {
        cfg.threads = threads;
    }
    if let Some(grid) = &cfg.lfr {
        if grid.n >= 1000 && cfg.realizations >= 50 {
            log::warn!("full-scale sweep: expect many CPU-days of training");
        }
    }
    let summary = experiment::run_experiment(&cfg)?;
    println!(
        "records={} new={} failures={} file={}",
        summary.records,
        summary.new_records,
        summary.failures.len(),
        summary.records_path.display()
    );
    for f in &summary.failures {
        eprintln!("failed {}: {}", f.cell, f.error);
    }
    Ok(summary.failures.is_empty())
}

fn report(a: &ReportArgs) -> Result<()> {
    let records = records::read_records(&a.input)?;
    std::fs::create_dir_all(&a.out_dir).map_err(|e| Error::io(&a.out_dir, e))?;
    let mut w = csv::Writer::from_path(a.out_dir.join("improvement.csv"))?;
    for metric in [Metric::M1, Metric::M2] {
        match stats::mean_relative_improvement(&records, metric) {
            Ok(rows) => {
                for r in rows {
                    w.serialize(r)?;
                }
            }
            Err(e) => log::warn!("no improvement table for {}: {e}", metric.as_str()),
        }
    }
    w.flush().map_err(|e| Error::io(&a.out_dir, e))?;
    let trends: Vec<_> = [Metric::M1, Metric::M2].iter().map(|&m| stats::sigma_trend(&records, m)).collect();
    write_text(&a.out_dir.join("trends.json"), &serde_json::to_string_pretty(&trends)?)?;
    let file = std::fs::File::create(a.out_dir.join("descriptors.csv")).map_err(|e| Error::io(&a.out_dir, e))?;
    stats::export_descriptors(&records, file)?;
    let written = plots::emit_plots(&records, &a.out_dir.join("figures"))?;
    println!("records={} figures={}", records.len(), written.len());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            log::warn!("thread pool: {e}");
        }
    }
    let outcome = match &cli.command {
        Command::Generate(a) => generate(a).map(|_| true),
        Command::Perturb(a) => perturb_cmd(a).map(|_| true),
        Command::Cluster(a) => cluster(a).map(|_| true),
        Command::Evaluate(a) => evaluate(a).map(|_| true),
        Command::Consensus(a) => consensus(a).map(|_| true),
        Command::Experiment(a) => run_experiment(a, cli.threads),
        Command::Report(a) => report(a).map(|_| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
