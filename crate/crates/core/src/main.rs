use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use wikiforge::metrics::{self, Metric};
use wikiforge::pipeline::{self, InputFormat, PipelineConfig};
use wikiforge::samplers::{SamplerConfig, Task};

#[derive(Parser)]
#[command(name = "forge", version, about = "Mine retrieval pre-training groups from a Wikipedia dump")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Stream a dump and write one JSON-lines file per task plus a manifest.
    Run(RunArgs),
    /// Score a TREC run file against judgments.
    ScoreRun(ScoreArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Uncompressed pages-articles XML (or JSON-lines fixture); `-` reads standard input.
    #[arg(long)]
    input: String,
    #[arg(long)]
    output: PathBuf,
    #[arg(long, value_enum, default_value_t = InputFormat::Auto)]
    input_format: InputFormat,
    /// Comma-separated subset of srr,rwi,ati,ltm.
    #[arg(long, default_value = "srr,rwi,ati,ltm", value_delimiter = ',')]
    tasks: Vec<Task>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    max_instances_per_task: Option<u64>,
    /// Defaults to the available parallelism.
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, default_value_t = 30)]
    max_query_words: usize,
    #[arg(long, default_value_t = 480)]
    max_doc_words: usize,
    #[arg(long, default_value_t = 255)]
    ltm_max_doc_words: usize,
    #[arg(long, default_value_t = 16)]
    srr_max_negatives: usize,
    #[arg(long, default_value_t = 4)]
    rwi_negatives: usize,
    #[arg(long, default_value_t = 8)]
    ati_max_negatives: usize,
    #[arg(long, default_value_t = 4)]
    ltm_negatives: usize,
    #[arg(long, default_value_t = 10)]
    min_content_words: usize,
    /// Treat See Also links as undirected when choosing LTM positives.
    #[arg(long)]
    sag_symmetric: bool,
    /// Megabytes of article text kept in memory for the LTM pass before spilling to disk.
    #[arg(long, default_value_t = 256)]
    corpus_memory_mb: usize,
}

#[derive(Args)]
struct ScoreArgs {
    #[arg(long)]
    run: PathBuf,
    #[arg(long)]
    qrels: PathBuf,
    #[arg(long, default_value = "mrr@10,mrr@100,ndcg@10,ndcg@100", value_delimiter = ',')]
    metrics: Vec<Metric>,
    /// Also print one line per query and metric.
    #[arg(long)]
    per_query: bool,
}

fn run(args: RunArgs) -> anyhow::Result<()> {
    let mut cfg = PipelineConfig::new(args.input, args.output);
    cfg.input_format = args.input_format;
    cfg.tasks = args.tasks.into_iter().collect::<BTreeSet<_>>();
    cfg.max_instances_per_task = args.max_instances_per_task;
    if let Some(w) = args.workers {
        cfg.workers = w;
    }
    cfg.sag_symmetric = args.sag_symmetric;
    cfg.corpus_memory_limit = args.corpus_memory_mb << 20;
    cfg.sampler = SamplerConfig {
        max_query_words: args.max_query_words,
        max_doc_words: args.max_doc_words,
        ltm_max_doc_words: args.ltm_max_doc_words,
        min_content_words: args.min_content_words,
        srr_max_negatives: args.srr_max_negatives,
        rwi_num_negatives: args.rwi_negatives,
        ati_max_negatives: args.ati_max_negatives,
        ltm_num_negatives: args.ltm_negatives,
        seed: args.seed,
    };
    let stats = pipeline::run_pipeline(&cfg).context("pipeline failed")?;
    eprint!("{}", pipeline::stats_report(&stats));
    Ok(())
}

fn score(args: ScoreArgs) -> anyhow::Result<()> {
    let run_text = std::fs::read_to_string(&args.run).with_context(|| format!("reading {}", args.run.display()))?;
    let qrels_text =
        std::fs::read_to_string(&args.qrels).with_context(|| format!("reading {}", args.qrels.display()))?;
    let rankings = metrics::parse_run_file(&run_text).context("parsing run file")?;
    let qrels = metrics::parse_qrels(&qrels_text).context("parsing qrels")?;
    if args.metrics.is_empty() {
        bail!("no metrics requested");
    }
    let mut out = String::new();
    if args.per_query {
        for ranking in &rankings {
            for &m in &args.metrics {
                let _ = writeln!(out, "{m}\t{}\t{:.4}", ranking.query_id, m.compute(ranking, &qrels));
            }
        }
    }
    for &m in &args.metrics {
        let _ = writeln!(out, "{m}\t{:.4}", metrics::mean_metric(m, &rankings, &qrels));
    }
    print!("{out}");
    Ok(())
}

fn main() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Run(args) => run(args),
        Command::ScoreRun(args) => score(args),
    }
}
