//! Dump in, one JSON-lines file per task out.
//!
//! Pass 1 streams the dump, builds one heading tree per content article and emits the
//! single-article tasks (SRR, RWI, ATI) while stashing each article's full text and See
//! Also targets. Pass 2 builds the See Also graph over everything seen and emits LTM.
//! Articles are processed in parallel batches; all randomness is keyed by article id and
//! each task file is written in article-id order, so output bytes do not depend on the
//! worker count.

mod corpus;
mod output;
mod stats;

use std::collections::{BTreeMap, BTreeSet};
use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, Read};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Warnings};
use crate::parse::{self, normalize_title, ArticleStream, FixtureStream, RawArticle};
use crate::sag::SagBuilder;
use crate::samplers::{self, article_rng, PseudoInstance, SamplerConfig, Task};
use crate::wst::build_wst;

pub use corpus::CorpusStore;
pub use output::{
    instance_line, read_instances, summarize_file, write_instances, write_instances_to_path, OutputSummary, TaskSpool,
};
pub use stats::{stats_report, CorpusStats};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum InputFormat {
    /// Decide from the first non-blank byte: `<` is XML, `{` is JSON lines.
    #[default]
    Auto,
    Xml,
    Jsonl,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    /// Dump path, or `-` for standard input.
    pub input_path: String,
    pub input_format: InputFormat,
    pub output_dir: PathBuf,
    pub tasks: BTreeSet<Task>,
    pub max_instances_per_task: Option<u64>,
    pub sampler: SamplerConfig,
    pub workers: usize,
    pub sag_symmetric: bool,
    /// Bytes of article text held in memory for pass 2 before spilling to disk.
    pub corpus_memory_limit: usize,
}

impl PipelineConfig {
    pub fn new(input_path: impl Into<String>, output_dir: impl Into<PathBuf>) -> Self {
        Self {
            input_path: input_path.into(),
            input_format: InputFormat::Auto,
            output_dir: output_dir.into(),
            tasks: Task::ALL.into_iter().collect(),
            max_instances_per_task: None,
            sampler: SamplerConfig::default(),
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            sag_symmetric: false,
            corpus_memory_limit: 256 << 20,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.tasks.is_empty() {
            return Err(Error::Config("at least one task must be enabled".into()));
        }
        if self.workers == 0 {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        self.sampler.validate()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub config: PipelineConfig,
    pub stats: CorpusStats,
    pub outputs: BTreeMap<String, OutputSummary>,
}

pub fn task_file_name(task: Task) -> String {
    format!("{task}.jsonl")
}

enum Articles<R: BufRead> {
    Xml(ArticleStream<R>),
    Jsonl(FixtureStream<R>),
}

impl<R: BufRead> Articles<R> {
    fn open(mut source: R, format: InputFormat) -> Result<Self> {
        let format = match format {
            InputFormat::Auto => sniff(&mut source)?,
            f => f,
        };
        Ok(match format {
            InputFormat::Jsonl => Articles::Jsonl(FixtureStream::new(source)),
            _ => Articles::Xml(ArticleStream::new(source)),
        })
    }

    fn next(&mut self) -> Option<Result<RawArticle>> {
        match self {
            Articles::Xml(s) => s.next(),
            Articles::Jsonl(s) => s.next(),
        }
    }

    fn warnings(&self) -> &Warnings {
        match self {
            Articles::Xml(s) => s.warnings(),
            Articles::Jsonl(s) => s.warnings(),
        }
    }
}

/// Skips leading whitespace and a byte-order mark, then guesses the format.
fn sniff<R: BufRead>(source: &mut R) -> Result<InputFormat> {
    loop {
        let buf = source.fill_buf()?;
        if buf.is_empty() {
            return Ok(InputFormat::Xml);
        }
        let skip = buf.iter().take_while(|b| b.is_ascii_whitespace() || matches!(b, 0xEF | 0xBB | 0xBF)).count();
        if skip < buf.len() {
            let first = buf[skip];
            source.consume(skip);
            return Ok(if first == b'{' { InputFormat::Jsonl } else { InputFormat::Xml });
        }
        source.consume(skip);
    }
}

fn open_input(path: &str) -> Result<Box<dyn BufRead>> {
    if path == "-" {
        return Ok(Box::new(BufReader::with_capacity(1 << 16, io::stdin())));
    }
    let file = File::open(path).map_err(Error::at_path(path))?;
    Ok(Box::new(BufReader::with_capacity(1 << 16, file)))
}

/// What pass 1 produces for one content article.
struct ArticleOutput {
    page_id: u64,
    title: String,
    see_also: Vec<String>,
    full_text: String,
    instances: Vec<(Task, Vec<PseudoInstance>)>,
    warnings: Warnings,
}

fn process_article(raw: &RawArticle, tasks: &[Task], cfg: &SamplerConfig) -> ArticleOutput {
    let mut warnings = Warnings::new();
    let parsed = parse::parse_article(raw.page_id, &raw.title, &raw.wikitext, &mut warnings);
    let wst = build_wst(parsed.page_id, &parsed.title, &parsed.abstract_text, &parsed.sections);
    let mut instances = Vec::with_capacity(tasks.len());
    for &task in tasks {
        let mut rng = article_rng(cfg.seed, raw.page_id, task);
        let batch = match task {
            Task::Srr => samplers::sample_srr(&wst, cfg, &mut rng),
            Task::Rwi => samplers::sample_rwi(&wst, cfg, &mut rng).into_iter().collect(),
            Task::Ati => samplers::sample_ati(&wst, cfg, &mut rng).into_iter().collect(),
            Task::Ltm => continue,
        };
        instances.push((task, batch));
    }
    ArticleOutput {
        page_id: raw.page_id,
        title: normalize_title(&parsed.title),
        see_also: parsed.see_also,
        full_text: wst.subtree_text(crate::wst::ROOT).expect("root exists"),
        instances,
        warnings,
    }
}

fn redirect_target(wikitext: &str) -> Option<String> {
    let start = wikitext.find("[[")? + 2;
    let end = start + wikitext[start..].find("]]")?;
    let target = wikitext[start..end].split('|').next()?;
    let t = normalize_title(target.trim().trim_start_matches(':'));
    (!t.is_empty()).then_some(t)
}

const BATCH_PER_WORKER: usize = 32;

/// Run both passes and write `{task}.jsonl` plus `manifest.json` into the output directory.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<CorpusStats> {
    let source = open_input(&cfg.input_path)?;
    run_pipeline_from(source, cfg)
}

/// [`run_pipeline`] with the dump supplied directly instead of through `input_path`.
pub fn run_pipeline_from<R: BufRead>(source: R, cfg: &PipelineConfig) -> Result<CorpusStats> {
    cfg.validate()?;
    let started = Instant::now();
    let out_dir = &cfg.output_dir;
    fs::create_dir_all(out_dir).map_err(Error::at_path(out_dir))?;
    tempfile::tempfile_in(out_dir).map_err(Error::at_path(out_dir))?;

    let pool =
        rayon::ThreadPoolBuilder::new().num_threads(cfg.workers).build().map_err(|e| Error::Config(e.to_string()))?;

    let single_article_tasks: Vec<Task> = cfg.tasks.iter().copied().filter(|t| *t != Task::Ltm).collect();
    let want_ltm = cfg.tasks.contains(&Task::Ltm);

    let mut stats = CorpusStats::default();
    let mut spools: BTreeMap<Task, TaskSpool> = BTreeMap::new();
    for &task in &cfg.tasks {
        spools.insert(task, TaskSpool::new(out_dir)?);
    }
    let mut corpus = CorpusStore::new(out_dir, cfg.corpus_memory_limit);
    let mut graph = SagBuilder::new().symmetric(cfg.sag_symmetric);

    // Pass 1.
    let mut articles = Articles::open(source, cfg.input_format)?;
    let batch_size = BATCH_PER_WORKER * cfg.workers;
    let mut done = false;
    while !done {
        let mut batch = Vec::with_capacity(batch_size);
        while batch.len() < batch_size {
            let Some(next) = articles.next() else {
                done = true;
                break;
            };
            let raw = next?;
            stats.articles_seen += 1;
            if raw.namespace != 0 {
                stats.namespace_skipped += 1;
            } else if raw.is_redirect {
                stats.redirects_skipped += 1;
                if want_ltm {
                    if let Some(target) = redirect_target(&raw.wikitext) {
                        graph.add_alias(normalize_title(&raw.title), target);
                    }
                }
            } else if parse::is_disambiguation(&raw.wikitext) {
                stats.disambig_skipped += 1;
            } else {
                batch.push(raw);
            }
        }
        if batch.is_empty() {
            continue;
        }

        // Decide up front, from already staged output, which (article, task) pairs can be
        // skipped because the per-task cap is already filled by smaller article ids.
        let plans: Vec<Vec<Task>> = batch
            .iter()
            .map(|raw| {
                single_article_tasks
                    .iter()
                    .copied()
                    .filter(|t| !spools[t].saturated_before(raw.page_id, cfg.max_instances_per_task))
                    .collect()
            })
            .collect();
        let outputs: Vec<ArticleOutput> = pool.install(|| {
            batch
                .par_iter()
                .zip(plans.par_iter())
                .map(|(raw, tasks)| process_article(raw, tasks, &cfg.sampler))
                .collect()
        });

        for out in outputs {
            stats.articles_kept += 1;
            stats.warnings.merge(&out.warnings);
            for (task, instances) in &out.instances {
                spools.get_mut(task).expect("enabled task").push(out.page_id, instances)?;
            }
            if want_ltm {
                graph.add_article(out.page_id, &out.title, out.see_also);
                corpus.insert(out.page_id, out.full_text)?;
            }
        }
    }
    stats.warnings.merge(articles.warnings());
    drop(articles);

    // Pass 2.
    if want_ltm {
        let sag = graph.build(&mut stats.warnings);
        let spool = spools.get_mut(&Task::Ltm).expect("enabled task");
        for chunk in sag.vertices().chunks(batch_size.max(1)) {
            let results: Vec<Result<(u64, Vec<PseudoInstance>, Warnings)>> = pool.install(|| {
                chunk
                    .par_iter()
                    .map(|&id| {
                        let mut w = Warnings::new();
                        let mut rng = article_rng(cfg.sampler.seed, id, Task::Ltm);
                        let got = samplers::sample_ltm(&sag, &corpus, id, &cfg.sampler, &mut rng, &mut w)?;
                        Ok((id, got, w))
                    })
                    .collect()
            });
            for r in results {
                let (id, instances, w) = r?;
                stats.warnings.merge(&w);
                spool.push(id, &instances)?;
            }
            if spool.saturated_before(u64::MAX, cfg.max_instances_per_task) {
                // Vertices are visited in ascending order, so later ones cannot displace
                // what is already staged.
                break;
            }
        }
    }

    let mut outputs = BTreeMap::new();
    for (task, spool) in spools {
        let name = task_file_name(task);
        let summary = spool.finish(&out_dir.join(&name), cfg.max_instances_per_task)?;
        stats.instances_per_task.insert(task, summary.lines);
        outputs.insert(name, summary);
    }
    stats.wall_time_seconds = started.elapsed().as_secs_f64();

    let manifest = Manifest { config: cfg.clone(), stats: stats.clone(), outputs };
    let manifest_path = out_dir.join(MANIFEST_FILE);
    let json = serde_json::to_string_pretty(&manifest)?;
    fs::write(&manifest_path, json + "\n").map_err(Error::at_path(&manifest_path))?;
    Ok(stats)
}

pub fn read_manifest(dir: &Path) -> Result<Manifest> {
    let path = dir.join(MANIFEST_FILE);
    let mut text = String::new();
    File::open(&path).map_err(Error::at_path(&path))?.read_to_string(&mut text)?;
    Ok(serde_json::from_str(&text)?)
}

/// Recompute every output's line count and hash and compare with the manifest.
pub fn verify_manifest(dir: &Path) -> Result<Vec<String>> {
    let manifest = read_manifest(dir)?;
    let mut mismatched = Vec::new();
    for (name, expected) in &manifest.outputs {
        let path = dir.join(name);
        let actual = summarize_file(&path).map_err(Error::at_path(&path))?;
        if &actual != expected {
            mismatched.push(name.clone());
        }
    }
    Ok(mismatched)
}
