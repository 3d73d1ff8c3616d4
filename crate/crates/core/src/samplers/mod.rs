//! Contrastive pseudo query-document generators.
//!
//! Each sampler turns one article (or, for long-text matching, one graph vertex) into
//! groups of one query, one positive and several negatives:
//!
//! * [`sample_srr`]: the query is a heading path, the candidates are sibling sections.
//! * [`sample_rwi`]: the document is fixed and the candidates are queries; the positive is
//!   the document's own heading path, negatives mix in headings from elsewhere in the article.
//! * [`sample_ati`]: the query is the title, the lead text beats every top-level section.
//! * [`sample_ltm`]: a whole article is the query, articles it lists under See Also are
//!   positives and random non-neighbors are negatives.
//!
//! All randomness comes from a per-(article, task) generator derived from the run seed, so
//! output does not depend on processing order.

mod ati;
mod ltm;
mod rwi;
mod srr;

use std::borrow::Cow;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use ati::sample_ati;
pub use ltm::sample_ltm;
pub use rwi::sample_rwi;
pub use srr::sample_srr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Srr,
    Rwi,
    Ati,
    Ltm,
}

impl Task {
    pub const ALL: [Task; 4] = [Task::Srr, Task::Rwi, Task::Ati, Task::Ltm];

    pub fn as_str(self) -> &'static str {
        match self {
            Task::Srr => "srr",
            Task::Rwi => "rwi",
            Task::Ati => "ati",
            Task::Ltm => "ltm",
        }
    }

    fn stream(self) -> u64 {
        match self {
            Task::Srr => 1,
            Task::Rwi => 2,
            Task::Ati => 3,
            Task::Ltm => 4,
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "srr" => Ok(Task::Srr),
            "rwi" => Ok(Task::Rwi),
            "ati" => Ok(Task::Ati),
            "ltm" => Ok(Task::Ltm),
            other => Err(Error::Config(format!("unknown task `{other}`"))),
        }
    }
}

/// Where an instance's texts came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Provenance {
    /// Heading-tree nodes: the positive node first, then one node per negative. For RWI the
    /// negatives are queries, and `negative_node_ids` lists the nodes whose subtitles make up
    /// each one.
    Nodes {
        node_ids: Vec<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        negative_node_ids: Option<Vec<Vec<usize>>>,
    },
    /// Graph vertices: the positive neighbor and the sampled non-neighbors.
    Neighbors { neighbor_id: u64, negative_ids: Vec<u64> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PseudoInstance {
    pub task: Task,
    pub article_id: u64,
    pub query: String,
    pub positive: String,
    pub negatives: Vec<String>,
    pub provenance: Provenance,
}

impl PseudoInstance {
    /// Checks the structural invariants every emitted instance must satisfy.
    pub fn validate(&self) -> std::result::Result<(), String> {
        if self.query.trim().is_empty() {
            return Err("empty query".into());
        }
        if self.positive.trim().is_empty() {
            return Err("empty positive".into());
        }
        if self.negatives.is_empty() {
            return Err("no negatives".into());
        }
        if self.negatives.contains(&self.positive) {
            return Err("positive repeated among negatives".into());
        }
        let mut seen = std::collections::HashSet::new();
        if !self.negatives.iter().all(|n| seen.insert(n)) {
            return Err("duplicate negatives".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub max_query_words: usize,
    pub max_doc_words: usize,
    pub ltm_max_doc_words: usize,
    pub min_content_words: usize,
    pub srr_max_negatives: usize,
    pub rwi_num_negatives: usize,
    pub ati_max_negatives: usize,
    pub ltm_num_negatives: usize,
    pub seed: u64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            max_query_words: 30,
            max_doc_words: 480,
            ltm_max_doc_words: 255,
            min_content_words: 10,
            srr_max_negatives: 16,
            rwi_num_negatives: 4,
            ati_max_negatives: 8,
            ltm_num_negatives: 4,
            seed: 0,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("max_query_words", self.max_query_words),
            ("max_doc_words", self.max_doc_words),
            ("ltm_max_doc_words", self.ltm_max_doc_words),
            ("min_content_words", self.min_content_words),
            ("srr_max_negatives", self.srr_max_negatives),
            ("rwi_num_negatives", self.rwi_num_negatives),
            ("ati_max_negatives", self.ati_max_negatives),
            ("ltm_num_negatives", self.ltm_num_negatives),
        ];
        for (name, v) in counts {
            if v == 0 {
                return Err(Error::Config(format!("{name} must be at least 1")));
            }
        }
        Ok(())
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Generator for one (article, task) pair. Independent of processing order and of which
/// other tasks are enabled.
pub fn article_rng(seed: u64, article_id: u64, task: Task) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(article_id)));
    rng.set_stream(task.stream());
    rng
}

pub fn word_count(text: &str) -> usize {
    text.split_whitespace().count()
}

/// Keeps the first `max_words` whitespace-separated words, preserving the original spacing
/// between them.
pub fn truncate_words(text: &str, max_words: usize) -> &str {
    let mut seen = 0;
    let mut in_word = false;
    for (i, c) in text.char_indices() {
        if c.is_whitespace() {
            if in_word {
                in_word = false;
                if seen == max_words {
                    return text[..i].trim_start();
                }
            }
        } else if !in_word {
            in_word = true;
            seen += 1;
        }
    }
    text.trim()
}

/// Full cleaned text lookup used by long-text matching.
pub trait CorpusText {
    fn text(&self, article_id: u64) -> Result<Option<Cow<'_, str>>>;
}

impl CorpusText for HashMap<u64, String> {
    fn text(&self, article_id: u64) -> Result<Option<Cow<'_, str>>> {
        Ok(self.get(&article_id).map(|s| Cow::Borrowed(s.as_str())))
    }
}

impl CorpusText for BTreeMap<u64, String> {
    fn text(&self, article_id: u64) -> Result<Option<Cow<'_, str>>> {
        Ok(self.get(&article_id).map(|s| Cow::Borrowed(s.as_str())))
    }
}

/// Accumulates negatives, skipping empties, the positive itself and repeats.
pub(crate) struct NegativeSet<'p, Id> {
    positive: &'p str,
    texts: Vec<String>,
    ids: Vec<Id>,
}

impl<'p, Id> NegativeSet<'p, Id> {
    pub(crate) fn new(positive: &'p str) -> Self {
        Self { positive, texts: Vec::new(), ids: Vec::new() }
    }

    pub(crate) fn offer(&mut self, text: &str, id: Id) -> bool {
        if text.trim().is_empty() || text == self.positive || self.texts.iter().any(|t| t == text) {
            return false;
        }
        self.texts.push(text.to_owned());
        self.ids.push(id);
        true
    }

    pub(crate) fn len(&self) -> usize {
        self.texts.len()
    }

    pub(crate) fn into_parts(self) -> (Vec<String>, Vec<Id>) {
        (self.texts, self.ids)
    }
}

/// Picks `cap` of `items` uniformly at random when there are more than `cap`, keeping the
/// survivors in their original order.
pub(crate) fn capped_subset<T: Copy, R: rand::Rng + ?Sized>(items: &[T], cap: usize, rng: &mut R) -> Vec<T> {
    if items.len() <= cap {
        return items.to_vec();
    }
    let mut idx = rand::seq::index::sample(rng, items.len(), cap).into_vec();
    idx.sort_unstable();
    idx.into_iter().map(|i| items[i]).collect()
}
