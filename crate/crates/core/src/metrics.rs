//! MRR@k and nDCG@k over TREC-format runs and judgments.
//!
//! Gain is exponential (`2^grade - 1`) with a `log2(rank + 1)` discount. Scores that tie
//! are ordered by ascending document id.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Ranking {
    pub query_id: String,
    entries: Vec<(String, f64)>,
}

impl Ranking {
    /// Sorts `entries` by descending score, then ascending doc id.
    pub fn new(query_id: impl Into<String>, mut entries: Vec<(String, f64)>) -> Self {
        entries.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        Self { query_id: query_id.into(), entries }
    }

    pub fn entries(&self) -> &[(String, f64)] {
        &self.entries
    }

    pub fn doc_ids(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(d, _)| d.as_str())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Qrels {
    grades: HashMap<String, HashMap<String, u32>>,
}

impl Qrels {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, query_id: &str, doc_id: &str, grade: u32) {
        self.grades.entry(query_id.to_owned()).or_default().insert(doc_id.to_owned(), grade);
    }

    pub fn grade(&self, query_id: &str, doc_id: &str) -> u32 {
        self.grades.get(query_id).and_then(|q| q.get(doc_id)).copied().unwrap_or(0)
    }

    fn query_grades(&self, query_id: &str) -> Vec<u32> {
        self.grades.get(query_id).map(|q| q.values().copied().collect()).unwrap_or_default()
    }
}

/// Reciprocal rank of the first document with grade ≥ 1 within the top `k`, or 0.
pub fn mrr_at_k(ranking: &Ranking, qrels: &Qrels, k: usize) -> f64 {
    ranking.doc_ids().take(k).position(|d| qrels.grade(&ranking.query_id, d) >= 1).map_or(0.0, |i| 1.0 / (i + 1) as f64)
}

fn dcg(grades: impl Iterator<Item = u32>) -> f64 {
    grades.enumerate().map(|(i, g)| (2f64.powi(g as i32) - 1.0) / ((i + 2) as f64).log2()).sum()
}

/// nDCG at cutoff `k`; the ideal ordering uses every judged document of the query. Zero
/// when the query has no relevant judgments.
pub fn ndcg_at_k(ranking: &Ranking, qrels: &Qrels, k: usize) -> f64 {
    let mut ideal = qrels.query_grades(&ranking.query_id);
    ideal.sort_unstable_by(|a, b| b.cmp(a));
    let idcg = dcg(ideal.into_iter().take(k));
    if idcg == 0.0 {
        return 0.0;
    }
    let actual = dcg(ranking.doc_ids().take(k).map(|d| qrels.grade(&ranking.query_id, d)));
    actual / idcg
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    Mrr(usize),
    Ndcg(usize),
}

impl Metric {
    pub fn compute(self, ranking: &Ranking, qrels: &Qrels) -> f64 {
        match self {
            Metric::Mrr(k) => mrr_at_k(ranking, qrels, k),
            Metric::Ndcg(k) => ndcg_at_k(ranking, qrels, k),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Metric::Mrr(k) => write!(f, "mrr@{k}"),
            Metric::Ndcg(k) => write!(f, "ndcg@{k}"),
        }
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("unknown metric `{s}` (expected mrr@K or ndcg@K)"));
        let (name, k) = s.trim().split_once('@').ok_or_else(bad)?;
        let k: usize = k.parse().map_err(|_| bad())?;
        if k == 0 {
            return Err(bad());
        }
        match name.to_ascii_lowercase().as_str() {
            "mrr" => Ok(Metric::Mrr(k)),
            "ndcg" => Ok(Metric::Ndcg(k)),
            _ => Err(bad()),
        }
    }
}

/// Arithmetic mean of `metric` over `rankings`; 0 for an empty run.
pub fn mean_metric(metric: Metric, rankings: &[Ranking], qrels: &Qrels) -> f64 {
    if rankings.is_empty() {
        return 0.0;
    }
    rankings.iter().map(|r| metric.compute(r, qrels)).sum::<f64>() / rankings.len() as f64
}

/// Parse `qid Q0 docid rank score tag` lines into per-query rankings, ordered by query id.
/// The rank column is ignored; entries are re-sorted by score.
pub fn parse_run_file(text: &str) -> Result<Vec<Ranking>> {
    let mut per_query: BTreeMap<String, Vec<(String, f64)>> = BTreeMap::new();
    let mut seen: HashSet<(String, String)> = HashSet::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 6 {
            return Err(Error::Trec { line: line_no, message: format!("expected 6 fields, found {}", fields.len()) });
        }
        let (qid, doc) = (fields[0], fields[2]);
        fields[3]
            .parse::<i64>()
            .map_err(|_| Error::Trec { line: line_no, message: format!("bad rank `{}`", fields[3]) })?;
        let score: f64 = fields[4]
            .parse()
            .ok()
            .filter(|s: &f64| s.is_finite())
            .ok_or_else(|| Error::Trec { line: line_no, message: format!("bad score `{}`", fields[4]) })?;
        if !seen.insert((qid.to_owned(), doc.to_owned())) {
            return Err(Error::Trec {
                line: line_no,
                message: format!("duplicate document `{doc}` for query `{qid}`"),
            });
        }
        per_query.entry(qid.to_owned()).or_default().push((doc.to_owned(), score));
    }
    Ok(per_query.into_iter().map(|(q, e)| Ranking::new(q, e)).collect())
}

/// Parse `qid 0 docid grade` lines. Negative grades count as 0.
pub fn parse_qrels(text: &str) -> Result<Qrels> {
    let mut qrels = Qrels::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(Error::Trec { line: line_no, message: format!("expected 4 fields, found {}", fields.len()) });
        }
        let grade: i64 = fields[3]
            .parse()
            .map_err(|_| Error::Trec { line: line_no, message: format!("bad grade `{}`", fields[3]) })?;
        qrels.insert(fields[0], fields[2], grade.max(0) as u32);
    }
    Ok(qrels)
}
