use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::Warnings;
use crate::samplers::Task;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub articles_seen: u64,
    pub articles_kept: u64,
    pub redirects_skipped: u64,
    pub disambig_skipped: u64,
    pub namespace_skipped: u64,
    pub instances_per_task: BTreeMap<Task, u64>,
    pub warnings: Warnings,
    pub wall_time_seconds: f64,
}

/// Plain-text table with one row per counter, followed by the warning counts.
pub fn stats_report(stats: &CorpusStats) -> String {
    let mut rows: Vec<(String, String)> = vec![
        ("articles_seen".into(), stats.articles_seen.to_string()),
        ("articles_kept".into(), stats.articles_kept.to_string()),
        ("redirects_skipped".into(), stats.redirects_skipped.to_string()),
        ("disambig_skipped".into(), stats.disambig_skipped.to_string()),
        ("namespace_skipped".into(), stats.namespace_skipped.to_string()),
    ];
    for (task, n) in &stats.instances_per_task {
        rows.push((format!("instances.{task}"), n.to_string()));
    }
    rows.push(("wall_time_seconds".into(), format!("{:.3}", stats.wall_time_seconds)));

    let width = rows
        .iter()
        .map(|(k, _)| k.len())
        .chain(stats.warnings.iter().map(|(k, _)| k.len() + 2))
        .max()
        .unwrap_or(0)
        .max("counter".len());
    let mut out = String::new();
    let _ = writeln!(out, "{:<width$}  value", "counter");
    for (k, v) in &rows {
        let _ = writeln!(out, "{k:<width$}  {v:>}");
    }
    let _ = writeln!(out, "warnings ({})", stats.warnings.total());
    for (reason, n) in stats.warnings.iter() {
        let _ = writeln!(out, "  {reason:<w$}  {n}", w = width - 2);
    }
    out
}
